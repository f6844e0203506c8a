#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"

using namespace esos;
using namespace esos::testing;
using esos::detail::drop_last;
using esos::detail::omit;
using esos::detail::prepend;
using esos::detail::ratio_spread;

namespace {

struct setup {
    model_instance m;
    complex l0;
    std::vector<complex> p;
};

// A generic model with a spectral point and an extra argument λ0 clear of every
// bracket the coefficients divide by.
setup draw_setup(const elliptic_context &ctx, int L, std::string_view label, std::uint64_t seed = 42)
{
    sampler s(seed, label, std::uint64_t(L));
    return s.generic([&](sampler &g) {
        model_instance m = draw_model(g, ctx, L);
        std::vector<complex> full = g.draw(L + 1);
        check_spectral_point(m, std::span<const complex>(full).subspan(1), default_draw_margin);
        for (int i = 1; i <= L; ++i) {
            esos::detail::require_generic(ctx, full[i] - full[0], "[lambda_i-lambda_0]", default_draw_margin);
            esos::detail::require_generic(ctx, full[i] + full[0] + m.gamma, "[lambda_i+lambda_0+gamma]",
                                          default_draw_margin);
        }
        const complex l0 = full[0];
        full.erase(full.begin());
        return setup{m, l0, full};
    });
}

z_function algebraic(const model_instance &m)
{
    return [&m](std::span<const complex> x) { return z_algebraic(m, x); };
}

} // namespace

TEST(Funceq, EquationHoldsForOperatorRoute)
{
    for (const auto *ctx : {&tau2i(), &trig()}) {
        for (int L = 1; L <= 4; ++L) {
            const setup s = draw_setup(*ctx, L, "fe");
            const fe_result r = fe_residual(s.m, s.l0, s.p, algebraic(s.m));
            EXPECT_LT(r.residual / r.scale, 1e-9L) << "L=" << L;
        }
    }
}

TEST(Funceq, PerturbedEvaluationBreaksEquation)
{
    for (int L = 1; L <= 3; ++L) {
        const setup s = draw_setup(tau2i(), L, "fe/perturbed");
        int calls = 0;
        const z_function z = [&](std::span<const complex> x) {
            const complex v = z_algebraic(s.m, x);
            return calls++ == 0 ? 1.01L * v : v;
        };
        const fe_result r = fe_residual(s.m, s.l0, s.p, z);
        EXPECT_GT(r.residual / r.scale, 1e-4L) << "L=" << L;
    }
}

TEST(Funceq, SingleSiteClosedFormSolves)
{
    for (const auto *ctx : {&tau2i(), &trig()}) {
        for (int draw = 0; draw < 5; ++draw) {
            const setup s = draw_setup(*ctx, 1, "fe/closed", 42 + std::uint64_t(draw));
            const model_instance &m = s.m;
            const z_function z = [&](std::span<const complex> x) {
                return m.f(2.0L * x[0]) / m.f(m.theta + m.zeta + x[0]);
            };
            const fe_result r = fe_residual(m, s.l0, s.p, z);
            EXPECT_LT(r.residual / r.scale, 1e-11L);
        }
    }
}

TEST(Funceq, SwappedDeterminantVanishes)
{
    const setup one = draw_setup(tau2i(), 1, "det");
    const determinant_result d1 = swapped_matrix_det(one.m, one.l0, one.p);
    EXPECT_LT(std::abs(d1.det) / d1.scale, 1e-10L);

    for (const auto *ctx : {&tau2i(), &trig()}) {
        for (int L = 2; L <= 4; ++L) {
            const setup s = draw_setup(*ctx, L, "det");
            const determinant_result d = swapped_matrix_det(s.m, s.l0, s.p);
            EXPECT_LT(std::abs(d.det) / d.scale, 1e-8L) << "L=" << L;
        }
    }
}

TEST(Funceq, PerturbedEntryGivesNonzeroDeterminant)
{
    for (int L = 1; L <= 3; ++L) {
        const setup s = draw_setup(tau2i(), L, "det/perturbed");
        matrix S = swapped_matrix(s.m, s.l0, s.p);
        S(0, 0) *= 1.01L;
        const determinant_result d = matrix_determinant(S);
        EXPECT_GT(std::abs(d.det) / d.scale, 1e-5L) << "L=" << L;
    }
}

TEST(Funceq, SwappedRowsAreSwappedEquations)
{
    const setup s = draw_setup(tau2i(), 3, "swapped");
    const matrix S = swapped_matrix(s.m, s.l0, s.p);
    const std::vector<complex> full = prepend(s.l0, s.p);
    for (int rho = 0; rho <= 3; ++rho) {
        const std::vector<complex> M = coefficients(s.m, full[rho], omit(full, rho));
        EXPECT_EQ(S(rho, rho), M[0]);
        for (int nu = 0; nu <= 3; ++nu) {
            if (nu != rho) {
                EXPECT_EQ(S(rho, nu), M[nu < rho ? nu + 1 : nu]);
            }
        }
    }
}

TEST(Funceq, SpecialZeroScanOperatorRoute)
{
    for (const auto *ctx : {&tau2i(), &trig()}) {
        const model_instance m = model(*ctx, 2, "zeros/fe");
        for (const real r : special_zero_scan(m, algebraic(m), 1, {})) {
            EXPECT_LT(r, 1e-9L);
        }
    }
}

TEST(Funceq, SpecialZeroScanSymmetrizedRoute)
{
    const model_instance m = model(tau2i(), 3, "zeros/fe");
    const std::vector<complex> others = point(m, "zeros/fe/others", 1);
    const z_function z = [&](std::span<const complex> x) { return z_symmetrized(m, x, sum_variant::main); };
    for (const real r : special_zero_scan(m, z, 3, others)) {
        EXPECT_LT(r, 1e-9L);
    }
}

TEST(Funceq, SpecialZeroScanRejectsConstant)
{
    const model_instance m = model(tau2i(), 2, "zeros/fe");
    const z_function one = [](std::span<const complex>) { return complex(1.0L); };
    for (const real r : special_zero_scan(m, one, 1, {})) {
        EXPECT_NEAR(double(r), 1.0, 1e-15);
    }
    EXPECT_THROW(special_zero_scan(model(tau2i(), 1, "zeros/fe"), one, 1, {}), std::invalid_argument);
}

TEST(Funceq, MZeroAtShiftedInhomogeneity)
{
    for (const auto *ctx : {&tau2i(), &trig()}) {
        const setup s = draw_setup(*ctx, 3, "m0");
        for (const complex &u : s.m.mu) {
            const complex M0 = coefficients(s.m, u - s.m.gamma, s.p)[0];
            EXPECT_LT(rel(M0, lambda_bar_A_cal(s.m, u - s.m.gamma)), 1e-12L);
        }
    }
}

TEST(Funceq, CoefficientTranspositionAndCrossing)
{
    for (const auto *ctx : {&tau2i(), &trig()}) {
        const setup s = draw_setup(*ctx, 3, "symmetry");
        const std::vector<complex> M = coefficients(s.m, s.l0, s.p);

        std::vector<complex> t = s.p;
        std::swap(t[0], t[1]);
        const std::vector<complex> Mt = coefficients(s.m, s.l0, t);
        EXPECT_LT(rel(Mt[0], M[0]), 1e-14L);
        EXPECT_LT(rel(Mt[1], M[2]), 1e-14L);
        EXPECT_LT(rel(Mt[2], M[1]), 1e-14L);
        EXPECT_LT(rel(Mt[3], M[3]), 1e-14L);

        for (int i = 0; i < 3; ++i) {
            std::vector<complex> q = s.p;
            q[i] = -q[i] - s.m.gamma;
            const std::vector<complex> Mc = coefficients(s.m, s.l0, q);
            EXPECT_LT(rel(Mc[0], M[0]), 1e-11L);
            EXPECT_LT(rel(Mc[i + 1], z_crossing_factor(s.m, s.p[i]) * M[i + 1]), 1e-11L);
        }
    }
}

TEST(Funceq, ResiduesCancelInPairs)
{
    const setup s = draw_setup(tau2i(), 2, "residue");
    const model_instance &m = s.m;
    for (int i = 0; i < 2; ++i) {
        const complex cr = z_crossing_factor(m, s.p[i]);
        const auto at = [&](real eps, bool crossing) {
            const complex x = crossing ? -s.p[i] - m.gamma + eps : s.p[i] + eps;
            return coefficients(m, x, s.p);
        };
        for (const bool crossing : {false, true}) {
            const auto combined = [&](real eps) {
                const std::vector<complex> M = at(eps, crossing);
                return std::abs(crossing ? M[0] + cr * M[i + 1] : M[0] + M[i + 1]);
            };
            const real ref = combined(1e-3L);
            EXPECT_LT(combined(1e-4L), 10.0L * ref);
            EXPECT_LT(combined(1e-5L), 10.0L * ref);
            // Each coefficient on its own has the pole.
            const real r = std::abs(at(1e-5L, crossing)[0]) / std::abs(at(1e-3L, crossing)[0]);
            EXPECT_GT(r, 50.0L);
        }
    }
}

TEST(Funceq, CoefficientsFiniteAndNonzero)
{
    for (int draw = 0; draw < 50; ++draw) {
        const setup s = draw_setup(tau2i(), 2, "finite", std::uint64_t(draw));
        for (const complex &x : coefficients(s.m, s.l0, s.p)) {
            EXPECT_TRUE(std::isfinite(std::abs(x)));
            EXPECT_GT(std::abs(x), 0.0L);
        }
    }
}

TEST(Funceq, NormalizedCoefficientsOrderAndNorm)
{
    for (int L = 1; L <= 3; ++L) {
        const setup s = draw_setup(tau2i(), L, "normalized");
        for (int nu = 0; nu <= L; ++nu) {
            const auto F = [&](complex x) { return normalized_coefficients(s.m, x, s.p)[nu]; };
            const int N = nu == 0 ? 4 * L + 6 : 2 * L + 4;
            const complex t = (nu == 0 ? real(L + 2) : 3.0L) * s.m.gamma - s.m.theta;
            const auto r = classify_order_norm(tau2i(), F, N, t);
            EXPECT_LT(r.res_pi, 1e-8L) << "L=" << L << " nu=" << nu;
            EXPECT_LT(r.res_pi_tau, 1e-8L) << "L=" << L << " nu=" << nu;
        }
    }
}

TEST(Funceq, StarChoicesAreProportional)
{
    for (const auto *ctx : {&tau2i(), &trig()}) {
        for (int L = 2; L <= 4; ++L) {
            setup s = draw_setup(*ctx, L, "star");
            s.p.pop_back();
            EXPECT_LT(ratio_spread(reduced_coefficients(s.m, s.l0, s.p, star_choice::minus),
                                   reduced_coefficients(s.m, s.l0, s.p, star_choice::plus)),
                      1e-10L)
                << "L=" << L;
        }
    }
}

TEST(Funceq, ReducedEquationHolds)
{
    for (int L = 2; L <= 4; ++L) {
        setup s = draw_setup(tau2i(), L, "reduced");
        s.p.pop_back();
        const model_instance sub = drop_last(s.m);
        const std::vector<complex> Mt = reduced_coefficients(s.m, s.l0, s.p, star_choice::minus);
        const std::vector<complex> full = prepend(s.l0, s.p);
        compensated_sum sum;
        real scale = 0.0L;
        for (int nu = 0; nu < L; ++nu) {
            const complex term = Mt[nu] * z_algebraic(sub, omit(full, nu));
            sum.add(term);
            scale = std::max(scale, std::abs(term));
        }
        EXPECT_LT(std::abs(sum.value()) / scale, 1e-8L) << "L=" << L;
    }
}

TEST(Funceq, ReducedCoefficientsAtTwoSitesMatchSingleSite)
{
    setup s = draw_setup(tau2i(), 2, "reduced/single");
    s.p.pop_back();
    EXPECT_LT(ratio_spread(reduced_coefficients(s.m, s.l0, s.p, star_choice::minus),
                           coefficients(drop_last(s.m), s.l0, s.p)),
              1e-10L);
    EXPECT_THROW(reduced_coefficients(s.m, s.l0, {}, star_choice::minus), std::invalid_argument);
}

TEST(Funceq, ModifiedMatrixIsSingular)
{
    for (int L = 2; L <= 4; ++L) {
        setup s = draw_setup(tau2i(), L, "modified");
        s.p.pop_back();
        const determinant_result d = matrix_determinant(modified_swapped_matrix(s.m, s.l0, s.p, star_choice::minus));
        EXPECT_LT(std::abs(d.det) / d.scale, 1e-10L) << "L=" << L;
    }
}

TEST(Funceq, SpecialZeroMatrixIsRegular)
{
    for (int L = 2; L <= 4; ++L) {
        const setup s = draw_setup(tau2i(), L, "special_matrix");
        const std::vector<complex> others(s.p.begin(), s.p.end() - 2);
        for (int k = 1; k <= L; ++k) {
            for (const auto &pair : special_zero_pairs(s.m, k)) {
                const determinant_result d = matrix_determinant(special_zero_matrix(s.m, s.l0, others, pair));
                EXPECT_GT(std::abs(d.det) / d.scale, 1e-8L) << "L=" << L << " k=" << k;
            }
        }
    }
}

TEST(Funceq, FactorizationConstantMatchesMeasuredRatio)
{
    for (const auto *ctx : {&tau2i(), &trig()}) {
        for (int L = 2; L <= 4; ++L) {
            setup s = draw_setup(*ctx, L, "factorization");
            s.p.pop_back();
            const model_instance &m = s.m;
            std::vector<complex> q = s.p;
            q.push_back(m.mu.back() - m.gamma);
            complex pr = 1.0L;
            for (const complex &x : s.p) {
                pr *= m.f(x - m.mu.back()) * m.f(x + m.mu.back() + m.gamma);
            }
            EXPECT_LT(rel(z_algebraic(m, q) / (z_algebraic(drop_last(m), s.p) * pr), factorization_constant(m)),
                      1e-10L)
                << "L=" << L;
        }
    }
}

TEST(Funceq, ReconstructLast)
{
    for (const auto *ctx : {&tau2i(), &trig()}) {
        const setup two = draw_setup(*ctx, 2, "last");
        EXPECT_LT(rel(reconstruct_last(two.m, two.p), z_algebraic(two.m, two.p)), 1e-9L);
        const setup three = draw_setup(*ctx, 3, "last");
        EXPECT_LT(rel(reconstruct_last(three.m, three.p), z_algebraic(three.m, three.p)), 1e-8L);
    }
}

TEST(Funceq, ReconstructFirstAfterCalibration)
{
    for (const auto *ctx : {&tau2i(), &trig()}) {
        const setup s = draw_setup(*ctx, 2, "first");
        const complex k = first_route_constant(s.m, s.p);
        for (int t = 0; t < 5; ++t) {
            const std::vector<complex> p = point(s.m, "first/others", -1, 100 + std::uint64_t(t));
            EXPECT_LT(rel(reconstruct_first(s.m, p, k), z_algebraic(s.m, p)), 1e-9L);
            EXPECT_LT(rel(reconstruct_first(s.m, p, k), reconstruct_last(s.m, p)), 1e-9L);
        }
        EXPECT_THROW(reconstruct_last(model(*ctx, 1, "first"), std::vector<complex>{0.3L}), std::invalid_argument);
    }
}

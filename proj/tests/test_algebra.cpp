#include <gtest/gtest.h>

#include "support.hpp"

using namespace esos;
using namespace esos::testing;

TEST(Algebra, RelationsHoldAtSmallSizes)
{
    for (const auto &ctx : {tau2i(), trig()}) {
        for (int L = 1; L <= 2; ++L) {
            const model_instance m = model(ctx, L, "algebra/relations");
            const auto l = point(m, "algebra/relations/args", 2);
            relation_args a{l[0], l[1], point(m, "algebra/relations/many", L + 1)};
            for (const algebra_relation r : all_algebra_relations) {
                EXPECT_LT(algebra_relation_residual(m, r, a), 1e-10L) << to_string(r) << " L=" << L;
            }
        }
    }
}

TEST(Algebra, DybaNearCoincidentArguments)
{
    const model_instance m = model(tau2i(), 2, "algebra/dyba-near");
    const complex l2(0.41L, -0.13L);
    relation_args a{l2 + 1e-3L, l2, {}};
    EXPECT_LT(algebra_relation_residual(m, algebra_relation::dyba, a), 1e-8L);
}

TEST(Algebra, DoubleRowBlocksCarryDeclaredWeights)
{
    const model_instance m = model(tau2i(), 3, "algebra/weights");
    const complex l(0.37L, 0.11L);
    const lattice_operator dr = build_double_row(m, l);
    EXPECT_LT(weight_residual(dr), 1e-12L);
    for (const block b : {block::A, block::B, block::C, block::D}) {
        EXPECT_LT(weight_residual(extract_block(dr, b)), 1e-12L);
    }
    const lattice_operator dt = d_tilde(m, l);
    EXPECT_EQ(dt.weight, 0);
    EXPECT_LT(weight_residual(dt), 1e-12L);
    // B lowers the total weight: its declared weight is -2 and a wrong declaration is caught.
    lattice_operator wrong = extract_block(dr, block::B);
    wrong.weight = 2;
    EXPECT_GT(weight_residual(wrong), 1.0L);
}

TEST(Algebra, MonodromyUnitarityAndCrossing)
{
    for (int L = 1; L <= 4; ++L) {
        const model_instance m = model(tau2i(), L, "algebra/monodromy");
        const complex l(0.29L, 0.07L);
        EXPECT_LT(monodromy_unitarity_residual(m, l), 1e-11L) << L;
        EXPECT_LT(monodromy_crossing_residual(m, l), 1e-11L) << L;
    }
}

TEST(Algebra, VacuumEigenvaluesMatchClosedForms)
{
    for (const auto &ctx : {tau2i(), trig()}) {
        for (int L = 1; L <= 4; ++L) {
            const model_instance m = model(ctx, L, "algebra/vacuum");
            const complex l = point(m, "algebra/vacuum/l", 1)[0];
            const auto op = vacuum_eigenvalues_operator(m, l);
            const auto cf = vacuum_eigenvalues_closed(m, l);
            const std::array<std::pair<complex, complex>, 11> pairs{{
                {op.values.A_cal, cf.A_cal},
                {op.values.D_tilde, cf.D_tilde},
                {op.values.bar_A_cal, cf.bar_A_cal},
                {op.values.right_A, cf.right_A},
                {op.values.right_D, cf.right_D},
                {op.values.right_A_bar, cf.right_A_bar},
                {op.values.right_D_bar, cf.right_D_bar},
                {op.values.left_A, cf.left_A},
                {op.values.left_D, cf.left_D},
                {op.values.left_A_bar, cf.left_A_bar},
                {op.values.left_D_bar, cf.left_D_bar},
            }};
            for (std::size_t k = 0; k < pairs.size(); ++k) {
                EXPECT_LT(rel(pairs[k].first, pairs[k].second), 1e-10L) << "eigenvalue " << k << " L=" << L;
            }
            EXPECT_LT(op.eigenvector_residual, 1e-11L);
            EXPECT_LT(op.annihilation_residual, 1e-13L);
        }
    }
}

TEST(Algebra, EigenvalueCrossingRelation)
{
    const model_instance m = model(tau2i(), 3, "algebra/eigen-crossing");
    const complex l(0.33L, -0.09L), g = m.gamma, th = m.theta, z = m.zeta;
    const real L = m.size();
    const complex factor = m.f(2.0L * l + g) * m.f(th + z + l) * m.f(th - (L - 1.0L) * g) /
                           (m.f(2.0L * l) * m.f(th + z - l - g) * m.f(th - L * g));
    EXPECT_LT(rel(lambda_A_cal(m, -l - g), factor * lambda_D_tilde(m, l)), 1e-11L);
}

TEST(Algebra, SingleSitePartitionFunctionByHand)
{
    // ⟨−|A k₊ B̄ + B k₋ D̄|+⟩ with T = R(λ−μ), T̄ = R(λ+μ) on one site.
    for (const auto &ctx : {tau2i(), trig()}) {
        const model_instance m = model(ctx, 1, "algebra/hand");
        const complex l(0.46L, 0.12L), u = m.mu[0];
        const face_weights wm = make_face_weights(ctx, m.gamma, l - u, m.theta);
        const face_weights wp = make_face_weights(ctx, m.gamma, l + u, m.theta);
        const k_matrix_entries k = k_matrix(ctx, m.zeta, l, m.theta);
        const complex hand = wm.b_plus * k.k_plus * wp.c_minus + wm.c_plus * k.k_minus * wp.b_plus;
        const std::vector<complex> p{l};
        EXPECT_LT(rel(z_algebraic(m, p), hand), 1e-14L);
    }
}

TEST(Algebra, ModelRejectsDegenerateParameters)
{
    const complex g(0.37L, 0.08L), z(0.8L, -0.1L);
    EXPECT_THROW(make_model(tau2i(), g, z, -g, {complex(0.2L, 0.1L)}), degenerate_parameter);
    EXPECT_THROW(make_model(tau2i(), g, z, {0.5L, 0.2L}, {complex(0.2L, 0.1L), complex(0.2L, 0.1L)}), degenerate_parameter);
    EXPECT_THROW(make_model(tau2i(), g, z, {0.5L, 0.2L}, {}), std::invalid_argument);
    try {
        make_model(tau2i(), g, z, {0.5L, 0.2L}, {z});
        FAIL() << "expected a degenerate parameter";
    } catch (const degenerate_parameter &e) {
        EXPECT_EQ(e.guard(), "[zeta-mu_1]");
    }
}

TEST(Algebra, ModelRejectsLargeNome)
{
    const auto ctx = elliptic_context::elliptic({0.0L, 0.04L});
    EXPECT_THROW(make_model(ctx, {0.37L, 0.08L}, {0.8L, -0.1L}, {0.5L, 0.2L}, {complex(0.2L, 0.1L)}), invalid_context);
}

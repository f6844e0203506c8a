#include <gtest/gtest.h>

#include "support.hpp"

using namespace esos;
using namespace esos::testing;

namespace {

local_params draw_params(sampler &s)
{
    local_params p;
    p.gamma = s.draw();
    p.lambda1 = s.draw();
    p.lambda2 = s.draw();
    p.lambda3 = s.draw();
    p.theta = s.draw();
    p.zeta = s.draw();
    return p;
}

matrix h_total()
{
    matrix H = matrix::Zero(4, 4);
    H(0, 0) = 2.0L;
    H(3, 3) = -2.0L;
    return H;
}

matrix h_difference()
{
    // −h⊗1 + 1⊗h on (++, +−, −+, −−)
    matrix H = matrix::Zero(4, 4);
    H(1, 1) = -2.0L;
    H(2, 2) = 2.0L;
    return H;
}

} // namespace

TEST(Weights, RAtZeroIsScaledPermutation)
{
    const complex g(0.37L, 0.08L), th(0.52L, 0.21L);
    for (const auto &ctx : {tau2i(), trig()}) {
        const matrix4 R = r_matrix(ctx, g, 0.0L, th);
        const matrix4 expected = eval_f(ctx, g) * permutation_matrix();
        EXPECT_LT((R - expected).cwiseAbs().maxCoeff() / std::abs(eval_f(ctx, g)), 1e-15L);
    }
}

TEST(Weights, UnitarityAtZero)
{
    local_params p{{0.37L, 0.08L}, 0.0L, 0.0L, 0.0L, {0.52L, 0.21L}, {0.8L, -0.1L}};
    EXPECT_LT(local_identity_residual(tau2i(), local_identity::unitarity, p), 1e-13L);
}

TEST(Weights, IceRule)
{
    sampler s(1, "weights/ice");
    for (int k = 0; k < 20; ++k) {
        const local_params p = draw_params(s);
        const matrix R = r_matrix(tau2i(), p.gamma, p.lambda1, p.theta);
        const matrix H = h_total();
        EXPECT_LT((H * R - R * H).cwiseAbs().maxCoeff() / R.cwiseAbs().maxCoeff(), 1e-14L);
        const matrix Rt = partial_transpose_leading(R);
        const matrix Hd = h_difference();
        EXPECT_LT((Hd * Rt - Rt * Hd).cwiseAbs().maxCoeff() / R.cwiseAbs().maxCoeff(), 1e-14L);
    }
}

TEST(Weights, LocalIdentitiesHoldOnRandomDraws)
{
    for (const auto &ctx : {tau2i(), trig()}) {
        sampler s(2, ctx.is_trigonometric() ? "weights/local/trig" : "weights/local/tau2i");
        for (int k = 0; k < 20; ++k) {
            const local_params p = s.generic([&](sampler &g) {
                local_params q = draw_params(g);
                detail::require_generic(ctx, q.theta, "[theta]", default_draw_margin);
                detail::require_generic(ctx, q.theta + q.zeta + q.lambda1, "[theta+zeta+lambda_1]", default_draw_margin);
                detail::require_generic(ctx, q.theta + q.zeta + q.lambda2, "[theta+zeta+lambda_2]", default_draw_margin);
                return q;
            });
            EXPECT_LT(local_identity_residual(ctx, local_identity::dybe, p), 1e-11L);
            EXPECT_LT(local_identity_residual(ctx, local_identity::unitarity, p), 1e-11L);
            EXPECT_LT(local_identity_residual(ctx, local_identity::crossing, p), 1e-11L);
            EXPECT_LT(local_identity_residual(ctx, local_identity::reflection, p), 1e-11L);
        }
    }
}

TEST(Weights, UnitarityScalarDoesNotDependOnTheta)
{
    const auto &ctx = tau2i();
    const complex g(0.37L, 0.08L), l(0.41L, -0.13L);
    const auto scalar = [&](complex th) {
        const matrix4 R21 = permutation_matrix() * r_matrix(ctx, g, -l, th) * permutation_matrix();
        const matrix4 prod = R21 * r_matrix(ctx, g, l, th);
        return prod(1, 1);
    };
    const complex a = scalar({0.52L, 0.21L});
    const complex b = scalar({0.83L, -0.17L});
    EXPECT_LT(std::abs(a - b) / std::abs(a), 1e-12L);
}

TEST(Weights, FaceWeightsRejectDegenerateTheta)
{
    EXPECT_THROW(make_face_weights(tau2i(), {0.3L, 0.1L}, {0.2L, 0.0L}, 0.0L), degenerate_parameter);
    EXPECT_THROW(k_matrix(tau2i(), {0.3L, 0.1L}, {-0.5L, 0.0L}, {0.2L, -0.1L}), degenerate_parameter);
}

TEST(Weights, KMatrixIsDiagonalAndTheta)
{
    const auto K = k_matrix(tau2i(), {0.8L, -0.1L}, {0.3L, 0.2L}, {0.52L, 0.21L}).as_matrix();
    EXPECT_EQ(K(0, 1), complex(0.0L));
    EXPECT_EQ(K(1, 0), complex(0.0L));
    EXPECT_EQ(K(1, 1), eval_f(tau2i(), complex(0.8L, -0.1L) - complex(0.3L, 0.2L)));
}

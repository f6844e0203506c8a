#pragma once

// Dynamical R-matrix and diagonal K-matrix of the elliptic SOS model, plus
// residual evaluators for the local identities they satisfy.

#include <array>
#include <string>

#include <esos/lattice.hpp>
#include <esos/theta.hpp>

namespace esos {

struct face_weights {
    complex a_plus, a_minus;
    complex b_plus, b_minus;
    complex c_plus, c_minus;
};

inline face_weights make_face_weights(const elliptic_context &ctx, complex gamma, complex lambda, complex theta)
{
    const complex ft = guarded_f(ctx, theta, "[theta]");
    const complex a = eval_f(ctx, lambda + gamma);
    const complex fl = eval_f(ctx, lambda);
    const complex fg = eval_f(ctx, gamma);
    return {
        a,
        a,
        fl * eval_f(ctx, theta - gamma) / ft,
        fl * eval_f(ctx, theta + gamma) / ft,
        eval_f(ctx, theta - lambda) * fg / ft,
        eval_f(ctx, theta + lambda) * fg / ft,
    };
}

// Basis (++, +-, -+, --); rows are outputs.
inline matrix4 r_matrix(const elliptic_context &ctx, complex gamma, complex lambda, complex theta)
{
    const face_weights w = make_face_weights(ctx, gamma, lambda, theta);
    matrix4 R = matrix4::Zero();
    R(0, 0) = w.a_plus;
    R(1, 1) = w.b_plus;
    R(1, 2) = w.c_plus;
    R(2, 1) = w.c_minus;
    R(2, 2) = w.b_minus;
    R(3, 3) = w.a_minus;
    return R;
}

struct k_matrix_entries {
    complex k_plus;
    complex k_minus;

    matrix2 as_matrix() const
    {
        matrix2 K = matrix2::Zero();
        K(0, 0) = k_plus;
        K(1, 1) = k_minus;
        return K;
    }
};

inline k_matrix_entries k_matrix(const elliptic_context &ctx, complex zeta, complex lambda, complex theta)
{
    const complex den = guarded_f(ctx, theta + zeta + lambda, "[theta+zeta+lambda]");
    return {eval_f(ctx, zeta + lambda) * eval_f(ctx, theta + zeta - lambda) / den, eval_f(ctx, zeta - lambda)};
}

inline matrix4 permutation_matrix()
{
    matrix4 P = matrix4::Zero();
    P(0, 0) = 1.0L;
    P(1, 2) = 1.0L;
    P(2, 1) = 1.0L;
    P(3, 3) = 1.0L;
    return P;
}

inline matrix2 sigma_y()
{
    matrix2 s;
    s << complex(0.0L, 0.0L), complex(0.0L, -1.0L), complex(0.0L, 1.0L), complex(0.0L, 0.0L);
    return s;
}

enum class local_identity { dybe, unitarity, crossing, reflection };

inline const char *to_string(local_identity kind)
{
    switch (kind) {
    case local_identity::dybe:
        return "dybe";
    case local_identity::unitarity:
        return "unitarity";
    case local_identity::crossing:
        return "crossing";
    case local_identity::reflection:
        return "reflection";
    }
    return "?";
}

// DYBE reads lambda1..3 and theta; UNITARITY and CROSSING read lambda1 and theta;
// REFLECTION reads lambda1, lambda2, theta and zeta.
struct local_params {
    complex gamma;
    complex lambda1;
    complex lambda2;
    complex lambda3;
    complex theta;
    complex zeta;
};

namespace detail {

inline matrix identity(int legs)
{
    return matrix::Identity(Eigen::Index(basis_dim(legs)), Eigen::Index(basis_dim(legs)));
}

// Left-multiplies X by R_{la lb}(λ, θ − γ Σ_{shift} h).
inline void apply_r(const elliptic_context &ctx, complex gamma, matrix &X, int legs, int la, int lb, complex lambda,
                    complex theta, std::span<const int> shift)
{
    apply_two_leg(X, legs, la, lb, shift, [&](int k) { return r_matrix(ctx, gamma, lambda, theta - gamma * real(k)); });
}

inline real dybe_residual(const elliptic_context &ctx, const local_params &p)
{
    const complex g = p.gamma, th = p.theta;
    const complex l12 = p.lambda1 - p.lambda2, l13 = p.lambda1 - p.lambda3, l23 = p.lambda2 - p.lambda3;
    const std::array<int, 1> leg0{0}, leg1{1}, leg2{2};
    // R12(λ12, θ−γh3) R13(λ13, θ) R23(λ23, θ−γh1) = R23(λ23, θ) R13(λ13, θ−γh2) R12(λ12, θ)
    matrix lhs = identity(3);
    apply_r(ctx, g, lhs, 3, 1, 2, l23, th, leg0);
    apply_r(ctx, g, lhs, 3, 0, 2, l13, th, {});
    apply_r(ctx, g, lhs, 3, 0, 1, l12, th, leg2);
    matrix rhs = identity(3);
    apply_r(ctx, g, rhs, 3, 0, 1, l12, th, {});
    apply_r(ctx, g, rhs, 3, 0, 2, l13, th, leg1);
    apply_r(ctx, g, rhs, 3, 1, 2, l23, th, {});
    return relative_residual(lhs, rhs);
}

inline real unitarity_residual(const elliptic_context &ctx, const local_params &p)
{
    const complex g = p.gamma, l = p.lambda1;
    matrix lhs = identity(2);
    apply_r(ctx, g, lhs, 2, 1, 0, -l, p.theta, {});
    apply_r(ctx, g, lhs, 2, 0, 1, l, p.theta, {});
    const matrix rhs = eval_f(ctx, g + l) * eval_f(ctx, g - l) * identity(2);
    return relative_residual(lhs, rhs);
}

// −σʸ₁ :R^{t1}(−λ−γ, θ+γh₁): σʸ₁ · f(θ−γh₂)/f(θ) = R₂₁(λ, θ), where the shift
// inside the colons is read on the output state of the transposed matrix.
inline real crossing_residual(const elliptic_context &ctx, const local_params &p)
{
    const complex g = p.gamma, th = p.theta, l = p.lambda1;
    const complex ft = guarded_f(ctx, th, "[theta]");
    matrix t_plus = r_matrix(ctx, g, -l - g, th + g);
    matrix t_minus = r_matrix(ctx, g, -l - g, th - g);
    t_plus = partial_transpose_leading(t_plus);
    t_minus = partial_transpose_leading(t_minus);
    matrix M(4, 4);
    M.topRows(2) = t_plus.topRows(2);
    M.bottomRows(2) = t_minus.bottomRows(2);

    matrix sy1 = identity(2);
    const std::array<int, 0> none{};
    apply_one_leg(sy1, 2, 0, none, [](int) { return sigma_y(); });
    matrix dg = identity(2);
    const std::array<int, 1> leg1{1};
    apply_weight_diagonal(dg, 2, leg1, [&](int k) { return eval_f(ctx, th - g * real(k)) / ft; });

    const matrix lhs = -(sy1 * M * sy1 * dg);
    matrix rhs = identity(2);
    apply_r(ctx, g, rhs, 2, 1, 0, l, th, {});
    return relative_residual(lhs, rhs);
}

inline real reflection_residual(const elliptic_context &ctx, const local_params &p)
{
    const complex g = p.gamma, th = p.theta, l1 = p.lambda1, l2 = p.lambda2;
    const std::array<int, 0> none{};
    const auto K = [&](complex l) { return k_matrix(ctx, p.zeta, l, th).as_matrix(); };
    // R12(λ1−λ2) K1(λ1) R21(λ1+λ2) K2(λ2) = K2(λ2) R12(λ1+λ2) K1(λ1) R21(λ1−λ2)
    matrix lhs = identity(2);
    apply_one_leg(lhs, 2, 1, none, [&](int) { return K(l2); });
    apply_r(ctx, g, lhs, 2, 1, 0, l1 + l2, th, none);
    apply_one_leg(lhs, 2, 0, none, [&](int) { return K(l1); });
    apply_r(ctx, g, lhs, 2, 0, 1, l1 - l2, th, none);
    matrix rhs = identity(2);
    apply_r(ctx, g, rhs, 2, 1, 0, l1 - l2, th, none);
    apply_one_leg(rhs, 2, 0, none, [&](int) { return K(l1); });
    apply_r(ctx, g, rhs, 2, 0, 1, l1 + l2, th, none);
    apply_one_leg(rhs, 2, 1, none, [&](int) { return K(l2); });
    return relative_residual(lhs, rhs);
}

} // namespace detail

inline real local_identity_residual(const elliptic_context &ctx, local_identity kind, const local_params &p)
{
    switch (kind) {
    case local_identity::dybe:
        return detail::dybe_residual(ctx, p);
    case local_identity::unitarity:
        return detail::unitarity_residual(ctx, p);
    case local_identity::crossing:
        return detail::crossing_residual(ctx, p);
    case local_identity::reflection:
        return detail::reflection_residual(ctx, p);
    }
    return 0.0L;
}

} // namespace esos

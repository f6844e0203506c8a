#pragma once

// Monodromy matrices, the double-row monodromy T K T̄, its generator blocks,
// vacuum eigenvalues and the quadratic relations of the dynamical Yang-Baxter
// and reflection algebras, all as dense operators.

#include <array>
#include <string>
#include <vector>

#include <esos/lattice.hpp>
#include <esos/model.hpp>
#include <esos/weights.hpp>

namespace esos {

enum class direction { forward, backward };

namespace detail {

// X ← T_aux(λ, θ − γΣ_{extra} h) · X   (forward)
// X ← T̄_aux(λ, θ − γΣ_{extra} h) · X  (backward)
// T  = R_{a s1}(λ−μ1, θ−γΣ_{i>1}h_{s_i}) ⋯ R_{a sL}(λ−μL, θ)
// T̄ = R_{sL a}(λ+μL, θ) ⋯ R_{s1 a}(λ+μ1, θ−γΣ_{i>1}h_{s_i})
inline void apply_monodromy(const model_instance &m, matrix &X, int legs, int aux, std::span<const int> sites,
                            complex lambda, complex theta, std::span<const int> extra, direction dir)
{
    const int L = m.size();
    std::vector<int> shift(extra.begin(), extra.end());
    std::vector<std::vector<int>> shifts(L);
    for (int j = L - 1; j >= 0; --j) {
        shifts[j] = shift;
        shift.push_back(sites[j]);
    }
    const auto gate = [&](int j) {
        if (dir == direction::forward) {
            apply_r(m.ctx, m.gamma, X, legs, aux, sites[j], lambda - m.mu[j], theta, shifts[j]);
        } else {
            apply_r(m.ctx, m.gamma, X, legs, sites[j], aux, lambda + m.mu[j], theta, shifts[j]);
        }
    };
    if (dir == direction::forward) {
        for (int j = L - 1; j >= 0; --j) {
            gate(j);
        }
    } else {
        for (int j = 0; j < L; ++j) {
            gate(j);
        }
    }
}

inline void apply_k(const model_instance &m, matrix &X, int legs, int aux, complex lambda)
{
    const matrix2 K = k_matrix(m.ctx, m.zeta, lambda, m.theta).as_matrix();
    const std::array<int, 0> none{};
    apply_one_leg(X, legs, aux, none, [&](int) { return K; });
}

// X ← T K T̄ · X on the given auxiliary leg.
inline void apply_double_row(const model_instance &m, matrix &X, int legs, int aux, std::span<const int> sites,
                             complex lambda)
{
    const std::array<int, 0> none{};
    apply_monodromy(m, X, legs, aux, sites, lambda, m.theta, none, direction::backward);
    apply_k(m, X, legs, aux, lambda);
    apply_monodromy(m, X, legs, aux, sites, lambda, m.theta, none, direction::forward);
}

inline std::vector<int> quantum_sites(const model_instance &m, int first = 1)
{
    return leg_range(first, m.size());
}

} // namespace detail

// Monodromy on V_0 ⊗ W, auxiliary leg in front.
inline lattice_operator build_monodromy(const model_instance &m, complex lambda, direction dir,
                                        complex theta_offset = 0.0L)
{
    const int legs = m.size() + 1;
    matrix X = detail::identity(legs);
    const std::vector<int> sites = detail::quantum_sites(m);
    const std::array<int, 0> none{};
    detail::apply_monodromy(m, X, legs, 0, sites, lambda, m.theta + theta_offset, none, dir);
    return {legs, std::move(X), 0};
}

inline lattice_operator build_double_row(const model_instance &m, complex lambda)
{
    const int legs = m.size() + 1;
    matrix X = detail::identity(legs);
    const std::vector<int> sites = detail::quantum_sites(m);
    detail::apply_double_row(m, X, legs, 0, sites, lambda);
    return {legs, std::move(X), 0};
}

inline int block_weight(block which)
{
    switch (which) {
    case block::B:
        return -2;
    case block::C:
        return 2;
    default:
        return 0;
    }
}

inline lattice_operator extract_block(const lattice_operator &op, block which)
{
    return {op.legs - 1, extract_block(op.entries, which), op.weight + block_weight(which)};
}

// diag over W of the D̃ coefficient f(γ) f(θ−γ(H−1)+2λ) / (f(2λ+γ) f(θ−γ(H−1))).
inline vector d_tilde_coefficients(const model_instance &m, complex lambda)
{
    const int L = m.size();
    const complex g = m.gamma, th = m.theta;
    const complex den = guarded_f(m.ctx, 2.0L * lambda + g, "[2*lambda+gamma]");
    const complex fg = eval_f(m.ctx, g);
    vector c(Eigen::Index(basis_dim(L)));
    for (std::size_t i = 0; i < basis_dim(L); ++i) {
        const real h = total_weight(i, L);
        const complex s = th - g * (h - 1.0L);
        c[Eigen::Index(i)] =
            fg * eval_f(m.ctx, s + 2.0L * lambda) / (den * guarded_f(m.ctx, s, [&] { return "[theta-gamma*(H-1)]"; }));
    }
    return c;
}

inline matrix d_tilde_from_blocks(const model_instance &m, complex lambda, const matrix &A, const matrix &D)
{
    return D - d_tilde_coefficients(m, lambda).asDiagonal() * A;
}

inline lattice_operator d_tilde(const model_instance &m, complex lambda)
{
    const matrix dr = build_double_row(m, lambda).entries;
    return {m.size(), d_tilde_from_blocks(m, lambda, extract_block(dr, block::A), extract_block(dr, block::D)), 0};
}

// ℬ(λ)·v for v ∈ W, without forming the 2^(L+1) operator.
inline vector apply_b(const model_instance &m, complex lambda, const vector &v)
{
    const int L = m.size();
    const Eigen::Index D = Eigen::Index(basis_dim(L));
    matrix x = matrix::Zero(2 * D, 1);
    x.bottomRows(D) = v;
    const std::vector<int> sites = detail::quantum_sites(m);
    detail::apply_double_row(m, x, L + 1, 0, sites, lambda);
    return x.topRows(D);
}

inline vector vacuum(int L)
{
    vector v = vector::Zero(Eigen::Index(basis_dim(L)));
    v[0] = 1.0L;
    return v;
}

inline vector dual_vacuum(int L)
{
    vector v = vector::Zero(Eigen::Index(basis_dim(L)));
    v[v.size() - 1] = 1.0L;
    return v;
}

// Double-row eigenvalues (on |0⟩ for 𝒜, 𝒟̃; on ⟨0̄| for 𝒜) and the single-row ones
// (`right_*` on |0⟩, `left_*` on ⟨0̄|) of A, D, Ā, D̄.
struct vacuum_eigenvalues {
    complex A_cal, D_tilde, bar_A_cal;
    complex right_A, right_D, right_A_bar, right_D_bar;
    complex left_A, left_D, left_A_bar, left_D_bar;
};

inline complex lambda_A_cal(const model_instance &m, complex l)
{
    const auto f = [&](complex x) { return m.f(x); };
    const complex g = m.gamma, th = m.theta, z = m.zeta;
    complex p = f(z + l) * f(th + z - l) / guarded_f(m.ctx, th + z + l, "[theta+zeta+lambda]");
    for (const complex &u : m.mu) {
        p *= f(l - u + g) * f(l + u + g);
    }
    return p;
}

inline complex lambda_D_tilde(const model_instance &m, complex l)
{
    const auto f = [&](complex x) { return m.f(x); };
    const complex g = m.gamma, th = m.theta, z = m.zeta;
    const real L = m.size();
    complex p = f(z - l - g) * f(2.0L * l) * f(th + z + l + g) * f(th - L * g) /
                (guarded_f(m.ctx, 2.0L * l + g, "[2*lambda+gamma]") * guarded_f(m.ctx, th + z + l, "[theta+zeta+lambda]") *
                 f(th - (L - 1.0L) * g));
    for (const complex &u : m.mu) {
        p *= f(l - u) * f(l + u);
    }
    return p;
}

inline complex lambda_bar_A_cal(const model_instance &m, complex l)
{
    const auto f = [&](complex x) { return m.f(x); };
    const complex g = m.gamma, th = m.theta, z = m.zeta;
    const real L = m.size();
    const complex d2 = guarded_f(m.ctx, 2.0L * l + g, "[2*lambda+gamma]");
    const complex dz = guarded_f(m.ctx, th + z + l, "[theta+zeta+lambda]");
    complex pa = 1.0L, pb = 1.0L;
    for (const complex &u : m.mu) {
        pa *= f(l - u + g) * f(l + u + g);
        pb *= f(l - u) * f(l + u);
    }
    const complex thl = f(th + (L - 1.0L) * g);
    return f(z - l) * f(g) * f(th + (L - 1.0L) * g - 2.0L * l) / (d2 * thl) * pa +
           f(z + l + g) * f(2.0L * l) * f(th + z - l - g) * f(th + L * g) / (d2 * dz * thl) * pb;
}

inline vacuum_eigenvalues vacuum_eigenvalues_closed(const model_instance &m, complex l)
{
    const auto f = [&](complex x) { return m.f(x); };
    const complex g = m.gamma, th = m.theta;
    const real L = m.size();
    complex pm = 1.0L, pmg = 1.0L, pp = 1.0L, ppg = 1.0L;
    for (const complex &u : m.mu) {
        pm *= f(l - u);
        pmg *= f(l - u + g);
        pp *= f(l + u);
        ppg *= f(l + u + g);
    }
    vacuum_eigenvalues v;
    v.A_cal = lambda_A_cal(m, l);
    v.D_tilde = lambda_D_tilde(m, l);
    v.bar_A_cal = lambda_bar_A_cal(m, l);
    v.right_A = pmg;
    v.right_A_bar = ppg;
    v.right_D = f(th + g) / f(th - (L - 1.0L) * g) * pm;
    v.right_D_bar = f(th - L * g) / f(th) * pp;
    v.left_A = f(th - g) / f(th + (L - 1.0L) * g) * pm;
    v.left_A_bar = f(th + L * g) / f(th) * pp;
    v.left_D = pmg;
    v.left_D_bar = ppg;
    return v;
}

// Eigenvalues read off the operators, and the worst eigenvector residual:
// the norm of the part of X|0⟩ (or ⟨0̄|X) orthogonal to the vacuum over its
// full norm, with the C blocks measured against the norm of their monodromy.
struct operator_vacuum_result {
    vacuum_eigenvalues values;
    real eigenvector_residual = 0.0L;
    real annihilation_residual = 0.0L;
};

inline operator_vacuum_result vacuum_eigenvalues_operator(const model_instance &m, complex l)
{
    const int L = m.size();
    const Eigen::Index D = Eigen::Index(basis_dim(L));
    operator_vacuum_result out;
    const auto right = [&](const matrix &X, complex &value) {
        const vector col = X.col(0);
        value = col[0];
        const real n = col.norm();
        out.eigenvector_residual = std::max(out.eigenvector_residual, n > 0.0L ? col.tail(D - 1).norm() / n : 0.0L);
    };
    const auto left = [&](const matrix &X, complex &value) {
        const vector row = X.row(D - 1).transpose();
        value = row[D - 1];
        const real n = row.norm();
        out.eigenvector_residual = std::max(out.eigenvector_residual, n > 0.0L ? row.head(D - 1).norm() / n : 0.0L);
    };

    const matrix dr = build_double_row(m, l).entries;
    const matrix A = extract_block(dr, block::A);
    right(A, out.values.A_cal);
    right(d_tilde_from_blocks(m, l, A, extract_block(dr, block::D)), out.values.D_tilde);
    left(A, out.values.bar_A_cal);

    const matrix t = build_monodromy(m, l, direction::forward).entries;
    const matrix tb = build_monodromy(m, l, direction::backward).entries;
    right(extract_block(t, block::A), out.values.right_A);
    right(extract_block(t, block::D), out.values.right_D);
    right(extract_block(tb, block::A), out.values.right_A_bar);
    right(extract_block(tb, block::D), out.values.right_D_bar);
    left(extract_block(t, block::A), out.values.left_A);
    left(extract_block(t, block::D), out.values.left_D);
    left(extract_block(tb, block::A), out.values.left_A_bar);
    left(extract_block(tb, block::D), out.values.left_D_bar);

    const auto annihilates = [&](const matrix &full) {
        const matrix C = extract_block(full, block::C);
        const real scale = full.cwiseAbs().maxCoeff();
        out.annihilation_residual =
            std::max({out.annihilation_residual, C.col(0).norm() / scale, C.row(D - 1).norm() / scale});
    };
    annihilates(t);
    annihilates(tb);
    return out;
}

enum class algebra_relation {
    dyba,
    dyba_bar,
    dyba_ttbar,
    drea,
    rel_bb,
    rel_ab,
    rel_db,
    rel_abb,
    cbb,
    bcc,
    b_crossing,
};

inline constexpr std::array<algebra_relation, 11> all_algebra_relations{
    algebra_relation::dyba,   algebra_relation::dyba_bar, algebra_relation::dyba_ttbar, algebra_relation::drea,
    algebra_relation::rel_bb, algebra_relation::rel_ab,   algebra_relation::rel_db,     algebra_relation::rel_abb,
    algebra_relation::cbb,    algebra_relation::bcc,      algebra_relation::b_crossing,
};

inline const char *to_string(algebra_relation r)
{
    switch (r) {
    case algebra_relation::dyba:
        return "dyba";
    case algebra_relation::dyba_bar:
        return "dyba_bar";
    case algebra_relation::dyba_ttbar:
        return "dyba_ttbar";
    case algebra_relation::drea:
        return "drea";
    case algebra_relation::rel_bb:
        return "rel_bb";
    case algebra_relation::rel_ab:
        return "rel_ab";
    case algebra_relation::rel_db:
        return "rel_db";
    case algebra_relation::rel_abb:
        return "rel_abb";
    case algebra_relation::cbb:
        return "cbb";
    case algebra_relation::bcc:
        return "bcc";
    case algebra_relation::b_crossing:
        return "b_crossing";
    }
    return "?";
}

// Spectral arguments of a relation. Most relations read lambda1 and lambda2;
// REL_ABB reads lambda1 as λ_0 and `lambdas` as λ_1..λ_n; CBB, BCC and
// B_CROSSING read lambda1 only.
struct relation_args {
    complex lambda1;
    complex lambda2;
    std::vector<complex> lambdas;
};

namespace detail {

// Operators on V_1 ⊗ V_2 ⊗ W: legs 0 and 1 auxiliary, sites from leg 2.
struct two_aux_space {
    const model_instance &m;
    int legs;
    std::vector<int> sites;

    explicit two_aux_space(const model_instance &model) : m(model), legs(model.size() + 2), sites(quantum_sites(model, 2)) {}

    matrix id() const { return identity(legs); }

    void mono(matrix &X, int aux, complex lambda, std::vector<int> extra, direction dir) const
    {
        apply_monodromy(m, X, legs, aux, sites, lambda, m.theta, extra, dir);
    }

    void r(matrix &X, int la, int lb, complex lambda, bool shift_by_h) const
    {
        const std::vector<int> none;
        apply_r(m.ctx, m.gamma, X, legs, la, lb, lambda, m.theta, shift_by_h ? std::span<const int>(sites) : none);
    }

    void double_row(matrix &X, int aux, complex lambda) const { apply_double_row(m, X, legs, aux, sites, lambda); }
};

inline real dyba_residual(const model_instance &m, complex l1, complex l2)
{
    const two_aux_space s(m);
    // R12(λ1−λ2, θ−γH) T1(λ1) T2(λ2, θ−γh1) = T2(λ2) T1(λ1, θ−γh2) R12(λ1−λ2, θ)
    matrix lhs = s.id();
    s.mono(lhs, 1, l2, {0}, direction::forward);
    s.mono(lhs, 0, l1, {}, direction::forward);
    s.r(lhs, 0, 1, l1 - l2, true);
    matrix rhs = s.id();
    s.r(rhs, 0, 1, l1 - l2, false);
    s.mono(rhs, 0, l1, {1}, direction::forward);
    s.mono(rhs, 1, l2, {}, direction::forward);
    return relative_residual(lhs, rhs);
}

inline real dyba_bar_residual(const model_instance &m, complex l1, complex l2)
{
    const two_aux_space s(m);
    // R21(λ1−λ2, θ) T̄1(λ1, θ−γh2) T̄2(λ2) = T̄2(λ2, θ−γh1) T̄1(λ1) R21(λ1−λ2, θ−γH)
    matrix lhs = s.id();
    s.mono(lhs, 1, l2, {}, direction::backward);
    s.mono(lhs, 0, l1, {1}, direction::backward);
    s.r(lhs, 1, 0, l1 - l2, false);
    matrix rhs = s.id();
    s.r(rhs, 1, 0, l1 - l2, true);
    s.mono(rhs, 0, l1, {}, direction::backward);
    s.mono(rhs, 1, l2, {0}, direction::backward);
    return relative_residual(lhs, rhs);
}

inline real dyba_ttbar_residual(const model_instance &m, complex l1, complex l2)
{
    const two_aux_space s(m);
    // T1(λ1, θ−γh2) R12(λ1+λ2, θ) T̄2(λ2, θ−γh1) = T̄2(λ2) R12(λ1+λ2, θ−γH) T1(λ1)
    matrix lhs = s.id();
    s.mono(lhs, 1, l2, {0}, direction::backward);
    s.r(lhs, 0, 1, l1 + l2, false);
    s.mono(lhs, 0, l1, {1}, direction::forward);
    matrix rhs = s.id();
    s.mono(rhs, 0, l1, {}, direction::forward);
    s.r(rhs, 0, 1, l1 + l2, true);
    s.mono(rhs, 1, l2, {}, direction::backward);
    return relative_residual(lhs, rhs);
}

inline real drea_residual(const model_instance &m, complex l1, complex l2)
{
    const two_aux_space s(m);
    // R12(λ1−λ2) 𝒯1(λ1) R21(λ1+λ2) 𝒯2(λ2) = 𝒯2(λ2) R12(λ1+λ2) 𝒯1(λ1) R21(λ1−λ2), R's at θ−γH
    matrix lhs = s.id();
    s.double_row(lhs, 1, l2);
    s.r(lhs, 1, 0, l1 + l2, true);
    s.double_row(lhs, 0, l1);
    s.r(lhs, 0, 1, l1 - l2, true);
    matrix rhs = s.id();
    s.r(rhs, 1, 0, l1 - l2, true);
    s.double_row(rhs, 0, l1);
    s.r(rhs, 0, 1, l1 + l2, true);
    s.double_row(rhs, 1, l2);
    return relative_residual(lhs, rhs);
}

// Double-row generators at one spectral parameter, on W.
struct generators {
    matrix A, B, C, D, Dt;
};

inline generators double_row_generators(const model_instance &m, complex l)
{
    const matrix dr = build_double_row(m, l).entries;
    generators g{extract_block(dr, block::A), extract_block(dr, block::B), extract_block(dr, block::C),
                 extract_block(dr, block::D), {}};
    g.Dt = d_tilde_from_blocks(m, l, g.A, g.D);
    return g;
}

// diag over W of fn(H).
template <class Fn>
vector h_diagonal(const model_instance &m, Fn &&fn)
{
    const int L = m.size();
    vector d(Eigen::Index(basis_dim(L)));
    for (std::size_t i = 0; i < basis_dim(L); ++i) {
        d[Eigen::Index(i)] = fn(real(total_weight(i, L)));
    }
    return d;
}

inline real rel_bb_residual(const model_instance &m, complex l1, complex l2)
{
    const matrix b1 = double_row_generators(m, l1).B;
    const matrix b2 = double_row_generators(m, l2).B;
    return relative_residual(b1 * b2, b2 * b1);
}

inline complex b_crossing_factor(const model_instance &m, complex l)
{
    const complex g = m.gamma, tz = m.theta + m.zeta;
    return -m.f(2.0L * l + 2.0L * g) * m.f(tz + l) /
           (guarded_f(m.ctx, 2.0L * l, "[2*lambda]") * guarded_f(m.ctx, tz - l - g, "[theta+zeta-lambda-gamma]"));
}

inline real b_crossing_residual(const model_instance &m, complex l)
{
    const matrix b = double_row_generators(m, l).B;
    const matrix bc = double_row_generators(m, -l - m.gamma).B;
    return relative_residual(bc, b_crossing_factor(m, l) * b);
}

inline real rel_ab_residual(const model_instance &m, complex l0, complex l1)
{
    const auto f = [&](complex x) { return m.f(x); };
    const complex g = m.gamma, th = m.theta;
    const generators G0 = double_row_generators(m, l0), G1 = double_row_generators(m, l1);
    const complex c1 = f(l1 - l0 + g) * f(l1 + l0) / (f(l1 - l0) * f(l1 + l0 + g));
    const vector c2 = h_diagonal(m, [&](real h) {
        return f(g) * f(2.0L * l1) * f(th - g * (h + 1.0L) + l1 - l0) /
               (f(l1 - l0) * f(2.0L * l1 + g) * f(th - g * (h + 1.0L)));
    });
    const vector c3 = h_diagonal(m, [&](real h) {
        return f(g) * f(th - g * (h + 2.0L) - l1 - l0) / (f(l1 + l0 + g) * f(th - g * (h + 2.0L)));
    });
    const matrix lhs = G0.A * G1.B;
    const matrix rhs = c1 * G1.B * G0.A - c2.asDiagonal() * (G0.B * G1.A) - c3.asDiagonal() * (G0.B * G1.Dt);
    return relative_residual(lhs, rhs);
}

inline real rel_db_residual(const model_instance &m, complex l0, complex l1)
{
    const auto f = [&](complex x) { return m.f(x); };
    const complex g = m.gamma, th = m.theta;
    const generators G0 = double_row_generators(m, l0), G1 = double_row_generators(m, l1);
    const vector c1 = h_diagonal(m, [&](real h) {
        return f(l0 - l1 + g) * f(l1 + l0 + 2.0L * g) * f(th - g * h) * f(th - g * (h + 1.0L)) /
               (f(l0 - l1) * f(l1 + l0 + g) * f(th - g * (h - 1.0L)) * f(th - g * (h + 2.0L)));
    });
    const vector c2 = h_diagonal(m, [&](real h) {
        return f(g) * f(2.0L * l0 + 2.0L * g) * f(th - g * h) * f(th - g * (h + 1.0L) + l0 - l1) /
               (f(l0 - l1) * f(2.0L * l0 + g) * f(th - g * (h - 1.0L)) * f(th - g * (h + 2.0L)));
    });
    const vector c3 = h_diagonal(m, [&](real h) {
        return f(2.0L * l0 + 2.0L * g) * f(2.0L * l1) * f(g) * f(th - g * h) * f(th - g * h + l0 + l1) /
               (f(2.0L * l0 + g) * f(2.0L * l1 + g) * f(l1 + l0 + g) * f(th - g * (h - 1.0L)) * f(th - g * (h + 1.0L)));
    });
    const matrix lhs = G0.Dt * G1.B;
    const matrix rhs =
        c1.asDiagonal() * (G1.B * G0.Dt) - c2.asDiagonal() * (G0.B * G1.Dt) + c3.asDiagonal() * (G0.B * G1.A);
    return relative_residual(lhs, rhs);
}

inline real rel_abb_residual(const model_instance &m, complex l0, const std::vector<complex> &lams)
{
    const auto f = [&](complex x) { return m.f(x); };
    const complex g = m.gamma, th = m.theta;
    const int n = int(lams.size());
    const real nb = n;
    std::vector<complex> all{l0};
    all.insert(all.end(), lams.begin(), lams.end());
    std::vector<generators> G;
    for (const complex &x : all) {
        G.push_back(double_row_generators(m, x));
    }
    const Eigen::Index D = G[0].A.rows();
    const auto prod_b = [&](int skip) {
        matrix P = matrix::Identity(D, D);
        for (int v = 0; v <= n; ++v) {
            if (v != skip) {
                P = P * G[v].B;
            }
        }
        return P;
    };

    const matrix lhs = G[0].A * prod_b(0);
    complex c0 = 1.0L;
    for (int j = 1; j <= n; ++j) {
        c0 *= f(all[j] - l0 + g) * f(all[j] + l0) / (f(all[j] - l0) * f(all[j] + l0 + g));
    }
    matrix rhs = c0 * prod_b(0) * G[0].A;
    for (int i = 1; i <= n; ++i) {
        const complex li = all[i];
        complex pa = 1.0L, pd = 1.0L;
        for (int j = 1; j <= n; ++j) {
            if (j == i) {
                continue;
            }
            const complex lj = all[j];
            pa *= f(lj - li + g) * f(lj + li) / (f(lj - li) * f(lj + li + g));
            pd *= f(li - lj + g) * f(li + lj + 2.0L * g) / (f(li - lj) * f(li + lj + g));
        }
        const vector ca = h_diagonal(m, [&](real h) {
            return pa * f(g) * f(2.0L * li) * f(th - g * (h + 1.0L) + li - l0) /
                   (f(li - l0) * f(2.0L * li + g) * f(th - g * (h + 1.0L)));
        });
        const vector cd = h_diagonal(m, [&](real h) {
            return pd * f(th - g * (h + 2.0L * nb - 1.0L)) / f(th - g * (h + 2.0L * nb)) * f(g) *
                   f(th - g * (h + 2.0L) - li - l0) / (f(li + l0 + g) * f(th - g * (h + 1.0L)));
        });
        const matrix rest = prod_b(i);
        rhs -= ca.asDiagonal() * (rest * G[i].A);
        rhs -= cd.asDiagonal() * (rest * G[i].Dt);
    }
    return relative_residual(lhs, rhs);
}

struct single_row_blocks {
    matrix A, B, C, D;
};

inline single_row_blocks single_row(const model_instance &m, complex l, direction dir, complex theta_offset)
{
    const matrix t = build_monodromy(m, l, dir, theta_offset).entries;
    return {extract_block(t, block::A), extract_block(t, block::B), extract_block(t, block::C),
            extract_block(t, block::D)};
}

inline real cbb_residual(const model_instance &m, complex l)
{
    const auto f = [&](complex x) { return m.f(x); };
    const complex g = m.gamma, th = m.theta;
    const single_row_blocks t0 = single_row(m, l, direction::forward, 0.0L);
    const single_row_blocks tp = single_row(m, l, direction::forward, g);
    const single_row_blocks b0 = single_row(m, l, direction::backward, 0.0L);
    const single_row_blocks bp = single_row(m, l, direction::backward, g);
    const vector ch = h_diagonal(m, [&](real h) { return f(th - g * (h - 1.0L) + 2.0L * l) / f(th - g * (h - 1.0L)); });
    const complex pre = f(g) / f(2.0L * l + g);
    const matrix lhs = t0.C * b0.B;
    const matrix rhs = bp.B * tp.C + pre * (ch.asDiagonal() * (bp.A * tp.A) -
                                            f(th + g + 2.0L * l) / f(th + g) * (t0.D * b0.D));
    return relative_residual(lhs, rhs);
}

inline real bcc_residual(const model_instance &m, complex l)
{
    const auto f = [&](complex x) { return m.f(x); };
    const complex g = m.gamma, th = m.theta;
    const single_row_blocks t0 = single_row(m, l, direction::forward, 0.0L);
    const single_row_blocks tm = single_row(m, l, direction::forward, -g);
    const single_row_blocks b0 = single_row(m, l, direction::backward, 0.0L);
    const single_row_blocks bm = single_row(m, l, direction::backward, -g);
    const vector ch = h_diagonal(m, [&](real h) { return f(th - g * (h + 1.0L) - 2.0L * l) / f(th - g * (h + 1.0L)); });
    const complex pre = f(g) / f(2.0L * l + g);
    const matrix lhs = t0.B * b0.C;
    const matrix rhs = bm.C * tm.B + pre * (ch.asDiagonal() * (bm.D * tm.D) -
                                            f(th - g - 2.0L * l) / f(th - g) * (t0.A * b0.A));
    return relative_residual(lhs, rhs);
}

} // namespace detail

inline real algebra_relation_residual(const model_instance &m, algebra_relation r, const relation_args &a)
{
    switch (r) {
    case algebra_relation::dyba:
        return detail::dyba_residual(m, a.lambda1, a.lambda2);
    case algebra_relation::dyba_bar:
        return detail::dyba_bar_residual(m, a.lambda1, a.lambda2);
    case algebra_relation::dyba_ttbar:
        return detail::dyba_ttbar_residual(m, a.lambda1, a.lambda2);
    case algebra_relation::drea:
        return detail::drea_residual(m, a.lambda1, a.lambda2);
    case algebra_relation::rel_bb:
        return detail::rel_bb_residual(m, a.lambda1, a.lambda2);
    case algebra_relation::rel_ab:
        return detail::rel_ab_residual(m, a.lambda1, a.lambda2);
    case algebra_relation::rel_db:
        return detail::rel_db_residual(m, a.lambda1, a.lambda2);
    case algebra_relation::rel_abb:
        return detail::rel_abb_residual(m, a.lambda1, a.lambdas);
    case algebra_relation::cbb:
        return detail::cbb_residual(m, a.lambda1);
    case algebra_relation::bcc:
        return detail::bcc_residual(m, a.lambda1);
    case algebra_relation::b_crossing:
        return detail::b_crossing_residual(m, a.lambda1);
    }
    return 0.0L;
}

// Operator-route crossing of the monodromy:
// (−1)^L σʸ₀ :T^{t0}(−λ−γ, θ+γh₀): σʸ₀ f(θ−γH)/f(θ) versus T̄₀(λ, θ).
inline real monodromy_crossing_residual(const model_instance &m, complex l)
{
    const int L = m.size();
    const int legs = L + 1;
    const Eigen::Index D = Eigen::Index(basis_dim(L));
    const complex g = m.gamma, th = m.theta;
    const matrix tp = partial_transpose_leading(build_monodromy(m, -l - g, direction::forward, g).entries);
    const matrix tm = partial_transpose_leading(build_monodromy(m, -l - g, direction::forward, -g).entries);
    matrix M(2 * D, 2 * D);
    M.topRows(D) = tp.topRows(D);
    M.bottomRows(D) = tm.bottomRows(D);

    matrix sy = detail::identity(legs);
    const std::array<int, 0> none{};
    apply_one_leg(sy, legs, 0, none, [](int) { return sigma_y(); });
    matrix dg = detail::identity(legs);
    const complex ft = guarded_f(m.ctx, th, "[theta]");
    const std::vector<int> sites = detail::quantum_sites(m);
    apply_weight_diagonal(dg, legs, sites, [&](int k) { return m.f(th - g * real(k)) / ft; });

    const real sign = (L % 2 == 0) ? 1.0L : -1.0L;
    const matrix lhs = sign * (sy * M * sy * dg);
    return relative_residual(lhs, build_monodromy(m, l, direction::backward).entries);
}

// T₀(λ) T̄₀(−λ) = ∏_j f(γ−λ+μ_j) f(γ+λ−μ_j) · Id
inline real monodromy_unitarity_residual(const model_instance &m, complex l)
{
    const matrix lhs = build_monodromy(m, l, direction::forward).entries *
                       build_monodromy(m, -l, direction::backward).entries;
    complex p = 1.0L;
    for (const complex &u : m.mu) {
        p *= m.f(m.gamma - l + u) * m.f(m.gamma + l - u);
    }
    return relative_residual(lhs, p * matrix::Identity(lhs.rows(), lhs.cols()));
}

} // namespace esos

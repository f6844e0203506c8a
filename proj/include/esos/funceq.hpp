#pragma once

// Coefficients of the linear functional equation Σ_ν M_ν(λ0; λ) Z(λ0,…,λ̂_ν,…,λ_L) = 0,
// the matrix of equations obtained by swapping λ0 with each λ_ρ, the reduction
// to length L−1 at λ0 = μ_L − γ, and the reconstruction of Z from the reduced solution.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/LU>

#include <esos/partition.hpp>

namespace esos {

using z_function = std::function<complex(std::span<const complex>)>;

namespace detail {

inline std::vector<complex> omit(std::span<const complex> v, int index)
{
    std::vector<complex> out;
    out.reserve(v.size());
    for (int i = 0; i < int(v.size()); ++i) {
        if (i != index) {
            out.push_back(v[i]);
        }
    }
    return out;
}

inline std::vector<complex> prepend(complex x, std::span<const complex> v)
{
    std::vector<complex> out{x};
    out.insert(out.end(), v.begin(), v.end());
    return out;
}

} // namespace detail

// M_0..M_L at (λ0; λ_1..λ_L), with the vacuum eigenvalues in closed form.
inline std::vector<complex> coefficients(const model_instance &m, complex l0, std::span<const complex> point)
{
    detail::require_size(m, point);
    const auto f = [&](complex x) { return m.f(x); };
    const int L = m.size();
    const complex g = m.gamma, th = m.theta;
    const complex th_p = guarded_f(m.ctx, th + real(L - 1) * g, "[theta+(L-1)*gamma]");
    const complex th_m = guarded_f(m.ctx, th - real(L) * g, "[theta-L*gamma]");

    // [λ_a − λ_b] and [λ_a + λ_b + γ] as guarded denominators.
    const auto dminus = [&](complex a, complex b, int ia, int ib) {
        return guarded_f(m.ctx, a - b, [&] { return "[" + detail::lam(ia - 1) + "-" + detail::lam(ib - 1) + "]"; });
    };
    const auto dplus = [&](complex a, complex b, int ia, int ib) {
        return guarded_f(m.ctx, a + b + g, [&] { return "[" + detail::lam(ia - 1) + "+" + detail::lam(ib - 1) + "+gamma]"; });
    };

    std::vector<complex> M(L + 1);
    complex prod0 = 1.0L;
    for (int j = 0; j < L; ++j) {
        const complex lj = point[j];
        prod0 *= f(lj - l0 + g) * f(lj + l0) / (dminus(lj, l0, j + 1, 0) * dplus(lj, l0, j + 1, 0));
    }
    M[0] = lambda_bar_A_cal(m, l0) - lambda_A_cal(m, l0) * prod0;

    for (int i = 0; i < L; ++i) {
        const complex li = point[i];
        complex pa = 1.0L, pd = 1.0L;
        for (int j = 0; j < L; ++j) {
            if (j == i) {
                continue;
            }
            const complex lj = point[j];
            pa *= f(lj - li + g) * f(lj + li) / (dminus(lj, li, j + 1, i + 1) * dplus(lj, li, j + 1, i + 1));
            pd *= f(li - lj + g) * f(li + lj + 2.0L * g) / (dminus(li, lj, i + 1, j + 1) * dplus(li, lj, i + 1, j + 1));
        }
        const complex t1 = f(2.0L * li) * f(g) * f(th + real(L - 1) * g + li - l0) /
                           (guarded_f(m.ctx, 2.0L * li + g, [&] { return "[2*" + detail::lam(i) + "+gamma]"; }) *
                            dminus(li, l0, i + 1, 0) * th_p) *
                           lambda_A_cal(m, li) * pa;
        const complex t2 = f(g) * f(th + real(L - 2) * g - li - l0) * f(th - real(L - 1) * g) /
                           (dplus(li, l0, i + 1, 0) * th_p * th_m) * lambda_D_tilde(m, li) * pd;
        M[i + 1] = t1 + t2;
    }
    return M;
}

struct fe_result {
    real residual;
    real scale;
};

inline fe_result fe_residual(const model_instance &m, complex l0, std::span<const complex> point, const z_function &z_eval)
{
    const std::vector<complex> M = coefficients(m, l0, point);
    const std::vector<complex> full = detail::prepend(l0, point);
    compensated_sum sum;
    real scale = 0.0L;
    for (int nu = 0; nu <= m.size(); ++nu) {
        const complex term = M[nu] * z_eval(detail::omit(full, nu));
        sum.add(term);
        scale = std::max(scale, std::abs(term));
    }
    return {std::abs(sum.value()), scale};
}

// Row ρ holds the coefficients of the equation with λ0 ↔ λ_ρ; column ν multiplies
// Z with λ_ν omitted.
inline matrix swapped_matrix(const model_instance &m, complex l0, std::span<const complex> point)
{
    const int L = m.size();
    const std::vector<complex> full = detail::prepend(l0, point);
    matrix S(L + 1, L + 1);
    for (int rho = 0; rho <= L; ++rho) {
        const std::vector<complex> M = coefficients(m, full[rho], detail::omit(full, rho));
        for (int nu = 0; nu <= L; ++nu) {
            S(rho, nu) = rho < nu ? M[nu] : (rho == nu ? M[0] : M[nu + 1]);
        }
    }
    return S;
}

struct determinant_result {
    complex det;
    real scale; // product of the rows' largest magnitudes
};

inline determinant_result matrix_determinant(const matrix &S)
{
    real scale = 1.0L;
    for (Eigen::Index r = 0; r < S.rows(); ++r) {
        scale *= S.row(r).cwiseAbs().maxCoeff();
    }
    return {S.fullPivLu().determinant(), scale};
}

inline determinant_result swapped_matrix_det(const model_instance &m, complex l0, std::span<const complex> point)
{
    return matrix_determinant(swapped_matrix(m, l0, point));
}

// The four special-zero pairs (λ_{L−1}, λ_L) for inhomogeneity k (1-based), in the order
// (μ−γ, −μ−γ), (μ−γ, μ), (−μ, −μ−γ), (−μ, μ).
inline std::array<std::pair<complex, complex>, 4> special_zero_pairs(const model_instance &m, int k)
{
    const complex u = m.mu.at(std::size_t(k - 1)), g = m.gamma;
    return {{{u - g, -u - g}, {u - g, u}, {-u, -u - g}, {-u, u}}};
}

// |z_eval| at each special-zero pair with the first L−2 arguments fixed to `others`,
// relative to |z_eval| at the same point with the pair moved by `offset`.
inline std::array<real, 4> special_zero_scan(const model_instance &m, const z_function &z_eval, int k,
                                               std::span<const complex> others,
                                               std::pair<complex, complex> offset = {{0.05L, 0.02L}, {-0.03L, 0.04L}})
{
    const int L = m.size();
    if (L < 2) {
        throw std::invalid_argument("special zeroes need L >= 2");
    }
    if (int(others.size()) != L - 2) {
        throw std::invalid_argument("special_zero_scan needs L-2 generic arguments");
    }
    std::array<real, 4> out{};
    const auto pairs = special_zero_pairs(m, k);
    for (int c = 0; c < 4; ++c) {
        std::vector<complex> at(others.begin(), others.end()), near(others.begin(), others.end());
        at.push_back(pairs[c].first);
        at.push_back(pairs[c].second);
        near.push_back(pairs[c].first + offset.first);
        near.push_back(pairs[c].second + offset.second);
        out[c] = std::abs(z_eval(at)) / std::abs(z_eval(near));
    }
    return out;
}

enum class star_choice { minus, plus }; // λ_* = −μ_L − γ or μ_L

// M̃_0..M̃_{L−1} at (λ0; λ_1..λ_{L−1}).
inline std::vector<complex> reduced_coefficients(const model_instance &m, complex l0, std::span<const complex> reduced,
                                                 star_choice star)
{
    const int L = m.size();
    if (L < 2 || int(reduced.size()) != L - 1) {
        throw std::invalid_argument("reduced_coefficients needs L >= 2 and L-1 spectral parameters");
    }
    const auto f = [&](complex x) { return m.f(x); };
    const complex g = m.gamma, uL = m.mu.back();
    const complex ls = star == star_choice::minus ? -uL - g : uL;
    const complex p = uL - g;

    std::vector<complex> with_star(reduced.begin(), reduced.end());
    with_star.push_back(ls);
    const std::vector<complex> full = detail::prepend(l0, reduced); // λ_0..λ_{L−1}

    const std::vector<complex> M_l0 = coefficients(m, l0, with_star);
    const std::vector<complex> M_p_full = coefficients(m, p, full);
    std::vector<complex> out(L);
    for (int nu = 0; nu < L; ++nu) {
        std::vector<complex> rest = detail::omit(full, nu);
        rest.push_back(ls);
        const complex A = M_l0[nu] * coefficients(m, p, rest)[L];
        const complex B = M_l0[L] * M_p_full[nu + 1];
        complex pr = 1.0L;
        for (int r = 0; r < L; ++r) {
            if (r != nu) {
                pr *= f(full[r] - uL) * f(full[r] + uL + g);
            }
        }
        out[nu] = (A + B) * pr;
    }
    return out;
}

// The L×L matrix of swapped equations for length L−1 (inhomogeneities μ_1..μ_{L−1})
// with its last row replaced by the reduced coefficients.
inline matrix modified_swapped_matrix(const model_instance &m, complex l0, std::span<const complex> reduced,
                                      star_choice star)
{
    const int L = m.size();
    const model_instance sub = with_inhomogeneities(m, std::vector<complex>(m.mu.begin(), m.mu.end() - 1));
    matrix S = swapped_matrix(sub, l0, reduced);
    const std::vector<complex> Mt = reduced_coefficients(m, l0, reduced, star);
    for (int nu = 0; nu < L; ++nu) {
        S(L - 1, nu) = Mt[nu];
    }
    return S;
}

// With (λ_{L−1}, λ_L) at a special-zero pair, M_{L−1} = M_L = 0 and the swapped
// equations for ρ, ν ≤ L−2 form an (L−1)×(L−1) system for the remaining values of Z.
// `others` holds λ_1..λ_{L−2}.
inline matrix special_zero_matrix(const model_instance &m, complex l0, std::span<const complex> others,
                                  std::pair<complex, complex> pair)
{
    const int L = m.size();
    if (L < 2 || int(others.size()) != L - 2) {
        throw std::invalid_argument("special_zero_matrix needs L >= 2 and L-2 generic arguments");
    }
    std::vector<complex> point(others.begin(), others.end());
    point.push_back(pair.first);
    point.push_back(pair.second);
    return swapped_matrix(m, l0, point).topLeftCorner(L - 1, L - 1);
}

// c_L with Z_L(λ_1..λ_{L−1}, μ_L−γ) = c_L·Z_{L−1}(λ_1..λ_{L−1})·∏_j [λ_j−μ_L, λ_j+μ_L+γ].
inline complex factorization_constant(const model_instance &m)
{
    const model_instance sub = with_inhomogeneities(m, std::vector<complex>(m.mu.begin(), m.mu.end() - 1));
    return -lambda_bar_A_cal(m, m.mu.back() - m.gamma) * omega_L(m) / omega_L(sub);
}

enum class reduction_route { last, first };

// Σ_i M_i(μ_k−γ; λ) Z_{L−1}(λ̂_i) ∏_{j≠i} [λ_j−μ_k, λ_j+μ_k+γ] with k = L (LAST, Z_{L−1} on
// μ_1..μ_{L−1}) or k = 1 (FIRST, Z_{L−1} on μ_2..μ_L), Z_{L−1} the operator-route value.
inline complex reduction_sum(const model_instance &m, std::span<const complex> point, reduction_route route)
{
    detail::require_size(m, point);
    const int L = m.size();
    if (L < 2) {
        throw std::invalid_argument("reconstruction needs L >= 2");
    }
    const auto f = [&](complex x) { return m.f(x); };
    const bool last = route == reduction_route::last;
    const complex uk = last ? m.mu.back() : m.mu.front();
    const model_instance sub = with_inhomogeneities(
        m, last ? std::vector<complex>(m.mu.begin(), m.mu.end() - 1) : std::vector<complex>(m.mu.begin() + 1, m.mu.end()));
    const std::vector<complex> M = coefficients(m, uk - m.gamma, point);
    compensated_sum sum;
    for (int i = 0; i < L; ++i) {
        const std::vector<complex> rest = detail::omit(point, i);
        complex pr = 1.0L;
        for (const complex &x : rest) {
            pr *= f(x - uk) * f(x + uk + m.gamma);
        }
        sum.add(M[i + 1] * z_algebraic(sub, rest) * pr);
    }
    return sum.value();
}

// LAST: Ω = −Λ̄_𝒜(μ_L−γ)^{-1} and Z̃ = c_L·Z_{L−1}.
inline complex reconstruct_last(const model_instance &m, std::span<const complex> point)
{
    const complex omega = -1.0L / lambda_bar_A_cal(m, m.mu.back() - m.gamma);
    return omega * factorization_constant(m) * reduction_sum(m, point, reduction_route::last);
}

// FIRST: constant fixed by matching the operator route at `calibration`.
inline complex first_route_constant(const model_instance &m, std::span<const complex> calibration)
{
    return z_algebraic(m, calibration) / reduction_sum(m, calibration, reduction_route::first);
}

inline complex reconstruct_first(const model_instance &m, std::span<const complex> point, complex constant)
{
    return constant * reduction_sum(m, point, reduction_route::first);
}

// Coefficients with all denominators cleared:
// M̄_ν = [θ+(L−1)γ, θ+ζ+λ_ν] M_ν ∏_ρ [2λ_ρ+γ] ∏_{j>ρ} [λ_j−λ_ρ, λ_j+λ_ρ+γ], ρ, j over 0..L.
inline std::vector<complex> normalized_coefficients(const model_instance &m, complex l0, std::span<const complex> point)
{
    const auto f = [&](complex x) { return m.f(x); };
    const int L = m.size();
    const complex g = m.gamma;
    const std::vector<complex> full = detail::prepend(l0, point);
    complex common = f(m.theta + real(L - 1) * g);
    for (int rho = 0; rho <= L; ++rho) {
        common *= f(2.0L * full[rho] + g);
        for (int j = rho + 1; j <= L; ++j) {
            common *= f(full[j] - full[rho]) * f(full[j] + full[rho] + g);
        }
    }
    std::vector<complex> M = coefficients(m, l0, point);
    for (int nu = 0; nu <= L; ++nu) {
        M[nu] *= common * f(m.theta + m.zeta + full[nu]);
    }
    return M;
}

} // namespace esos

#pragma once

// The partition function with domain walls and one reflecting end, by three routes:
// the operator product ⟨0̄|∏ℬ(λ_j)|0⟩, the symmetrised sum over S_L (two index
// orderings), and a trapezoid-rule evaluation of the multiple contour integral.

#include <algorithm>
#include <chrono>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <esos/algebra.hpp>
#include <esos/model.hpp>
#include <esos/summation.hpp>

namespace esos {

namespace detail {

inline void require_size(const model_instance &m, std::span<const complex> point)
{
    if (int(point.size()) != m.size()) {
        throw std::invalid_argument("spectral point must have one entry per site");
    }
}

inline std::string lam(int i)
{
    return "lambda_" + std::to_string(i + 1);
}

} // namespace detail

inline complex z_algebraic(const model_instance &m, std::span<const complex> point)
{
    detail::require_size(m, point);
    vector v = vacuum(m.size());
    for (const complex &l : point) {
        v = apply_b(m, l, v);
    }
    return v[v.size() - 1];
}

// Z(λ)·∏_j [θ+ζ+λ_j]
inline complex z_bar(const model_instance &m, std::span<const complex> point)
{
    complex p = z_algebraic(m, point);
    for (const complex &l : point) {
        p *= m.f(m.theta + m.zeta + l);
    }
    return p;
}

// m_l with z_l the last argument and μ_l the last inhomogeneity; only the set
// {μ_1..μ_{l−1}} enters the products.
inline complex m_l_with(const model_instance &m, std::span<const complex> z, std::span<const complex> mus)
{
    const auto f = [&](complex x) { return m.f(x); };
    const int l = int(z.size());
    const complex g = m.gamma, th = m.theta, ze = m.zeta;
    const complex zl = z[l - 1], ml = mus[l - 1];
    const complex den = guarded_f(m.ctx, th + ze + zl, [&] { return "[theta+zeta+z_" + std::to_string(l) + "]"; }) *
                        guarded_f(m.ctx, th + real(l - 1) * g, "[theta+(l-1)*gamma]");
    complex a = f(zl + ze) * f(th + ze - zl) * f(th + real(l) * g + zl - ml) / den * f(zl + ml + g);
    complex b = f(zl - ze + g) * f(th + ze + zl + g) * f(th + real(l - 1) * g - zl - ml) / den * f(zl - ml);
    for (int j = 0; j < l - 1; ++j) {
        const complex zj = z[j], mj = mus[j];
        const complex d1 = guarded_f(m.ctx, zj - zl, [&] { return "[z_" + std::to_string(j + 1) + "-z_" + std::to_string(l) + "]"; });
        const complex d2 =
            guarded_f(m.ctx, zj + zl + g, [&] { return "[z_" + std::to_string(j + 1) + "+z_" + std::to_string(l) + "+gamma]"; });
        a *= f(zl - mj + g) * f(zl + mj + g) * f(zj - zl + g) * f(zj + zl) / (d1 * d2);
        b *= f(zl - mj) * f(zl + mj) * f(zl - zj + g) * f(zl + zj + 2.0L * g) / (-d1 * d2);
    }
    return a - b;
}

inline complex m_l(const model_instance &m, int l, std::span<const complex> z)
{
    if (l < 1 || l > m.size() || int(z.size()) != l) {
        throw std::invalid_argument("m_l needs 1 <= l <= L and l arguments");
    }
    return m_l_with(m, z, std::span<const complex>(m.mu.data(), std::size_t(l)));
}

inline complex omega_L(const model_instance &m)
{
    const auto f = [&](complex x) { return m.f(x); };
    const int L = m.size();
    const complex g = m.gamma, th = m.theta, z = m.zeta;
    complex o = f(th + real(L + 1) * g) / f(th + real(L) * g);
    for (const complex &u : m.mu) {
        o *= f(z - u) * f(th + z + u) / (f(z + u) * f(th + z - u));
    }
    for (int K = 0; K <= L / 2; ++K) {
        o *= f(th - real(L - 2 * K) * g) / f(th + real(L - 2 * K + 1) * g);
    }
    return o;
}

enum class sum_variant { main, alt };

namespace detail {

// [γ][2x]/[2x+γ]
inline complex sym_prefactor(const model_instance &m, complex x)
{
    return m.f(m.gamma) * m.f(2.0L * x) / guarded_f(m.ctx, 2.0L * x + m.gamma, "[2*lambda+gamma]");
}

} // namespace detail

inline complex z_symmetrized(const model_instance &m, std::span<const complex> point, sum_variant variant)
{
    detail::require_size(m, point);
    const int L = m.size();
    const complex g = m.gamma;
    std::vector<int> perm(L);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<complex> x(L), zs, mus;
    compensated_sum total;
    do {
        for (int i = 0; i < L; ++i) {
            x[i] = point[perm[i]];
        }
        complex p = 1.0L;
        for (int l = 0; l < L; ++l) {
            p *= detail::sym_prefactor(m, x[l]);
            if (variant == sum_variant::main) {
                p *= m_l_with(m, std::span<const complex>(x.data(), std::size_t(l + 1)), m.mu);
            } else {
                zs.assign(x.rbegin(), x.rend() - l);
                mus.assign(m.mu.rbegin(), m.mu.rend() - l);
                p *= m_l_with(m, zs, mus);
            }
        }
        for (int i = 0; i < L; ++i) {
            for (int j = 0; j < L; ++j) {
                const bool take = variant == sum_variant::main ? i < j : j < i;
                if (take) {
                    p *= m.f(x[i] - m.mu[j]) * m.f(x[i] + m.mu[j] + g);
                }
            }
        }
        total.add(p);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return omega_L(m) * total.value();
}

inline constexpr int max_contour_size = 3;

namespace detail {

// Distance from x to the nearest point of the zero lattice of f.
inline real lattice_distance(const elliptic_context &ctx, complex x)
{
    if (ctx.is_trigonometric()) {
        const real im = x.imag() - pi * std::round(x.imag() / pi);
        return std::abs(complex(x.real(), im));
    }
    const complex red = reduce_argument(ctx, x).value;
    const complex ipt = i_pi * ctx.tau();
    real d = std::abs(red);
    for (int a = -1; a <= 1; ++a) {
        for (int b = -1; b <= 1; ++b) {
            d = std::min(d, std::abs(red - real(a) * i_pi - real(b) * ipt));
        }
    }
    return d;
}

// Distance from λ_j to the nearest singularity of the contour integrand other than λ_j itself.
inline real singularity_distance(const model_instance &m, std::span<const complex> point, int j)
{
    const complex lj = point[j];
    const complex g = m.gamma;
    real d = lattice_distance(m.ctx, 2.0L * lj + g) / 2.0L;
    d = std::min(d, lattice_distance(m.ctx, m.theta + m.zeta + lj));
    for (int k = 0; k < int(point.size()); ++k) {
        d = std::min(d, lattice_distance(m.ctx, lj + point[k] + g));
        if (k != j) {
            d = std::min(d, lattice_distance(m.ctx, lj - point[k]));
        }
    }
    return d;
}

} // namespace detail

inline real default_contour_radius(const model_instance &m, std::span<const complex> point)
{
    real d = std::numeric_limits<real>::infinity();
    for (int j = 0; j < int(point.size()); ++j) {
        d = std::min(d, detail::singularity_distance(m, point, j));
    }
    return 0.05L * d;
}

inline constexpr int default_contour_nodes = 128;

// L-fold contour integral over the union of circles |z − λ_j| = radius, each
// variable on the n-point trapezoid rule with its own angular offset.
inline complex z_contour(const model_instance &m, std::span<const complex> point, real radius, int n_nodes)
{
    detail::require_size(m, point);
    const int L = m.size();
    if (L > max_contour_size) {
        throw contour_too_large("contour route limited to L <= 3");
    }
    if (n_nodes < 4) {
        throw std::invalid_argument("contour route needs at least 4 nodes per circle");
    }
    if (!(radius > 0.0L)) {
        throw std::invalid_argument("contour radius must be positive");
    }
    for (int j = 0; j < L; ++j) {
        if (!(detail::singularity_distance(m, point, j) > 2.0L * radius)) {
            throw contour_too_large("contour circle around lambda_" + std::to_string(j + 1) +
                                    " is within twice its radius of another singularity");
        }
    }
    const complex g = m.gamma;
    const int per_var = L * n_nodes;

    // Node positions and trapezoid weights dz/(2πi), one table per variable.
    std::vector<std::vector<complex>> node(L), weight(L);
    for (int i = 0; i < L; ++i) {
        const real offset = pi * i / (real(n_nodes) * L);
        for (int a = 0; a < L; ++a) {
            for (int k = 0; k < n_nodes; ++k) {
                const complex e = std::polar(1.0L, 2.0L * pi * k / n_nodes + offset);
                node[i].push_back(point[a] + radius * e);
                weight[i].push_back(radius * e / real(n_nodes));
            }
        }
    }

    std::vector<int> idx(L, 0);
    std::vector<complex> z(L);
    compensated_sum total;
    while (true) {
        complex w = 1.0L;
        for (int i = 0; i < L; ++i) {
            z[i] = node[i][idx[i]];
            w *= weight[i][idx[i]];
        }
        complex p = w;
        for (int i = 0; i < L; ++i) {
            for (int j = 0; j < L; ++j) {
                if (i != j) {
                    p *= m.f(z[i] - z[j]);
                }
                p /= m.f(z[i] - point[j]);
                if (i < j) {
                    p *= m.f(z[i] - m.mu[j]) * m.f(z[i] + m.mu[j] + g);
                }
            }
            p *= m.f(2.0L * z[i]) / m.f(2.0L * z[i] + g);
            p *= m_l_with(m, std::span<const complex>(z.data(), std::size_t(i + 1)), m.mu);
        }
        total.add(p);

        int pos = L - 1;
        while (pos >= 0 && ++idx[pos] == per_var) {
            idx[pos] = 0;
            --pos;
        }
        if (pos < 0) {
            break;
        }
    }
    const complex pre = m.f(g) * m.ctx.f_prime_zero();
    return omega_L(m) * std::pow(pre, L) * total.value();
}

inline complex z_contour(const model_instance &m, std::span<const complex> point)
{
    return z_contour(m, point, default_contour_radius(m, point), default_contour_nodes);
}

// −[2λ+2γ][θ+ζ+λ] / ([2λ][θ+ζ−λ−γ]): the factor Z picks up under λ_j ↦ −λ_j−γ.
inline complex z_crossing_factor(const model_instance &m, complex l)
{
    return detail::b_crossing_factor(m, l);
}

// Guards for a spectral point used as an evaluation input: no collisions
// λ_i ± λ_j + kγ, λ_i ± μ_j + kγ (k ∈ {−1,0,1}), and no pole of Z or of the
// symmetrised-sum prefactors.
inline void check_spectral_point(const model_instance &m, std::span<const complex> point,
                                 real threshold = guard_tolerance)
{
    detail::require_size(m, point);
    const int L = m.size();
    const complex g = m.gamma;
    const auto check = [&](complex arg, const std::string &name) {
        detail::require_generic(m.ctx, arg, name, threshold);
    };
    for (int i = 0; i < L; ++i) {
        const std::string li = detail::lam(i);
        check(m.theta + m.zeta + point[i], "[theta+zeta+" + li + "]");
        check(2.0L * point[i] + g, "[2*" + li + "+gamma]");
        check(2.0L * point[i], "[2*" + li + "]");
        for (int k = -1; k <= 1; ++k) {
            const std::string kg = detail::signed_term("gamma", k);
            for (int j = 0; j < L; ++j) {
                const std::string mj = "mu_" + std::to_string(j + 1);
                check(point[i] - m.mu[j] + real(k) * g, "[" + li + "-" + mj + kg + "]");
                check(point[i] + m.mu[j] + real(k) * g, "[" + li + "+" + mj + kg + "]");
                if (j > i) {
                    const std::string lj = detail::lam(j);
                    check(point[i] - point[j] + real(k) * g, "[" + li + "-" + lj + kg + "]");
                    check(point[i] + point[j] + real(k + 1) * g,
                          "[" + li + "+" + lj + detail::signed_term("gamma", k + 1) + "]");
                }
            }
        }
    }
}

// The poles of Z itself, [θ+ζ+λ_i] = 0. The operator route needs no other guard.
inline void check_z_poles(const model_instance &m, std::span<const complex> point, real threshold = guard_tolerance)
{
    detail::require_size(m, point);
    for (int i = 0; i < m.size(); ++i) {
        detail::require_generic(m.ctx, m.theta + m.zeta + point[i], "[theta+zeta+" + detail::lam(i) + "]", threshold);
    }
}

inline real relative_deviation(complex a, complex b)
{
    const real s = std::max(std::abs(a), std::abs(b));
    return s > 0.0L ? std::abs(a - b) / s : 0.0L;
}

struct route_selection {
    bool algebraic = true;
    bool symmetrized = true;
    bool contour = false;
};

struct contour_options {
    std::optional<real> radius;
    int n_nodes = default_contour_nodes;
};

struct partition_report {
    std::optional<complex> z_algebraic;
    std::optional<complex> z_symmetrized;
    std::optional<complex> z_symmetrized_alt;
    std::optional<complex> z_contour;
    complex omega_L;
    std::optional<real> contour_radius;
    std::map<std::string, real> deviations;
    std::map<std::string, real> diagnostics;
    std::map<std::string, real> seconds;

    real max_deviation() const
    {
        real d = 0.0L;
        for (const auto &[name, v] : deviations) {
            d = std::max(d, v);
        }
        return d;
    }
};

inline partition_report compute_partition_report(const model_instance &m, std::span<const complex> point,
                                          const route_selection &routes, const contour_options &copt)
{
    check_spectral_point(m, point);
    if (routes.contour && m.size() > max_contour_size) {
        throw contour_too_large("contour route limited to L <= 3");
    }
    using clock = std::chrono::steady_clock;
    partition_report r;
    r.omega_L = omega_L(m);
    const auto timed = [&](const char *name, auto &&fn) {
        const auto t0 = clock::now();
        const complex v = fn();
        r.seconds[name] = std::chrono::duration<real>(clock::now() - t0).count();
        return v;
    };
    std::vector<std::pair<std::string, complex>> values;
    if (routes.algebraic) {
        r.z_algebraic = timed("algebraic", [&] { return z_algebraic(m, point); });
        values.emplace_back("algebraic", *r.z_algebraic);
    }
    if (routes.symmetrized) {
        r.z_symmetrized = timed("symmetrized", [&] { return z_symmetrized(m, point, sum_variant::main); });
        r.z_symmetrized_alt = timed("symmetrized_alt", [&] { return z_symmetrized(m, point, sum_variant::alt); });
        values.emplace_back("symmetrized", *r.z_symmetrized);
        values.emplace_back("symmetrized_alt", *r.z_symmetrized_alt);
    }
    if (routes.contour) {
        const real radius = copt.radius ? *copt.radius : default_contour_radius(m, point);
        r.contour_radius = radius;
        r.z_contour = timed("contour", [&] { return z_contour(m, point, radius, copt.n_nodes); });
        values.emplace_back("contour", *r.z_contour);
    }
    for (std::size_t a = 0; a < values.size(); ++a) {
        for (std::size_t b = a + 1; b < values.size(); ++b) {
            r.deviations[values[a].first + "/" + values[b].first] = relative_deviation(values[a].second, values[b].second);
        }
    }
    if (r.z_algebraic) {
        // Crossing in λ_1 and symmetry under reversal, on the operator route.
        std::vector<complex> crossed(point.begin(), point.end());
        crossed[0] = -crossed[0] - m.gamma;
        r.diagnostics["crossing_lambda_1"] =
            relative_deviation(z_algebraic(m, crossed), z_crossing_factor(m, point[0]) * *r.z_algebraic);
        std::vector<complex> reversed(point.rbegin(), point.rend());
        r.diagnostics["reversal_symmetry"] = relative_deviation(z_algebraic(m, reversed), *r.z_algebraic);
    }
    return r;
}

} // namespace esos

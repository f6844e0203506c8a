#pragma once

// Odd Jacobi theta function f(λ) = Σ_{n≥0} (-1)^n q^{n(n+1)} sinh((2n+1)λ), q = exp(iπτ),
// normalised so that f(λ) = sinh(λ) + O(q²). Quasiperiods iπ and iπτ:
//   f(λ+iπ) = -f(λ),   f(λ+iπτ) = -exp(-2λ-iπτ) f(λ).

#include <cmath>
#include <complex>
#include <functional>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <esos/errors.hpp>

namespace esos {

// Extended precision throughout: the dense operator products cancel by many
// orders of magnitude in the trigonometric regime.
using real = long double;
using complex = std::complex<real>;

inline constexpr real pi = std::numbers::pi_v<real>;
inline constexpr complex i_pi{0.0L, std::numbers::pi_v<real>};

// Relative size below which |f(x)| counts as a zero of f (scaled by |f'(0)|).
inline constexpr real guard_tolerance = 1e-12L;

class elliptic_context {
public:
    static elliptic_context elliptic(complex tau, real series_tol = 1e-16L, int max_terms = 64)
    {
        if (!(tau.imag() > 0.0L) || !std::isfinite(tau.real()) || !std::isfinite(tau.imag())) {
            throw invalid_context("elliptic context needs Im(tau) > 0");
        }
        if (!(series_tol > 0.0L)) {
            throw invalid_context("series_tol must be positive");
        }
        if (max_terms < 8) {
            throw invalid_context("max_terms must be at least 8");
        }
        elliptic_context c;
        c.trig_ = false;
        c.tau_ = tau;
        c.q_ = std::exp(i_pi * tau);
        if (!(std::abs(c.q_) < 1.0L)) {
            throw invalid_context("elliptic nome must satisfy |q| < 1");
        }
        c.series_tol_ = series_tol;
        c.max_terms_ = max_terms;
        c.fp0_ = c.pochhammer_cubed();
        return c;
    }

    static elliptic_context trigonometric()
    {
        return elliptic_context{};
    }

    bool is_trigonometric() const noexcept { return trig_; }
    complex tau() const noexcept { return tau_; }
    complex q() const noexcept { return q_; }
    real series_tol() const noexcept { return series_tol_; }
    int max_terms() const noexcept { return max_terms_; }

    // f'(0), computed once at construction.
    complex f_prime_zero() const noexcept { return fp0_; }

    // Values with |f| below this are treated as zeros of f.
    real guard_threshold() const noexcept { return guard_tolerance * std::abs(fp0_); }

private:
    elliptic_context() = default;

    // (q²; q²)_∞³
    complex pochhammer_cubed() const
    {
        const complex q2 = q_ * q_;
        complex prod = 1.0L;
        complex qpow = q2;
        for (int n = 1; n <= 100000; ++n) {
            if (std::abs(qpow) < series_tol_) {
                return prod * prod * prod;
            }
            prod *= 1.0L - qpow;
            qpow *= q2;
        }
        throw non_convergence("q-Pochhammer product for f'(0) did not converge");
    }

    bool trig_ = true;
    complex tau_{0.0L, std::numeric_limits<real>::infinity()};
    complex q_{0.0L, 0.0L};
    real series_tol_ = 1e-16L;
    int max_terms_ = 64;
    complex fp0_{1.0L, 0.0L};
};

struct reduced_argument {
    complex value;      // λ_red, in the fundamental cell around 0
    complex multiplier; // f(λ) = multiplier · f(λ_red)
};

// λ = λ_red + m·iπ + n·iπτ with m, n the nearest integers in lattice coordinates.
inline reduced_argument reduce_argument(const elliptic_context &ctx, complex lambda)
{
    if (ctx.is_trigonometric()) {
        return {lambda, 1.0L};
    }
    const complex tau = ctx.tau();
    const real b = (lambda / i_pi).imag() / tau.imag();
    const real n = std::round(b);
    complex red = lambda - n * i_pi * tau;
    const real m = std::round((red / i_pi).real());
    red -= m * i_pi;

    const real sign = std::fmod(std::abs(m + n), 2.0L) == 1.0L ? -1.0L : 1.0L;
    complex mult = sign;
    if (n != 0.0L) {
        mult *= std::exp(-2.0L * n * red - i_pi * tau * (n * n));
    }
    return {red, mult};
}

namespace detail {

inline real log_cosh(real y)
{
    return y + std::log1p(std::exp(-2.0L * y)) - std::numbers::ln2;
}

inline real log_sinh(real y)
{
    return y + std::log1p(-std::exp(-2.0L * y)) - std::numbers::ln2;
}

// Series on an already reduced argument. Stops once an upper bound on the
// next term drops below series_tol relative to the partial sum; individual
// terms can vanish accidentally, their bound cannot.
inline complex theta_series(const elliptic_context &ctx, complex x)
{
    if (x == complex(0.0L, 0.0L)) {
        return 0.0L;
    }
    const complex ipt = i_pi * ctx.tau();
    const real log_q = -pi * ctx.tau().imag();
    const real ax = std::abs(x.real());
    const real mx = std::abs(x);
    const real log_tol = std::log(ctx.series_tol());

    complex sum = 0.0L;
    for (int n = 0; n < ctx.max_terms(); ++n) {
        const real nn = real(n) * real(n + 1);
        const real k = 2.0L * n + 1.0L;
        complex term;
        if (n == 0) {
            term = std::sinh(x);
        } else if (k * ax < 300.0L) {
            term = std::sinh(k * x) * std::exp(nn * ipt);
        } else {
            term = 0.5L * (std::exp(nn * ipt + k * x) - std::exp(nn * ipt - k * x));
        }
        sum += (n % 2 == 0) ? term : -term;

        const real n1 = n + 1.0L;
        const real k1 = 2.0L * n1 + 1.0L;
        const real log_bound = n1 * (n1 + 1.0L) * log_q + std::min(log_cosh(k1 * ax), log_sinh(k1 * mx));
        if (log_bound <= log_tol + std::log(std::abs(sum))) {
            return sum;
        }
    }
    throw non_convergence("theta series exceeded max_terms after argument reduction");
}

} // namespace detail

inline complex eval_f(const elliptic_context &ctx, complex lambda)
{
    if (ctx.is_trigonometric()) {
        return std::sinh(lambda);
    }
    const reduced_argument r = reduce_argument(ctx, lambda);
    return r.multiplier * detail::theta_series(ctx, r.value);
}

inline complex f_prime_zero(const elliptic_context &ctx)
{
    return ctx.f_prime_zero();
}

inline complex bracket(const elliptic_context &ctx, std::span<const complex> args)
{
    complex p = 1.0L;
    for (const complex &a : args) {
        p *= eval_f(ctx, a);
    }
    return p;
}

inline complex bracket(const elliptic_context &ctx, std::initializer_list<complex> args)
{
    return bracket(ctx, std::span<const complex>(args.begin(), args.size()));
}

inline bool is_near_zero(const elliptic_context &ctx, complex value)
{
    return !(std::abs(value) >= ctx.guard_threshold());
}

// f(arg) for use as a denominator; throws degenerate_parameter naming the guard.
template <class Name>
complex guarded_f(const elliptic_context &ctx, complex arg, Name &&name)
{
    const complex v = eval_f(ctx, arg);
    if (is_near_zero(ctx, v)) {
        throw degenerate_parameter(std::string(name()));
    }
    return v;
}

inline complex guarded_f(const elliptic_context &ctx, complex arg, const char *name)
{
    return guarded_f(ctx, arg, [name] { return name; });
}

// [λ1+λ3, λ1−λ3, λ2+λ4, λ2−λ4] − [λ1+λ4, λ1−λ4, λ2+λ3, λ2−λ3] = [λ1+λ2, λ1−λ2, λ3+λ4, λ3−λ4]
inline real addition_rule_residual(const elliptic_context &ctx, complex l1, complex l2, complex l3, complex l4)
{
    const complex p1 = bracket(ctx, {l1 + l3, l1 - l3, l2 + l4, l2 - l4});
    const complex p2 = bracket(ctx, {l1 + l4, l1 - l4, l2 + l3, l2 - l3});
    const complex p3 = bracket(ctx, {l1 + l2, l1 - l2, l3 + l4, l3 - l4});
    const real scale = std::max({std::abs(p1), std::abs(p2), std::abs(p3)});
    if (scale == 0.0L) {
        return 0.0L;
    }
    return std::abs(p1 - p2 - p3) / scale;
}

// Ω·∏ f(λ + t_n); the norm is Σ t_n.
class higher_order_theta {
public:
    higher_order_theta(complex prefactor, std::vector<complex> zeros)
        : prefactor_(prefactor), zeros_(std::move(zeros))
    {
        for (const complex &t : zeros_) {
            norm_ += t;
        }
    }

    higher_order_theta(complex prefactor, std::vector<complex> zeros, complex norm)
        : higher_order_theta(prefactor, std::move(zeros))
    {
        real scale = std::abs(norm);
        for (const complex &t : zeros_) {
            scale = std::max(scale, std::abs(t));
        }
        if (std::abs(norm_ - norm) > 1e-12L * std::max(scale, 1.0L)) {
            throw std::invalid_argument("higher_order_theta: zeros do not sum to the norm");
        }
    }

    int order() const noexcept { return int(zeros_.size()); }
    complex norm() const noexcept { return norm_; }
    complex prefactor() const noexcept { return prefactor_; }
    const std::vector<complex> &zeros() const noexcept { return zeros_; }

    complex operator()(const elliptic_context &ctx, complex lambda) const
    {
        complex v = prefactor_;
        for (const complex &t : zeros_) {
            v *= eval_f(ctx, lambda + t);
        }
        return v;
    }

private:
    complex prefactor_;
    std::vector<complex> zeros_;
    complex norm_{0.0L, 0.0L};
};

struct order_norm_residuals {
    real res_pi;
    real res_pi_tau;
};

// Twelve fixed points spread over a neighbourhood of the origin.
inline std::vector<complex> default_test_grid()
{
    std::vector<complex> grid;
    grid.reserve(12);
    for (int k = 0; k < 12; ++k) {
        const real phi = 2.0L * pi * k / 12.0L + 0.17L;
        grid.emplace_back(0.21L + 0.45L * std::cos(phi), 0.9L * std::sin(phi));
    }
    return grid;
}

// Residuals of F(λ+iπ) = (-1)^N F(λ) and F(λ+iπτ) = e^{-2t}(-e^{-2λ-iπτ})^N F(λ).
// Each is normalised by the largest magnitude of its right-hand side on the grid.
inline order_norm_residuals classify_order_norm(const elliptic_context &ctx, const std::function<complex(complex)> &F,
                                                int N, complex t, std::span<const complex> grid)
{
    if (ctx.is_trigonometric()) {
        throw invalid_context("classify_order_norm needs an elliptic context; use trigonometric_degree_residual");
    }
    const complex ipt = i_pi * ctx.tau();
    const real sign = (N % 2 == 0) ? 1.0L : -1.0L;
    real num_pi = 0.0L, den_pi = 0.0L, num_pt = 0.0L, den_pt = 0.0L;
    for (const complex &l : grid) {
        const complex v = F(l);
        const complex expected_pt = std::exp(-2.0L * t) * std::pow(-std::exp(-2.0L * l - ipt), N) * v;
        num_pi = std::max(num_pi, std::abs(F(l + i_pi) - sign * v));
        den_pi = std::max(den_pi, std::abs(v));
        num_pt = std::max(num_pt, std::abs(F(l + ipt) - expected_pt));
        den_pt = std::max(den_pt, std::abs(expected_pt));
    }
    const auto ratio = [](real num, real den) { return den > 0.0L ? num / den : num; };
    return {ratio(num_pi, den_pi), ratio(num_pt, den_pt)};
}

inline order_norm_residuals classify_order_norm(const elliptic_context &ctx, const std::function<complex(complex)> &F,
                                                int N, complex t)
{
    const std::vector<complex> grid = default_test_grid();
    return classify_order_norm(ctx, F, N, t, grid);
}

// Trigonometric analogue of an order-N theta function: e^{Nλ}F(λ) is a polynomial of
// degree ≤ N in x = e^{2λ}. Samples x on the circle |x| = e^{2ρ} and returns the largest
// Laurent term outside [0, N] relative to the largest term inside, both measured on
// that circle.
inline real trigonometric_degree_residual(const std::function<complex(complex)> &F, int N, real rho = 0.2L)
{
    const int K = 4 * (N + 2);
    std::vector<complex> g(K);
    for (int k = 0; k < K; ++k) {
        const complex l(rho, pi * k / K);
        g[k] = std::exp(real(N) * l) * F(l);
    }
    // Coefficient of x^p, p in [-K/2, K/2), from the discrete Fourier transform.
    real inside = 0.0L, outside = 0.0L;
    for (int p = -K / 2; p < K / 2; ++p) {
        complex c = 0.0L;
        for (int k = 0; k < K; ++k) {
            c += g[k] * std::polar(1.0L, -2.0L * pi * p * k / K);
        }
        const real mag = std::abs(c) / K;
        if (p >= 0 && p <= N) {
            inside = std::max(inside, mag);
        } else {
            outside = std::max(outside, mag);
        }
    }
    return inside > 0.0L ? outside / inside : outside;
}

// Reconstructs an order-N, norm-t theta function from its values at N nodes.
inline complex interpolate_theta(const elliptic_context &ctx, int N, complex t, std::span<const complex> nodes,
                                 std::span<const complex> values, complex lambda)
{
    if (N < 2 || int(nodes.size()) != N || int(values.size()) != N) {
        throw std::invalid_argument("interpolate_theta needs N >= 2 nodes and N values");
    }
    complex s = t;
    for (const complex &x : nodes) {
        s += x;
    }
    const complex fs = eval_f(ctx, s);
    if (is_near_zero(ctx, fs)) {
        throw degenerate_nodes("interpolation bracket [t + sum of nodes] vanishes");
    }
    for (int n = 0; n < N; ++n) {
        for (int m = n + 1; m < N; ++m) {
            if (is_near_zero(ctx, eval_f(ctx, nodes[n] - nodes[m]))) {
                throw degenerate_nodes("interpolation nodes coincide modulo the period lattice");
            }
        }
    }
    // At a node every other term carries an exact zero and the surviving one is a
    // ratio of equal quantities; return the value itself rather than that ratio rounded.
    for (int n = 0; n < N; ++n) {
        if (lambda == nodes[n]) {
            return values[n];
        }
    }
    complex total = 0.0L;
    for (int n = 0; n < N; ++n) {
        complex term = values[n] * eval_f(ctx, lambda - nodes[n] + s) / fs;
        for (int m = 0; m < N; ++m) {
            if (m != n) {
                term *= eval_f(ctx, lambda - nodes[m]) / eval_f(ctx, nodes[n] - nodes[m]);
            }
        }
        total += term;
    }
    return total;
}

} // namespace esos

#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include <esos/theta.hpp>

namespace esos {

// Largest system size handled by the dense operator route (2^(L+1) = 512 with the auxiliary leg).
inline constexpr int max_system_size = 8;

// Largest |q| accepted for a model; beyond it the series needs more terms than is sensible
// and the tolerances used throughout are untested.
inline constexpr real max_nome = 0.85L;

struct model_instance {
    elliptic_context ctx;
    complex gamma;
    complex zeta;
    complex theta;
    std::vector<complex> mu;

    int size() const noexcept { return int(mu.size()); }
    complex f(complex x) const { return eval_f(ctx, x); }
};

namespace detail {

inline std::string signed_term(const char *sym, int k)
{
    if (k == 0) {
        return "";
    }
    const std::string mag = std::abs(k) == 1 ? std::string(sym) : std::to_string(std::abs(k)) + "*" + sym;
    return (k > 0 ? "+" : "-") + mag;
}

// Throws when |f(arg)| < threshold·|f'(0)|; the default threshold is the guard.
inline void require_generic(const elliptic_context &ctx, complex arg, const std::string &name,
                            real threshold = guard_tolerance)
{
    if (std::abs(eval_f(ctx, arg)) < threshold * std::abs(ctx.f_prime_zero())) {
        throw degenerate_parameter(name);
    }
}

} // namespace detail

// The genericity conditions on (γ, ζ, θ, μ), each bracket required to exceed
// threshold·|f'(0)|.
inline void check_model_parameters(const elliptic_context &ctx, complex gamma, complex zeta, complex theta,
                                   const std::vector<complex> &mu, real threshold = guard_tolerance)
{
    const int L = int(mu.size());
    const auto require = [&](complex arg, const std::string &name) { detail::require_generic(ctx, arg, name, threshold); };
    for (int k = -(L + 1); k <= L + 1; ++k) {
        require(theta + real(k) * gamma, "[theta" + detail::signed_term("gamma", k) + "]");
    }
    for (int j = 0; j < L; ++j) {
        const std::string mj = "mu_" + std::to_string(j + 1);
        require(theta + zeta + mu[j], "[theta+zeta+" + mj + "]");
        require(theta + zeta - mu[j], "[theta+zeta-" + mj + "]");
        require(zeta + mu[j], "[zeta+" + mj + "]");
        require(zeta - mu[j], "[zeta-" + mj + "]");
        for (int i = 0; i < L; ++i) {
            if (i == j) {
                continue;
            }
            const std::string mi = "mu_" + std::to_string(i + 1);
            require(mu[i] - mu[j], "[" + mi + "-" + mj + "]");
            require(mu[i] + mu[j], "[" + mi + "+" + mj + "]");
        }
    }
    require(gamma, "[gamma]");
}

// Checks the genericity conditions and returns the model.
inline model_instance make_model(const elliptic_context &ctx, complex gamma, complex zeta, complex theta,
                                 std::vector<complex> mu)
{
    const int L = int(mu.size());
    if (L < 1 || L > max_system_size) {
        throw std::invalid_argument("system size must be between 1 and " + std::to_string(max_system_size));
    }
    if (!ctx.is_trigonometric() && std::abs(ctx.q()) > max_nome) {
        throw invalid_context("models are restricted to |q| <= 0.85");
    }
    check_model_parameters(ctx, gamma, zeta, theta, mu);
    return model_instance{ctx, gamma, zeta, theta, std::move(mu)};
}

// Same parameters with a different set of inhomogeneities.
inline model_instance with_inhomogeneities(const model_instance &m, std::vector<complex> mu)
{
    return make_model(m.ctx, m.gamma, m.zeta, m.theta, std::move(mu));
}

} // namespace esos

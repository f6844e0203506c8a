#pragma once

// Seeded random draws of generic parameters. Every draw is uniform in
// Re ∈ [0.1, 0.9], Im ∈ [−0.3, 0.3]; a draw that trips a genericity guard is
// discarded and redrawn, and the number of discarded draws is recorded.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include <esos/model.hpp>

namespace esos {

inline constexpr int max_resamples = 100000;

class sampler {
public:
    explicit sampler(std::uint64_t seed) : rng_(seed) {}

    // Independent stream per (seed, label, index), so a check's draws do not
    // depend on which other checks ran before it.
    sampler(std::uint64_t seed, std::string_view label, std::uint64_t index = 0)
    {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (const char c : label) {
            h = (h ^ std::uint64_t(static_cast<unsigned char>(c))) * 0x100000001b3ull;
        }
        std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(h), std::uint32_t(h >> 32),
                          std::uint32_t(index)};
        rng_.seed(seq);
    }

    complex draw()
    {
        const real re = re_(rng_);
        const real im = im_(rng_);
        return {re, im};
    }

    std::vector<complex> draw(int n)
    {
        std::vector<complex> v(static_cast<std::size_t>(n));
        for (auto &x : v) {
            x = draw();
        }
        return v;
    }

    real uniform(real lo, real hi) { return std::uniform_real_distribution<real>(lo, hi)(rng_); }

    // Calls fn(*this) until it returns without a degenerate_parameter.
    template <class Fn>
    auto generic(Fn &&fn)
    {
        for (int attempt = 0;; ++attempt) {
            try {
                return fn(*this);
            } catch (const degenerate_parameter &) {
                if (attempt >= max_resamples) {
                    throw;
                }
                ++resamples_;
            }
        }
    }

    int resamples() const noexcept { return resamples_; }

private:
    std::mt19937_64 rng_;
    std::uniform_real_distribution<real> re_{0.1L, 0.9L};
    std::uniform_real_distribution<real> im_{-0.3L, 0.3L};
    int resamples_ = 0;
};

// Random draws keep every model bracket at least this far from zero (relative to
// |f'(0)|). Near [θ+kγ] = 0 the dynamical weights grow like 1/[θ+kγ] and the
// operator products lose roughly that factor per site to cancellation.
inline constexpr real default_draw_margin = 0.1L;

inline model_instance draw_model(sampler &s, const elliptic_context &ctx, int L, real margin = default_draw_margin)
{
    const complex gamma = s.draw();
    const complex zeta = s.draw();
    const complex theta = s.draw();
    std::vector<complex> mu = s.draw(L);
    check_model_parameters(ctx, gamma, zeta, theta, mu, margin);
    return make_model(ctx, gamma, zeta, theta, std::move(mu));
}

} // namespace esos

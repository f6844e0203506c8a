#pragma once

#include <esos/suites.hpp>

namespace esos::testing {

inline const elliptic_context &tau2i()
{
    static const elliptic_context ctx = elliptic_context::elliptic({0.0L, 2.0L});
    return ctx;
}

inline const elliptic_context &trig()
{
    static const elliptic_context ctx = elliptic_context::trigonometric();
    return ctx;
}

// A generic model from a labelled stream, so each test owns its draws.
inline model_instance model(const elliptic_context &ctx, int L, std::string_view label, std::uint64_t seed = 42)
{
    sampler s(seed, label, std::uint64_t(L));
    return s.generic([&](sampler &g) { return draw_model(g, ctx, L); });
}

inline std::vector<complex> point(const model_instance &m, std::string_view label, int n = -1, std::uint64_t seed = 42)
{
    const int k = n < 0 ? m.size() : n;
    sampler s(seed, label, std::uint64_t(k));
    return s.generic([&](sampler &g) {
        std::vector<complex> p = g.draw(k);
        if (k == m.size()) {
            check_spectral_point(m, p, default_draw_margin);
        }
        detail::require_spread(m, p);
        return p;
    });
}

inline real rel(complex a, complex b)
{
    return relative_deviation(a, b);
}

} // namespace esos::testing

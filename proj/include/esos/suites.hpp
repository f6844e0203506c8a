#pragma once

// Seeded randomized verification of every identity, grouped by module. Each check
// runs a number of generic draws and records the worst residual against a
// tolerance; the checks are independent of one another and of their order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <esos/funceq.hpp>
#include <esos/sampling.hpp>

namespace esos {

struct context_spec {
    std::string label;
    elliptic_context ctx;
};

// Largest system size per context kind.
struct size_caps {
    int elliptic;
    int trigonometric;

    int for_context(const elliptic_context &ctx) const { return ctx.is_trigonometric() ? trigonometric : elliptic; }
};

struct suite_config {
    std::uint64_t seed = 42;
    std::vector<context_spec> contexts;
    std::optional<real> tol; // replaces every upper-bound tolerance when set

    int theta_draws = 100;
    int local_draws = 50;
    size_caps algebra{3, 4};
    int algebra_draws = 20;
    size_caps vacuum{4, 4};
    int vacuum_draws = 5;
    size_caps routes{4, 6};
    size_caps route_draws{20, 10};
    int contour_max_size = 2;
    int contour_draws = 2;
    int contour_nodes = 64;
    size_caps structure{3, 3};
    int structure_draws = 5;
    size_caps funceq{4, 4};
    int funceq_draws = 5;
};

inline std::vector<context_spec> default_contexts()
{
    return {{"tau=1.5i", elliptic_context::elliptic({0.0L, 1.5L})},
            {"tau=2i", elliptic_context::elliptic({0.0L, 2.0L})},
            {"tau=0.5+2i", elliptic_context::elliptic({0.5L, 2.0L})},
            {"trigonometric", elliptic_context::trigonometric()}};
}

inline suite_config default_suite_config()
{
    suite_config c;
    c.contexts = default_contexts();
    return c;
}

enum class bound { upper, lower };

struct check_result {
    std::string suite;
    std::string name;
    std::string context;
    int size = 0; // system size L, 0 where not applicable
    int draws = 0;
    int resamples = 0;
    std::optional<real> worst; // empty when a residual was not finite
    real tol = 0.0L;
    bound kind = bound::upper;
    bool passed = false;
};

inline const std::vector<std::string> &suite_names()
{
    static const std::vector<std::string> names{"theta", "weights", "algebra", "partition", "funceq"};
    return names;
}

namespace detail {

class check_runner {
public:
    check_runner(const suite_config &cfg, std::string suite, std::vector<check_result> &out)
        : cfg_(cfg), suite_(std::move(suite)), out_(out)
    {
    }

    // Runs `draws` generic draws of fn(sampler&) -> double and records the worst value:
    // the largest for an upper bound, the smallest for a lower bound.
    template <class Fn>
    void run(const std::string &name, const context_spec &c, int size, int draws, real tol, Fn &&fn,
             bound kind = bound::upper)
    {
        check_result r;
        r.suite = suite_;
        r.name = name;
        r.context = c.label;
        r.size = size;
        r.kind = kind;
        r.tol = (kind == bound::upper && cfg_.tol) ? *cfg_.tol : tol;
        sampler s(cfg_.seed, suite_ + "/" + name + "/" + c.label, std::uint64_t(size));
        bool finite = true;
        real worst = kind == bound::upper ? 0.0L : std::numeric_limits<real>::infinity();
        for (int d = 0; d < draws; ++d) {
            const real v = s.generic([&](sampler &g) { return real(fn(g)); });
            if (!std::isfinite(v)) {
                finite = false;
                continue;
            }
            worst = kind == bound::upper ? std::max(worst, v) : std::min(worst, v);
        }
        r.draws = draws;
        r.resamples = s.resamples();
        if (finite && draws > 0) {
            r.worst = worst;
        }
        r.passed = finite && (draws == 0 || (kind == bound::upper ? worst <= r.tol : worst > r.tol));
        out_.push_back(std::move(r));
    }

private:
    const suite_config &cfg_;
    std::string suite_;
    std::vector<check_result> &out_;
};

inline real rel(complex a, complex b)
{
    const real s = std::max(std::abs(a), std::abs(b));
    return s > 0.0L ? std::abs(a - b) / s : 0.0L;
}

// Unreduced series Σ_n (−1)^n q^{n(n+1)} sinh((2n+1)λ) with a fixed number of terms,
// each formed as a difference of two exponentials so that large |Re λ| cannot overflow.
inline complex direct_series(const elliptic_context &ctx, complex l, int terms = 64)
{
    const complex ipt = i_pi * ctx.tau();
    complex s = 0.0L;
    for (int n = 0; n < terms; ++n) {
        const complex e = real(n) * real(n + 1) * ipt;
        const complex t = 0.5L * (std::exp(e + real(2 * n + 1) * l) - std::exp(e - real(2 * n + 1) * l));
        s += (n % 2 == 0) ? t : -t;
    }
    return s;
}

inline real max_relative(const std::vector<complex> &a, const std::vector<complex> &b)
{
    real w = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) {
        w = std::max(w, rel(a[i], b[i]));
    }
    return w;
}

// max_ν |r_ν/r_0 − 1| for r_ν = a_ν/b_ν.
inline real ratio_spread(const std::vector<complex> &a, const std::vector<complex> &b)
{
    const complex r0 = a[0] / b[0];
    real w = 0.0L;
    for (std::size_t i = 1; i < a.size(); ++i) {
        w = std::max(w, std::abs(a[i] / b[i] / r0 - 1.0L));
    }
    return w;
}

// Margin checks on free spectral arguments: [θ+ζ+x], [2x+γ], [2x] for each x and
// [x−y], [x+y+γ] for each pair.
inline void require_spread(const model_instance &m, std::span<const complex> xs, real margin = default_draw_margin)
{
    for (std::size_t a = 0; a < xs.size(); ++a) {
        require_generic(m.ctx, m.theta + m.zeta + xs[a], "[theta+zeta+x]", margin);
        require_generic(m.ctx, 2.0L * xs[a] + m.gamma, "[2x+gamma]", margin);
        require_generic(m.ctx, 2.0L * xs[a], "[2x]", margin);
        for (std::size_t b = a + 1; b < xs.size(); ++b) {
            require_generic(m.ctx, xs[a] - xs[b], "[x-y]", margin);
            require_generic(m.ctx, xs[a] + xs[b] + m.gamma, "[x+y+gamma]", margin);
        }
    }
}

// ---- theta ----------------------------------------------------------------

inline void theta_suite(const suite_config &cfg, std::vector<check_result> &out)
{
    check_runner run(cfg, "theta", out);
    const int n = cfg.theta_draws;
    const auto wide = [](sampler &s) { return complex(s.uniform(-2.0L, 2.0L), s.uniform(-1.5L, 1.5L)); };
    for (const context_spec &c : cfg.contexts) {
        const elliptic_context &ctx = c.ctx;
        const bool trig = ctx.is_trigonometric();
        run.run("oddness", c, 0, n, 1e-13L, [&](sampler &s) {
            const complex l = wide(s);
            return std::abs(eval_f(ctx, -l) + eval_f(ctx, l)) / std::abs(eval_f(ctx, l));
        });
        run.run("quasiperiod_i_pi", c, 0, n, 1e-12L, [&](sampler &s) {
            const complex l = wide(s);
            return std::abs(eval_f(ctx, l + i_pi) + eval_f(ctx, l)) / std::abs(eval_f(ctx, l));
        });
        run.run("addition_rule", c, 0, n, trig ? 1e-13L : 1e-12L, [&](sampler &s) {
            const complex a = s.draw(), b = s.draw(), x = s.draw(), y = s.draw();
            return addition_rule_residual(ctx, a, b, x, y);
        });
        run.run("lattice_zeros", c, 0, 1, 1e-12L, [&](sampler &) {
            real w = 0.0L;
            for (int a = -1; a <= 1; ++a) {
                for (int b = -1; b <= 1; ++b) {
                    const complex z = real(a) * i_pi + (trig ? 0.0L : real(b)) * i_pi * ctx.tau();
                    w = std::max(w, std::abs(eval_f(ctx, z)) / std::abs(ctx.f_prime_zero()));
                }
            }
            return w;
        });
        run.run("f_prime_zero_finite_difference", c, 0, 1, 1e-8L, [&](sampler &) {
            const real h = 1e-5L;
            const complex fd = (eval_f(ctx, h) - eval_f(ctx, -h)) / (2.0L * h);
            return std::abs(fd - f_prime_zero(ctx)) / std::abs(f_prime_zero(ctx));
        });
        run.run("interpolation_nodes", c, 0, n / 10, 0.0L, [&](sampler &s) {
            const int N = 3;
            const higher_order_theta F(s.draw(), s.draw(N));
            const std::vector<complex> nodes = s.draw(N);
            std::vector<complex> values;
            for (const complex &x : nodes) {
                values.push_back(F(ctx, x));
            }
            real w = 0.0L;
            for (int k = 0; k < N; ++k) {
                w = std::max(w, std::abs(interpolate_theta(ctx, N, F.norm(), nodes, values, nodes[k]) - values[k]));
            }
            return w;
        });
        run.run("interpolation_off_node", c, 0, n / 10, 1e-10L, [&](sampler &s) {
            const int N = 4;
            const higher_order_theta F(s.draw(), s.draw(N));
            const std::vector<complex> nodes = s.draw(N);
            std::vector<complex> values;
            for (const complex &x : nodes) {
                values.push_back(F(ctx, x));
            }
            const complex l = s.draw();
            return rel(interpolate_theta(ctx, N, F.norm(), nodes, values, l), F(ctx, l));
        });
        if (trig) {
            continue;
        }
        run.run("quasiperiod_i_pi_tau", c, 0, n, 1e-12L, [&](sampler &s) {
            const complex l = wide(s);
            const complex rhs = std::exp(-2.0L * l - i_pi * ctx.tau()) * eval_f(ctx, l);
            return std::abs(eval_f(ctx, l + i_pi * ctx.tau()) + rhs) / std::abs(rhs);
        });
        run.run("reduction_consistency", c, 0, n, 1e-11L, [&](sampler &s) {
            const int a = int(std::floor(s.uniform(-2.0L, 3.0L)));
            const int b = int(std::floor(s.uniform(-2.0L, 3.0L)));
            const complex l = s.draw() + real(a) * i_pi + real(b) * i_pi * ctx.tau();
            const reduced_argument r = reduce_argument(ctx, l);
            return rel(direct_series(ctx, l), r.multiplier * direct_series(ctx, r.value));
        });
        run.run("order_norm_f_2lambda_plus_gamma", c, 0, 5, 1e-10L, [&](sampler &s) {
            const complex g = s.draw();
            const auto r = classify_order_norm(ctx, [&](complex l) { return eval_f(ctx, 2.0L * l + g); }, 4, 2.0L * g);
            return std::max(r.res_pi, r.res_pi_tau);
        });
    }
    const context_spec near{"tau=40i", elliptic_context::elliptic({0.0L, 40.0L})};
    run.run("trigonometric_limit", near, 0, n, 1e-12L, [&](sampler &s) {
        const complex l(s.uniform(-2.0L, 2.0L), s.uniform(-1.0L, 1.0L));
        return std::abs(eval_f(near.ctx, l) - std::sinh(l));
    });
}

// ---- weights --------------------------------------------------------------

inline void weights_suite(const suite_config &cfg, std::vector<check_result> &out)
{
    check_runner run(cfg, "weights", out);
    const auto params = [](sampler &s) {
        local_params p;
        p.gamma = s.draw();
        p.lambda1 = s.draw();
        p.lambda2 = s.draw();
        p.lambda3 = s.draw();
        p.theta = s.draw();
        p.zeta = s.draw();
        return p;
    };
    for (const context_spec &c : cfg.contexts) {
        for (const local_identity kind :
             {local_identity::dybe, local_identity::unitarity, local_identity::crossing, local_identity::reflection}) {
            run.run(to_string(kind), c, 0, cfg.local_draws, 1e-10L,
                    [&](sampler &s) { return local_identity_residual(c.ctx, kind, params(s)); });
        }
        run.run("ice_rule", c, 0, cfg.local_draws, 1e-14L, [&](sampler &s) {
            const local_params p = params(s);
            const matrix4 R = r_matrix(c.ctx, p.gamma, p.lambda1, p.theta);
            matrix4 H = matrix4::Zero(), Ht = matrix4::Zero();
            for (int k = 0; k < 4; ++k) {
                H(k, k) = real(leg_sign(std::size_t(k), 0, 2) + leg_sign(std::size_t(k), 1, 2));
                Ht(k, k) = real(-leg_sign(std::size_t(k), 0, 2) + leg_sign(std::size_t(k), 1, 2));
            }
            const matrix Rt = partial_transpose_leading(R);
            const real scale = R.cwiseAbs().maxCoeff();
            return std::max((H * R - R * H).cwiseAbs().maxCoeff(), (Ht * Rt - Rt * Ht).cwiseAbs().maxCoeff()) / scale;
        });
        run.run("unitarity_theta_independent", c, 0, cfg.local_draws, 1e-12L, [&](sampler &s) {
            const local_params p = params(s);
            const auto factor = [&](complex th) {
                matrix X = matrix::Identity(4, 4);
                const std::array<int, 0> none{};
                detail::apply_r(c.ctx, p.gamma, X, 2, 1, 0, -p.lambda1, th, none);
                detail::apply_r(c.ctx, p.gamma, X, 2, 0, 1, p.lambda1, th, none);
                return X(0, 0);
            };
            return rel(factor(p.theta), factor(p.zeta));
        });
    }
}

// ---- algebra --------------------------------------------------------------

inline void algebra_suite(const suite_config &cfg, std::vector<check_result> &out)
{
    check_runner run(cfg, "algebra", out);
    for (const context_spec &c : cfg.contexts) {
        for (int L = 1; L <= cfg.algebra.for_context(c.ctx); ++L) {
            for (const algebra_relation r : all_algebra_relations) {
                run.run(to_string(r), c, L, cfg.algebra_draws, 1e-10L, [&](sampler &s) {
                    const model_instance m = draw_model(s, c.ctx, L);
                    relation_args a{s.draw(), s.draw(), s.draw(L)};
                    std::vector<complex> all{a.lambda1, a.lambda2};
                    all.insert(all.end(), a.lambdas.begin(), a.lambdas.end());
                    require_spread(m, all);
                    return algebra_relation_residual(m, r, a);
                });
            }
            run.run("monodromy_unitarity", c, L, cfg.algebra_draws, 1e-10L, [&](sampler &s) {
                const model_instance m = draw_model(s, c.ctx, L);
                return monodromy_unitarity_residual(m, s.draw());
            });
            run.run("monodromy_crossing", c, L, cfg.algebra_draws, 1e-10L, [&](sampler &s) {
                const model_instance m = draw_model(s, c.ctx, L);
                return monodromy_crossing_residual(m, s.draw());
            });
            run.run("operator_weights", c, L, cfg.algebra_draws, 1e-12L, [&](sampler &s) {
                const model_instance m = draw_model(s, c.ctx, L);
                const complex l = s.draw();
                const lattice_operator dr = build_double_row(m, l);
                real w = std::max({weight_residual(build_monodromy(m, l, direction::forward)),
                                     weight_residual(build_monodromy(m, l, direction::backward)), weight_residual(dr),
                                     weight_residual(d_tilde(m, l))});
                for (const block b : {block::A, block::B, block::C, block::D}) {
                    w = std::max(w, weight_residual(extract_block(dr, b)));
                }
                return w;
            });
        }
        for (int L = 1; L <= cfg.vacuum.for_context(c.ctx); ++L) {
            const auto closed_vs_operator = [&](sampler &s, auto &&measure) {
                const model_instance m = draw_model(s, c.ctx, L);
                const complex l = s.draw();
                return measure(m, l, vacuum_eigenvalues_operator(m, l));
            };
            run.run("vacuum_eigenvalues", c, L, cfg.vacuum_draws, 1e-10L, [&](sampler &s) {
                return closed_vs_operator(s, [](const model_instance &m, complex l, const operator_vacuum_result &r) {
                    const vacuum_eigenvalues a = vacuum_eigenvalues_closed(m, l), &b = r.values;
                    return max_relative({a.A_cal, a.D_tilde, a.bar_A_cal, a.right_A, a.right_D, a.right_A_bar,
                                         a.right_D_bar, a.left_A, a.left_D, a.left_A_bar, a.left_D_bar},
                                        {b.A_cal, b.D_tilde, b.bar_A_cal, b.right_A, b.right_D, b.right_A_bar,
                                         b.right_D_bar, b.left_A, b.left_D, b.left_A_bar, b.left_D_bar});
                });
            });
            run.run("vacuum_eigenvector", c, L, cfg.vacuum_draws, 1e-11L, [&](sampler &s) {
                return closed_vs_operator(
                    s, [](const model_instance &, complex, const operator_vacuum_result &r) { return r.eigenvector_residual; });
            });
            run.run("vacuum_annihilation", c, L, cfg.vacuum_draws, 1e-13L, [&](sampler &s) {
                return closed_vs_operator(s, [](const model_instance &, complex, const operator_vacuum_result &r) {
                    return r.annihilation_residual;
                });
            });
            run.run("eigenvalue_crossing", c, L, cfg.vacuum_draws, 1e-11L, [&](sampler &s) {
                const model_instance m = draw_model(s, c.ctx, L);
                const complex l = s.draw(), g = m.gamma, th = m.theta, z = m.zeta;
                const real Ld = L;
                const complex factor = m.f(2.0L * l + g) * m.f(th + z + l) * m.f(th - (Ld - 1.0L) * g) /
                                       (m.f(2.0L * l) * m.f(th + z - l - g) * m.f(th - Ld * g));
                return rel(lambda_A_cal(m, -l - g), factor * lambda_D_tilde(m, l));
            });
        }
    }
}

// ---- partition ------------------------------------------------------------

inline std::vector<complex> draw_point(sampler &s, const model_instance &m)
{
    std::vector<complex> p = s.draw(m.size());
    check_spectral_point(m, p, default_draw_margin);
    return p;
}

inline void partition_suite(const suite_config &cfg, std::vector<check_result> &out)
{
    check_runner run(cfg, "partition", out);
    for (const context_spec &c : cfg.contexts) {
        const bool trig = c.ctx.is_trigonometric();
        for (int L = 1; L <= cfg.routes.for_context(c.ctx); ++L) {
            run.run("route_agreement", c, L, cfg.route_draws.for_context(c.ctx), 1e-9L, [&](sampler &s) {
                const model_instance m = draw_model(s, c.ctx, L);
                const std::vector<complex> p = draw_point(s, m);
                return compute_partition_report(m, p, {true, true, false}, {}).max_deviation();
            });
            if (L >= 2 && L <= 4) {
                run.run("permutation_symmetry", c, L, cfg.structure_draws, 1e-11L, [&](sampler &s) {
                    const model_instance m = draw_model(s, c.ctx, L);
                    std::vector<complex> p = draw_point(s, m);
                    const complex za = z_algebraic(m, p);
                    const complex zs = z_symmetrized(m, p, sum_variant::main);
                    real w = 0.0L;
                    const auto measure = [&](const std::vector<complex> &q) {
                        w = std::max({w, rel(z_algebraic(m, q), za), rel(z_symmetrized(m, q, sum_variant::main), zs)});
                    };
                    if (L <= 3) {
                        std::vector<complex> q = p;
                        std::vector<int> idx(static_cast<std::size_t>(L));
                        std::iota(idx.begin(), idx.end(), 0);
                        while (std::next_permutation(idx.begin(), idx.end())) {
                            for (int i = 0; i < L; ++i) {
                                q[i] = p[idx[i]];
                            }
                            measure(q);
                        }
                    } else {
                        for (int t = 0; t < 10; ++t) {
                            std::vector<complex> q = p;
                            for (int i = L - 1; i > 0; --i) {
                                const int j = std::min(i, int(s.uniform(0.0L, real(i + 1))));
                                std::swap(q[i], q[j]);
                            }
                            measure(q);
                        }
                    }
                    return w;
                });
            }
        }
        for (int L = 1; L <= std::min(cfg.contour_max_size, max_contour_size); ++L) {
            run.run("contour_agreement", c, L, cfg.contour_draws, 1e-6L, [&](sampler &s) {
                const model_instance m = draw_model(s, c.ctx, L);
                const std::vector<complex> p = draw_point(s, m);
                return rel(z_contour(m, p, default_contour_radius(m, p), cfg.contour_nodes),
                           z_symmetrized(m, p, sum_variant::main));
            });
        }
        for (int L = 1; L <= cfg.structure.for_context(c.ctx); ++L) {
            run.run("crossing", c, L, cfg.structure_draws, 1e-10L, [&](sampler &s) {
                const model_instance m = draw_model(s, c.ctx, L);
                const std::vector<complex> p = draw_point(s, m);
                const complex z = z_algebraic(m, p);
                real w = 0.0L;
                for (int i = 0; i < L; ++i) {
                    std::vector<complex> q = p;
                    q[i] = -q[i] - m.gamma;
                    w = std::max(w, rel(z_algebraic(m, q), z_crossing_factor(m, p[i]) * z));
                }
                return w;
            });
            run.run("zbar_order_norm", c, L, cfg.structure_draws, 1e-8L, [&](sampler &s) {
                const model_instance m = draw_model(s, c.ctx, L);
                const std::vector<complex> p = draw_point(s, m);
                const auto F = [&](complex l) {
                    std::vector<complex> q = p;
                    q[0] = l;
                    return z_bar(m, q);
                };
                if (trig) {
                    return trigonometric_degree_residual(F, 2 * (L + 1));
                }
                const auto r = classify_order_norm(c.ctx, F, 2 * (L + 1), real(L - 1) * m.gamma);
                return std::max(r.res_pi, r.res_pi_tau);
            });
            run.run("removable_pole", c, L, cfg.structure_draws, 10.0L, [&](sampler &s) {
                const model_instance m = draw_model(s, c.ctx, L);
                std::vector<complex> z = s.draw(L);
                const complex centre = -0.5L * m.gamma;
                const auto peak = [&](real eps) {
                    real w = 0.0L;
                    for (int k = 0; k < 16; ++k) {
                        z.back() = centre + eps * std::exp(complex(0.0L, 2.0L * pi * (k + 0.5L) / 16.0L));
                        w = std::max(w, std::abs(m.f(2.0L * z.back()) / m.f(2.0L * z.back() + m.gamma) * m_l(m, L, z)));
                    }
                    return w;
                };
                return peak(1e-5L) / peak(1e-3L);
            });
            if (L >= 2) {
                run.run("special_zeros", c, L, cfg.structure_draws, 1e-9L, [&](sampler &s) {
                    const model_instance m = draw_model(s, c.ctx, L);
                    const std::vector<complex> others = s.draw(L - 2);
                    require_spread(m, others);
                    const z_function z = [&](std::span<const complex> x) { return z_algebraic(m, x); };
                    real w = 0.0L;
                    for (int k = 1; k <= L; ++k) {
                        for (const real v : special_zero_scan(m, z, k, others)) {
                            w = std::max(w, v);
                        }
                    }
                    return w;
                });
            }
        }
    }
}

// ---- funceq ---------------------------------------------------------------

inline model_instance drop_last(const model_instance &m)
{
    return with_inhomogeneities(m, std::vector<complex>(m.mu.begin(), m.mu.end() - 1));
}

inline void funceq_suite(const suite_config &cfg, std::vector<check_result> &out)
{
    check_runner run(cfg, "funceq", out);
    for (const context_spec &c : cfg.contexts) {
        const bool trig = c.ctx.is_trigonometric();
        const int n = cfg.funceq_draws;
        for (int L = 1; L <= cfg.funceq.for_context(c.ctx); ++L) {
            // A generic model, spectral point and extra parameter λ0.
            const auto setup = [&](sampler &s) {
                model_instance m = draw_model(s, c.ctx, L);
                std::vector<complex> full = s.draw(L + 1);
                check_spectral_point(m, std::span<const complex>(full).subspan(1), default_draw_margin);
                for (int i = 1; i <= L; ++i) {
                    detail::require_generic(m.ctx, full[i] - full[0], "[lambda_i-lambda_0]", default_draw_margin);
                    detail::require_generic(m.ctx, full[i] + full[0] + m.gamma, "[lambda_i+lambda_0+gamma]",
                                            default_draw_margin);
                }
                const complex l0 = full[0];
                full.erase(full.begin());
                return std::tuple{m, l0, full};
            };
            run.run("fe_residual", c, L, n, 1e-9L, [&](sampler &s) {
                const auto [m, l0, p] = setup(s);
                const fe_result r = fe_residual(m, l0, p, [&](std::span<const complex> x) { return z_algebraic(m, x); });
                return r.residual / r.scale;
            });
            run.run("swapped_determinant", c, L, n, 1e-8L, [&](sampler &s) {
                const auto [m, l0, p] = setup(s);
                const determinant_result d = swapped_matrix_det(m, l0, p);
                return std::abs(d.det) / d.scale;
            });
            run.run("m0_at_special_point", c, L, n, 1e-12L, [&](sampler &s) {
                const auto [m, l0, p] = setup(s);
                real w = 0.0L;
                for (const complex &u : m.mu) {
                    const complex M0 = coefficients(m, u - m.gamma, p)[0];
                    w = std::max(w, rel(M0, lambda_bar_A_cal(m, u - m.gamma)));
                }
                return w;
            });
            run.run("coefficient_symmetry", c, L, n, 1e-11L, [&](sampler &s) {
                const auto [m, l0, p] = setup(s);
                const std::vector<complex> M = coefficients(m, l0, p);
                real w = 0.0L;
                for (int i = 0; i < L; ++i) {
                    std::vector<complex> q = p;
                    q[i] = -q[i] - m.gamma;
                    const std::vector<complex> Mc = coefficients(m, l0, q);
                    w = std::max({w, rel(Mc[0], M[0]), rel(Mc[i + 1], z_crossing_factor(m, p[i]) * M[i + 1])});
                    for (int j = 0; j < L; ++j) {
                        if (j != i) {
                            w = std::max(w, rel(Mc[j + 1], M[j + 1]));
                        }
                    }
                    if (i + 1 < L) {
                        std::vector<complex> t = p;
                        std::swap(t[i], t[i + 1]);
                        const std::vector<complex> Mt = coefficients(m, l0, t);
                        w = std::max({w, rel(Mt[0], M[0]), rel(Mt[i + 1], M[i + 2]), rel(Mt[i + 2], M[i + 1])});
                    }
                }
                return w;
            });
            run.run("residue_boundedness", c, L, n, 10.0L, [&](sampler &s) {
                const auto [m, l0, p] = setup(s);
                real w = 0.0L;
                for (int i = 0; i < L; ++i) {
                    // Near λ0 = −λ_i−γ the residues of M_0 and M_i are in the ratio
                    // −z_crossing_factor, the same factor that relates Z to its crossed value.
                    const complex cr = z_crossing_factor(m, p[i]);
                    const auto at = [&](real eps, bool crossing) {
                        const complex x = crossing ? -p[i] - m.gamma + eps : p[i] + eps;
                        const std::vector<complex> M = coefficients(m, x, p);
                        return std::abs(crossing ? M[0] + cr * M[i + 1] : M[0] + M[i + 1]);
                    };
                    for (const bool crossing : {false, true}) {
                        const real ref = at(1e-3L, crossing);
                        w = std::max({w, at(1e-4L, crossing) / ref, at(1e-5L, crossing) / ref});
                    }
                }
                return w;
            });
            if (L <= 3) {
                run.run("normalized_order_norm", c, L, n, 1e-8L, [&](sampler &s) {
                    const auto [m, l0, p] = setup(s);
                    real w = 0.0L;
                    for (int nu = 0; nu <= L; ++nu) {
                        const auto F = [&](complex x) { return normalized_coefficients(m, x, p)[nu]; };
                        const int N = nu == 0 ? 4 * L + 6 : 2 * L + 4;
                        if (trig) {
                            // Sample on Re λ0 = 1.5, clear of the cancelling poles at the λ_j.
                            w = std::max(w, trigonometric_degree_residual(F, N, 1.5L));
                            continue;
                        }
                        const complex t = (nu == 0 ? real(L + 2) : 3.0L) * m.gamma - m.theta;
                        const auto r = classify_order_norm(c.ctx, F, N, t);
                        w = std::max({w, r.res_pi, r.res_pi_tau});
                    }
                    return w;
                });
            }
            if (L < 2) {
                continue;
            }
            const auto reduced_setup = [&](sampler &s) {
                auto [m, l0, p] = setup(s);
                p.pop_back();
                return std::tuple{m, l0, p};
            };
            if (L <= 3) {
                run.run("reconstruct_last", c, L, n, 1e-8L, [&](sampler &s) {
                    const auto [m, l0, p] = setup(s);
                    return rel(reconstruct_last(m, p), z_algebraic(m, p));
                });
                run.run("reconstruct_first", c, L, 1, 1e-9L, [&](sampler &s) {
                    const auto [m, l0, calib] = setup(s);
                    const complex k = first_route_constant(m, calib);
                    real w = 0.0L;
                    for (int t = 0; t < 5; ++t) {
                        const std::vector<complex> p = s.generic([&](sampler &g) { return draw_point(g, m); });
                        w = std::max(w, rel(reconstruct_first(m, p, k), z_algebraic(m, p)));
                    }
                    return w;
                });
            }
            run.run("factorization_constant", c, L, n, 1e-10L, [&](sampler &s) {
                const auto [m, l0, p] = reduced_setup(s);
                std::vector<complex> q = p;
                q.push_back(m.mu.back() - m.gamma);
                complex pr = 1.0L;
                for (const complex &x : p) {
                    pr *= m.f(x - m.mu.back()) * m.f(x + m.mu.back() + m.gamma);
                }
                return rel(z_algebraic(m, q) / (z_algebraic(drop_last(m), p) * pr), factorization_constant(m));
            });
            run.run("star_proportionality", c, L, n, 1e-10L, [&](sampler &s) {
                const auto [m, l0, p] = reduced_setup(s);
                return ratio_spread(reduced_coefficients(m, l0, p, star_choice::minus),
                                    reduced_coefficients(m, l0, p, star_choice::plus));
            });
            run.run("reduced_fe_residual", c, L, n, 1e-8L, [&](sampler &s) {
                const auto [m, l0, p] = reduced_setup(s);
                const model_instance sub = drop_last(m);
                const std::vector<complex> Mt = reduced_coefficients(m, l0, p, star_choice::minus);
                const std::vector<complex> full = prepend(l0, p);
                compensated_sum sum;
                real scale = 0.0L;
                for (int nu = 0; nu < L; ++nu) {
                    const complex term = Mt[nu] * z_algebraic(sub, omit(full, nu));
                    sum.add(term);
                    scale = std::max(scale, std::abs(term));
                }
                return std::abs(sum.value()) / scale;
            });
            if (L == 2) {
                run.run("reduced_matches_length_one", c, L, n, 1e-10L, [&](sampler &s) {
                    const auto [m, l0, p] = reduced_setup(s);
                    return ratio_spread(reduced_coefficients(m, l0, p, star_choice::minus), coefficients(drop_last(m), l0, p));
                });
            }
            run.run("modified_determinant_vanishes", c, L, n, 1e-10L, [&](sampler &s) {
                const auto [m, l0, p] = reduced_setup(s);
                const determinant_result d = matrix_determinant(modified_swapped_matrix(m, l0, p, star_choice::minus));
                return std::abs(d.det) / d.scale;
            });
            run.run(
                "special_zero_determinant_nonzero", c, L, n, 1e-8L,
                [&](sampler &s) {
                    const auto [m, l0, p] = setup(s);
                    const std::vector<complex> others(p.begin(), p.end() - 2);
                    real w = std::numeric_limits<real>::infinity();
                    for (int k = 1; k <= L; ++k) {
                        for (const auto &pair : special_zero_pairs(m, k)) {
                            const determinant_result d = matrix_determinant(special_zero_matrix(m, l0, others, pair));
                            w = std::min(w, std::abs(d.det) / d.scale);
                        }
                    }
                    return w;
                },
                bound::lower);
        }
    }
}

} // namespace detail

// Runs the named suites (all when empty) in the fixed order of suite_names().
inline std::vector<check_result> run_suites(const suite_config &cfg, const std::vector<std::string> &names = {})
{
    std::vector<check_result> out;
    const auto wanted = [&](const std::string &s) {
        return names.empty() || std::find(names.begin(), names.end(), s) != names.end();
    };
    for (const std::string &s : names) {
        if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end()) {
            throw std::invalid_argument("unknown suite: " + s);
        }
    }
    if (wanted("theta")) {
        detail::theta_suite(cfg, out);
    }
    if (wanted("weights")) {
        detail::weights_suite(cfg, out);
    }
    if (wanted("algebra")) {
        detail::algebra_suite(cfg, out);
    }
    if (wanted("partition")) {
        detail::partition_suite(cfg, out);
    }
    if (wanted("funceq")) {
        detail::funceq_suite(cfg, out);
    }
    return out;
}

inline bool all_passed(const std::vector<check_result> &checks)
{
    return std::all_of(checks.begin(), checks.end(), [](const check_result &c) { return c.passed; });
}

} // namespace esos

#pragma once

// The three subcommands. Each returns the serialized output and an exit code;
// the caller decides where the text goes.

#include <chrono>
#include <ostream>
#include <string>
#include <vector>

#include <esos/suites.hpp>

#include "config.hpp"

namespace esos::cli {

enum exit_code : int {
    exit_ok = 0,
    exit_internal = 1,
    exit_config = 2,
    exit_degenerate = 3,
    exit_disagreement = 4,
    exit_suite_failure = 5,
};

struct command_result {
    int code = exit_ok;
    std::string output;
};

#ifndef ESOS_VERSION
#define ESOS_VERSION "0.0.0"
#endif

inline constexpr const char *version = ESOS_VERSION;

inline json to_json(complex z) { return json::array({double(z.real()), double(z.imag())}); }

inline json to_json(std::span<const complex> v)
{
    json a = json::array();
    for (const complex &z : v) {
        a.push_back(to_json(z));
    }
    return a;
}

// Finite reals as numbers, anything else as null.
inline json number_or_null(real x) { return std::isfinite(x) ? json(double(x)) : json(nullptr); }

inline json complex_or_null(complex z)
{
    return std::isfinite(z.real()) && std::isfinite(z.imag()) ? to_json(z) : json(nullptr);
}

inline json model_json(const model_config &mc)
{
    json j;
    j["L"] = mc.mu.size();
    if (mc.trigonometric) {
        j["trigonometric"] = true;
    } else {
        j["tau"] = to_json(mc.tau);
        j["series_tol"] = double(mc.series_tol);
        j["max_terms"] = mc.max_terms;
    }
    j["gamma"] = to_json(mc.gamma);
    j["zeta"] = to_json(mc.zeta);
    j["theta"] = to_json(mc.theta);
    j["mu"] = to_json(mc.mu);
    return j;
}

inline json routes_json(const route_selection &r)
{
    json a = json::array();
    if (r.algebraic) {
        a.push_back("algebraic");
    }
    if (r.symmetrized) {
        a.push_back("symmetrized");
    }
    if (r.contour) {
        a.push_back("contour");
    }
    return a;
}

inline json error_json(const std::string &kind, const std::string &message)
{
    json j;
    j["kind"] = kind;
    j["message"] = message;
    return j;
}

// Spectral points from the config: explicit, sampled, or none.
inline std::vector<std::vector<complex>> spectral_points(const run_config &c, const model_instance &m)
{
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        if (int(c.points[i].size()) != m.size()) {
            throw config_error("points[" + std::to_string(i) + "]: expected " + std::to_string(m.size()) + " spectral parameters");
        }
    }
    if (!c.sampling) {
        return c.points;
    }
    sampler s(c.seed, "eval/points", std::uint64_t(m.size()));
    std::vector<std::vector<complex>> pts;
    const region &b = c.sampling->box;
    for (int n = 0; n < c.sampling->count; ++n) {
        pts.push_back(s.generic([&](sampler &g) {
            std::vector<complex> p;
            for (int j = 0; j < m.size(); ++j) {
                const real re = g.uniform(b.re_lo, b.re_hi);
                const real im = g.uniform(b.im_lo, b.im_hi);
                p.emplace_back(re, im);
            }
            check_spectral_point(m, p);
            return p;
        }));
    }
    return pts;
}

inline command_result run_eval(const run_config &c)
{
    if (!c.model) {
        throw config_error("eval needs a model");
    }
    const model_instance m = build_model(*c.model);
    if (c.routes.contour && m.size() > max_contour_size) {
        throw config_error("contour route limited to L <= 3");
    }
    const auto pts = spectral_points(c, m);

    json report;
    report["command"] = "eval";
    report["version"] = version;
    report["seed"] = c.seed;
    report["model"] = model_json(*c.model);
    report["routes"] = routes_json(c.routes);
    report["tolerance"] = {{"routes", c.route_tol}, {"contour", c.contour_tol}};
    report["omega_L"] = to_json(omega_L(m));

    bool agree = true;
    json rows = json::array();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto r = compute_partition_report(m, pts[i], c.routes, c.contour);
        json row;
        row["index"] = i;
        row["lambda"] = to_json(pts[i]);
        json values;
        if (r.z_algebraic) {
            values["algebraic"] = complex_or_null(*r.z_algebraic);
        }
        if (r.z_symmetrized) {
            values["symmetrized"] = complex_or_null(*r.z_symmetrized);
            values["symmetrized_alt"] = complex_or_null(*r.z_symmetrized_alt);
        }
        if (r.z_contour) {
            values["contour"] = complex_or_null(*r.z_contour);
            row["contour_radius"] = number_or_null(*r.contour_radius);
            row["contour_nodes"] = c.contour.n_nodes;
        }
        row["values"] = values;
        json dev = json::object();
        bool row_agree = true;
        for (const auto &[name, d] : r.deviations) {
            dev[name] = number_or_null(d);
            const double tol = name.find("contour") != std::string::npos ? c.contour_tol : c.route_tol;
            if (!(d <= tol)) {
                row_agree = false;
            }
        }
        row["deviations"] = dev;
        json diag = json::object();
        for (const auto &[name, d] : r.diagnostics) {
            diag[name] = number_or_null(d);
        }
        row["diagnostics"] = diag;
        row["agree"] = row_agree;
        if (c.timing) {
            json sec = json::object();
            for (const auto &[name, t] : r.seconds) {
                sec[name] = double(t);
            }
            row["seconds"] = sec;
        }
        agree = agree && row_agree;
        rows.push_back(std::move(row));
    }
    report["points"] = rows;
    report["status"] = agree ? "ok" : "route_disagreement";
    return {agree ? exit_ok : exit_disagreement, to_text(report)};
}

inline suite_config suite_config_from(const run_config &c)
{
    suite_config s = default_suite_config();
    s.seed = c.seed;
    if (!c.verify.contexts.empty()) {
        s.contexts = c.verify.contexts;
    }
    if (c.suite_tol) {
        s.tol = *c.suite_tol;
    }
    if (c.verify.max_size) {
        const int n = *c.verify.max_size;
        for (size_caps *caps : {&s.algebra, &s.vacuum, &s.routes, &s.structure, &s.funceq}) {
            caps->elliptic = std::min(caps->elliptic, n);
            caps->trigonometric = std::min(caps->trigonometric, n);
        }
        s.contour_max_size = std::min(s.contour_max_size, n);
    }
    for (const auto &[key, n] : c.verify.draws) {
        if (key == "theta") {
            s.theta_draws = n;
        } else if (key == "local") {
            s.local_draws = n;
        } else if (key == "algebra") {
            s.algebra_draws = n;
        } else if (key == "vacuum") {
            s.vacuum_draws = n;
        } else if (key == "routes") {
            s.route_draws = {n, n};
        } else if (key == "contour") {
            s.contour_draws = n;
        } else if (key == "structure") {
            s.structure_draws = n;
        } else if (key == "funceq") {
            s.funceq_draws = n;
        }
    }
    return s;
}

inline json check_json(const check_result &r)
{
    json j;
    j["suite"] = r.suite;
    j["name"] = r.name;
    j["context"] = r.context;
    j["size"] = r.size;
    j["draws"] = r.draws;
    j["resamples"] = r.resamples;
    j["worst"] = r.worst ? number_or_null(*r.worst) : json(nullptr);
    j["bound"] = r.kind == bound::upper ? "upper" : "lower";
    j["tol"] = double(r.tol);
    j["passed"] = r.passed;
    return j;
}

inline command_result run_verify(const run_config &c)
{
    const suite_config cfg = suite_config_from(c);
    const std::vector<std::string> names = c.suites.empty() ? suite_names() : c.suites;

    json report;
    report["command"] = "verify";
    report["version"] = version;
    report["seed"] = cfg.seed;
    report["tolerance_override"] = cfg.tol ? json(double(*cfg.tol)) : json(nullptr);
    report["suites"] = names;
    json ctxs = json::array();
    for (const auto &cs : cfg.contexts) {
        ctxs.push_back(cs.label);
    }
    report["contexts"] = ctxs;

    json checks = json::array();
    json seconds = json::object();
    int failed = 0;
    int total = 0;
    for (const auto &name : names) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto results = run_suites(cfg, {name});
        seconds[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const auto &r : results) {
            ++total;
            failed += r.passed ? 0 : 1;
            checks.push_back(check_json(r));
        }
    }
    report["checks"] = checks;
    if (c.timing) {
        report["seconds"] = seconds;
    }
    report["summary"] = {{"checks", total}, {"failed", failed}, {"passed", failed == 0}};
    return {failed == 0 ? exit_ok : exit_suite_failure, to_text(report)};
}

namespace detail {

// Applies one scan coordinate to the model or the spectral point.
inline void apply_axis(const std::string &param, complex value, model_config &mc, std::vector<complex> &point)
{
    const auto index = [&](const std::string &prefix, std::size_t n) {
        const std::string digits = param.substr(prefix.size());
        int k = 0;
        try {
            std::size_t used = 0;
            k = std::stoi(digits, &used);
            if (used != digits.size()) {
                throw config_error("");
            }
        } catch (...) {
            throw config_error("scan.axes.param: cannot parse index in \"" + param + "\"");
        }
        if (k < 1 || std::size_t(k) > n) {
            throw config_error("scan.axes.param: \"" + param + "\" out of range");
        }
        return std::size_t(k - 1);
    };
    if (param == "theta") {
        mc.theta = value;
    } else if (param == "zeta") {
        mc.zeta = value;
    } else if (param == "gamma") {
        mc.gamma = value;
    } else if (param.rfind("lambda_", 0) == 0) {
        point[index("lambda_", point.size())] = value;
    } else if (param.rfind("mu_", 0) == 0) {
        mc.mu[index("mu_", mc.mu.size())] = value;
    } else {
        throw config_error("scan.axes.param: unknown parameter \"" + param + "\"");
    }
}

inline complex grid_value(const scan_axis &a, int i)
{
    if (a.points == 1) {
        return a.from;
    }
    const real t = real(i) / real(a.points - 1);
    return a.from + t * (a.to - a.from);
}

} // namespace detail

inline command_result run_scan(const run_config &c)
{
    if (!c.model) {
        throw config_error("scan needs a model");
    }
    if (c.scan.axes.empty()) {
        throw config_error("scan needs one or two axes");
    }
    if (c.points.size() > 1 || c.sampling) {
        throw config_error("scan takes a single base point in points");
    }
    const int L = int(c.model->mu.size());
    if (c.scan.route == "contour" && L > max_contour_size) {
        throw config_error("contour route limited to L <= 3");
    }
    const bool wants_fe = std::find(c.scan.residuals.begin(), c.scan.residuals.end(), "fe_residual") != c.scan.residuals.end();
    if (wants_fe && !c.scan.lambda_0) {
        throw config_error("scan.lambda_0 is required for the fe_residual column");
    }
    // Points on the operator route only need to avoid the poles of Z, so a scan
    // can pass through special zeroes; other routes use the full guards.
    const bool operator_only =
        c.scan.route == "algebraic" &&
        std::all_of(c.scan.residuals.begin(), c.scan.residuals.end(), [](const std::string &r) { return r == "zbar"; });
    std::vector<complex> base;
    if (!c.points.empty()) {
        base = c.points[0];
    } else {
        for (int j = 0; j < L; ++j) {
            base.emplace_back(0.3L + 0.1L * real(j), 0.05L);
        }
    }
    if (int(base.size()) != L) {
        throw config_error("points[0]: expected " + std::to_string(L) + " spectral parameters");
    }
    // Validate parameter names before touching the grid, so a bad name on an
    // empty grid is still an error.
    {
        model_config mc = *c.model;
        auto p = base;
        for (const auto &a : c.scan.axes) {
            detail::apply_axis(a.param, a.from, mc, p);
        }
    }

    struct row {
        std::vector<int> idx;
        std::vector<complex> coord;
        std::optional<complex> z, zbar;
        std::vector<std::optional<real>> residuals;
        std::string reason;
    };
    std::vector<row> rows;
    const int n0 = c.scan.axes[0].points;
    const int n1 = c.scan.axes.size() > 1 ? c.scan.axes[1].points : 1;
    for (int i = 0; i < n0; ++i) {
        for (int k = 0; k < n1; ++k) {
            row r;
            r.idx.push_back(i);
            r.coord.push_back(detail::grid_value(c.scan.axes[0], i));
            if (c.scan.axes.size() > 1) {
                r.idx.push_back(k);
                r.coord.push_back(detail::grid_value(c.scan.axes[1], k));
            }
            model_config mc = *c.model;
            auto p = base;
            for (std::size_t a = 0; a < c.scan.axes.size(); ++a) {
                detail::apply_axis(c.scan.axes[a].param, r.coord[a], mc, p);
            }
            try {
                const model_instance m = build_model(mc);
                if (operator_only) {
                    check_z_poles(m, p);
                } else {
                    check_spectral_point(m, p);
                }
                complex z;
                if (c.scan.route == "algebraic") {
                    z = z_algebraic(m, p);
                } else if (c.scan.route == "symmetrized") {
                    z = z_symmetrized(m, p, sum_variant::main);
                } else {
                    z = z_contour(m, p);
                }
                std::vector<std::optional<real>> res;
                std::optional<complex> zbar;
                for (const auto &name : c.scan.residuals) {
                    if (name == "zbar") {
                        zbar = z_bar(m, p);
                    } else if (name == "route_deviation") {
                        res.push_back(relative_deviation(z_algebraic(m, p), z_symmetrized(m, p, sum_variant::main)));
                    } else if (name == "crossing") {
                        auto q = p;
                        q[0] = -q[0] - m.gamma;
                        res.push_back(relative_deviation(z_algebraic(m, q), z_crossing_factor(m, p[0]) * z_algebraic(m, p)));
                    } else if (name == "fe_residual") {
                        const auto fe = fe_residual(m, *c.scan.lambda_0, p, [&](std::span<const complex> x) { return z_algebraic(m, x); });
                        res.push_back(fe.scale > 0.0L ? fe.residual / fe.scale : fe.residual);
                    }
                }
                if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                    throw non_convergence("non-finite value");
                }
                r.z = z;
                r.zbar = zbar;
                r.residuals = std::move(res);
            } catch (const degenerate_parameter &e) {
                r.reason = "degenerate parameter " + e.guard();
            } catch (const config_error &) {
                throw;
            } catch (const error &e) {
                r.reason = e.what();
            }
            rows.push_back(std::move(r));
        }
    }

    std::vector<std::string> res_names;
    for (const auto &n : c.scan.residuals) {
        if (n != "zbar") {
            res_names.push_back(n);
        }
    }
    const bool with_zbar = std::find(c.scan.residuals.begin(), c.scan.residuals.end(), "zbar") != c.scan.residuals.end();

    if (c.format.value_or("csv") == "csv") {
        std::string out;
        std::vector<std::string> header;
        for (std::size_t a = 0; a < c.scan.axes.size(); ++a) {
            header.push_back("i" + std::to_string(a));
        }
        for (const auto &a : c.scan.axes) {
            header.push_back(a.param + "_re");
            header.push_back(a.param + "_im");
        }
        for (const char *h : {"z_re", "z_im", "abs_z"}) {
            header.emplace_back(h);
        }
        if (with_zbar) {
            for (const char *h : {"zbar_re", "zbar_im", "abs_zbar"}) {
                header.emplace_back(h);
            }
        }
        header.insert(header.end(), res_names.begin(), res_names.end());
        header.emplace_back("reason");
        const auto emit_line = [&](const std::vector<std::string> &cells) {
            for (std::size_t q = 0; q < cells.size(); ++q) {
                out += (q ? "," : "") + cells[q];
            }
            out += '\n';
        };
        if (rows.empty()) {
            return {exit_ok, ""};
        }
        emit_line(header);
        const auto num = [](real x) { return std::isfinite(x) ? format_double(double(x)) : std::string(); };
        for (const auto &r : rows) {
            std::vector<std::string> cells;
            for (int i : r.idx) {
                cells.push_back(std::to_string(i));
            }
            for (const complex &x : r.coord) {
                cells.push_back(num(x.real()));
                cells.push_back(num(x.imag()));
            }
            const auto put_complex = [&](const std::optional<complex> &z) {
                if (z) {
                    cells.push_back(num(z->real()));
                    cells.push_back(num(z->imag()));
                    cells.push_back(num(std::abs(*z)));
                } else {
                    cells.insert(cells.end(), 3, "");
                }
            };
            put_complex(r.z);
            if (with_zbar) {
                put_complex(r.zbar);
            }
            for (std::size_t q = 0; q < res_names.size(); ++q) {
                cells.push_back(q < r.residuals.size() && r.residuals[q] ? num(*r.residuals[q]) : "");
            }
            cells.push_back(r.reason.empty() ? "" : "\"" + r.reason + "\"");
            emit_line(cells);
        }
        return {exit_ok, out};
    }

    json report;
    report["command"] = "scan";
    report["version"] = version;
    report["seed"] = c.seed;
    report["model"] = model_json(*c.model);
    report["base_point"] = to_json(base);
    report["route"] = c.scan.route;
    json axes = json::array();
    for (const auto &a : c.scan.axes) {
        axes.push_back({{"param", a.param}, {"from", to_json(a.from)}, {"to", to_json(a.to)}, {"points", a.points}});
    }
    report["axes"] = axes;
    json out_rows = json::array();
    for (const auto &r : rows) {
        json j;
        j["index"] = r.idx;
        j["coordinates"] = to_json(r.coord);
        if (r.z) {
            j["z"] = complex_or_null(*r.z);
            j["abs_z"] = number_or_null(std::abs(*r.z));
            if (with_zbar) {
                j["zbar"] = complex_or_null(*r.zbar);
                j["abs_zbar"] = number_or_null(std::abs(*r.zbar));
            }
            for (std::size_t q = 0; q < res_names.size(); ++q) {
                j[res_names[q]] = number_or_null(*r.residuals[q]);
            }
            j["reason"] = nullptr;
        } else {
            j["z"] = nullptr;
            j["reason"] = r.reason;
        }
        out_rows.push_back(std::move(j));
    }
    report["rows"] = out_rows;
    return {exit_ok, to_text(report)};
}

} // namespace esos::cli

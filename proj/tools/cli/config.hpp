#pragma once

// JSON run configuration shared by eval, verify and scan. Complex numbers are
// [re, im] arrays; a bare number is read as a real value.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <esos/suites.hpp>

#include "json_writer.hpp"

namespace esos::cli {

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t default_seed = 42;
inline constexpr double default_route_tol = 1e-9;
inline constexpr double default_contour_tol = 1e-6;

struct model_config {
    bool trigonometric = false;
    complex tau{0.0L, 2.0L};
    real series_tol = 1e-16L;
    int max_terms = 64;
    complex gamma, zeta, theta;
    std::vector<complex> mu;
};

struct region {
    real re_lo = 0.1L, re_hi = 0.9L;
    real im_lo = -0.3L, im_hi = 0.3L;
};

struct sampling_config {
    int count = 1;
    region box;
};

struct scan_axis {
    std::string param; // theta, zeta, gamma, lambda_k or mu_k
    complex from, to;
    int points = 0;
};

struct scan_config {
    std::vector<scan_axis> axes;
    std::string route = "algebraic";
    std::vector<std::string> residuals;
    std::optional<complex> lambda_0;
};

struct verify_config {
    std::vector<context_spec> contexts;
    std::optional<int> max_size;
    std::vector<std::pair<std::string, int>> draws;
};

struct run_config {
    std::uint64_t seed = default_seed;
    std::optional<model_config> model;
    std::vector<std::vector<complex>> points;
    std::optional<sampling_config> sampling;
    route_selection routes{true, true, false};
    contour_options contour;
    double route_tol = default_route_tol;
    double contour_tol = default_contour_tol;
    std::vector<std::string> suites;
    std::optional<double> suite_tol;
    verify_config verify;
    scan_config scan;
    std::optional<std::string> out_path;
    std::optional<std::string> format; // scan defaults to csv, reports are always json
    bool timing = false;
};

namespace detail {

inline const std::vector<std::string> &known_residuals()
{
    static const std::vector<std::string> names{"zbar", "route_deviation", "crossing", "fe_residual"};
    return names;
}

inline complex read_complex(const json &j, const std::string &what)
{
    if (j.is_number()) {
        return {j.get<real>(), 0.0L};
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<real>(), j[1].get<real>()};
    }
    throw config_error(what + ": expected a number or an [re, im] pair");
}

inline std::vector<complex> read_complex_list(const json &j, const std::string &what)
{
    if (!j.is_array()) {
        throw config_error(what + ": expected an array");
    }
    std::vector<complex> v;
    for (std::size_t i = 0; i < j.size(); ++i) {
        v.push_back(read_complex(j[i], what + "[" + std::to_string(i) + "]"));
    }
    return v;
}

inline std::pair<real, real> read_interval(const json &j, const std::string &what)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number() || !(j[0].get<real>() <= j[1].get<real>())) {
        throw config_error(what + ": expected [lo, hi] with lo <= hi");
    }
    return {j[0].get<real>(), j[1].get<real>()};
}

template <class T>
T read_as(const json &j, const std::string &what)
{
    try {
        return j.get<T>();
    } catch (const json::exception &) {
        throw config_error(what + ": wrong type");
    }
}

inline void reject_unknown(const json &obj, std::initializer_list<const char *> allowed, const std::string &what)
{
    for (const auto &[key, value] : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char *a) { return key == a; }) == allowed.end()) {
            throw config_error(what + ": unknown key \"" + key + "\"");
        }
    }
}

inline model_config read_model(const json &j)
{
    if (!j.is_object()) {
        throw config_error("model: expected an object");
    }
    reject_unknown(j, {"L", "tau", "trigonometric", "series_tol", "max_terms", "gamma", "zeta", "theta", "mu"}, "model");
    model_config m;
    m.trigonometric = j.contains("trigonometric") && read_as<bool>(j["trigonometric"], "model.trigonometric");
    if (j.contains("tau")) {
        if (m.trigonometric) {
            throw config_error("model: tau and trigonometric are exclusive");
        }
        m.tau = read_complex(j["tau"], "model.tau");
    } else if (!m.trigonometric) {
        throw config_error("model: tau is required unless trigonometric is true");
    }
    if (j.contains("series_tol")) {
        m.series_tol = read_as<real>(j["series_tol"], "model.series_tol");
    }
    if (j.contains("max_terms")) {
        m.max_terms = read_as<int>(j["max_terms"], "model.max_terms");
    }
    for (const char *key : {"gamma", "zeta", "theta", "mu"}) {
        if (!j.contains(key)) {
            throw config_error(std::string("model.") + key + " is required");
        }
    }
    m.gamma = read_complex(j["gamma"], "model.gamma");
    m.zeta = read_complex(j["zeta"], "model.zeta");
    m.theta = read_complex(j["theta"], "model.theta");
    m.mu = read_complex_list(j["mu"], "model.mu");
    if (m.mu.empty() || int(m.mu.size()) > max_system_size) {
        throw config_error("model.mu: length must be between 1 and " + std::to_string(max_system_size));
    }
    if (j.contains("L") && read_as<int>(j["L"], "model.L") != int(m.mu.size())) {
        throw config_error("model.L does not match the length of model.mu");
    }
    return m;
}

inline context_spec read_context(const json &j)
{
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        for (auto &c : default_contexts()) {
            if (c.label == s) {
                return c;
            }
        }
        throw config_error("verify.contexts: unknown context \"" + s + "\"");
    }
    if (!j.is_object()) {
        throw config_error("verify.contexts: expected a label or an object");
    }
    reject_unknown(j, {"label", "tau", "trigonometric"}, "verify.contexts");
    try {
        if (j.contains("trigonometric") && read_as<bool>(j["trigonometric"], "verify.contexts.trigonometric")) {
            return {j.value("label", std::string("trigonometric")), elliptic_context::trigonometric()};
        }
        if (!j.contains("tau")) {
            throw config_error("verify.contexts: tau is required unless trigonometric is true");
        }
        const complex tau = read_complex(j["tau"], "verify.contexts.tau");
        auto ctx = elliptic_context::elliptic(tau);
        if (std::abs(ctx.q()) > max_nome) {
            throw config_error("verify.contexts: models are restricted to |q| <= 0.85");
        }
        std::string label = j.contains("label") ? read_as<std::string>(j["label"], "verify.contexts.label") : "tau=" + format_double(double(tau.real())) + "+" + format_double(double(tau.imag())) + "i";
        return {std::move(label), ctx};
    } catch (const invalid_context &e) {
        throw config_error(std::string("verify.contexts: ") + e.what());
    }
}

inline std::vector<std::string> split_list(const std::string &s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

} // namespace detail

inline route_selection parse_routes(const std::vector<std::string> &names)
{
    route_selection r{false, false, false};
    for (const auto &n : names) {
        if (n == "a" || n == "algebraic") {
            r.algebraic = true;
        } else if (n == "s" || n == "symmetrized") {
            r.symmetrized = true;
        } else if (n == "c" || n == "contour") {
            r.contour = true;
        } else {
            throw config_error("routes: unknown route \"" + n + "\" (expected a, s or c)");
        }
    }
    if (!r.algebraic && !r.symmetrized && !r.contour) {
        throw config_error("routes: at least one route is required");
    }
    return r;
}

inline std::vector<std::string> parse_suites(const std::vector<std::string> &names)
{
    for (const auto &n : names) {
        if (std::find(suite_names().begin(), suite_names().end(), n) == suite_names().end()) {
            throw config_error("suites: unknown suite \"" + n + "\"");
        }
    }
    return names;
}

inline run_config parse_config(const json &j)
{
    using namespace detail;
    if (!j.is_object()) {
        throw config_error("config: expected a JSON object");
    }
    reject_unknown(j, {"seed", "model", "points", "sampling", "routes", "contour", "tolerance", "suites", "verify", "scan", "output"},
                   "config");
    run_config c;
    if (j.contains("seed")) {
        c.seed = read_as<std::uint64_t>(j["seed"], "seed");
    }
    if (j.contains("model")) {
        c.model = read_model(j["model"]);
    }
    if (j.contains("points")) {
        if (!j["points"].is_array()) {
            throw config_error("points: expected an array of spectral points");
        }
        for (std::size_t i = 0; i < j["points"].size(); ++i) {
            c.points.push_back(read_complex_list(j["points"][i], "points[" + std::to_string(i) + "]"));
        }
    }
    if (j.contains("sampling")) {
        const json &s = j["sampling"];
        if (!s.is_object()) {
            throw config_error("sampling: expected an object");
        }
        reject_unknown(s, {"count", "region"}, "sampling");
        sampling_config sc;
        if (s.contains("count")) {
            sc.count = read_as<int>(s["count"], "sampling.count");
            if (sc.count < 0) {
                throw config_error("sampling.count must be non-negative");
            }
        }
        if (s.contains("region")) {
            const json &r = s["region"];
            if (!r.is_object()) {
                throw config_error("sampling.region: expected an object");
            }
            reject_unknown(r, {"re", "im"}, "sampling.region");
            if (r.contains("re")) {
                std::tie(sc.box.re_lo, sc.box.re_hi) = read_interval(r["re"], "sampling.region.re");
            }
            if (r.contains("im")) {
                std::tie(sc.box.im_lo, sc.box.im_hi) = read_interval(r["im"], "sampling.region.im");
            }
        }
        c.sampling = sc;
    }
    if (!c.points.empty() && c.sampling) {
        throw config_error("points and sampling are exclusive");
    }
    if (j.contains("routes")) {
        if (!j["routes"].is_array()) {
            throw config_error("routes: expected an array");
        }
        c.routes = parse_routes(read_as<std::vector<std::string>>(j["routes"], "routes"));
    }
    if (j.contains("contour")) {
        const json &s = j["contour"];
        if (!s.is_object()) {
            throw config_error("contour: expected an object");
        }
        reject_unknown(s, {"radius", "nodes"}, "contour");
        if (s.contains("radius")) {
            c.contour.radius = read_as<real>(s["radius"], "contour.radius");
            if (!(*c.contour.radius > 0.0L)) {
                throw config_error("contour.radius must be positive");
            }
        }
        if (s.contains("nodes")) {
            c.contour.n_nodes = read_as<int>(s["nodes"], "contour.nodes");
            if (c.contour.n_nodes < 8) {
                throw config_error("contour.nodes must be at least 8");
            }
        }
    }
    if (j.contains("tolerance")) {
        const json &t = j["tolerance"];
        if (t.is_number()) {
            c.route_tol = t.get<double>();
            c.suite_tol = t.get<double>();
        } else if (t.is_object()) {
            reject_unknown(t, {"routes", "contour", "suites"}, "tolerance");
            if (t.contains("routes")) {
                c.route_tol = read_as<double>(t["routes"], "tolerance.routes");
            }
            if (t.contains("contour")) {
                c.contour_tol = read_as<double>(t["contour"], "tolerance.contour");
            }
            if (t.contains("suites")) {
                c.suite_tol = read_as<double>(t["suites"], "tolerance.suites");
            }
        } else {
            throw config_error("tolerance: expected a number or an object");
        }
        if (!(c.route_tol > 0.0) || !(c.contour_tol > 0.0) || (c.suite_tol && !(*c.suite_tol > 0.0))) {
            throw config_error("tolerance: values must be positive");
        }
    }
    if (j.contains("suites")) {
        if (!j["suites"].is_array()) {
            throw config_error("suites: expected an array");
        }
        c.suites = parse_suites(read_as<std::vector<std::string>>(j["suites"], "suites"));
    }
    if (j.contains("verify")) {
        const json &v = j["verify"];
        if (!v.is_object()) {
            throw config_error("verify: expected an object");
        }
        reject_unknown(v, {"contexts", "max_size", "draws"}, "verify");
        if (v.contains("contexts")) {
            if (!v["contexts"].is_array()) {
                throw config_error("verify.contexts: expected an array");
            }
            for (const auto &e : v["contexts"]) {
                c.verify.contexts.push_back(read_context(e));
            }
        }
        if (v.contains("max_size")) {
            c.verify.max_size = read_as<int>(v["max_size"], "verify.max_size");
            if (*c.verify.max_size < 1) {
                throw config_error("verify.max_size must be at least 1");
            }
        }
        if (v.contains("draws")) {
            if (!v["draws"].is_object()) {
                throw config_error("verify.draws: expected an object");
            }
            reject_unknown(v["draws"], {"theta", "local", "algebra", "vacuum", "routes", "contour", "structure", "funceq"},
                           "verify.draws");
            for (const auto &[key, value] : v["draws"].items()) {
                const int n = read_as<int>(value, "verify.draws." + key);
                if (n < 0) {
                    throw config_error("verify.draws." + key + " must be non-negative");
                }
                c.verify.draws.emplace_back(key, n);
            }
        }
    }
    if (j.contains("scan")) {
        const json &s = j["scan"];
        if (!s.is_object()) {
            throw config_error("scan: expected an object");
        }
        reject_unknown(s, {"axes", "route", "residuals", "lambda_0"}, "scan");
        if (s.contains("axes")) {
            const json &a = s["axes"];
            if (!a.is_array() || a.size() > 2) {
                throw config_error("scan.axes: expected an array of one or two axes");
            }
            for (const auto &ax : a) {
                if (!ax.is_object()) {
                    throw config_error("scan.axes: expected objects");
                }
                reject_unknown(ax, {"param", "from", "to", "points"}, "scan.axes");
                for (const char *key : {"param", "from", "to", "points"}) {
                    if (!ax.contains(key)) {
                        throw config_error(std::string("scan.axes: missing ") + key);
                    }
                }
                scan_axis sa;
                sa.param = read_as<std::string>(ax["param"], "scan.axes.param");
                sa.from = read_complex(ax["from"], "scan.axes.from");
                sa.to = read_complex(ax["to"], "scan.axes.to");
                sa.points = read_as<int>(ax["points"], "scan.axes.points");
                if (sa.points < 0) {
                    throw config_error("scan.axes.points must be non-negative");
                }
                c.scan.axes.push_back(std::move(sa));
            }
        }
        if (s.contains("route")) {
            c.scan.route = read_as<std::string>(s["route"], "scan.route");
            if (c.scan.route != "algebraic" && c.scan.route != "symmetrized" && c.scan.route != "contour") {
                throw config_error("scan.route: expected algebraic, symmetrized or contour");
            }
        }
        if (s.contains("residuals")) {
            c.scan.residuals = read_as<std::vector<std::string>>(s["residuals"], "scan.residuals");
            for (const auto &r : c.scan.residuals) {
                if (std::find(known_residuals().begin(), known_residuals().end(), r) == known_residuals().end()) {
                    throw config_error("scan.residuals: unknown residual \"" + r + "\"");
                }
            }
        }
        if (s.contains("lambda_0")) {
            c.scan.lambda_0 = read_complex(s["lambda_0"], "scan.lambda_0");
        }
    }
    if (j.contains("output")) {
        const json &o = j["output"];
        if (!o.is_object()) {
            throw config_error("output: expected an object");
        }
        reject_unknown(o, {"path", "format", "timing"}, "output");
        if (o.contains("path")) {
            c.out_path = read_as<std::string>(o["path"], "output.path");
        }
        if (o.contains("format")) {
            c.format = read_as<std::string>(o["format"], "output.format");
            if (c.format != "json" && c.format != "csv") {
                throw config_error("output.format: expected json or csv");
            }
        }
        if (o.contains("timing")) {
            c.timing = read_as<bool>(o["timing"], "output.timing");
        }
    }
    return c;
}

inline run_config parse_config_text(const std::string &text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

inline run_config load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot read config file " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

// Builds the model, mapping context errors to config errors. Genericity
// failures propagate as degenerate_parameter.
inline model_instance build_model(const model_config &mc)
{
    try {
        const auto ctx = mc.trigonometric ? elliptic_context::trigonometric()
                                          : elliptic_context::elliptic(mc.tau, mc.series_tol, mc.max_terms);
        return make_model(ctx, mc.gamma, mc.zeta, mc.theta, mc.mu);
    } catch (const invalid_context &e) {
        throw config_error(std::string("model: ") + e.what());
    } catch (const std::invalid_argument &e) {
        throw config_error(std::string("model: ") + e.what());
    }
}

} // namespace esos::cli

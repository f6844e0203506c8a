// esos: evaluate the reflecting-end partition function, run the verification
// suites, or scan a parameter grid. See docs/cli.md for the config schema.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cli/commands.hpp"

namespace {

using namespace esos::cli;

struct overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> routes;
    std::vector<std::string> suites;
    std::optional<double> tol;
    bool timing = false;
};

void add_common(CLI::App *sub, overrides &o)
{
    sub->add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Seed for random draws (overrides the config)");
    sub->add_option("--out", o.out, "Write the report here instead of stdout");
    sub->add_flag("--timing", o.timing, "Include wall-clock timings (makes output non-deterministic)");
}

int write_output(const command_result &r, const run_config &c)
{
    if (c.out_path) {
        std::ofstream f(*c.out_path, std::ios::binary);
        if (!f) {
            std::cerr << "esos: cannot write " << *c.out_path << "\n";
            return exit_config;
        }
        f << r.output;
    } else {
        std::cout << r.output;
    }
    return r.code;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Reflecting-end SOS partition function: evaluation and verification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(esos::cli::version));

    overrides o;
    auto *eval = app.add_subcommand("eval", "Evaluate Z by the selected routes");
    auto *verify = app.add_subcommand("verify", "Run the verification suites");
    auto *scan = app.add_subcommand("scan", "Tabulate Z over a 1-D or 2-D parameter grid");
    for (auto *sub : {eval, verify, scan}) {
        add_common(sub, o);
    }
    eval->add_option("--routes", o.routes, "Comma list of routes: a (algebraic), s (symmetrized), c (contour)");
    eval->add_option("--tol", o.tol, "Route agreement tolerance");
    verify->add_option("--suites", o.suites, "Suites to run (theta, weights, algebra, partition, funceq)")->delimiter(',');
    verify->add_option("--tol", o.tol, "Replace every upper-bound tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    run_config cfg;
    try {
        cfg = o.config_path.empty() ? run_config{} : load_config(o.config_path);
        if (o.seed) {
            cfg.seed = *o.seed;
        }
        if (o.out) {
            cfg.out_path = *o.out;
        }
        if (o.routes) {
            cfg.routes = parse_routes(esos::cli::detail::split_list(*o.routes));
        }
        if (!o.suites.empty()) {
            cfg.suites = parse_suites(o.suites);
        }
        if (o.tol) {
            if (!(*o.tol > 0.0)) {
                throw config_error("--tol must be positive");
            }
            cfg.route_tol = *o.tol;
            cfg.suite_tol = *o.tol;
        }
        cfg.timing = cfg.timing || o.timing;
        if (!scan->parsed() && cfg.format == "csv") {
            throw config_error("output.format csv applies to scan only");
        }

        command_result r;
        if (eval->parsed()) {
            r = run_eval(cfg);
        } else if (verify->parsed()) {
            r = run_verify(cfg);
        } else {
            r = run_scan(cfg);
        }
        if (r.code == exit_disagreement) {
            std::cerr << "esos: routes disagree beyond tolerance\n";
        } else if (r.code == exit_suite_failure) {
            std::cerr << "esos: some checks failed\n";
        }
        return write_output(r, cfg);
    } catch (const config_error &e) {
        std::cerr << "esos: " << e.what() << "\n";
        return exit_config;
    } catch (const esos::contour_too_large &e) {
        std::cerr << "esos: " << e.what() << "\n";
        return exit_config;
    } catch (const esos::degenerate_parameter &e) {
        std::cerr << "esos: degenerate parameter " << e.guard() << "\n";
        return exit_degenerate;
    } catch (const std::exception &e) {
        std::cerr << "esos: " << e.what() << "\n";
        return exit_internal;
    }
}

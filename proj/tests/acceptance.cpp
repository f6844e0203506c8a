// Runs each acceptance criterion at its stated tolerance and prints one PASS/FAIL
// line per criterion. Exit status is nonzero if any criterion fails.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <esos/suites.hpp>

#ifndef ESOS_TOOL_PATH
#error "ESOS_TOOL_PATH must name the esos executable"
#endif
#ifndef ESOS_CONFIG_DIR
#error "ESOS_CONFIG_DIR must name the configs directory"
#endif

using namespace esos;

namespace {

struct outcome {
    bool passed = true;
    std::string detail;

    void fail(const std::string &why)
    {
        if (passed) {
            detail = why;
        }
        passed = false;
    }
};

struct timed_run {
    std::vector<check_result> results;
    double seconds = 0.0;
};

timed_run run_suite(const suite_config &cfg, const std::string &suite)
{
    const auto t0 = std::chrono::steady_clock::now();
    timed_run r;
    r.results = run_suites(cfg, {suite});
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::string describe(const check_result &r)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s/%s [%s, L=%d] worst=%.3Le tol=%.1Le", r.suite.c_str(), r.name.c_str(),
                  r.context.c_str(), r.size, r.worst ? *r.worst : -1.0L, r.tol);
    return buf;
}

// Every selected check must pass, run at least `min_draws` draws and use a tolerance
// no looser than `tol`; `sizes` lists the (context, L) pairs that must be covered.
struct requirement {
    std::set<std::string> names;
    real tol;
    int min_draws;
    std::function<std::set<int>(const std::string &context)> sizes;
};

void require(outcome &o, const std::vector<check_result> &results, const requirement &req)
{
    std::map<std::pair<std::string, std::string>, std::set<int>> seen;
    for (const auto &r : results) {
        if (!req.names.contains(r.name)) {
            continue;
        }
        seen[{r.name, r.context}].insert(r.size);
        if (r.kind == bound::upper && r.tol > req.tol) {
            o.fail("tolerance looser than required: " + describe(r));
        } else if (r.draws < req.min_draws) {
            o.fail("too few draws: " + describe(r));
        } else if (!r.passed) {
            o.fail(describe(r));
        }
    }
    for (const auto &c : default_contexts()) {
        const std::set<int> want = req.sizes(c.label);
        for (const auto &name : req.names) {
            const std::set<int> &got = seen[{name, c.label}];
            for (const int L : want) {
                if (!got.contains(L)) {
                    o.fail("missing check " + name + " [" + c.label + ", L=" + std::to_string(L) + "]");
                }
            }
        }
    }
}

void require_runtime(outcome &o, double seconds, double limit, const std::string &what)
{
    if (seconds >= limit) {
        o.fail(what + " took " + std::to_string(seconds) + " s, limit " + std::to_string(limit) + " s");
    }
}

std::set<int> range(int lo, int hi)
{
    std::set<int> s;
    for (int L = lo; L <= hi; ++L) {
        s.insert(L);
    }
    return s;
}

bool is_trig(const std::string &label) { return label == "trigonometric"; }

std::set<int> size_zero(const std::string &) { return {0}; }

std::string capture(const std::string &cmd, int &status)
{
    std::string out;
    FILE *p = popen(cmd.c_str(), "r");
    if (!p) {
        status = -1;
        return out;
    }
    std::array<char, 4096> buf{};
    while (const std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) {
        out.append(buf.data(), n);
    }
    status = pclose(p);
    return out;
}

} // namespace

int main()
{
    const suite_config cfg = default_suite_config();
    std::vector<std::pair<std::string, outcome>> lines;

    const timed_run weights = run_suite(cfg, "weights");
    {
        outcome o;
        require(o, weights.results, {{"dybe", "unitarity", "crossing", "reflection"}, 1e-10L, 50, size_zero});
        require_runtime(o, weights.seconds, 30.0, "local identities");
        lines.emplace_back("local identities", o);
    }

    const timed_run algebra = run_suite(cfg, "algebra");
    {
        std::set<std::string> names;
        for (const algebra_relation r : all_algebra_relations) {
            names.insert(to_string(r));
        }
        outcome o;
        require(o, algebra.results,
                {names, 1e-10L, 20, [](const std::string &c) { return is_trig(c) ? range(1, 4) : range(1, 3); }});
        require_runtime(o, algebra.seconds, 180.0, "algebra relations");
        lines.emplace_back("algebra relations", o);
    }
    {
        outcome o;
        const auto up_to_four = [](const std::string &) { return range(1, 4); };
        require(o, algebra.results, {{"vacuum_eigenvalues"}, 1e-10L, 1, up_to_four});
        require(o, algebra.results, {{"vacuum_eigenvector"}, 1e-11L, 1, up_to_four});
        lines.emplace_back("vacuum eigenvalues", o);
    }

    const timed_run partition = run_suite(cfg, "partition");
    {
        outcome o;
        for (const auto &r : partition.results) {
            if (r.name == "route_agreement" && r.draws < (is_trig(r.context) ? 10 : 20)) {
                o.fail("too few draws: " + describe(r));
            }
        }
        require(o, partition.results,
                {{"route_agreement"}, 1e-9L, 10, [](const std::string &c) { return is_trig(c) ? range(1, 6) : range(1, 4); }});
        require(o, partition.results, {{"contour_agreement"}, 1e-6L, 1, [](const std::string &) { return range(1, 2); }});
        require_runtime(o, partition.seconds, 300.0, "route agreement");
        lines.emplace_back("route agreement", o);
    }

    const timed_run funceq = run_suite(cfg, "funceq");
    {
        outcome o;
        const auto up_to_four = [](const std::string &) { return range(1, 4); };
        require(o, funceq.results, {{"fe_residual"}, 1e-9L, 1, up_to_four});
        require(o, funceq.results, {{"swapped_determinant"}, 1e-8L, 1, up_to_four});
        lines.emplace_back("functional equation", o);
    }
    {
        outcome o;
        require(o, partition.results, {{"permutation_symmetry"}, 1e-11L, 1, [](const std::string &) { return range(2, 4); }});
        require(o, partition.results, {{"crossing"}, 1e-10L, 1, [](const std::string &) { return range(1, 3); }});
        require(o, partition.results, {{"special_zeros"}, 1e-9L, 1, [](const std::string &) { return range(2, 3); }});
        require(o, partition.results, {{"zbar_order_norm"}, 1e-8L, 1, [](const std::string &) { return range(1, 3); }});
        lines.emplace_back("structure of Z", o);
    }
    {
        outcome o;
        require(o, funceq.results, {{"reconstruct_last"}, 1e-8L, 1, [](const std::string &) { return range(2, 3); }});
        require(o, funceq.results,
                {{"star_proportionality", "reduced_fe_residual"}, 1e-8L, 1, [](const std::string &) { return range(2, 4); }});
        require(o, funceq.results, {{"star_proportionality"}, 1e-10L, 1, [](const std::string &) { return range(2, 4); }});
        lines.emplace_back("reduction and uniqueness", o);
    }

    const timed_run theta = run_suite(cfg, "theta");
    {
        outcome o;
        const auto elliptic_only = [](const std::string &c) { return is_trig(c) ? std::set<int>{} : std::set<int>{0}; };
        require(o, theta.results, {{"oddness", "quasiperiod_i_pi", "addition_rule", "lattice_zeros"}, 1e-12L, 1, size_zero});
        require(o, theta.results, {{"quasiperiod_i_pi_tau"}, 1e-12L, 1, elliptic_only});
        require(o, theta.results, {{"f_prime_zero_finite_difference"}, 1e-8L, 1, size_zero});
        require(o, theta.results, {{"interpolation_nodes"}, 0.0L, 1, size_zero});
        require(o, theta.results, {{"interpolation_off_node"}, 1e-10L, 1, size_zero});
        bool limit = false;
        for (const auto &r : theta.results) {
            if (r.name == "trigonometric_limit") {
                limit = true;
                if (!r.passed || r.tol > 1e-12L) {
                    o.fail(describe(r));
                }
            }
        }
        if (!limit) {
            o.fail("missing check trigonometric_limit");
        }
        lines.emplace_back("theta layer", o);
    }

    {
        outcome o;
        const std::string cmd = std::string("\"") + ESOS_TOOL_PATH + "\" verify --config \"" + ESOS_CONFIG_DIR +
                                "/verify_elliptic_L3.json\" --seed 42";
        int s1 = 0, s2 = 0;
        const std::string a = capture(cmd, s1);
        const std::string b = capture(cmd, s2);
        if (s1 != 0 || s2 != 0) {
            o.fail("verify exited with status " + std::to_string(s1) + "/" + std::to_string(s2));
        } else if (a.empty()) {
            o.fail("verify produced no report");
        } else if (a != b) {
            o.fail("reports differ between runs");
        }
        lines.emplace_back("determinism", o);
    }

    bool all = true;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto &[name, o] = lines[i];
        std::printf("%s %zu %s%s%s\n", o.passed ? "PASS" : "FAIL", i + 1, name.c_str(), o.passed ? "" : ": ",
                    o.detail.c_str());
        all = all && o.passed;
    }
    return all ? 0 : 1;
}

#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include <cli/commands.hpp>

using namespace esos::cli;

namespace {

const char *trig_model = R"({
    "trigonometric": true,
    "gamma": [0.4, 0.1],
    "zeta": [0.7, -0.2],
    "theta": [0.55, 0.15],
    "mu": [[0.3, 0.05]]
})";

run_config with_model(const std::string &rest)
{
    return parse_config_text(std::string(R"({"model": )") + trig_model + (rest.empty() ? "" : ", " + rest) + "}");
}

int count_lines(const std::string &s)
{
    int n = 0;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) {
        ++n;
    }
    return n;
}

} // namespace

TEST(Cli, RejectsMalformedConfigs)
{
    EXPECT_THROW(parse_config_text("[1, 2]"), config_error);
    EXPECT_THROW(parse_config_text("{not json"), config_error);
    EXPECT_THROW(parse_config_text(R"({"seed": "x"})"), config_error);
    EXPECT_THROW(parse_config_text(R"({"unknown": 1})"), config_error);
    EXPECT_THROW(parse_config_text(R"({"suites": ["nope"]})"), config_error);
    EXPECT_THROW(parse_config_text(R"({"tolerance": -1})"), config_error);
    EXPECT_THROW(parse_config_text(R"({"output": {"format": "xml"}})"), config_error);
    EXPECT_THROW(parse_config_text(R"({"model": {"gamma": [0.4]}})"), config_error);
    EXPECT_THROW(parse_config_text(R"({"scan": {"residuals": ["bogus"]}})"), config_error);
    EXPECT_THROW(load_config("/nonexistent/config.json"), config_error);
}

TEST(Cli, ParsesRoutesAndTolerances)
{
    const run_config c = with_model(R"("routes": ["a", "contour"], "tolerance": {"routes": 1e-8, "contour": 1e-5})");
    EXPECT_TRUE(c.routes.algebraic);
    EXPECT_FALSE(c.routes.symmetrized);
    EXPECT_TRUE(c.routes.contour);
    EXPECT_DOUBLE_EQ(c.route_tol, 1e-8);
    EXPECT_DOUBLE_EQ(c.contour_tol, 1e-5);
    EXPECT_EQ(c.seed, default_seed);
    EXPECT_THROW(parse_routes({"x"}), config_error);
}

TEST(Cli, WritesSeventeenSignificantDigits)
{
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(1.0), "1");
    const json j = {{"x", 1.0 / 3.0}, {"z", json::array({0.5, -2.0})}};
    const std::string text = to_text(j);
    EXPECT_NE(text.find("0.33333333333333331"), std::string::npos);
    EXPECT_NE(text.find("[0.5, -2]"), std::string::npos);
    EXPECT_EQ(text.back(), '\n');
}

TEST(Cli, EvalRoutesAgree)
{
    const run_config c = with_model(R"("points": [[[0.62, -0.11]], [[0.21, 0.24]]], "routes": ["a", "s", "c"])");
    const command_result r = run_eval(c);
    EXPECT_EQ(r.code, exit_ok);
    const json report = json::parse(r.output);
    EXPECT_EQ(report["status"], "ok");
    ASSERT_EQ(report["points"].size(), 2u);
    EXPECT_TRUE(report["points"][0]["values"].contains("contour"));
    EXPECT_FALSE(report["points"][0].contains("seconds"));
}

TEST(Cli, EvalReportsDisagreementAboveTolerance)
{
    const run_config c = with_model(R"("points": [[[0.62, -0.11]]], "routes": ["a", "c"], "contour": {"nodes": 8},
                                     "tolerance": {"contour": 1e-15})");
    EXPECT_EQ(run_eval(c).code, exit_disagreement);
}

TEST(Cli, EvalRejectsDegeneratePoint)
{
    const run_config c = with_model(R"("points": [[[0.3, 0.05]]])");
    try {
        run_eval(c);
        FAIL() << "expected a degenerate parameter";
    } catch (const esos::degenerate_parameter &e) {
        EXPECT_EQ(e.guard(), "[lambda_1-mu_1]");
    }
}

TEST(Cli, EvalRejectsLargeContour)
{
    const run_config c = parse_config_text(R"({"model": {"tau": [0, 2], "gamma": [0.4, 0.1], "zeta": [0.7, -0.2],
        "theta": [0.55, 0.15], "mu": [[0.3, 0.05], [0.5, 0.1], [0.2, -0.1], [0.7, 0.2]]}, "routes": ["c"]})");
    EXPECT_THROW(run_eval(c), config_error);
}

TEST(Cli, EvalSamplingIsSeeded)
{
    const run_config c = with_model(R"("seed": 7, "sampling": {"count": 3})");
    const command_result a = run_eval(c);
    const command_result b = run_eval(c);
    EXPECT_EQ(a.code, exit_ok);
    EXPECT_EQ(a.output, b.output);
    EXPECT_EQ(json::parse(a.output)["points"].size(), 3u);
}

TEST(Cli, VerifyIsDeterministic)
{
    const run_config c = parse_config_text(R"({"suites": ["theta", "weights"], "verify": {"contexts": ["tau=2i"]}})");
    const command_result a = run_verify(c);
    const command_result b = run_verify(c);
    EXPECT_EQ(a.code, exit_ok);
    EXPECT_EQ(a.output, b.output);
    const json report = json::parse(a.output);
    EXPECT_TRUE(report["summary"]["passed"].get<bool>());
    EXPECT_FALSE(report.contains("seconds"));
}

TEST(Cli, VerifyFailsUnderTinyTolerance)
{
    const run_config c = parse_config_text(R"({"suites": ["theta"], "tolerance": {"suites": 1e-30},
                                             "verify": {"contexts": ["tau=2i"]}})");
    const command_result r = run_verify(c);
    EXPECT_EQ(r.code, exit_suite_failure);
    EXPECT_GT(json::parse(r.output)["summary"]["failed"].get<int>(), 0);
}

TEST(Cli, ScanWritesCsvRows)
{
    const run_config c = with_model(R"("points": [[[0.62, -0.11]]],
        "scan": {"axes": [{"param": "lambda_1", "from": [0.5, -0.1], "to": [0.7, -0.1], "points": 5}],
                 "residuals": ["zbar", "crossing"]})");
    const command_result r = run_scan(c);
    EXPECT_EQ(r.code, exit_ok);
    EXPECT_EQ(count_lines(r.output), 6);
}

TEST(Cli, ScanMarksDegenerateRows)
{
    // λ_1 crosses −θ−ζ at the middle grid point.
    const run_config c = with_model(R"("points": [[[0.62, -0.11]]],
        "scan": {"axes": [{"param": "lambda_1", "from": [-1.35, -0.05], "to": [-1.15, 0.15], "points": 3}],
                 "residuals": ["zbar"]}, "output": {"format": "json"})");
    const command_result r = run_scan(c);
    const json report = json::parse(r.output);
    ASSERT_EQ(report["rows"].size(), 3u);
    EXPECT_EQ(report["rows"][1]["reason"], "degenerate parameter [theta+zeta+lambda_1]");
    EXPECT_TRUE(report["rows"][0]["z"].is_array());
}

TEST(Cli, ScanEmptyGrid)
{
    const run_config c = with_model(R"("scan": {"axes": [{"param": "theta", "from": [0.5, 0], "to": [0.6, 0], "points": 0}]})");
    const command_result r = run_scan(c);
    EXPECT_EQ(r.code, exit_ok);
    EXPECT_EQ(r.output, "");
    const run_config bad = with_model(R"("scan": {"axes": [{"param": "lambda_9", "from": [0, 0], "to": [0, 0], "points": 0}]})");
    EXPECT_THROW(run_scan(bad), config_error);
}

TEST(Cli, ScanNeedsLambdaZeroForFunctionalEquation)
{
    const run_config c = with_model(R"("scan": {"axes": [{"param": "theta", "from": [0.5, 0], "to": [0.6, 0], "points": 2}],
                                               "residuals": ["fe_residual"]})");
    EXPECT_THROW(run_scan(c), config_error);
}

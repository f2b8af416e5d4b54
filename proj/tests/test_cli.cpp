#include "commands.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

using namespace fcs;
using fcs::io::json;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string &name) { return std::string(FCS_DATA_DIR) + "/" + name; }

std::string temp_path(const std::string &name) {
    return (std::filesystem::temp_directory_path() / ("fcs_cli_" + name)).string();
}

std::string slurp(const std::string &path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double to_d(const std::string &s) { return std::stod(s); }

} // namespace

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, cli::kExitUsage);
    EXPECT_EQ(run({"nonsense"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"optimize"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"optimize", "--b", "1"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"evaluate"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
    EXPECT_EQ(run({"--version"}).code, cli::kExitOk);
}

TEST(Cli, EvaluateReferenceB2MatchesTableTwo) {
    const auto o = run({"evaluate", "--params", data("reference_b2.json")});
    ASSERT_EQ(o.code, 0) << o.err;
    const json j = json::parse(o.out);
    EXPECT_EQ(j.at("schema_version"), kSchemaVersion);
    EXPECT_EQ(j.at("command"), "evaluate");
    const json &d = j.at("outputs");
    EXPECT_NEAR(d.at("concurrence").get<double>(), 0.414214, 1e-5);
    EXPECT_NEAR(d.at("assistance").get<double>(), 0.585787, 1e-5);
    EXPECT_NEAR(d.at("A").get<double>(), 0.292893, 1e-5);
    EXPECT_NEAR(std::abs(d.at("B")[0].get<double>()), 0.207107, 1e-5);
    EXPECT_NEAR(std::abs(d.at("C")[0].get<double>()), 0.174155, 1e-5);
    EXPECT_NEAR(d.at("purity12").get<double>(), 0.550252, 1e-5);
    EXPECT_NEAR(d.at("purity1").get<double>(), 0.646446, 1e-5);
    EXPECT_NEAR(d.at("bloch_length_sq").get<double>(), 0.5, 1e-5);
    EXPECT_LE(std::abs(d.at("ellipse_residual").get<double>()), 1e-9);
    EXPECT_LE(d.at("next_nearest_concurrence").get<double>(), 1e-12);
    EXPECT_GT(d.at("purity123").get<double>(), d.at("purity12").get<double>());
}

TEST(Cli, EvaluateInlineTrivialPoint) {
    const auto o = run({"evaluate", "--b", "2", "--alpha", "0", "--phi", "0"});
    ASSERT_EQ(o.code, 0) << o.err;
    const json d = json::parse(o.out).at("outputs");
    EXPECT_EQ(d.at("concurrence").get<double>(), 0.0);
    const CMatrix rho12 = io::matrix_from_json(d.at("rho12"));
    CMatrix expected = CMatrix::Zero(4, 4);
    expected(3, 3) = 1.0;
    EXPECT_LE((rho12 - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Cli, EvaluateReferenceB4Elements) {
    const auto o = run({"evaluate", "--params", data("reference_b4.json")});
    ASSERT_EQ(o.code, 0) << o.err;
    const json d = json::parse(o.out).at("outputs");
    EXPECT_NEAR(d.at("A").get<double>(), 0.300000, 1e-5);
    EXPECT_NEAR(std::abs(d.at("B")[0].get<double>()), 0.216000, 1e-5);
    EXPECT_NEAR(std::abs(d.at("C")[0].get<double>()), 0.097378, 1e-5);
    EXPECT_TRUE(d.at("ellipse_residual").is_null());
}

TEST(Cli, EvaluateErrors) {
    const auto bad = temp_path("bad.json");
    io::write_text_file(bad, "{\"b\": 2, \"alpha\": [0.1]");
    auto o = run({"evaluate", "--params", bad});
    EXPECT_EQ(o.code, cli::kExitUsage);
    EXPECT_NE(o.err.find("InvalidArgument"), std::string::npos);
    EXPECT_EQ(run({"evaluate", "--params", "/nonexistent/p.json"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"evaluate", "--b", "3", "--alpha", "0.1", "--phi", "0.2"}).code, cli::kExitUsage);
    o = run({"evaluate", "--b", "2", "--alpha", "1.5707963267948966", "--phi", "0"});
    EXPECT_EQ(o.code, cli::kExitNumerical);
    EXPECT_NE(o.err.find("NullspaceDegenerate"), std::string::npos);
    std::filesystem::remove(bad);
}

TEST(Cli, EvaluateWritesFile) {
    const auto path = temp_path("eval.json");
    const auto o = run({"evaluate", "--params", data("reference_b3.json"), "--out", path});
    ASSERT_EQ(o.code, 0);
    EXPECT_TRUE(o.out.empty());
    const auto rec = io::record_from_json(io::read_json_file(path));
    EXPECT_NEAR(rec.outputs.at("concurrence").get<double>(), 0.41825, 5e-6);
    // The record is itself a valid --params input.
    EXPECT_EQ(run({"evaluate", "--params", path}).code, 0);
    std::filesystem::remove(path);
}

TEST(Cli, OptimizeWritesRecordTraceAndSummary) {
    const auto out = temp_path("opt.json"), trace = temp_path("trace.csv");
    const auto o = run({"optimize", "--b", "2", "--starts", "2", "--seed", "5", "--out", out, "--trace", trace});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_NE(o.out.find("b=2 concurrence=0.414214 relative_difference=4.66%"), std::string::npos) << o.out;
    const auto rec = io::record_from_json(io::read_json_file(out));
    EXPECT_EQ(rec.command, "optimize");
    EXPECT_EQ(rec.inputs.at("config").at("nt"), 20);
    EXPECT_NEAR(rec.outputs.at("concurrence").get<double>(), known::kOptimumB2, 1e-6);
    EXPECT_NEAR(rec.outputs.at("relative_difference_percent").get<double>(), 4.66, 5e-3);
    const auto rows = io::parse_csv(slurp(trace));
    ASSERT_GT(rows.size(), 2u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"eval", "value"}));
    for (std::size_t i = 2; i < rows.size(); ++i) EXPECT_GE(to_d(rows[i][1]), to_d(rows[i - 1][1]));

    // Result records feed evaluate and report-cp.
    const auto ev = run({"evaluate", "--params", out});
    ASSERT_EQ(ev.code, 0);
    EXPECT_EQ(json::parse(ev.out).at("outputs").at("concurrence").get<double>(),
              rec.outputs.at("concurrence").get<double>());
    EXPECT_EQ(run({"report-cp", out}).code, 0);
    std::filesystem::remove(out);
    std::filesystem::remove(trace);
}

TEST(Cli, OptimizeIsDeterministic) {
    const auto a = run({"optimize", "--b", "2", "--starts", "1", "--max-evals", "3000"});
    const auto b = run({"optimize", "--b", "2", "--starts", "1", "--max-evals", "3000"});
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, OptimizeProbesAndBadConfig) {
    EXPECT_EQ(run({"optimize", "--b", "2", "--starts", "1", "--max-evals", "500", "--complex-R"}).code, 0);
    EXPECT_EQ(run({"optimize", "--b", "2", "--starts", "1", "--max-evals", "500", "--non-nilpotent"}).code, 0);
    EXPECT_EQ(run({"optimize", "--b", "2", "--rt", "1.5"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"optimize", "--b", "2", "--starts", "1", "--max-evals", "100", "--out", "/nonexistent/x.json"}).code,
              cli::kExitUsage);
}

TEST(Cli, ScanB2) {
    auto o = run({"scan-b2", "--grid", "5"});
    ASSERT_EQ(o.code, 0);
    auto rows = io::parse_csv(o.out);
    ASSERT_EQ(rows.size(), 26u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"alpha1", "phi1", "concurrence", "assistance"}));
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (to_d(rows[i][1]) == 0.0) EXPECT_EQ(to_d(rows[i][2]), 0.0);
    EXPECT_EQ(run({"scan-b2", "--grid", "1"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"scan-b2", "--out", "/nonexistent/s.csv"}).code, cli::kExitUsage);

    const auto path = temp_path("scan.csv");
    ASSERT_EQ(run({"scan-b2", "--grid", "256", "--out", path}).code, 0);
    rows = io::parse_csv(slurp(path));
    ASSERT_EQ(rows.size(), 256u * 256u + 1u);
    double best = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) best = std::max(best, to_d(rows[i][2]));
    EXPECT_NEAR(best, 0.414214, 1e-4);
    std::filesystem::remove(path);
}

TEST(Cli, ReportCp) {
    const auto o = run({"report-cp", data("reference_b2.json"), data("reference_b4.json")});
    ASSERT_EQ(o.code, 0) << o.err;
    const auto rows = io::parse_csv(o.out);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"set", "label", "purity", "concurrence"}));
    int optima = 0, mems = 0, werner = 0, reference = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto &r = rows[i];
        if (r[0] == "optima") ++optima;
        if (r[0] == "mems") ++mems;
        if (r[0] == "werner") ++werner;
        if (r[0] == "reference") {
            ++reference;
            EXPECT_EQ(r[1], "wootters_bound");
            EXPECT_EQ(to_d(r[3]), known::kWoottersBound);
        }
        if (r[0] == "optima" && r[1] == "b=2") {
            EXPECT_NEAR(to_d(r[2]), 0.550252, 1e-5);
            EXPECT_NEAR(to_d(r[3]), 0.414214, 1e-5);
        }
        if (r[0] == "werner" && r[1] == "p=1") {
            EXPECT_NEAR(to_d(r[2]), 1.0, 1e-12);
            EXPECT_NEAR(to_d(r[3]), 1.0, 1e-12);
        }
    }
    EXPECT_EQ(optima, 2);
    EXPECT_EQ(mems, 200);
    EXPECT_EQ(werner, 200);
    EXPECT_EQ(reference, 1);
    EXPECT_EQ(run({"report-cp"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"report-cp", "/nonexistent/r.json"}).code, cli::kExitUsage);
}

TEST(Cli, Verify) {
    auto o = run({"verify", "--draws", "50"});
    EXPECT_EQ(o.code, 0) << o.out;
    EXPECT_NE(o.out.find("verify: PASS"), std::string::npos);
    o = run({"verify", "--draws", "10", "--corrupt-v2"});
    EXPECT_EQ(o.code, cli::kExitVerifyFailed);
    EXPECT_NE(o.out.find("FAIL"), std::string::npos);
    EXPECT_EQ(run({"verify", "--b", "2,5", "--draws", "10"}).code, 0);
    EXPECT_EQ(run({"verify", "--draws", "0"}).code, cli::kExitUsage);
}

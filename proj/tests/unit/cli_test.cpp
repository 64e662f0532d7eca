#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "dyadnet/cli/tasks.hpp"

#ifndef DYADNET_SOURCE_DIR
#define DYADNET_SOURCE_DIR "."
#endif

using namespace dyadnet;
using namespace dyadnet::cli;
namespace fs = std::filesystem;

namespace {

const std::string kSmall = R"(schema_version: 1
seed: 7
output: out
task: bounds
model:
  n: 40
  T: 2
  theta0:
    alpha: [-1.0]
    lambda: [1.0, 0.3]
  covariates:
    support: [0, 1]
  heterogeneity:
    variant: additive_node
    mean: -1.0
    sd: 0.5
  initial:
    rule: erdos_renyi
    p: 0.1
bounds:
  families: [dyad_panel, signed_subgraph]
  cell_floor: 5
idset:
  grid:
    kind: slice
    coordinate: 0
    values: [-1.0, 3.0]
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto p = s.find(from);
    if (p == std::string::npos) throw std::logic_error("pattern not found: " + from);
    return s.replace(p, from.size(), to);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> manifest(const fs::path& dir) {
    std::map<std::string, std::string> m;
    std::istringstream in(slurp(dir / "manifest.txt"));
    std::string line;
    while (std::getline(in, line)) {
        const auto c = line.find(':');
        if (c != std::string::npos) m[line.substr(0, c)] = line.size() > c + 2 ? line.substr(c + 2) : "";
    }
    return m;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        root_ = fs::temp_directory_path() / ("dyadnet_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(root_);
        fs::create_directories(root_);
    }
    void TearDown() override { fs::remove_all(root_); }

    RunConfig config(const std::string& text, const std::string& sub) {
        auto rc = parse_run_config(text);
        rc.output = (root_ / sub).string();
        return rc;
    }

    fs::path root_;
    std::ostringstream log_;
};

int line_of_error(const std::string& text) {
    try {
        parse_run_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST(RunConfigParse, ShippedDefaultConfigLoads) {
    const auto rc = load_run_config(std::string(DYADNET_SOURCE_DIR) + "/configs/default.yaml");
    EXPECT_EQ(rc.task, "verify-all");
    EXPECT_EQ(rc.model.n, 300);
    EXPECT_EQ(rc.model.T, 3);
    EXPECT_EQ(rc.model.theta0.stacked(), (std::vector<double>{-1.0, 1.0, 0.3}));
    EXPECT_EQ(rc.families.size(), 5u);
    EXPECT_EQ(rc.bound_options.slack, 3.0);
    EXPECT_EQ(rc.theta_grid.values.size(), 9u);
}

TEST(RunConfigParse, UnknownKeyReportsItsLine) {
    const auto text = replace(kSmall, "  T: 2\n", "  T: 2\n  colour: blue\n");
    try {
        parse_run_config(text);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 8);
        EXPECT_NE(std::string(e.what()).find("unknown key 'colour'"), std::string::npos);
    }
}

TEST(RunConfigParse, SingleDateBoundsTaskNamesTheRequirement) {
    const auto text = replace(kSmall, "  T: 2\n", "  T: 1\n");
    try {
        parse_run_config(text);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 7);
        EXPECT_NE(std::string(e.what()).find("T >= 2"), std::string::npos) << e.what();
    }
    const auto sim_only = parse_run_config(replace(text, "task: bounds", "task: simulate"));
    EXPECT_EQ(sim_only.model.T, 1);
    EXPECT_THROW(check_task(sim_only, "idset"), ConfigError);
    EXPECT_NO_THROW(check_task(sim_only, "clogit"));
}

TEST(RunConfigParse, RejectsMissingSeedAndBadValues) {
    EXPECT_EQ(line_of_error(replace(kSmall, "seed: 7\n", "")), 1);
    EXPECT_EQ(line_of_error(replace(kSmall, "schema_version: 1", "schema_version: 9")), 1);
    EXPECT_EQ(line_of_error(replace(kSmall, "task: bounds", "task: plot")), 4);
    EXPECT_EQ(line_of_error(replace(kSmall, "  n: 40", "  n: forty")), 6);
    EXPECT_GT(line_of_error(replace(kSmall, "  cell_floor: 5\n", "  cell_floor: 5\n  configurations: [\"+0,1,1 | +0,1,2\"]\n")), 0);
    EXPECT_GT(line_of_error(kSmall + "clogit:\n  families: [dyad_transitions]\n"), 0);
}

TEST(Overrides, ReplaceConfigValues) {
    auto rc = parse_run_config(kSmall);
    Overrides o;
    o.seed = 99;
    o.threads = 3;
    o.slack = 2.5;
    o.out = "elsewhere";
    apply(rc, o);
    EXPECT_EQ(rc.seed, 99u);
    EXPECT_EQ(rc.threads, 3);
    EXPECT_EQ(rc.bound_options.threads, 3);
    EXPECT_EQ(rc.bound_options.slack, 2.5);
    EXPECT_EQ(rc.output, "elsewhere");
}

TEST_F(CliTest, SimulateWritesManifestAndReproduces) {
    const auto a = config(kSmall, "a");
    auto b = config(kSmall, "b");
    b.threads = 3;
    EXPECT_EQ(run_task(a, "simulate", log_), 0);
    EXPECT_EQ(run_task(b, "simulate", log_), 0);
    EXPECT_EQ(slurp(root_ / "a" / "panel.txt"), slurp(root_ / "b" / "panel.txt"));
    auto ma = manifest(root_ / "a");
    auto mb = manifest(root_ / "b");
    for (const char* k : {"tool_version", "schema_version", "task", "config_hash", "seed", "threads", "slack", "status",
                          "outputs", "started_utc", "finished_utc", "wall_clock_seconds"})
        EXPECT_TRUE(ma.count(k)) << k;
    EXPECT_EQ(ma["status"], "ok");
    EXPECT_EQ(ma["task"], "simulate");
    EXPECT_EQ(ma["seed"], "7");
    EXPECT_TRUE(std::regex_match(ma["config_hash"], std::regex("fnv1a64:[0-9a-f]{16}")));
    EXPECT_TRUE(std::regex_match(ma["started_utc"], std::regex(R"(\d{4}-\d\d-\d\dT\d\d:\d\d:\d\dZ)")));
    for (const char* k : {"started_utc", "finished_utc", "wall_clock_seconds", "threads"}) ma.erase(k), mb.erase(k);
    EXPECT_EQ(ma, mb);
    EXPECT_FALSE(fs::exists(root_ / "a" / "panel.txt.partial"));
}

TEST_F(CliTest, SeedOverrideChangesThePanel) {
    auto a = config(kSmall, "a");
    auto b = config(kSmall, "b");
    b.seed = 8;
    run_task(a, "simulate", log_);
    run_task(b, "simulate", log_);
    EXPECT_NE(slurp(root_ / "a" / "panel.txt"), slurp(root_ / "b" / "panel.txt"));
}

TEST_F(CliTest, BoundsAndIdsetFeedTheReport) {
    const auto rc = config(kSmall, "run");
    EXPECT_EQ(run_task(rc, "bounds", log_), 0);
    const auto header = slurp(root_ / "run" / "bounds_dyad_panel.csv");
    EXPECT_EQ(header.rfind(std::string(kBoundsCsvHeader) + "\n", 0), 0u);
    run_task(rc, "idset", log_);
    const auto idset = read_csv(root_ / "run" / "idset.csv");
    ASSERT_EQ(idset.size(), 3u);
    EXPECT_EQ(idset[0].front(), "theta_id");
    const auto written = report(root_ / "run", log_);
    EXPECT_NE(std::find(written.begin(), written.end(), "report_idset.csv"), written.end());
    const auto rep = read_csv(root_ / "run" / "report_idset.csv");
    ASSERT_EQ(rep.size(), 3u);
    EXPECT_EQ(rep[1][0], "-1");
    EXPECT_EQ(rep[1].back(), "pass");
}

TEST_F(CliTest, ReportRejectsEmptyOrMissingDirectories) {
    EXPECT_THROW(report(root_ / "nowhere", log_), DomainError);
    fs::create_directories(root_ / "empty");
    std::ofstream(root_ / "empty" / "manifest.txt") << "task: simulate\n";
    EXPECT_THROW(report(root_ / "empty", log_), DomainError);
}

TEST_F(CliTest, FailedClogitKeepsPartialOutputs) {
    const auto text = replace(kSmall, "    support: [0, 1]", "    support: [0]");
    const auto rc = config(text, "fail");
    try {
        run_task(rc, "clogit", log_);
        FAIL() << "expected the fit to fail";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("not point identified"), std::string::npos) << e.what();
    }
    EXPECT_EQ(manifest(root_ / "fail")["status"], "failed");
    EXPECT_TRUE(fs::exists(root_ / "fail" / "clogit_sample.csv.partial"));
    EXPECT_FALSE(fs::exists(root_ / "fail" / "clogit_sample.csv"));
}

TEST_F(CliTest, UnknownTaskFails) {
    EXPECT_THROW(run_task(config(kSmall, "x"), "plot", log_), ConfigError);
}

TEST(ReadCsv, HandlesQuotedFields) {
    const auto p = fs::temp_directory_path() / "dyadnet_read_csv.csv";
    std::ofstream(p) << "a,b\n\"+0,1,1 | -0,1,2\",\"say \"\"hi\"\"\"\n";
    const auto rows = read_csv(p);
    fs::remove(p);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1][0], "+0,1,1 | -0,1,2");
    EXPECT_EQ(rows[1][1], "say \"hi\"");
}

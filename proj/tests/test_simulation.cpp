#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ktau/error.hpp"
#include "ktau/simulation.hpp"

using namespace ktau;
namespace fs = std::filesystem;

namespace {

SimulationPlan small_plan() {
  SimulationPlan plan;
  plan.tau_values = {0.4};
  plan.n_values = {12};
  plan.families = {CopulaFamily::clayton};
  plan.replications = 12;
  plan.estimate.chain.total_iterations = 600;
  plan.estimate.chain.burn_in = 100;
  plan.workers = 1;
  return plan;
}

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("ktau_sim_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::set<std::string> listing(const fs::path& dir) {
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) names.insert(e.path().filename().string());
  return names;
}

}  // namespace

TEST(Seeds, CounterBasedAndDistinct) {
  const CellKey a{CopulaFamily::clayton, 0.2, 10};
  EXPECT_EQ(replication_seed(1, a, 5), replication_seed(1, a, 5));
  EXPECT_EQ(replication_seed(1, {CopulaFamily::clayton, -0.0, 10}, 0),
            replication_seed(1, {CopulaFamily::clayton, 0.0, 10}, 0));
  std::set<std::uint64_t> seen;
  for (auto f : {CopulaFamily::clayton, CopulaFamily::gumbel}) {
    for (double tau : {0.0, 0.2}) {
      for (std::size_t n : {10, 20}) {
        for (std::size_t r = 0; r < 50; ++r) seen.insert(replication_seed(1, {f, tau, n}, r));
      }
    }
  }
  EXPECT_EQ(seen.size(), 2u * 2 * 2 * 50);
  EXPECT_NE(replication_seed(1, a, 0), replication_seed(2, a, 0));
  EXPECT_NE(chain_seed(7), 7u);
}

TEST(Plan, Validation) {
  SimulationPlan plan;
  EXPECT_NO_THROW(plan.validate());
  plan.replications = 0;
  EXPECT_THROW(plan.validate(), InvalidInput);
  plan = {};
  plan.tau_values = {-0.2};
  EXPECT_THROW(plan.validate(), InvalidInput);  // clayton and gumbel cannot reach it
  plan.families = {CopulaFamily::frank, CopulaFamily::gaussian};
  EXPECT_NO_THROW(plan.validate());
  plan = {};
  plan.n_values = {3};
  EXPECT_THROW(plan.validate(), InvalidInput);
  plan.methods = {Method::original};
  EXPECT_NO_THROW(plan.validate());
  plan = {};
  plan.methods.clear();
  EXPECT_THROW(plan.validate(), InvalidInput);
}

TEST(Plan, JsonMergeOverridesAndRejectsUnknownNames) {
  SimulationPlan plan;
  merge_plan_json(plan, nlohmann::json::parse(R"({"tau_values": [0.1], "families": ["frank"],
      "methods": ["latent"], "replications": 7, "iterations": 900, "marginal": "heavy_tail_t3"})"));
  EXPECT_EQ(plan.tau_values, std::vector<double>{0.1});
  EXPECT_EQ(plan.families, std::vector<CopulaFamily>{CopulaFamily::frank});
  EXPECT_EQ(plan.methods, std::vector<Method>{Method::latent});
  EXPECT_EQ(plan.replications, 7u);
  EXPECT_EQ(plan.estimate.chain.total_iterations, 900u);
  EXPECT_EQ(plan.marginal, Marginal::heavy_tail_t3);
  EXPECT_EQ(plan.n_values, (std::vector<std::size_t>{10, 20, 50}));

  EXPECT_THROW(merge_plan_json(plan, nlohmann::json::parse(R"({"families": ["t"]})")), InvalidInput);
  EXPECT_THROW(merge_plan_json(plan, nlohmann::json::parse(R"({"methods": ["mle"]})")), InvalidInput);
  EXPECT_THROW(merge_plan_json(plan, nlohmann::json::parse(R"({"replications": "many"})")),
               InvalidInput);
  EXPECT_THROW(merge_plan_json(plan, nlohmann::json::parse("[1]")), InvalidInput);

  SimulationPlan round;
  merge_plan_json(round, to_json(plan));
  EXPECT_EQ(to_json(round), to_json(plan));
}

TEST(RunCell, IndependentOfWorkerCount) {
  auto plan = small_plan();
  const auto serial = run_cell(plan, {CopulaFamily::clayton, 0.4, 12});
  plan.workers = 4;
  const auto parallel = run_cell(plan, {CopulaFamily::clayton, 0.4, 12});
  ASSERT_EQ(serial.size(), 3u);
  for (std::size_t m = 0; m < serial.size(); ++m) {
    ASSERT_EQ(serial[m].summaries.size(), 12u);
    EXPECT_EQ(serial[m].quantile_avg.avg_quantiles, parallel[m].quantile_avg.avg_quantiles);
    EXPECT_EQ(serial[m].median_of_medians, parallel[m].median_of_medians);
    for (std::size_t r = 0; r < 12; ++r) {
      EXPECT_EQ(serial[m].summaries[r].replication, r);
      EXPECT_EQ(serial[m].summaries[r].summary.median, parallel[m].summaries[r].summary.median);
    }
    EXPECT_GE(serial[m].ci_coverage, 0.0);
    EXPECT_LE(serial[m].ci_coverage, 1.0);
    EXPECT_TRUE(serial[m].failures.empty());
  }
  // All methods see the same data set for a replication.
  EXPECT_EQ(serial[0].summaries[3].tau_obs, serial[2].summaries[3].tau_obs);
}

TEST(RunCell, CoverageCountsIntervalsContainingTau) {
  auto plan = small_plan();
  plan.methods = {Method::original};
  const auto r = run_cell(plan, {CopulaFamily::clayton, 0.4, 12}).front();
  std::size_t covered = 0;
  double width = 0.0;
  for (const auto& rec : r.summaries) {
    covered += rec.summary.ci_low <= 0.4 && 0.4 <= rec.summary.ci_high;
    width += rec.summary.ci_high - rec.summary.ci_low;
  }
  EXPECT_DOUBLE_EQ(r.ci_coverage, covered / 12.0);
  EXPECT_DOUBLE_EQ(r.mean_ci_width, width / 12.0);
}

TEST(RunSimulation, SingleReplicationFileContract) {
  auto plan = small_plan();
  plan.replications = 1;
  plan.methods = {Method::enhanced};
  const auto dir = fresh_dir("contract");
  std::ostringstream log;
  const auto outcome = run_simulation(plan, {dir, false}, log);
  EXPECT_EQ(outcome.cells_run, 1u);
  EXPECT_EQ(listing(dir), (std::set<std::string>{"manifest.json", "qavg_clayton_0.4_12_enhanced.csv",
                                                 "recovery_clayton_0.4_12_enhanced.csv"}));
  const auto recovery = slurp(dir / "recovery_clayton_0.4_12_enhanced.csv");
  EXPECT_EQ(recovery.substr(0, recovery.find('\n')), "replication,tau_obs,median,ci_low,ci_high,bf01");
  const auto qavg = slurp(dir / "qavg_clayton_0.4_12_enhanced.csv");
  EXPECT_EQ(std::count(qavg.begin(), qavg.end(), '\n'), 100);
  EXPECT_EQ(qavg.substr(0, qavg.find('\n')), "prob,avg_quantile");
}

TEST(RunSimulation, ResumeRegeneratesIdenticalFiles) {
  auto plan = small_plan();
  plan.tau_values = {0.0, 0.4};
  const auto dir = fresh_dir("resume");
  std::ostringstream log;
  run_simulation(plan, {dir, false}, log);
  const auto target = dir / "recovery_clayton_0.4_12_latent.csv";
  const auto before = slurp(target);
  const auto qavg_before = slurp(dir / "qavg_clayton_0.4_12_latent.csv");

  // Untouched cells are skipped.
  auto outcome = run_simulation(plan, {dir, false}, log);
  EXPECT_EQ(outcome.cells_run, 0u);
  EXPECT_EQ(outcome.cells_skipped, 2u);

  fs::remove(target);
  outcome = run_simulation(plan, {dir, false}, log);
  EXPECT_EQ(outcome.cells_run, 1u);
  EXPECT_EQ(outcome.cells_skipped, 1u);
  EXPECT_EQ(slurp(target), before);
  EXPECT_EQ(slurp(dir / "qavg_clayton_0.4_12_latent.csv"), qavg_before);

  outcome = run_simulation(plan, {dir, true}, log);
  EXPECT_EQ(outcome.cells_run, 2u);
  EXPECT_EQ(slurp(target), before);
}

TEST(RunSimulation, ManifestListsEveryFileWithChecksum) {
  auto plan = small_plan();
  plan.n_values = {8, 12};
  const auto dir = fresh_dir("manifest");
  std::ostringstream log;
  run_simulation(plan, {dir, false}, log);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  std::set<std::string> listed;
  for (const auto& f : manifest.at("files")) {
    const std::string name = f.at("path");
    listed.insert(name);
    EXPECT_EQ(f.at("checksum").get<std::string>(), file_checksum(dir / name));
  }
  auto on_disk = listing(dir);
  on_disk.erase("manifest.json");
  EXPECT_EQ(listed, on_disk);
  EXPECT_EQ(manifest.at("cells").size(), 2u);
  EXPECT_EQ(manifest.at("cells")[0].at("replication_seeds").size(), 12u);
  EXPECT_EQ(manifest.at("plan").at("replications"), 12);
  EXPECT_TRUE(manifest.contains("wall_time_seconds"));
  EXPECT_TRUE(manifest.at("failures").empty());
}

TEST(RunSimulation, ReplicationFailuresAreRecordedAndTheCellContinues) {
  auto plan = small_plan();
  plan.estimate.grid_size = 50;  // rejected by the grid methods, fine for the chain
  const auto dir = fresh_dir("failures");
  std::ostringstream log;
  const auto outcome = run_simulation(plan, {dir, false}, log);
  EXPECT_EQ(outcome.failures, 24u);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  ASSERT_EQ(manifest.at("failures").size(), 24u);
  EXPECT_EQ(manifest.at("failures")[0].at("method"), "original");
  EXPECT_NE(manifest.at("failures")[0].at("message").get<std::string>().find("grid too coarse"),
            std::string::npos);
  const auto latent = slurp(dir / "recovery_clayton_0.4_12_latent.csv");
  EXPECT_EQ(std::count(latent.begin(), latent.end(), '\n'), 13);
}

TEST(Checksum, DetectsChanges) {
  const auto dir = fresh_dir("checksum");
  fs::create_directories(dir);
  std::ofstream(dir / "a") << "hello";
  std::ofstream(dir / "b") << "hellp";
  EXPECT_EQ(file_checksum(dir / "a").size(), 16u);
  EXPECT_NE(file_checksum(dir / "a"), file_checksum(dir / "b"));
  // FNV-1a 64 of "hello"
  EXPECT_EQ(file_checksum(dir / "a"), "a430d84680aabd0b");
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.4), "0.4");
  EXPECT_EQ(format_double(0.0), "0");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(cell_stem({CopulaFamily::gaussian, 0.7, 50}, Method::latent), "gaussian_0.7_50_latent");
}

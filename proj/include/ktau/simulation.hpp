#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ktau/copula.hpp"
#include "ktau/estimation.hpp"
#include "ktau/posterior_summary.hpp"

namespace ktau {

struct SimulationPlan {
  std::vector<double> tau_values{0.0, 0.2, 0.4, 0.7};
  std::vector<std::size_t> n_values{10, 20, 50};
  std::vector<CopulaFamily> families{CopulaFamily::clayton, CopulaFamily::gumbel,
                                     CopulaFamily::frank, CopulaFamily::gaussian};
  std::size_t replications = 500;
  std::vector<Method> methods{Method::original, Method::enhanced, Method::latent};
  std::uint64_t base_seed = 20190101;
  std::size_t workers = 1;
  Marginal marginal = Marginal::uniform;
  EstimateOptions estimate;

  /// Throws InvalidInput on an empty axis or replications == 0.
  void validate() const;
};

nlohmann::json to_json(const SimulationPlan& plan);

/// Applies the keys present in `j` on top of `plan`. Throws InvalidInput on
/// unknown family, method or marginal names.
void merge_plan_json(SimulationPlan& plan, const nlohmann::json& j);

struct CellKey {
  CopulaFamily family = CopulaFamily::clayton;
  double tau = 0.0;
  std::size_t n = 0;
};

/// Seed of the data set for one replication; independent of worker count
/// and processing order.
std::uint64_t replication_seed(std::uint64_t base_seed, const CellKey& cell,
                               std::size_t replication);

/// Chain seed for the latent method on that replication.
std::uint64_t chain_seed(std::uint64_t replication_seed);

struct ReplicationRecord {
  std::size_t replication = 0;
  double tau_obs = 0.0;
  PosteriorSummary summary;
  double bf01 = 1.0;
  std::vector<double> quantiles;  // at the plan's probs
};

struct ReplicationFailure {
  std::size_t replication = 0;
  std::string method;
  std::string message;
};

struct RecoveryResult {
  CellKey cell;
  Method method = Method::original;
  std::vector<ReplicationRecord> summaries;  // ordered by replication
  QuantileAveragedPosterior quantile_avg;
  double median_of_medians = 0.0;
  double ci_coverage = 0.0;
  double mean_ci_width = 0.0;
  std::vector<ReplicationFailure> failures;
};

/// Runs every replication of one cell under every method of the plan.
/// Replications are spread over plan.workers threads; one result per method,
/// in plan order.
std::vector<RecoveryResult> run_cell(const SimulationPlan& plan, const CellKey& cell);

std::string cell_stem(const CellKey& cell, Method method);

/// Writes recovery_<stem>.csv and qavg_<stem>.csv; returns the two paths.
std::vector<std::filesystem::path> write_cell_files(const RecoveryResult& result,
                                                    const std::filesystem::path& dir);

std::string format_double(double v);

/// FNV-1a 64-bit digest of a file, as 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);

struct SimulationRunOptions {
  std::filesystem::path out_dir;
  bool force = false;
};

struct SimulationOutcome {
  std::size_t cells_run = 0;
  std::size_t cells_skipped = 0;
  std::size_t failures = 0;
};

/// Runs the plan, writing the cell files and manifest.json into out_dir.
/// Cells whose files already exist are skipped unless `force`.
SimulationOutcome run_simulation(const SimulationPlan& plan, const SimulationRunOptions& options,
                                 std::ostream& log);

}  // namespace ktau

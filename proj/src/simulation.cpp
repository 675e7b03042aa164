#include "ktau/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <fstream>
#include <optional>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "ktau/error.hpp"
#include "ktau/random.hpp"

namespace ktau {

void SimulationPlan::validate() const {
  if (tau_values.empty() || n_values.empty() || families.empty() || methods.empty()) {
    throw InvalidInput("simulation plan: tau_values, n_values, families and methods must be non-empty");
  }
  if (replications == 0) throw InvalidInput("simulation plan: replications must be >= 1");
  for (auto n : n_values) {
    if (n < 2) throw InvalidInput("simulation plan: every n must be >= 2");
    if (n < 4 && std::find(methods.begin(), methods.end(), Method::latent) != methods.end()) {
      throw InvalidInput("simulation plan: the latent method needs n >= 4");
    }
  }
  for (auto family : families) {
    for (double tau : tau_values) {
      if (tau != 0.0) tau_to_parameter(family, tau);
    }
  }
  estimate.chain.validate();
}

nlohmann::json to_json(const SimulationPlan& plan) {
  nlohmann::json j;
  j["tau_values"] = plan.tau_values;
  j["n_values"] = plan.n_values;
  auto& fam = j["families"] = nlohmann::json::array();
  for (auto f : plan.families) fam.push_back(std::string(to_string(f)));
  auto& meth = j["methods"] = nlohmann::json::array();
  for (auto m : plan.methods) meth.push_back(std::string(to_string(m)));
  j["replications"] = plan.replications;
  j["base_seed"] = plan.base_seed;
  j["workers"] = plan.workers;
  j["marginal"] = std::string(to_string(plan.marginal));
  j["ci_level"] = plan.estimate.ci_level;
  j["grid_size"] = plan.estimate.grid_size;
  j["iterations"] = plan.estimate.chain.total_iterations;
  j["burn_in"] = plan.estimate.chain.burn_in;
  j["thinning"] = plan.estimate.chain.thinning;
  j["proposal_sd_scale"] = plan.estimate.chain.proposal_sd_scale;
  j["hastings_correction"] = plan.estimate.chain.hastings_correction;
  return j;
}

void merge_plan_json(SimulationPlan& plan, const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidInput("simulation config must be a JSON object");
  try {
    if (j.contains("tau_values")) plan.tau_values = j.at("tau_values").get<std::vector<double>>();
    if (j.contains("n_values")) plan.n_values = j.at("n_values").get<std::vector<std::size_t>>();
    if (j.contains("families")) {
      plan.families.clear();
      for (const auto& name : j.at("families")) {
        auto f = parse_family(name.get<std::string>());
        if (!f) throw InvalidInput("unknown copula family: " + name.get<std::string>());
        plan.families.push_back(*f);
      }
    }
    if (j.contains("methods")) {
      plan.methods.clear();
      for (const auto& name : j.at("methods")) {
        auto m = parse_method(name.get<std::string>());
        if (!m) throw InvalidInput("unknown method: " + name.get<std::string>());
        plan.methods.push_back(*m);
      }
    }
    if (j.contains("marginal")) {
      auto m = parse_marginal(j.at("marginal").get<std::string>());
      if (!m) throw InvalidInput("unknown marginal: " + j.at("marginal").get<std::string>());
      plan.marginal = *m;
    }
    if (j.contains("replications")) plan.replications = j.at("replications").get<std::size_t>();
    if (j.contains("base_seed")) plan.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("workers")) plan.workers = j.at("workers").get<std::size_t>();
    if (j.contains("ci_level")) plan.estimate.ci_level = j.at("ci_level").get<double>();
    if (j.contains("grid_size")) plan.estimate.grid_size = j.at("grid_size").get<std::size_t>();
    auto& chain = plan.estimate.chain;
    if (j.contains("iterations")) chain.total_iterations = j.at("iterations").get<std::size_t>();
    if (j.contains("burn_in")) chain.burn_in = j.at("burn_in").get<std::size_t>();
    if (j.contains("thinning")) chain.thinning = j.at("thinning").get<std::size_t>();
    if (j.contains("proposal_sd_scale")) {
      chain.proposal_sd_scale = j.at("proposal_sd_scale").get<double>();
    }
    if (j.contains("hastings_correction")) {
      chain.hastings_correction = j.at("hastings_correction").get<bool>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("simulation config: ") + e.what());
  }
}

std::uint64_t replication_seed(std::uint64_t base_seed, const CellKey& cell,
                               std::size_t replication) {
  std::uint64_t h = combine_seed(base_seed, static_cast<std::uint64_t>(cell.family));
  h = combine_seed(h, std::bit_cast<std::uint64_t>(cell.tau + 0.0));
  h = combine_seed(h, cell.n);
  return combine_seed(h, replication);
}

std::uint64_t chain_seed(std::uint64_t replication_seed) {
  return combine_seed(replication_seed, 0x6c6174656e74ULL);
}

std::string format_double(double v) { return fmt::format("{}", v + 0.0); }

std::string cell_stem(const CellKey& cell, Method method) {
  return fmt::format("{}_{}_{}_{}", to_string(cell.family), format_double(cell.tau), cell.n,
                     to_string(method));
}

namespace {

struct Slot {
  std::vector<std::optional<ReplicationRecord>> records;
  std::vector<std::optional<ReplicationFailure>> failures;
};

double median_of(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

}  // namespace

std::vector<RecoveryResult> run_cell(const SimulationPlan& plan, const CellKey& cell) {
  const auto probs = default_probs();
  const std::size_t reps = plan.replications;
  std::vector<Slot> slots(plan.methods.size());
  for (auto& s : slots) {
    s.records.resize(reps);
    s.failures.resize(reps);
  }

  auto work = [&](std::size_t rep) {
    const std::uint64_t seed = replication_seed(plan.base_seed, cell, rep);
    std::optional<PairedSample> sample;
    std::string data_error;
    try {
      sample = sample_copula({cell.family, cell.tau, plan.marginal, cell.n, seed});
    } catch (const std::exception& e) {
      data_error = e.what();
    }
    for (std::size_t m = 0; m < plan.methods.size(); ++m) {
      const Method method = plan.methods[m];
      if (!sample) {
        slots[m].failures[rep] = ReplicationFailure{rep, std::string(to_string(method)), data_error};
        continue;
      }
      try {
        EstimateOptions options = plan.estimate;
        options.chain.seed = chain_seed(seed);
        const Estimate est = estimate(*sample, method, options);
        slots[m].records[rep] = ReplicationRecord{rep, est.tau_obs, est.summary, est.bf01,
                                                  posterior_quantiles(est.posterior, probs)};
      } catch (const std::exception& e) {
        slots[m].failures[rep] = ReplicationFailure{rep, std::string(to_string(method)), e.what()};
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(plan.workers, 1, reps);
  if (workers == 1) {
    for (std::size_t rep = 0; rep < reps; ++rep) work(rep);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t rep = next++; rep < reps; rep = next++) work(rep);
      });
    }
  }

  std::vector<RecoveryResult> results;
  for (std::size_t m = 0; m < plan.methods.size(); ++m) {
    RecoveryResult r;
    r.cell = cell;
    r.method = plan.methods[m];
    std::vector<std::vector<double>> quantiles;
    std::vector<double> medians;
    std::size_t covered = 0;
    double width = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      if (slots[m].failures[rep]) r.failures.push_back(*slots[m].failures[rep]);
      if (!slots[m].records[rep]) continue;
      ReplicationRecord& rec = *slots[m].records[rep];
      medians.push_back(rec.summary.median);
      if (rec.summary.ci_low <= cell.tau && cell.tau <= rec.summary.ci_high) ++covered;
      width += rec.summary.ci_high - rec.summary.ci_low;
      quantiles.push_back(std::move(rec.quantiles));
      rec.quantiles.clear();
      r.summaries.push_back(std::move(rec));
    }
    if (!quantiles.empty()) {
      r.quantile_avg = average_quantile_vectors(quantiles, probs);
      const auto ok = static_cast<double>(r.summaries.size());
      r.ci_coverage = static_cast<double>(covered) / ok;
      r.mean_ci_width = width / ok;
    }
    r.median_of_medians = median_of(std::move(medians));
    results.push_back(std::move(r));
  }
  return results;
}

namespace {

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::vector<std::filesystem::path> write_cell_files(const RecoveryResult& result,
                                                    const std::filesystem::path& dir) {
  const std::string stem = cell_stem(result.cell, result.method);
  std::string recovery = "replication,tau_obs,median,ci_low,ci_high,bf01\n";
  for (const auto& rec : result.summaries) {
    recovery += fmt::format("{},{},{},{},{},{}\n", rec.replication, format_double(rec.tau_obs),
                            format_double(rec.summary.median), format_double(rec.summary.ci_low),
                            format_double(rec.summary.ci_high), format_double(rec.bf01));
  }
  std::string qavg = "prob,avg_quantile\n";
  const auto& q = result.quantile_avg;
  for (std::size_t k = 0; k < q.probs.size(); ++k) {
    qavg += fmt::format("{},{}\n", format_double(q.probs[k]), format_double(q.avg_quantiles[k]));
  }
  const auto recovery_path = dir / ("recovery_" + stem + ".csv");
  const auto qavg_path = dir / ("qavg_" + stem + ".csv");
  write_atomically(recovery_path, recovery);
  write_atomically(qavg_path, qavg);
  return {recovery_path, qavg_path};
}

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buffer[1 << 14];
  while (in.read(buffer, sizeof buffer) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buffer[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return fmt::format("{:016x}", h);
}

SimulationOutcome run_simulation(const SimulationPlan& plan, const SimulationRunOptions& options,
                                 std::ostream& log) {
  using clock = std::chrono::steady_clock;
  plan.validate();
  std::filesystem::create_directories(options.out_dir);

  const auto start = clock::now();
  SimulationOutcome outcome;
  nlohmann::json manifest;
  manifest["tool"] = "ktau";
  manifest["version"] = KTAU_VERSION;
  manifest["plan"] = to_json(plan);
  manifest["seed_derivation"] =
      "splitmix64 chain over (base_seed, family, tau, n, replication); latent chain seed mixes "
      "the replication seed with a fixed tag";
  auto& cells = manifest["cells"] = nlohmann::json::array();
  auto& files = manifest["files"] = nlohmann::json::array();
  auto& failures = manifest["failures"] = nlohmann::json::array();

  for (auto family : plan.families) {
    for (double tau : plan.tau_values) {
      for (auto n : plan.n_values) {
        const CellKey cell{family, tau, n};
        std::vector<std::filesystem::path> paths;
        for (auto m : plan.methods) {
          const auto stem = cell_stem(cell, m);
          paths.push_back(options.out_dir / ("recovery_" + stem + ".csv"));
          paths.push_back(options.out_dir / ("qavg_" + stem + ".csv"));
        }
        const bool present = std::all_of(paths.begin(), paths.end(), [](const auto& p) {
          return std::filesystem::exists(p);
        });

        nlohmann::json entry;
        entry["family"] = std::string(to_string(family));
        entry["tau"] = tau;
        entry["n"] = n;
        std::vector<std::uint64_t> seeds(plan.replications);
        for (std::size_t r = 0; r < plan.replications; ++r) seeds[r] = replication_seed(plan.base_seed, cell, r);
        entry["replication_seeds"] = seeds;

        if (present && !options.force) {
          entry["status"] = "skipped";
          ++outcome.cells_skipped;
          log << "skip " << to_string(family) << " tau=" << format_double(tau) << " n=" << n
              << " (outputs exist)\n";
        } else {
          const auto cell_start = clock::now();
          const auto results = run_cell(plan, cell);
          for (const auto& r : results) {
            write_cell_files(r, options.out_dir);
            for (const auto& f : r.failures) {
              failures.push_back({{"family", std::string(to_string(family))},
                                  {"tau", tau},
                                  {"n", n},
                                  {"method", f.method},
                                  {"replication", f.replication},
                                  {"message", f.message}});
              ++outcome.failures;
            }
          }
          const std::chrono::duration<double> elapsed = clock::now() - cell_start;
          entry["status"] = "run";
          entry["wall_time_seconds"] = elapsed.count();
          ++outcome.cells_run;
          log << "done " << to_string(family) << " tau=" << format_double(tau) << " n=" << n
              << " in " << fmt::format("{:.1f}", elapsed.count()) << " s\n";
        }
        for (const auto& p : paths) {
          files.push_back({{"path", p.filename().string()}, {"checksum", file_checksum(p)}});
        }
        cells.push_back(std::move(entry));
      }
    }
  }
  const std::chrono::duration<double> total = clock::now() - start;
  manifest["wall_time_seconds"] = total.count();
  write_atomically(options.out_dir / "manifest.json", manifest.dump(2) + "\n");
  return outcome;
}

}  // namespace ktau

#include "ktau/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ktau/error.hpp"
#include "ktau/estimation.hpp"
#include "ktau/simulation.hpp"

namespace ktau {

CsvError::CsvError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_field(std::string_view field, std::size_t line) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw CsvError(line, "not a number: '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) throw CsvError(line, "non-finite value");
  return value;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> read_xy_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<double> x;
  std::vector<double> y;
  std::string raw;
  std::size_t line = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = raw;
    if (line == 1 && text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    text = trim(text);
    if (!header_seen) {
      const auto comma = text.find(',');
      if (comma == std::string_view::npos || trim(text.substr(0, comma)) != "x" ||
          trim(text.substr(comma + 1)) != "y") {
        throw CsvError(line, "expected header 'x,y'");
      }
      header_seen = true;
      continue;
    }
    if (text.empty()) continue;
    const auto comma = text.find(',');
    if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos) {
      throw CsvError(line, "expected exactly two fields");
    }
    x.push_back(parse_field(text.substr(0, comma), line));
    y.push_back(parse_field(text.substr(comma + 1), line));
  }
  if (!header_seen) throw CsvError(1, "expected header 'x,y'");
  return {std::move(x), std::move(y)};
}

void write_xy_csv(const PairedSample& s, std::ostream& out) {
  out << "x,y\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << format_double(s.x()[i]) << ',' << format_double(s.y()[i]) << '\n';
  }
}

namespace {

std::size_t default_workers() {
  if (const char* env = std::getenv("TAU_LATENT_WORKERS")) {
    std::size_t value = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && ptr == text.data() + text.size() && value > 0) return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct EstimateArgs {
  std::string input;
  std::string method = "latent";
  std::string dump_path;
  double ci_level = 0.95;
  std::size_t grid_size = kDefaultGridSize;
  std::uint64_t seed = 1;
  std::size_t iterations = 5500;
  std::size_t burn_in = 500;
  std::size_t thinning = 1;
  double proposal_scale = 1.0;
  bool hastings = false;
};

void add_estimate_options(CLI::App& cmd, EstimateArgs& a) {
  cmd.add_option("-i,--input", a.input, "CSV file with header x,y")->required();
  cmd.add_option("-m,--method", a.method, "original | enhanced | latent")
      ->check(CLI::IsMember({"original", "enhanced", "latent"}));
  cmd.add_option("--ci-level", a.ci_level, "Central credible interval level");
  cmd.add_option("--grid-size", a.grid_size, "Grid points for the asymptotic methods");
  cmd.add_option("--seed", a.seed, "Seed of the latent chain");
  cmd.add_option("--iterations", a.iterations, "Total MCMC sweeps");
  cmd.add_option("--burn-in", a.burn_in, "Discarded initial sweeps");
  cmd.add_option("--thin", a.thinning, "Keep every k-th draw");
  cmd.add_option("--proposal-scale", a.proposal_scale, "Multiplier of the 1/sqrt(n-3) step");
  cmd.add_flag("--hastings", a.hastings, "Add the Hastings term for the atanh random walk");
  cmd.add_option("--dump-posterior", a.dump_path, "Write the posterior grid or draws as CSV");
}

Estimate run_estimate(const EstimateArgs& a) {
  auto [x, y] = read_xy_csv(a.input);
  const PairedSample sample(std::move(x), std::move(y));
  EstimateOptions options;
  options.ci_level = a.ci_level;
  options.grid_size = a.grid_size;
  options.chain.total_iterations = a.iterations;
  options.chain.burn_in = a.burn_in;
  options.chain.thinning = a.thinning;
  options.chain.seed = a.seed;
  options.chain.proposal_sd_scale = a.proposal_scale;
  options.chain.hastings_correction = a.hastings;
  Estimate est = estimate(sample, *parse_method(a.method), options);

  if (!a.dump_path.empty()) {
    std::ofstream dump(a.dump_path, std::ios::binary | std::ios::trunc);
    if (!dump) throw std::runtime_error("cannot write " + a.dump_path);
    if (const auto* grid = std::get_if<PosteriorGrid>(&est.posterior)) {
      dump << "tau,density\n";
      for (std::size_t i = 0; i < grid->tau_grid.size(); ++i) {
        dump << format_double(grid->tau_grid[i]) << ',' << format_double(grid->density[i]) << '\n';
      }
    } else {
      dump << "tau\n";
      for (double t : std::get<PosteriorSamples>(est.posterior).tau_draws) {
        dump << format_double(t) << '\n';
      }
    }
    if (!dump.flush()) throw std::runtime_error("write failed for " + a.dump_path);
  }
  return est;
}

nlohmann::ordered_json summary_json(const EstimateArgs& a, const Estimate& est) {
  nlohmann::ordered_json j;
  j["method"] = std::string(to_string(est.method));
  j["n"] = est.n;
  j["tau_obs"] = est.tau_obs;
  j["median"] = est.summary.median;
  j["ci_low"] = est.summary.ci_low;
  j["ci_high"] = est.summary.ci_high;
  j["ci_level"] = est.summary.ci_level;
  j["bf01"] = reciprocal_pair(est.bf01).bf01;
  j["seed"] = a.seed;
  if (const auto* s = std::get_if<PosteriorSamples>(&est.posterior)) {
    j["acceptance_rate"] = s->acceptance_rate;
  }
  return j;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const CsvError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian estimation and testing of Kendall's tau", "ktau"};
  app.require_subcommand(1);

  EstimateArgs est_args;
  auto* est_cmd = app.add_subcommand("estimate", "Posterior summary for one data set");
  add_estimate_options(*est_cmd, est_args);

  EstimateArgs bf_args;
  auto* bf_cmd = app.add_subcommand("bf", "Savage-Dickey Bayes factor for tau = 0");
  add_estimate_options(*bf_cmd, bf_args);

  std::string config_path;
  std::string out_dir;
  std::vector<double> taus;
  std::vector<std::size_t> ns;
  std::vector<std::string> families;
  std::vector<std::string> methods;
  std::string marginal;
  std::size_t replications = 0;
  std::uint64_t base_seed = 0;
  std::size_t workers = 0;
  std::size_t sim_iterations = 0;
  std::size_t sim_burn_in = 0;
  bool force = false;
  bool sim_hastings = false;
  auto* sim_cmd = app.add_subcommand("simulate", "Copula parameter-recovery study");
  sim_cmd->add_option("--config", config_path, "JSON plan; flags override its values");
  sim_cmd->add_option("-o,--out", out_dir, "Output directory")->required();
  auto* o_tau = sim_cmd->add_option("--tau", taus, "Population tau values");
  auto* o_n = sim_cmd->add_option("--n", ns, "Sample sizes");
  auto* o_fam = sim_cmd->add_option("--families", families, "clayton gumbel frank gaussian");
  auto* o_meth = sim_cmd->add_option("--methods", methods, "original enhanced latent");
  auto* o_marg = sim_cmd->add_option("--marginal", marginal, "Marginal transform of the copula");
  auto* o_reps = sim_cmd->add_option("--replications", replications, "Data sets per cell");
  auto* o_seed = sim_cmd->add_option("--seed", base_seed, "Base seed");
  auto* o_work = sim_cmd->add_option("--workers", workers, "Worker threads");
  auto* o_iter = sim_cmd->add_option("--iterations", sim_iterations, "Total MCMC sweeps");
  auto* o_burn = sim_cmd->add_option("--burn-in", sim_burn_in, "Discarded initial sweeps");
  auto* o_hast = sim_cmd->add_flag("--hastings", sim_hastings, "Hastings-corrected acceptance");
  sim_cmd->add_flag("--force", force, "Recompute cells whose outputs exist");

  std::string gen_family = "gaussian";
  std::string gen_marginal = "uniform";
  double gen_tau = 0.0;
  std::size_t gen_n = 0;
  std::uint64_t gen_seed = 1;
  std::string gen_output;
  auto* gen_cmd = app.add_subcommand("generate", "Write one copula sample as x,y CSV");
  gen_cmd->add_option("--family", gen_family, "Copula family");
  gen_cmd->add_option("--tau", gen_tau, "Population tau")->required();
  gen_cmd->add_option("--n", gen_n, "Number of pairs")->required();
  gen_cmd->add_option("--marginal", gen_marginal, "Marginal transform");
  gen_cmd->add_option("--seed", gen_seed, "Seed");
  gen_cmd->add_option("-o,--output", gen_output, "Output file (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitIo;
  }

  if (est_cmd->parsed() || bf_cmd->parsed()) {
    const bool is_bf = bf_cmd->parsed();
    const EstimateArgs& a = is_bf ? bf_args : est_args;
    return guarded(err, [&] {
      const Estimate est = run_estimate(a);
      auto j = summary_json(a, est);
      if (is_bf) {
        const auto pair = reciprocal_pair(est.bf01);
        j["bf01"] = pair.bf01;
        j["bf10"] = pair.bf10;
        j["prior_density_zero"] = std::numbers::pi / 4.0;
      }
      out << j.dump(2) << '\n';
      return static_cast<int>(kExitOk);
    });
  }

  if (sim_cmd->parsed()) {
    return guarded(err, [&] {
      SimulationPlan plan;
      plan.workers = default_workers();
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot open " + config_path);
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
          throw std::runtime_error(config_path + ": " + e.what());
        }
        merge_plan_json(plan, j);
      }
      nlohmann::json flags;
      if (o_tau->count()) flags["tau_values"] = taus;
      if (o_n->count()) flags["n_values"] = ns;
      if (o_fam->count()) flags["families"] = families;
      if (o_meth->count()) flags["methods"] = methods;
      if (o_marg->count()) flags["marginal"] = marginal;
      if (o_reps->count()) flags["replications"] = replications;
      if (o_seed->count()) flags["base_seed"] = base_seed;
      if (o_work->count()) flags["workers"] = workers;
      if (o_iter->count()) flags["iterations"] = sim_iterations;
      if (o_burn->count()) flags["burn_in"] = sim_burn_in;
      if (o_hast->count()) flags["hastings_correction"] = sim_hastings;
      if (!flags.empty()) merge_plan_json(plan, flags);

      const auto outcome = run_simulation(plan, {out_dir, force}, err);
      out << fmt::format("cells run: {}, skipped: {}, failed replications: {}\n",
                         outcome.cells_run, outcome.cells_skipped, outcome.failures);
      return static_cast<int>(outcome.failures > 0 ? kExitPartialFailure : kExitOk);
    });
  }

  return guarded(err, [&] {
    const auto family = parse_family(gen_family);
    const auto marg = parse_marginal(gen_marginal);
    if (!family) throw InvalidInput("unknown copula family: " + gen_family);
    if (!marg) throw InvalidInput("unknown marginal: " + gen_marginal);
    const PairedSample sample = sample_copula({*family, gen_tau, *marg, gen_n, gen_seed});
    if (gen_output.empty()) {
      write_xy_csv(sample, out);
    } else {
      std::ofstream file(gen_output, std::ios::binary | std::ios::trunc);
      if (!file) throw std::runtime_error("cannot write " + gen_output);
      write_xy_csv(sample, file);
    }
    return static_cast<int>(kExitOk);
  });
}

}  // namespace ktau

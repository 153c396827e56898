// Command-line driver for the sweeps and single-state tools.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dicke/bayes.hpp"
#include "dicke/errors.hpp"
#include "dicke/experiments.hpp"
#include "dicke/noise.hpp"
#include "dicke/squeezing.hpp"
#include "dicke/states.hpp"

namespace {

using namespace dicke;
namespace fs = std::filesystem;

constexpr int kExitInvalid = 1;
constexpr int kExitNumerical = 2;
constexpr const char* kOutputDirEnv = "DICKE_OUTPUT_DIR";

struct CommonFlags {
  std::string config_path;
  std::string seed, out, n, sigma, eta, m, support, theta_r, convention;
  int s_mult = 0;
  int grid_points = 0;
  double jx_fraction = 0.0;
  double fine_step = 0.0;
  bool full_circle = false;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config_path, "key=value config file");
  sub->add_option("--seed", f.seed, "seed or seed range, e.g. 0..9");
  sub->add_option("--out", f.out, "output CSV path");
  sub->add_option("--n", f.n, "particle numbers, e.g. 20..200 (default step 20)");
  sub->add_option("--sigma", f.sigma, "Gaussian widths, e.g. 0..6 (default step 1)");
  sub->add_option("--eta", f.eta, "loss rates, e.g. 0..0.4 (default step 0.1)");
  sub->add_option("--m", f.m, "measurement rounds, e.g. 20..200 (default step 20)");
  sub->add_option("--support", f.support, "estimation support lo,hi");
  sub->add_option("--s-mult", f.s_mult, "phase truncation s = s_mult * N");
  sub->add_option("--grid-points", f.grid_points, "estimation grid size");
  sub->add_flag("--full-circle", f.full_circle, "estimate over [-pi, pi)");
  sub->add_option("--theta-r", f.theta_r, "true phase lo,hi (sweeps) or value (simulate)");
  sub->add_option("--convention", f.convention, "initial_N or mean_particles");
  sub->add_option("--jx-fraction", f.jx_fraction, "squeezed input <J_x> / (N/2)");
  sub->add_option("--fine-step", f.fine_step, "crossover refinement step");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

// Defaults, then the config file, then flags.
SweepConfig resolve(const CommonFlags& f, SweepConfig config) {
  if (!f.config_path.empty()) apply_config_text(config, read_file(f.config_path));
  auto set = [&](const char* key, const std::string& value) {
    if (!value.empty()) apply_config_value(config, key, value);
  };
  set("seed", f.seed);
  set("out", f.out);
  set("n", f.n);
  set("sigma", f.sigma);
  set("eta", f.eta);
  set("m", f.m);
  set("support", f.support);
  set("convention", f.convention);
  if (f.theta_r.find(',') != std::string::npos) set("theta_r", f.theta_r);
  if (f.s_mult) config.s_multiplier = f.s_mult;
  if (f.grid_points) config.grid_points = f.grid_points;
  if (f.full_circle) config.full_circle = true;
  if (f.jx_fraction > 0.0) config.jx_fraction = f.jx_fraction;
  if (f.fine_step > 0.0) config.fine_step = f.fine_step;
  return config;
}

fs::path output_path(const SweepConfig& config, const std::string& stem) {
  if (!config.output_path.empty()) return config.output_path;
  if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) return fs::path(dir) / (stem + ".csv");
  return stem + ".csv";
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  out << text;
}

fs::path sidecar_path(fs::path csv) { return csv.replace_extension(".json"); }

int finish(const fs::path& csv, const std::string& rows, const std::string& sidecar,
           const std::vector<RowError>& errors) {
  write_text(csv, rows);
  write_text(sidecar_path(csv), sidecar);
  std::cout << "wrote " << csv.string() << " and " << sidecar_path(csv).string() << '\n';
  for (const auto& e : errors) std::cerr << "error: " << e.cell << ": " << e.message << '\n';
  return errors.empty() ? 0 : kExitNumerical;
}

SweepConfig sweep_defaults(ExperimentKind kind) {
  SweepConfig config;
  config.experiment = kind;
  apply_config_value(config, "n", "20..200");
  apply_config_value(config, "sigma", "0..6");
  apply_config_value(config, "eta", "0..0.4");
  apply_config_value(config, "m", "20..200");
  apply_config_value(config, "seed", "0..4");
  return config;
}

std::string describe(const std::optional<double>& value) {
  return value ? format_real(*value) : "none";
}

SectoredState single_state(const std::string& family, const SweepConfig& config) {
  if (config.n_values.size() != 1) throw InvalidArgument("n: give exactly one particle number");
  const int n = config.n_values.front();
  auto one = [](const std::vector<double>& values, const char* name) {
    if (values.size() != 1) throw InvalidArgument(std::string(name) + ": give exactly one value");
    return values.front();
  };
  if (family == "dicke") return SectoredState::from_pure(dicke_state(n));
  if (family == "coherent") return SectoredState::from_pure(spin_coherent_x(n));
  if (family == "gaussian") return build_state({"gaussian", n, one(config.sigma_values, "sigma")});
  if (family == "loss") return build_state({"loss", n, one(config.eta_values, "eta")});
  if (family == "squeezed") {
    return SectoredState::from_pure(min_variance_squeezed_state(
        {.particles = n, .jx_fraction = config.jx_fraction, .lambda_lo = {}, .lambda_hi = {}}));
  }
  throw InvalidArgument("family: expected dicke, coherent, gaussian, loss or squeezed");
}

int run_xi(const CommonFlags& f, const std::string& family) {
  const SweepConfig config = resolve(f, SweepConfig{});
  const SectoredState state = single_state(family, config);
  const SqueezingReport report = squeezing_report(state, config.convention);
  const MomentRecord moments = collective_moments(state);
  nlohmann::ordered_json doc{{"family", family},
                             {"N", state.source_particles()},
                             {"convention", std::string(to_string(report.n_convention))},
                             {"xi_d", report.xi_d},
                             {"xi_s", report.xi_s ? nlohmann::ordered_json(*report.xi_s) : nlohmann::ordered_json(nullptr)},
                             {"depth_lower_bound", report.depth_lower_bound},
                             {"mean_particles", moments.mean_particles},
                             {"var_jz", moments.var_jz},
                             {"mean_jx2_plus_jy2", moments.mean_jx2_plus_jy2}};
  std::cout << doc.dump(2) << '\n';
  return 0;
}

int run_simulate(const CommonFlags& f, const std::string& family) {
  SweepConfig defaults;
  defaults.seeds = {0};
  const SweepConfig config = resolve(f, defaults);
  if (config.m_values.empty()) throw InvalidArgument("m: give the rounds to record");
  if (config.seeds.size() != 1) throw InvalidArgument("seed: give exactly one seed");
  if (f.theta_r.empty() || f.theta_r.find(',') != std::string::npos) throw InvalidArgument("theta-r: give one value");
  const double theta_r = parse_real_range(f.theta_r, 1.0).front();
  const SectoredState state = single_state(family, config);

  EstimatorOptions options;
  options.support_lo = config.support_lo;
  options.support_hi = config.support_hi;
  options.grid_points = config.grid_points;
  options.full_circle = config.full_circle;
  const int rounds = *std::max_element(config.m_values.begin(), config.m_values.end());
  const PosteriorTrace trace = simulate_experiment(state, theta_r, rounds, config.seeds.front(), options);

  std::string csv = "m,theta,density,config_hash,seed,version\n";
  nlohmann::ordered_json summaries = nlohmann::ordered_json::array();
  const std::string tail = config_hash(config) + ',' + std::to_string(config.seeds.front()) + ',' + std::string(kVersion);
  for (int m : config.m_values) {
    const auto& density = trace.densities.at(static_cast<std::size_t>(m - 1));
    for (int g = 0; g < trace.grid.points; ++g) {
      csv += std::to_string(m) + ',' + format_real(trace.grid.theta(g)) + ',' + format_real(density[g]) + ',' + tail + '\n';
    }
    const PosteriorSummary s = summarize_posterior(trace.grid, density, theta_r);
    summaries.push_back({{"m", m}, {"theta_p", s.theta_p}, {"d_theta", s.d_theta}, {"theta_pr", s.theta_pr},
                         {"mirror_folds", s.mirror_folds}});
  }
  nlohmann::ordered_json doc{{"family", family},
                             {"N", state.source_particles()},
                             {"theta_r", theta_r},
                             {"support", {trace.grid.lo, trace.grid.hi}},
                             {"grid_points", trace.grid.points},
                             {"seed", config.seeds.front()},
                             {"config_hash", config_hash(config)},
                             {"version", std::string(kVersion)},
                             {"rounds", summaries}};
  return finish(output_path(config, "simulate"), csv, doc.dump(2) + '\n', {});
}

int run_depth(double xi, const std::string& moments_csv, int row) {
  if (!moments_csv.empty()) {
    std::istringstream lines(read_file(moments_csv));
    std::string header;
    std::getline(lines, header);
    std::vector<std::string> names;
    for (std::stringstream h(header); std::getline(h, names.emplace_back(), ',');) {
    }
    auto column = [&](const char* name) {
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return i;
      }
      throw InvalidArgument(std::string("moments CSV lacks column ") + name);
    };
    const std::size_t cn = column("mean_particles");
    const std::size_t cv = column("var_jz");
    const std::size_t cd = column("mean_jx2_plus_jy2");
    std::string line;
    for (int i = 0; i <= row; ++i) {
      if (!std::getline(lines, line)) throw InvalidArgument("moments CSV has no row " + std::to_string(row));
    }
    std::vector<std::string> cells;
    for (std::stringstream c(line); std::getline(c, cells.emplace_back(), ',');) {
    }
    if (cells.size() < names.size()) throw InvalidArgument("moments CSV row is short");
    const double n = parse_real_range(cells[cn], 1.0).front();
    const double var = parse_real_range(cells[cv], 1.0).front();
    const double denom = parse_real_range(cells[cd], 1.0).front();
    if (!(denom > 0.0)) throw UndefinedMetric("mean_jx2_plus_jy2 must be positive");
    xi = n * (var + 0.25) / denom;
  }
  if (!(xi > 0.0)) throw InvalidArgument("xi: give a positive value or a moments CSV");
  std::cout << "xi_d=" << format_real(xi) << " depth_lower_bound=" << entanglement_depth_lower_bound(xi) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dicke-squeezing metrology experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  CommonFlags f;
  std::string family = "dicke";
  double depth_xi = 0.0;
  std::string depth_csv;
  int depth_row = 0;

  auto* fig2 = app.add_subcommand("fig2", "phase width vs sqrt(xi_D/N), alpha fits");
  auto* fig3 = app.add_subcommand("fig3", "Bayesian precision vs sqrt(xi_D/(N m)), beta fit");
  auto* fig4 = app.add_subcommand("fig4", "xi_S and xi_D under particle loss");
  auto* xi = app.add_subcommand("xi", "squeezing metrics for one state");
  auto* simulate = app.add_subcommand("simulate", "one Bayesian run with posterior dump");
  auto* depth = app.add_subcommand("depth", "entanglement depth bound");
  for (auto* sub : {fig2, fig3, fig4, xi, simulate}) add_common(sub, f);
  for (auto* sub : {xi, simulate}) {
    sub->add_option("--family", family, "dicke, coherent, gaussian, loss or squeezed");
  }
  depth->add_option("--xi", depth_xi, "Dicke squeezing value");
  depth->add_option("--moments-csv", depth_csv, "CSV with mean_particles,var_jz,mean_jx2_plus_jy2");
  depth->add_option("--row", depth_row, "data row of the moments CSV (0-based)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (fig2->parsed()) {
      SweepConfig config = resolve(f, sweep_defaults(ExperimentKind::fig2_gaussian));
      if (config.sigma_values.empty()) config.experiment = ExperimentKind::fig2_loss;
      const auto result = run_fig2(config);
      std::cout << "alpha=" << (result.overall ? format_real(result.overall->slope) : "none")
                << " gaussian_variation=" << describe(result.gaussian_alpha_variation)
                << " loss_variation=" << describe(result.loss_alpha_variation) << '\n';
      return finish(output_path(config, "fig2"), fig2_csv(result, config), fig2_sidecar(result, config),
                    result.errors);
    }
    if (fig3->parsed()) {
      SweepConfig config = resolve(f, sweep_defaults(ExperimentKind::fig3_gaussian));
      if (config.sigma_values.empty()) config.experiment = ExperimentKind::fig3_loss;
      const auto result = run_fig3(config);
      std::cout << "beta=" << (result.beta ? format_real(result.beta->slope) : "none")
                << " fraction_bounded=" << format_real(result.fraction_bounded) << '\n';
      return finish(output_path(config, "fig3"), fig3_csv(result, config), fig3_sidecar(result, config),
                    result.errors);
    }
    if (fig4->parsed()) {
      SweepConfig defaults;
      defaults.experiment = ExperimentKind::fig4_robustness;
      defaults.n_values = {100};
      defaults.eta_values = parse_real_range("0..0.99", 0.01);
      const SweepConfig config = resolve(f, defaults);
      if (config.n_values.size() != 1) throw InvalidArgument("n: fig4 takes one particle number");
      const auto result = run_fig4(config);
      std::cout << "xi_s_crossover=" << describe(result.xi_s_crossover)
                << " xi_d_crossover=" << describe(result.xi_d_crossover) << '\n';
      return finish(output_path(config, "fig4"), fig4_csv(result, config), fig4_sidecar(result, config),
                    result.errors);
    }
    if (xi->parsed()) return run_xi(f, family);
    if (simulate->parsed()) return run_simulate(f, family);
    if (depth->parsed()) return run_depth(depth_xi, depth_csv, depth_row);
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitInvalid;
}

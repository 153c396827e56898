#include "dicke/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dicke/errors.hpp"
#include "dicke/noise.hpp"
#include "dicke/parallel.hpp"
#include "dicke/phase.hpp"
#include "dicke/states.hpp"

namespace dicke {
namespace {

using Json = nlohmann::ordered_json;

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_real(std::string_view text) {
  const std::string s = trim(text);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size() || !std::isfinite(value)) {
    throw InvalidArgument("not a number: '" + s + "'");
  }
  return value;
}

std::int64_t parse_int(std::string_view text) {
  const std::string s = trim(text);
  std::int64_t value = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    throw InvalidArgument("not an integer: '" + s + "'");
  }
  return value;
}

bool parse_bool(std::string_view text) {
  const std::string s = trim(text);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw InvalidArgument("not a boolean: '" + s + "'");
}

std::pair<double, double> parse_pair(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw InvalidArgument("expected lo,hi: '" + std::string(text) + "'");
  return {parse_real(parts[0]), parse_real(parts[1])};
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += format_real(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

std::string provenance(const SweepConfig& config, std::uint64_t seed) {
  return config_hash(config) + "," + std::to_string(seed) + "," + std::string(kVersion);
}

std::uint64_t nominal_seed(const SweepConfig& config) {
  return config.seeds.empty() ? 0 : config.seeds.front();
}

std::vector<StateSpec> family_grid(const SweepConfig& config) {
  std::vector<StateSpec> specs;
  for (double sigma : config.sigma_values) {
    for (int n : config.n_values) specs.push_back({"gaussian", n, sigma});
  }
  for (double eta : config.eta_values) {
    for (int n : config.n_values) specs.push_back({"loss", n, eta});
  }
  return specs;
}

std::string cell_name(const StateSpec& spec) {
  return spec.family + " N=" + std::to_string(spec.particles) + " p=" + format_real(spec.parameter);
}

Json fit_json(const FitResult& fit) {
  return Json{{"slope", fit.slope}, {"residual_rms", fit.residual_rms}, {"point_count", fit.point_count}};
}

Json optional_json(const std::optional<double>& value) {
  return value ? Json(*value) : Json(nullptr);
}

Json errors_json(const std::vector<RowError>& errors) {
  Json out = Json::array();
  for (const auto& e : errors) out.push_back(Json{{"cell", e.cell}, {"message", e.message}});
  return out;
}

Json config_json(const SweepConfig& config) {
  return Json{{"experiment", std::string(to_string(config.experiment))},
              {"n", config.n_values},
              {"sigma", config.sigma_values},
              {"eta", config.eta_values},
              {"m", config.m_values},
              {"seeds", config.seeds},
              {"s_mult", config.s_multiplier},
              {"support", {config.support_lo, config.support_hi}},
              {"grid_points", config.grid_points},
              {"full_circle", config.full_circle},
              {"theta_r", {config.theta_r_lo, config.theta_r_hi}},
              {"jx_fraction", config.jx_fraction},
              {"fine_step", config.fine_step},
              {"convention", std::string(to_string(config.convention))},
              {"config_hash", config_hash(config)},
              {"version", std::string(kVersion)}};
}

double ratio_spread(const std::vector<double>& slopes) {
  const auto [lo, hi] = std::minmax_element(slopes.begin(), slopes.end());
  return *hi / *lo - 1.0;
}

std::optional<double> first_above_one(const std::vector<Fig4Row>& rows, bool squeezing) {
  for (const auto& row : rows) {
    const auto& value = squeezing ? row.xi_s : row.xi_d;
    if (value && *value > 1.0) return row.eta;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::fig2_gaussian: return "fig2_gaussian";
    case ExperimentKind::fig2_loss: return "fig2_loss";
    case ExperimentKind::fig3_gaussian: return "fig3_gaussian";
    case ExperimentKind::fig3_loss: return "fig3_loss";
    case ExperimentKind::fig4_robustness: return "fig4_robustness";
    case ExperimentKind::single_run: return "single_run";
  }
  return "unknown";
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void SweepConfig::validate() const {
  const bool needs_n = experiment != ExperimentKind::single_run;
  if (needs_n && n_values.empty()) throw InvalidArgument("n: empty range");
  for (int n : n_values) {
    if (n < 2 || n % 2 != 0) throw InvalidArgument("n: particle numbers must be even and >= 2, got " + std::to_string(n));
  }
  for (double s : sigma_values) {
    if (!(s >= 0.0)) throw InvalidArgument("sigma: must be >= 0");
  }
  for (double e : eta_values) {
    if (!(e >= 0.0 && e <= 1.0)) throw InvalidArgument("eta: must lie in [0, 1]");
  }
  for (int m : m_values) {
    if (m < 1) throw InvalidArgument("m: rounds must be >= 1");
  }
  const bool sweep = experiment == ExperimentKind::fig2_gaussian || experiment == ExperimentKind::fig2_loss ||
                     experiment == ExperimentKind::fig3_gaussian || experiment == ExperimentKind::fig3_loss;
  if (sweep && sigma_values.empty() && eta_values.empty()) throw InvalidArgument("sigma/eta: both ranges empty");
  if (experiment == ExperimentKind::fig4_robustness && eta_values.empty()) throw InvalidArgument("eta: empty range");
  const bool fig3 = experiment == ExperimentKind::fig3_gaussian || experiment == ExperimentKind::fig3_loss;
  if (fig3 && m_values.empty()) throw InvalidArgument("m: empty range");
  if (fig3 && seeds.empty()) throw InvalidArgument("seed: empty range");
  if (s_multiplier < 1) throw InvalidArgument("s_mult: must be >= 1");
  if (!(support_hi > support_lo)) throw InvalidArgument("support: need lo < hi");
  if (grid_points < 3) throw InvalidArgument("grid_points: need at least 3");
  if (!full_circle && fig3 && (theta_r_lo < support_lo || theta_r_hi >= support_hi)) {
    throw InvalidArgument("theta_r: range must lie inside the support");
  }
  if (!(theta_r_hi >= theta_r_lo)) throw InvalidArgument("theta_r: need lo <= hi");
  if (!(jx_fraction > 0.0 && jx_fraction < 1.0)) throw InvalidArgument("jx_fraction: must lie in (0, 1)");
  if (!(fine_step > 0.0)) throw InvalidArgument("fine_step: must be positive");
}

std::string canonical_text(const SweepConfig& config) {
  std::ostringstream out;
  out << "experiment=" << to_string(config.experiment) << '\n'
      << "n=" << join(config.n_values) << '\n'
      << "sigma=" << join(config.sigma_values) << '\n'
      << "eta=" << join(config.eta_values) << '\n'
      << "m=" << join(config.m_values) << '\n'
      << "seeds=" << join(config.seeds) << '\n'
      << "s_mult=" << config.s_multiplier << '\n'
      << "support=" << format_real(config.support_lo) << ',' << format_real(config.support_hi) << '\n'
      << "grid_points=" << config.grid_points << '\n'
      << "full_circle=" << (config.full_circle ? 1 : 0) << '\n'
      << "theta_r=" << format_real(config.theta_r_lo) << ',' << format_real(config.theta_r_hi) << '\n'
      << "jx_fraction=" << format_real(config.jx_fraction) << '\n'
      << "fine_step=" << format_real(config.fine_step) << '\n'
      << "convention=" << to_string(config.convention) << '\n';
  return out.str();
}

std::string config_hash(const SweepConfig& config) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_text(config)) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

std::vector<double> parse_real_range(std::string_view text, double default_step) {
  const std::string s = trim(text);
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    std::vector<double> values;
    for (const auto& part : split(s, ',')) values.push_back(parse_real(part));
    return values;
  }
  const auto colon = s.find(':', dots);
  const double lo = parse_real(s.substr(0, dots));
  const double hi = parse_real(s.substr(dots + 2, colon == std::string::npos ? std::string::npos : colon - dots - 2));
  const double step = colon == std::string::npos ? default_step : parse_real(s.substr(colon + 1));
  if (!(step > 0.0)) throw InvalidArgument("range step must be positive: '" + s + "'");
  if (hi < lo) throw InvalidArgument("range is empty: '" + s + "'");
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> values(count);
  for (long k = 0; k < count; ++k) values[k] = lo + static_cast<double>(k) * step;
  return values;
}

std::vector<std::int64_t> parse_int_range(std::string_view text, std::int64_t default_step) {
  const std::string s = trim(text);
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    std::vector<std::int64_t> values;
    for (const auto& part : split(s, ',')) values.push_back(parse_int(part));
    return values;
  }
  const auto colon = s.find(':', dots);
  const std::int64_t lo = parse_int(s.substr(0, dots));
  const std::int64_t hi = parse_int(s.substr(dots + 2, colon == std::string::npos ? std::string::npos : colon - dots - 2));
  const std::int64_t step = colon == std::string::npos ? default_step : parse_int(s.substr(colon + 1));
  if (step <= 0) throw InvalidArgument("range step must be positive: '" + s + "'");
  if (hi < lo) throw InvalidArgument("range is empty: '" + s + "'");
  std::vector<std::int64_t> values;
  for (std::int64_t v = lo; v <= hi; v += step) values.push_back(v);
  return values;
}

void apply_config_value(SweepConfig& config, std::string_view raw_key, std::string_view value) {
  const std::string key = trim(raw_key);
  auto ints = [&](std::int64_t step) {
    std::vector<int> out;
    for (auto v : parse_int_range(value, step)) out.push_back(static_cast<int>(v));
    return out;
  };
  if (key == "experiment") {
    const std::string v = trim(value);
    static const std::map<std::string, ExperimentKind> kinds{
        {"fig2_gaussian", ExperimentKind::fig2_gaussian}, {"fig2_loss", ExperimentKind::fig2_loss},
        {"fig3_gaussian", ExperimentKind::fig3_gaussian}, {"fig3_loss", ExperimentKind::fig3_loss},
        {"fig4_robustness", ExperimentKind::fig4_robustness}, {"single_run", ExperimentKind::single_run}};
    const auto it = kinds.find(v);
    if (it == kinds.end()) throw InvalidArgument("experiment: unknown kind '" + v + "'");
    config.experiment = it->second;
  } else if (key == "n") {
    config.n_values = ints(20);
  } else if (key == "sigma") {
    config.sigma_values = parse_real_range(value, 1.0);
  } else if (key == "eta") {
    config.eta_values = parse_real_range(value, 0.1);
  } else if (key == "m") {
    config.m_values = ints(20);
  } else if (key == "seed" || key == "seeds") {
    config.seeds.clear();
    for (auto v : parse_int_range(value, 1)) {
      if (v < 0) throw InvalidArgument("seed: must be non-negative");
      config.seeds.push_back(static_cast<std::uint64_t>(v));
    }
  } else if (key == "s_mult") {
    config.s_multiplier = static_cast<int>(parse_int(value));
  } else if (key == "support") {
    std::tie(config.support_lo, config.support_hi) = parse_pair(value);
  } else if (key == "grid_points") {
    config.grid_points = static_cast<int>(parse_int(value));
  } else if (key == "full_circle") {
    config.full_circle = parse_bool(value);
  } else if (key == "theta_r") {
    std::tie(config.theta_r_lo, config.theta_r_hi) = parse_pair(value);
  } else if (key == "jx_fraction") {
    config.jx_fraction = parse_real(value);
  } else if (key == "fine_step") {
    config.fine_step = parse_real(value);
  } else if (key == "convention") {
    const std::string v = trim(value);
    if (v == "initial_N") {
      config.convention = NConvention::initial_n;
    } else if (v == "mean_particles") {
      config.convention = NConvention::mean_particles;
    } else {
      throw InvalidArgument("convention: expected initial_N or mean_particles");
    }
  } else if (key == "out") {
    config.output_path = trim(value);
  } else {
    throw InvalidArgument("unknown config key '" + key + "'");
  }
}

void apply_config_text(SweepConfig& config, std::string_view text) {
  static const std::set<std::string> list_keys{"n", "sigma", "eta", "m", "seed", "seeds"};
  std::map<std::string, std::string> accumulated;
  std::vector<std::string> order;
  std::istringstream lines{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(lines, line)) {
    ++number;
    const std::string content = trim(line.substr(0, line.find('#')));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw InvalidArgument("line " + std::to_string(number) + ": expected key=value");
    std::string key = trim(content.substr(0, eq));
    if (key == "seeds") key = "seed";
    const std::string value = trim(content.substr(eq + 1));
    if (list_keys.contains(key)) {
      auto [it, fresh] = accumulated.emplace(key, std::string());
      if (fresh) order.push_back(key);
      // Expand each line separately so ranges and single values mix freely.
      SweepConfig scratch;
      apply_config_value(scratch, key, value);
      std::string expanded;
      if (key == "n") expanded = join(scratch.n_values);
      if (key == "sigma") expanded = join(scratch.sigma_values);
      if (key == "eta") expanded = join(scratch.eta_values);
      if (key == "m") expanded = join(scratch.m_values);
      if (key == "seed") expanded = join(scratch.seeds);
      it->second += (it->second.empty() ? "" : ",") + expanded;
    } else {
      apply_config_value(config, key, value);
    }
  }
  for (const auto& key : order) apply_config_value(config, key, accumulated[key]);
}

FitResult fit_through_origin(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw InvalidArgument("fit needs at least two points");
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& [x, y] : points) {
    sxy += x * y;
    sxx += x * x;
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit is degenerate: every x is zero");
  const double slope = sxy / sxx;
  double ss = 0.0;
  for (const auto& [x, y] : points) ss += (y - slope * x) * (y - slope * x);
  return FitResult{slope, std::sqrt(ss / static_cast<double>(points.size())), static_cast<int>(points.size())};
}

SectoredState build_state(const StateSpec& spec) {
  if (spec.family == "gaussian") {
    return SectoredState::from_pure(gaussian_dicke({spec.particles, spec.parameter}));
  }
  if (spec.family == "loss") return lossy_dicke(spec.particles, spec.parameter);
  throw InvalidArgument("unknown state family '" + spec.family + "'");
}

Fig2Result run_fig2(const SweepConfig& config) {
  config.validate();
  const auto specs = family_grid(config);
  std::vector<std::optional<Fig2Row>> cells(specs.size());
  std::vector<std::optional<RowError>> failures(specs.size());

  parallel_for(specs.size(), [&](std::size_t i) {
    const StateSpec& spec = specs[i];
    try {
      const SectoredState state = build_state(spec);
      const double xi = xi_d(state, config.convention);
      const PhaseDistribution dist = relative_phase_distribution(state, config.s_multiplier * spec.particles);
      cells[i] = Fig2Row{spec, xi, std::sqrt(xi / spec.particles), dist.delta_theta, dist.full_period_delta_theta,
                         dist.ambiguous_width};
    } catch (const NumericalError& e) {
      failures[i] = RowError{cell_name(spec), e.what()};
    }
  });

  Fig2Result result;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (cells[i]) result.rows.push_back(*cells[i]);
    if (failures[i]) result.errors.push_back(*failures[i]);
  }

  std::vector<std::pair<double, double>> all;
  std::map<std::string, std::vector<double>> slopes;
  for (const auto& [family, values] : {std::pair{std::string("gaussian"), config.sigma_values},
                                       std::pair{std::string("loss"), config.eta_values}}) {
    for (double parameter : values) {
      std::vector<std::pair<double, double>> points;
      std::vector<std::pair<double, double>> full;
      for (const auto& row : result.rows) {
        if (row.spec.family == family && row.spec.parameter == parameter) {
          points.emplace_back(row.x, row.delta_theta);
          full.emplace_back(row.x, row.delta_theta_full);
        }
      }
      if (points.size() < 2) continue;
      FamilyFit fit{family, parameter, fit_through_origin(points), fit_through_origin(full)};
      slopes[family].push_back(fit.fit.slope);
      result.fits.push_back(fit);
      all.insert(all.end(), points.begin(), points.end());
    }
  }
  if (all.size() >= 2) result.overall = fit_through_origin(all);
  if (slopes["gaussian"].size() >= 1) result.gaussian_alpha_variation = ratio_spread(slopes["gaussian"]);
  if (slopes["loss"].size() >= 1) result.loss_alpha_variation = ratio_spread(slopes["loss"]);
  return result;
}

Fig3Result run_fig3(const SweepConfig& config) {
  config.validate();
  PrecisionSweepOptions options;
  options.estimator.support_lo = config.support_lo;
  options.estimator.support_hi = config.support_hi;
  options.estimator.grid_points = config.grid_points;
  options.estimator.full_circle = config.full_circle;
  options.theta_r_lo = config.theta_r_lo;
  options.theta_r_hi = config.theta_r_hi;

  Fig3Result result;
  for (const StateSpec& spec : family_grid(config)) {
    try {
      std::vector<PrecisionInput> input{{spec.family, spec.parameter, build_state(spec)}};
      auto rows = precision_sweep(input, config.m_values, config.seeds, options);
      result.rows.insert(result.rows.end(), rows.begin(), rows.end());
    } catch (const NumericalError& e) {
      result.errors.push_back(RowError{cell_name(spec), e.what()});
    }
  }

  std::vector<std::pair<double, double>> points;
  int bounded = 0;
  for (const auto& row : result.rows) {
    points.emplace_back(row.scaled, row.d_theta);
    if (row.theta_pr <= row.d_theta) ++bounded;
  }
  if (points.size() >= 2) result.beta = fit_through_origin(points);
  result.fraction_bounded = result.rows.empty() ? 0.0 : static_cast<double>(bounded) / result.rows.size();
  return result;
}

Fig4Result run_fig4(const SweepConfig& config) {
  config.validate();
  const int particles = config.n_values.front();
  const SqueezedSearchResult squeezed = find_min_variance_state({.particles = particles, .jx_fraction = config.jx_fraction, .lambda_lo = {}, .lambda_hi = {}});
  const SectoredState squeezed_state = SectoredState::from_pure(squeezed.state);
  const SectoredState dicke = SectoredState::from_pure(dicke_state(particles));

  auto evaluate = [&](const std::vector<double>& etas, std::vector<RowError>& errors) {
    std::vector<Fig4Row> rows(etas.size());
    std::vector<std::vector<RowError>> cell_errors(etas.size());
    parallel_for(etas.size(), [&](std::size_t i) {
      Fig4Row& row = rows[i];
      row.eta = etas[i];
      try {
        row.xi_s = xi_s(loss_channel(squeezed_state, etas[i]), Axis::x, Axis::z, config.convention);
      } catch (const UndefinedMetric& e) {
        cell_errors[i].push_back({"xi_s eta=" + format_real(etas[i]), e.what()});
      }
      try {
        row.xi_d = xi_d(loss_channel(dicke, etas[i]), config.convention);
      } catch (const UndefinedMetric& e) {
        cell_errors[i].push_back({"xi_d eta=" + format_real(etas[i]), e.what()});
      }
    });
    for (auto& e : cell_errors) errors.insert(errors.end(), e.begin(), e.end());
    return rows;
  };

  Fig4Result result;
  result.particles = particles;
  result.lambda = squeezed.lambda;
  result.rows = evaluate(config.eta_values, result.errors);
  result.xi_s_crossover = first_above_one(result.rows, true);
  result.xi_d_crossover = first_above_one(result.rows, false);

  auto refine = [&](std::optional<double> coarse, bool squeezing) -> std::optional<double> {
    if (!coarse) return std::nullopt;
    const auto& etas = config.eta_values;
    const auto at = std::find(etas.begin(), etas.end(), *coarse) - etas.begin();
    const double lo = at > 0 ? etas[at - 1] : *coarse;
    const double hi = static_cast<std::size_t>(at) + 1 < etas.size() ? etas[at + 1] : *coarse;
    std::vector<double> fine;
    const auto count = static_cast<long>(std::floor((hi - lo) / config.fine_step + 1e-9)) + 1;
    for (long k = 0; k < count; ++k) fine.push_back(lo + static_cast<double>(k) * config.fine_step);
    std::vector<RowError> ignored;
    return first_above_one(evaluate(fine, ignored), squeezing);
  };
  result.xi_s_crossover_fine = refine(result.xi_s_crossover, true);
  result.xi_d_crossover_fine = refine(result.xi_d_crossover, false);
  return result;
}

std::string fig2_csv(const Fig2Result& result, const SweepConfig& config) {
  std::string out =
      "state_family,N,parameter,xi_d,sqrt_xi_d_over_n,delta_theta,delta_theta_full_period,ambiguous_width,"
      "config_hash,seed,version\n";
  const std::string tail = provenance(config, nominal_seed(config));
  for (const auto& row : result.rows) {
    out += row.spec.family + ',' + std::to_string(row.spec.particles) + ',' + format_real(row.spec.parameter) + ',' +
           format_real(row.xi_d) + ',' + format_real(row.x) + ',' + format_real(row.delta_theta) + ',' +
           format_real(row.delta_theta_full) + ',' + (row.ambiguous ? "1" : "0") + ',' + tail + '\n';
  }
  return out;
}

std::string fig3_csv(const Fig3Result& result, const SweepConfig& config) {
  std::string out =
      "state_family,N,parameter,m,xi_d,sqrt_xi_d_over_nm,d_theta,theta_pr,theta_r,config_hash,seed,version\n";
  for (const auto& row : result.rows) {
    out += row.family + ',' + std::to_string(row.particles) + ',' + format_real(row.parameter) + ',' +
           std::to_string(row.rounds) + ',' + format_real(row.xi_d) + ',' + format_real(row.scaled) + ',' +
           format_real(row.d_theta) + ',' + format_real(row.theta_pr) + ',' + format_real(row.theta_r) + ',' +
           provenance(config, row.seed) + '\n';
  }
  return out;
}

std::string fig4_csv(const Fig4Result& result, const SweepConfig& config) {
  std::string out = "eta,xi_s,xi_d,config_hash,seed,version\n";
  const std::string tail = provenance(config, nominal_seed(config));
  for (const auto& row : result.rows) {
    out += format_real(row.eta) + ',' + (row.xi_s ? format_real(*row.xi_s) : "undefined") + ',' +
           (row.xi_d ? format_real(*row.xi_d) : "undefined") + ',' + tail + '\n';
  }
  return out;
}

std::string fig2_sidecar(const Fig2Result& result, const SweepConfig& config) {
  Json fits = Json::array();
  for (const auto& f : result.fits) {
    fits.push_back(Json{{"family", f.family}, {"parameter", f.parameter}, {"alpha", fit_json(f.fit)},
                        {"alpha_full_period", fit_json(f.fit_full)}});
  }
  Json doc{{"config", config_json(config)},
           {"fits", fits},
           {"overall_alpha", result.overall ? fit_json(*result.overall) : Json(nullptr)},
           {"gaussian_alpha_variation", optional_json(result.gaussian_alpha_variation)},
           {"loss_alpha_variation", optional_json(result.loss_alpha_variation)},
           {"errors", errors_json(result.errors)}};
  return doc.dump(2) + '\n';
}

std::string fig3_sidecar(const Fig3Result& result, const SweepConfig& config) {
  Json doc{{"config", config_json(config)},
           {"beta", result.beta ? fit_json(*result.beta) : Json(nullptr)},
           {"fraction_theta_pr_within_d_theta", result.fraction_bounded},
           {"errors", errors_json(result.errors)}};
  return doc.dump(2) + '\n';
}

std::string fig4_sidecar(const Fig4Result& result, const SweepConfig& config) {
  Json doc{{"config", config_json(config)},
           {"particles", result.particles},
           {"squeezed_lambda", result.lambda},
           {"xi_s_crossover", optional_json(result.xi_s_crossover)},
           {"xi_d_crossover", optional_json(result.xi_d_crossover)},
           {"xi_s_crossover_fine", optional_json(result.xi_s_crossover_fine)},
           {"xi_d_crossover_fine", optional_json(result.xi_d_crossover_fine)},
           {"errors", errors_json(result.errors)}};
  return doc.dump(2) + '\n';
}

}  // namespace dicke

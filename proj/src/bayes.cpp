#include "dicke/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dicke/errors.hpp"
#include "dicke/parallel.hpp"

namespace dicke {
namespace {

constexpr double kMirrorTolerance = 1e-6;
constexpr int kLogSpaceRounds = 500;
constexpr std::size_t kCdfCacheSize = 64;

CVector forward_phases(const RVector& eigenvalues, double theta) {
  CVector out(eigenvalues.size());
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) out(k) = std::polar(1.0, theta * eigenvalues(k));
  return out;
}

// sum_k coeffs[k] z^k
Complex horner(const std::vector<Complex>& coeffs, Complex z) {
  Complex acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

}  // namespace

LikelihoodModel::LikelihoodModel(const SectoredState& state) {
  std::size_t offset = 0;
  for (const auto& [particles, sector] : state.sectors()) {
    SectorModel model{particles, sector.weight, offset, jy_spectrum(particles), std::nullopt, {}};
    const CMatrix& v = model.spectrum->vectors;
    if (sector.amplitudes) {
      model.pure = v.adjoint() * *sector.amplitudes;
    } else {
      model.rotated = v.adjoint() * sector.state.matrix() * v;
    }
    for (int n = 0; n <= particles; ++n) outcomes_.push_back(Outcome{particles, n});
    offset += particles + 1;
    sectors_.push_back(std::move(model));
  }
}

std::size_t LikelihoodModel::index_of(const Outcome& outcome) const {
  for (const auto& sector : sectors_) {
    if (sector.particles == outcome.particles) {
      if (outcome.n < 0 || outcome.n > outcome.particles) break;
      return sector.offset + outcome.n;
    }
  }
  throw InvalidArgument("outcome is not in the support of the state");
}

std::vector<double> LikelihoodModel::probabilities(double theta) const {
  std::vector<double> out(outcomes_.size());
  for (const auto& sector : sectors_) {
    const CMatrix& v = sector.spectrum->vectors;
    const CVector phase = forward_phases(sector.spectrum->eigenvalues, theta);
    if (sector.pure) {
      const CVector amps = v * phase.cwiseProduct(*sector.pure);
      for (int n = 0; n <= sector.particles; ++n) out[sector.offset + n] = sector.weight * std::norm(amps(n));
    } else {
      const CMatrix b = v * phase.asDiagonal();
      const CMatrix brho = b * sector.rotated;
      for (int n = 0; n <= sector.particles; ++n) {
        const double p = (brho.row(n) * b.row(n).adjoint()).value().real();
        out[sector.offset + n] = sector.weight * std::max(0.0, p);
      }
    }
  }
  return out;
}

std::vector<double> LikelihoodModel::column(std::size_t outcome, std::span<const double> thetas) const {
  const Outcome& o = outcomes_.at(outcome);
  const auto it = std::find_if(sectors_.begin(), sectors_.end(),
                               [&](const SectorModel& s) { return s.particles == o.particles; });
  const SectorModel& sector = *it;
  const CMatrix& v = sector.spectrum->vectors;
  const int dim = sector.particles + 1;

  // Both forms are polynomials in z = e^{i theta}: eigenvalue k of J_y is
  // k - M/2, and the global factor e^{-i theta M/2} drops out of |.|^2.
  std::vector<Complex> coeffs(dim);
  const bool pure = sector.pure.has_value();
  if (pure) {
    for (int k = 0; k < dim; ++k) coeffs[k] = v(o.n, k) * (*sector.pure)(k);
  } else {
    // Fourier coefficient of e^{i d theta}: sum_l V[n, l+d] rho~[l+d, l] conj(V[n, l]).
    for (int d = 0; d < dim; ++d) {
      Complex acc = 0.0;
      for (int l = 0; l + d < dim; ++l) acc += v(o.n, l + d) * sector.rotated(l + d, l) * std::conj(v(o.n, l));
      coeffs[d] = d == 0 ? acc : 2.0 * acc;
    }
  }

  std::vector<double> out(thetas.size());
  for (std::size_t g = 0; g < thetas.size(); ++g) {
    const Complex z = std::polar(1.0, thetas[g]);
    const Complex value = horner(coeffs, z);
    const double p = pure ? std::norm(value) : value.real();
    out[g] = sector.weight * std::max(0.0, p);
  }
  return out;
}

LikelihoodTable likelihood_table(const SectoredState& state, std::span<const double> theta_grid) {
  const LikelihoodModel model(state);
  LikelihoodTable table;
  table.theta_grid.assign(theta_grid.begin(), theta_grid.end());
  table.outcomes = model.outcomes();
  const std::size_t width = table.outcomes.size();
  table.table.resize(theta_grid.size() * width);
  for (std::size_t o = 0; o < width; ++o) {
    const auto col = model.column(o, theta_grid);
    for (std::size_t g = 0; g < theta_grid.size(); ++g) table.table[g * width + o] = col[g];
  }
  return table;
}

std::vector<double> EstimationGrid::thetas() const {
  std::vector<double> out(points);
  for (int g = 0; g < points; ++g) out[g] = theta(g);
  return out;
}

double trapezoid(std::span<const double> values, double step) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return step * (sum - 0.5 * (values.front() + values.back()));
}

PosteriorUpdate posterior_update(std::span<const double> prior, std::span<const double> likelihood,
                                 double step) {
  if (prior.size() != likelihood.size()) throw InvalidArgument("prior and likelihood sizes differ");
  PosteriorUpdate update;
  update.density.resize(prior.size());
  for (std::size_t g = 0; g < prior.size(); ++g) update.density[g] = prior[g] * likelihood[g];
  update.evidence = trapezoid(update.density, step);
  if (!(update.evidence > 0.0) || !std::isfinite(update.evidence)) {
    throw NumericalUnderflow("posterior vanished on the whole grid");
  }
  for (double& d : update.density) d /= update.evidence;
  return update;
}

namespace {

struct GridFunction {
  double start;
  double step;
  std::vector<double> values;
  double theta(std::size_t i) const { return start + static_cast<double>(i) * step; }
};

bool mirror_symmetric(const std::vector<double>& values, std::size_t center) {
  const double top = *std::max_element(values.begin(), values.end());
  for (std::size_t i = 1; i <= center && center + i < values.size(); ++i) {
    if (std::abs(values[center + i] - values[center - i]) > kMirrorTolerance * top) return false;
  }
  return true;
}

// Folds the part below values[center] onto the part above it.
GridFunction fold_at(const GridFunction& f, std::size_t center) {
  GridFunction out{f.theta(center), f.step, {}};
  for (std::size_t i = 0; center + i < f.values.size(); ++i) {
    const double mirrored = i <= center ? f.values[center - i] : 0.0;
    out.values.push_back(f.values[center + i] + mirrored);
  }
  return out;
}

}  // namespace

PosteriorSummary summarize_posterior(const EstimationGrid& grid, std::span<const double> density,
                                     double theta_r) {
  GridFunction f{grid.lo, grid.step(), std::vector<double>(density.begin(), density.end())};
  double target = theta_r;
  int folds = 0;

  const bool centered = grid.points % 2 == 0 && std::abs(grid.lo + grid.hi) <= 1e-12 * (grid.hi - grid.lo);
  const std::size_t zero = static_cast<std::size_t>(grid.points / 2);
  if (centered && mirror_symmetric(f.values, zero)) {
    f = fold_at(f, zero);
    target = std::abs(target);
    ++folds;
    // On the full circle the folded range is [0, pi); check pi/2 as well.
    const double half_pi = std::numbers::pi / 2;
    const double offset = (half_pi - f.start) / f.step;
    const std::size_t mid = static_cast<std::size_t>(std::llround(offset));
    if (std::abs(grid.hi - std::numbers::pi) < 1e-12 && std::abs(offset - mid) < 1e-9 &&
        mid < f.values.size() && mirror_symmetric(f.values, mid)) {
      GridFunction lower{f.start, f.step, {}};
      for (std::size_t i = 0; i <= mid; ++i) {
        const std::size_t mirror = 2 * mid - i;
        lower.values.push_back(f.values[i] + (mirror < f.values.size() ? f.values[mirror] : 0.0));
      }
      f = std::move(lower);
      target = std::min(target, std::numbers::pi - target);
      ++folds;
    }
  }

  const auto& v = f.values;
  const std::size_t peak = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  double theta_p = f.theta(peak);
  if (peak > 0 && peak + 1 < v.size()) {
    const double curvature = v[peak - 1] - 2.0 * v[peak] + v[peak + 1];
    if (curvature < 0.0) theta_p += 0.5 * f.step * (v[peak - 1] - v[peak + 1]) / curvature;
  }

  std::vector<double> weighted(v.size());
  const double mass = trapezoid(v, f.step);
  for (std::size_t i = 0; i < v.size(); ++i) weighted[i] = v[i] * f.theta(i);
  const double mean = trapezoid(weighted, f.step) / mass;
  for (std::size_t i = 0; i < v.size(); ++i) weighted[i] = v[i] * (f.theta(i) - mean) * (f.theta(i) - mean);
  const double variance = trapezoid(weighted, f.step) / mass;

  return PosteriorSummary{theta_p, std::sqrt(std::max(0.0, variance)), std::abs(theta_p - target), folds};
}

std::uint64_t split_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 finalizer over a mix of both words
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

BayesExperiment::BayesExperiment(const SectoredState& state, EstimatorOptions options)
    : options_(options), model_(state) {
  if (options_.full_circle) {
    options_.support_lo = -std::numbers::pi;
    options_.support_hi = std::numbers::pi;
  }
  if (!(options_.support_hi > options_.support_lo)) throw InvalidArgument("empty estimation support");
  if (options_.grid_points < 3) throw InvalidArgument("estimation grid needs at least 3 points");
  grid_ = EstimationGrid{options_.support_lo, options_.support_hi, options_.grid_points};
  thetas_ = grid_.thetas();
  columns_.resize(model_.outcomes().size());
}

const std::vector<double>& BayesExperiment::column(std::size_t outcome) const {
  {
    std::lock_guard lock(mutex_);
    if (columns_.at(outcome)) return *columns_[outcome];
  }
  auto computed = std::make_unique<const std::vector<double>>(model_.column(outcome, thetas_));
  std::lock_guard lock(mutex_);
  if (!columns_[outcome]) columns_[outcome] = std::move(computed);
  return *columns_[outcome];
}

std::shared_ptr<const std::vector<double>> BayesExperiment::cumulative_at(double theta) const {
  {
    std::lock_guard lock(mutex_);
    for (const auto& [key, cdf] : cdf_cache_) {
      if (key == theta) return cdf;
    }
  }
  auto probs = model_.probabilities(theta);
  auto cdf = std::make_shared<std::vector<double>>(probs.size());
  double running = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) (*cdf)[i] = running += probs[i];
  std::lock_guard lock(mutex_);
  if (cdf_cache_.size() >= kCdfCacheSize) cdf_cache_.erase(cdf_cache_.begin());
  cdf_cache_.emplace_back(theta, cdf);
  return cdf;
}

std::vector<Outcome> BayesExperiment::sample_outcomes(double theta_r, int rounds,
                                                      std::mt19937_64& engine) const {
  const auto cdf = cumulative_at(theta_r);
  const double total = cdf->back();
  std::vector<Outcome> drawn;
  drawn.reserve(rounds);
  for (int r = 0; r < rounds; ++r) {
    const double u = uniform01(engine) * total;
    auto it = std::upper_bound(cdf->begin(), cdf->end(), u);
    if (it == cdf->end()) --it;
    drawn.push_back(model_.outcomes()[static_cast<std::size_t>(it - cdf->begin())]);
  }
  return drawn;
}

PosteriorTrace BayesExperiment::run(double theta_r, int rounds, std::uint64_t seed) const {
  if (rounds < 1) throw InvalidArgument("at least one measurement round is required");
  if (!(theta_r >= grid_.lo && theta_r < grid_.hi)) throw InvalidArgument("true phase outside the estimation support");

  std::mt19937_64 engine(seed);
  PosteriorTrace trace;
  trace.grid = grid_;
  trace.outcomes = sample_outcomes(theta_r, rounds, engine);
  trace.theta_r = theta_r;
  trace.rounds = rounds;
  trace.seed = seed;

  const std::size_t points = thetas_.size();
  std::vector<double> density(points, 1.0);
  const double flat = trapezoid(density, grid_.step());
  for (double& d : density) d /= flat;

  const bool log_space = rounds > kLogSpaceRounds;
  std::vector<double> log_density(log_space ? points : 0, 0.0);
  auto materialize = [&] {
    const double top = *std::max_element(log_density.begin(), log_density.end());
    if (!std::isfinite(top)) throw NumericalUnderflow("posterior vanished on the whole grid");
    for (std::size_t g = 0; g < points; ++g) density[g] = std::exp(log_density[g] - top);
    const double norm = trapezoid(density, grid_.step());
    for (double& d : density) d /= norm;
  };

  for (int r = 0; r < rounds; ++r) {
    const auto& col = column(model_.index_of(trace.outcomes[r]));
    if (log_space) {
      for (std::size_t g = 0; g < points; ++g) {
        log_density[g] += col[g] > 0.0 ? std::log(col[g]) : -std::numeric_limits<double>::infinity();
      }
      if (options_.keep_history || r + 1 == rounds) materialize();
    } else {
      density = posterior_update(density, col, grid_.step()).density;
    }
    if (options_.keep_history) {
      trace.densities.push_back(density);
      trace.history_rounds.push_back(r + 1);
    }
  }
  if (!options_.keep_history) {
    trace.densities.push_back(density);
    trace.history_rounds.push_back(rounds);
  }

  const PosteriorSummary summary = summarize_posterior(grid_, density, theta_r);
  trace.theta_p = summary.theta_p;
  trace.d_theta = summary.d_theta;
  trace.theta_pr = summary.theta_pr;
  trace.mirror_folds = summary.mirror_folds;
  return trace;
}

PosteriorTrace simulate_experiment(const SectoredState& state, double theta_r, int rounds,
                                   std::uint64_t seed, const EstimatorOptions& options) {
  return BayesExperiment(state, options).run(theta_r, rounds, seed);
}

std::vector<PrecisionRow> precision_sweep(const std::vector<PrecisionInput>& states,
                                          const std::vector<int>& rounds,
                                          const std::vector<std::uint64_t>& seeds,
                                          const PrecisionSweepOptions& options) {
  if (states.empty() || rounds.empty() || seeds.empty()) throw InvalidArgument("precision sweep needs nonempty inputs");

  std::vector<double> theta_r(seeds.size());
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    std::mt19937_64 engine(split_seed(seeds[k], 0x7e7a));
    theta_r[k] = options.theta_r_lo + (options.theta_r_hi - options.theta_r_lo) * uniform01(engine);
  }

  const std::size_t per_state = rounds.size() * seeds.size();
  std::vector<PrecisionRow> rows(states.size() * per_state);
  for (std::size_t s = 0; s < states.size(); ++s) {
    const PrecisionInput& input = states[s];
    const MomentRecord moments = collective_moments(input.state);
    if (!(moments.mean_jx2_plus_jy2 > 0.0)) throw UndefinedMetric("precision sweep state has undefined xi_d");
    const double xi = moments.mean_particles * (moments.var_jz + 0.25) / moments.mean_jx2_plus_jy2;
    const BayesExperiment experiment(input.state, options.estimator);

    parallel_for(per_state, [&](std::size_t cell) {
      const std::size_t r = cell / seeds.size();
      const std::size_t k = cell % seeds.size();
      const std::uint64_t seed = split_seed(seeds[k], (static_cast<std::uint64_t>(s) << 32) | static_cast<std::uint64_t>(rounds[r]));
      const PosteriorTrace trace = experiment.run(theta_r[k], rounds[r], seed);
      PrecisionRow& row = rows[s * per_state + cell];
      row.family = input.family;
      row.particles = input.state.source_particles();
      row.parameter = input.parameter;
      row.rounds = rounds[r];
      row.seed = seeds[k];
      row.theta_r = theta_r[k];
      row.xi_d = xi;
      row.scaled = std::sqrt(xi / (moments.mean_particles * rounds[r]));
      row.d_theta = trace.d_theta;
      row.theta_pr = trace.theta_pr;
    });
  }
  return rows;
}

}  // namespace dicke

#pragma once
// Interferometer likelihood P(M, j_z | theta) = w_M <j, j_z| e^{i theta J_y} rho_M
// e^{-i theta J_y} |j, j_z> and sequential Bayesian phase estimation on a
// uniform grid.

#include <cstdint>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dicke/fock.hpp"

namespace dicke {

/// One detector record: total particles seen and J_z outcome index n
/// (j_z = n - M/2).
struct Outcome {
  int particles;
  int n;
  double jz() const { return jz_value(n, particles); }
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// Per-sector spectral data for fast evaluation of P(outcome | theta).
class LikelihoodModel {
 public:
  explicit LikelihoodModel(const SectoredState& state);

  const std::vector<Outcome>& outcomes() const { return outcomes_; }
  std::size_t index_of(const Outcome& outcome) const;

  /// P(outcome | theta) for every outcome, in outcomes() order.
  std::vector<double> probabilities(double theta) const;

  /// P(outcome | theta) on each of the given phases.
  std::vector<double> column(std::size_t outcome, std::span<const double> thetas) const;

 private:
  struct SectorModel {
    int particles;
    double weight;
    std::size_t offset;
    std::shared_ptr<const JySpectrum> spectrum;
    std::optional<CVector> pure;  // V^dagger psi when the sector is pure
    CMatrix rotated;              // V^dagger rho V otherwise
  };

  std::vector<SectorModel> sectors_;
  std::vector<Outcome> outcomes_;
};

struct LikelihoodTable {
  std::vector<double> theta_grid;
  std::vector<Outcome> outcomes;
  std::vector<double> table;  // row-major, theta_grid.size() x outcomes.size()

  double at(std::size_t theta_index, std::size_t outcome) const {
    return table[theta_index * outcomes.size() + outcome];
  }
};

LikelihoodTable likelihood_table(const SectoredState& state, std::span<const double> theta_grid);

/// Uniform grid theta_g = lo + g (hi - lo) / points, g = 0..points-1.
struct EstimationGrid {
  double lo;
  double hi;
  int points;

  double step() const { return (hi - lo) / points; }
  double theta(int g) const { return lo + g * step(); }
  std::vector<double> thetas() const;
};

/// Integral of a grid function by the trapezoid rule over [lo, theta_{G-1}].
double trapezoid(std::span<const double> values, double step);

struct PosteriorUpdate {
  std::vector<double> density;
  double evidence;  // P(outcome | previous outcomes)
};

/// prior * likelihood, renormalized by the trapezoid rule. Throws
/// NumericalUnderflow if the product vanishes on the whole grid.
PosteriorUpdate posterior_update(std::span<const double> prior, std::span<const double> likelihood,
                                 double step);

struct EstimatorOptions {
  double support_lo = -std::numbers::pi / 4;
  double support_hi = std::numbers::pi / 4;
  int grid_points = 4096;
  bool full_circle = false;     // overrides the support with [-pi, pi)
  bool keep_history = true;     // store the posterior after every round
};

struct PosteriorTrace {
  EstimationGrid grid;
  std::vector<std::vector<double>> densities;  // after rounds 1..m (or only the last)
  std::vector<int> history_rounds;             // round number of each stored density
  std::vector<Outcome> outcomes;
  double theta_r;
  double theta_p;
  double d_theta;
  double theta_pr;
  int rounds;
  std::uint64_t seed;
  int mirror_folds;  // symmetry axes folded before taking statistics
};

struct PosteriorSummary {
  double theta_p;
  double d_theta;
  double theta_pr;
  int mirror_folds;
};

/// Peak (argmax with quadratic refinement) and standard deviation of a
/// posterior. Densities mirror-symmetric about 0 (and, on the full circle,
/// about pi/2) are folded first, and theta_r is folded the same way.
PosteriorSummary summarize_posterior(const EstimationGrid& grid, std::span<const double> density,
                                     double theta_r);

/// Derive an independent stream seed from a base seed and a cell index.
std::uint64_t split_seed(std::uint64_t base, std::uint64_t index);

/// 53-bit uniform in [0, 1) from a 64-bit engine.
double uniform01(std::mt19937_64& engine);

/// Likelihood model plus estimation grid, with likelihood columns cached per
/// outcome so repeated experiments on one state are cheap. Thread-safe.
class BayesExperiment {
 public:
  BayesExperiment(const SectoredState& state, EstimatorOptions options = {});

  const EstimationGrid& grid() const { return grid_; }
  const LikelihoodModel& model() const { return model_; }

  /// Draw `rounds` outcomes i.i.d. from P(. | theta_r) with the seeded
  /// generator and update the uniform prior after each one.
  PosteriorTrace run(double theta_r, int rounds, std::uint64_t seed) const;

  std::vector<Outcome> sample_outcomes(double theta_r, int rounds, std::mt19937_64& engine) const;
  const std::vector<double>& column(std::size_t outcome) const;

 private:
  std::shared_ptr<const std::vector<double>> cumulative_at(double theta) const;

  EstimatorOptions options_;
  EstimationGrid grid_;
  std::vector<double> thetas_;
  LikelihoodModel model_;
  mutable std::mutex mutex_;
  mutable std::vector<std::unique_ptr<const std::vector<double>>> columns_;
  mutable std::vector<std::pair<double, std::shared_ptr<const std::vector<double>>>> cdf_cache_;
};

PosteriorTrace simulate_experiment(const SectoredState& state, double theta_r, int rounds,
                                   std::uint64_t seed, const EstimatorOptions& options = {});

struct PrecisionInput {
  std::string family;
  double parameter;
  SectoredState state;
};

struct PrecisionRow {
  std::string family;
  int particles;
  double parameter;
  int rounds;
  std::uint64_t seed;
  double theta_r;
  double xi_d;
  double scaled;  // sqrt(xi_d / (N m))
  double d_theta;
  double theta_pr;

  friend bool operator==(const PrecisionRow&, const PrecisionRow&) = default;
};

struct PrecisionSweepOptions {
  EstimatorOptions estimator{.keep_history = false};
  double theta_r_lo = 0.2;  // true phase drawn uniformly per seed in [lo, hi]
  double theta_r_hi = 0.4;
};

/// One row per (state, m, seed), ordered by that nesting. Rows are identical
/// for any thread count.
std::vector<PrecisionRow> precision_sweep(const std::vector<PrecisionInput>& states,
                                          const std::vector<int>& rounds,
                                          const std::vector<std::uint64_t>& seeds,
                                          const PrecisionSweepOptions& options = {});

}  // namespace dicke

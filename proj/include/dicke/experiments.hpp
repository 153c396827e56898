#pragma once
// Parameter sweeps over state families, line fits, and CSV/JSON output.

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dicke/bayes.hpp"
#include "dicke/squeezing.hpp"

namespace dicke {

inline constexpr std::string_view kVersion = "0.1.0";

enum class ExperimentKind { fig2_gaussian, fig2_loss, fig3_gaussian, fig3_loss, fig4_robustness, single_run };

std::string_view to_string(ExperimentKind kind);

struct SweepConfig {
  ExperimentKind experiment = ExperimentKind::single_run;
  std::vector<int> n_values;
  std::vector<double> sigma_values;  // Gaussian family; empty skips it
  std::vector<double> eta_values;    // loss family; empty skips it
  std::vector<int> m_values;
  std::vector<std::uint64_t> seeds;
  int s_multiplier = 8;
  double support_lo = -std::numbers::pi / 4;
  double support_hi = std::numbers::pi / 4;
  int grid_points = 4096;
  bool full_circle = false;
  double theta_r_lo = 0.2;
  double theta_r_hi = 0.4;
  double jx_fraction = 0.1;  // fig4 squeezed-state constraint
  double fine_step = 0.001;  // fig4 crossover refinement
  NConvention convention = NConvention::mean_particles;
  std::string output_path;

  /// Throws InvalidArgument naming the first offending field.
  void validate() const;
};

/// Canonical key=value text of everything that affects results (the output
/// path excluded), and its 64-bit FNV-1a hash in hex.
std::string canonical_text(const SweepConfig& config);
std::string config_hash(const SweepConfig& config);

/// Applies key=value lines (blank lines and '#' comments ignored) on top of
/// `config`. A key given on several lines accumulates values; a range key
/// given once replaces the previous list.
void apply_config_text(SweepConfig& config, std::string_view text);
void apply_config_value(SweepConfig& config, std::string_view key, std::string_view value);

/// "a,b,c" or "lo..hi" or "lo..hi:step"; the step defaults to `default_step`.
std::vector<double> parse_real_range(std::string_view text, double default_step);
std::vector<std::int64_t> parse_int_range(std::string_view text, std::int64_t default_step);

struct FitResult {
  double slope;
  double residual_rms;
  int point_count;
};

/// slope = sum xy / sum x^2. Throws InvalidArgument for fewer than two points
/// or when every x is zero.
FitResult fit_through_origin(std::span<const std::pair<double, double>> points);

struct StateSpec {
  std::string family;  // "gaussian" or "loss"
  int particles;
  double parameter;    // sigma or eta
};

SectoredState build_state(const StateSpec& spec);

struct RowError {
  std::string cell;
  std::string message;
};

struct Fig2Row {
  StateSpec spec;
  double xi_d;
  double x;  // sqrt(xi_d / N)
  double delta_theta;
  double delta_theta_full;
  bool ambiguous;
};

struct FamilyFit {
  std::string family;
  double parameter;
  FitResult fit;       // windowed width
  FitResult fit_full;  // full-period width
};

struct Fig2Result {
  std::vector<Fig2Row> rows;
  std::vector<FamilyFit> fits;
  std::optional<FitResult> overall;
  // max(alpha)/min(alpha) - 1 over each family's parameter values
  std::optional<double> gaussian_alpha_variation;
  std::optional<double> loss_alpha_variation;
  std::vector<RowError> errors;
};

Fig2Result run_fig2(const SweepConfig& config);

struct Fig3Result {
  std::vector<PrecisionRow> rows;
  std::optional<FitResult> beta;
  double fraction_bounded;  // rows with theta_pr <= d_theta
  std::vector<RowError> errors;
};

Fig3Result run_fig3(const SweepConfig& config);

struct Fig4Row {
  double eta;
  std::optional<double> xi_s;  // empty when undefined
  std::optional<double> xi_d;
};

struct Fig4Result {
  int particles;
  std::vector<Fig4Row> rows;
  std::optional<double> xi_s_crossover;  // smallest eta with xi_s > 1
  std::optional<double> xi_d_crossover;
  std::optional<double> xi_s_crossover_fine;
  std::optional<double> xi_d_crossover_fine;
  double lambda;  // multiplier of the squeezed input
  std::vector<RowError> errors;
};

/// Squeezed input: minimum J_z variance at <J_x> = jx_fraction N/2. Dicke
/// input: dicke_state(N). Both go through loss_channel at each eta. Crossovers
/// are refined on a grid of fine_step over one coarse step on either side.
Fig4Result run_fig4(const SweepConfig& config);

std::string fig2_csv(const Fig2Result& result, const SweepConfig& config);
std::string fig3_csv(const Fig3Result& result, const SweepConfig& config);
std::string fig4_csv(const Fig4Result& result, const SweepConfig& config);

std::string fig2_sidecar(const Fig2Result& result, const SweepConfig& config);
std::string fig3_sidecar(const Fig3Result& result, const SweepConfig& config);
std::string fig4_sidecar(const Fig4Result& result, const SweepConfig& config);

/// printf("%.17g"); "nan" and "inf" spelled out.
std::string format_real(double value);

}  // namespace dicke

#pragma once
// Relative phase between the two interferometer arms, built on Pegg-Barnett
// phase states |theta_l> = (s+1)^(-1/2) sum_{n<=s} e^{i n theta_l} |n> with
// theta_l = 2 pi l / (s+1).

#include <span>
#include <vector>

#include "dicke/fock.hpp"

namespace dicke {

struct PhaseGrid {
  int s;  // truncation; the grid has s + 1 points

  int size() const { return s + 1; }
  double theta(int l) const;
};

enum class FoldPeriod { two_pi, pi };

struct PhaseWidth {
  double delta_theta;
  double full_period_delta_theta;  // no window: the whole folded period
  FoldPeriod fold_period;
  double peak;               // radians, in [0, folded period)
  double mass_outside_window;
  bool ambiguous;            // more than 20% of the mass falls outside the window
};

struct PhaseDistribution {
  PhaseGrid grid;
  std::vector<double> probabilities;  // P(theta_r = theta_l), sums to one
  double delta_theta;
  double full_period_delta_theta;
  FoldPeriod fold_period;
  bool ambiguous_width;
};

inline int default_truncation(int particles) { return 8 * particles; }

/// P(theta_r) for a state of the input modes (a, b). The state is moved to the
/// arm basis and reduced with sum_l <theta_l, theta_{l-dl}| rho |...> =
/// (s+1)^{-1} sum_{n,n'} rho_{nn'} e^{-i (n-n') theta_r}, evaluated per sector
/// and weighted. Throws InvalidArgument if s is below the largest sector.
PhaseDistribution relative_phase_distribution(const SectoredState& state, int s);

/// Width of a distribution sampled on the uniform grid 2 pi l / size over
/// [0, 2 pi). Period-pi distributions (detected by comparing P(theta) with
/// P(theta + pi), max difference < 1e-6) are first folded onto [0, pi). The
/// width is the standard deviation of the wrapped offset from the peak over a
/// window of half the folded period centered on the peak, renormalized over
/// that window.
PhaseWidth delta_theta(std::span<const double> probabilities);

inline double delta_theta(const PhaseDistribution& dist) {
  return delta_theta(dist.probabilities).delta_theta;
}

/// Literal double sum over both arms' phase states; O(s^2 M^2) per sector.
std::vector<double> phase_distribution_oracle(const SectoredState& state, int s);

/// |sum_n c_n e^{-i n theta_l}|^2 / (s+1) for a pure arm-basis state.
std::vector<double> pure_arm_phase_distribution(const SectorPureState& arm_state, int s);

}  // namespace dicke

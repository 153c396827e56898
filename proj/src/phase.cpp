#include "dicke/phase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dicke/errors.hpp"

namespace dicke {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPeriodTolerance = 1e-6;
constexpr double kAmbiguousMass = 0.2;

// e^{-2 pi i k / size} for k = 0..size-1
std::vector<Complex> roots_of_unity(int size) {
  std::vector<Complex> roots(size);
  for (int k = 0; k < size; ++k) roots[k] = std::polar(1.0, -kTwoPi * k / size);
  return roots;
}

// Largest |P(theta + pi) - P(theta)| over the grid, using the trigonometric
// interpolant when pi is not a grid shift.
double half_period_mismatch(std::span<const double> p) {
  const int size = static_cast<int>(p.size());
  double worst = 0.0;
  if (size % 2 == 0) {
    for (int l = 0; l < size / 2; ++l) worst = std::max(worst, std::abs(p[l] - p[l + size / 2]));
    return worst;
  }
  // Shifting by pi flips the sign of every odd harmonic, so the mismatch is
  // twice the odd part of the signal.
  const auto roots = roots_of_unity(size);
  std::vector<Complex> odd_coeffs;
  std::vector<int> odd_index;
  for (int k = 1; k < size; ++k) {
    const int freq = k <= size / 2 ? k : k - size;
    if (freq % 2 == 0) continue;
    Complex acc = 0.0;
    for (int l = 0; l < size; ++l) {
      acc += p[l] * roots[static_cast<std::size_t>(k) * l % size];
    }
    odd_coeffs.push_back(acc);
    odd_index.push_back(k);
  }
  for (int l = 0; l < size; ++l) {
    Complex odd = 0.0;
    for (std::size_t i = 0; i < odd_coeffs.size(); ++i) {
      odd += odd_coeffs[i] * std::conj(roots[static_cast<std::size_t>(odd_index[i]) * l % size]);
    }
    worst = std::max(worst, 2.0 * std::abs(odd) / size);
  }
  return worst;
}

double wrap(double x, double period) {
  x = std::fmod(x, period);
  if (x < -0.5 * period) x += period;
  if (x >= 0.5 * period) x -= period;
  return x;
}

}  // namespace

double PhaseGrid::theta(int l) const { return kTwoPi * l / (s + 1); }

PhaseWidth delta_theta(std::span<const double> probabilities) {
  const int size = static_cast<int>(probabilities.size());
  if (size == 0) throw InvalidArgument("empty phase distribution");

  const bool fold = size > 1 && half_period_mismatch(probabilities) < kPeriodTolerance;
  const double period = fold ? std::numbers::pi : kTwoPi;

  // Folded masses on a uniform grid over [0, period).
  std::vector<double> mass;
  if (!fold) {
    mass.assign(probabilities.begin(), probabilities.end());
  } else if (size % 2 == 0) {
    mass.resize(size / 2);
    for (int l = 0; l < size / 2; ++l) mass[l] = probabilities[l] + probabilities[l + size / 2];
  } else {
    // theta_l mod pi lands on the finer grid j pi / size with j = 2l mod size.
    mass.resize(size);
    for (int l = 0; l < size; ++l) mass[(2 * l) % size] = probabilities[l];
  }
  const int points = static_cast<int>(mass.size());
  const double spacing = period / points;
  double total = 0.0;
  for (double m : mass) total += m;
  if (!(total > 0.0)) throw InvalidArgument("phase distribution has no mass");

  // Peak: the middle of the (circular) plateau holding the first maximum.
  const int first = static_cast<int>(std::max_element(mass.begin(), mass.end()) - mass.begin());
  const double top = mass[first];
  const double level = top * (1.0 - 1e-9);
  int back = 0;
  while (back + 1 < points && mass[(first - back - 1 + points) % points] >= level) ++back;
  int ahead = 0;
  while (back + ahead + 1 < points && mass[(first + ahead + 1) % points] >= level) ++ahead;
  const double peak = std::fmod((first + 0.5 * (ahead - back)) * spacing + period, period);

  const double half_window = 0.25 * period * (1.0 + 1e-12);
  double inside = 0.0;
  double first_moment = 0.0;
  for (int j = 0; j < points; ++j) {
    const double offset = wrap(j * spacing - peak, period);
    if (std::abs(offset) <= half_window) {
      inside += mass[j];
      first_moment += mass[j] * offset;
    }
  }
  const double mean = first_moment / inside;
  double second_moment = 0.0;
  for (int j = 0; j < points; ++j) {
    const double offset = wrap(j * spacing - peak, period);
    if (std::abs(offset) <= half_window) second_moment += mass[j] * (offset - mean) * (offset - mean);
  }

  // Same statistic without the window, over the whole folded period.
  double all_first = 0.0;
  for (int j = 0; j < points; ++j) all_first += mass[j] * wrap(j * spacing - peak, period);
  const double all_mean = all_first / total;
  double all_second = 0.0;
  for (int j = 0; j < points; ++j) {
    const double offset = wrap(j * spacing - peak, period) - all_mean;
    all_second += mass[j] * offset * offset;
  }

  PhaseWidth width;
  width.full_period_delta_theta = std::sqrt(std::max(0.0, all_second / total));
  width.delta_theta = std::sqrt(std::max(0.0, second_moment / inside));
  width.fold_period = fold ? FoldPeriod::pi : FoldPeriod::two_pi;
  width.peak = peak;
  width.mass_outside_window = std::max(0.0, 1.0 - inside / total);
  width.ambiguous = width.mass_outside_window > kAmbiguousMass;
  return width;
}

PhaseDistribution relative_phase_distribution(const SectoredState& state, int s) {
  if (s < state.source_particles() || s < state.max_particles()) {
    throw InvalidArgument("phase truncation s must be at least the particle number");
  }
  const SectoredState arms = to_pm_basis(state);
  const int top = arms.max_particles();

  // toeplitz[d] = sum over sectors of weight * sum_n rho_{n+d, n}
  std::vector<Complex> toeplitz(top + 1, 0.0);
  for (const auto& [particles, sector] : arms.sectors()) {
    const CMatrix& rho = sector.state.matrix();
    for (int d = 0; d <= particles; ++d) {
      Complex acc = 0.0;
      for (int n = 0; n + d <= particles; ++n) acc += rho(n + d, n);
      toeplitz[d] += sector.weight * acc;
    }
  }

  const PhaseGrid grid{s};
  const int size = grid.size();
  const auto roots = roots_of_unity(size);
  std::vector<double> probs(size);
  double total = 0.0;
  for (int l = 0; l < size; ++l) {
    double value = toeplitz[0].real();
    for (int d = 1; d <= top; ++d) {
      value += 2.0 * (toeplitz[d] * roots[static_cast<std::size_t>(d) * l % size]).real();
    }
    probs[l] = std::max(0.0, value / size);
    total += probs[l];
  }
  for (double& p : probs) p /= total;

  const PhaseWidth width = delta_theta(probs);
  return PhaseDistribution{grid, std::move(probs), width.delta_theta, width.full_period_delta_theta,
                           width.fold_period, width.ambiguous};
}

std::vector<double> phase_distribution_oracle(const SectoredState& state, int s) {
  if (s < state.max_particles()) throw InvalidArgument("phase truncation s too small");
  const SectoredState arms = to_pm_basis(state);
  const PhaseGrid grid{s};
  const int size = grid.size();
  std::vector<double> probs(size, 0.0);
  for (const auto& [particles, sector] : arms.sectors()) {
    const CMatrix& rho = sector.state.matrix();
    CVector overlap(particles + 1);
    for (int dl = 0; dl < size; ++dl) {
      double sum = 0.0;
      for (int l = 0; l < size; ++l) {
        const double theta_plus = grid.theta(l);
        const double theta_minus = grid.theta(((l - dl) % size + size) % size);
        // <theta_plus, theta_minus | n, M - n>
        for (int n = 0; n <= particles; ++n) {
          overlap(n) = std::polar(1.0 / size, -(n * theta_plus + (particles - n) * theta_minus));
        }
        sum += (overlap.transpose() * rho * overlap.conjugate()).value().real();
      }
      probs[dl] += sector.weight * sum;
    }
  }
  return probs;
}

std::vector<double> pure_arm_phase_distribution(const SectorPureState& arm_state, int s) {
  if (s < arm_state.particles()) throw InvalidArgument("phase truncation s too small");
  const PhaseGrid grid{s};
  std::vector<double> probs(grid.size());
  const CVector& c = arm_state.amplitudes();
  for (int l = 0; l < grid.size(); ++l) {
    Complex acc = 0.0;
    for (int n = 0; n <= arm_state.particles(); ++n) acc += c(n) * std::polar(1.0, -n * grid.theta(l));
    probs[l] = std::norm(acc) / grid.size();
  }
  return probs;
}

}  // namespace dicke

#include "dicke/states.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dicke/errors.hpp"
#include "dicke/noise.hpp"

namespace dicke {
namespace {

void require_even_positive(int particles) {
  if (particles < 2 || particles % 2 != 0) {
    throw InvalidArgument("particle number must be even and positive, got " +
                          std::to_string(particles));
  }
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

SectorPureState dicke_state(int particles) {
  require_even_positive(particles);
  CVector amps = CVector::Zero(particles + 1);
  amps(particles / 2) = 1.0;
  return SectorPureState(particles, std::move(amps));
}

SectorPureState spin_coherent_x(int particles) {
  if (particles < 1) throw InvalidArgument("spin coherent state needs at least one particle");
  CVector amps(particles + 1);
  const double log_half = particles * std::log(0.5);
  for (int n = 0; n <= particles; ++n) {
    amps(n) = std::exp(0.5 * (log_binomial(particles, n) + log_half));
  }
  return SectorPureState(particles, std::move(amps));
}

SectorPureState gaussian_dicke(const GaussianDickeParams& params) {
  require_even_positive(params.particles);
  if (!(params.sigma >= 0.0) || !std::isfinite(params.sigma)) {
    throw InvalidArgument("gaussian width must be finite and non-negative");
  }
  if (params.sigma == 0.0) return dicke_state(params.particles);

  const int dim = params.particles + 1;
  // Peak of the envelope sits at n = N/2, so the log-amplitudes are <= 0.
  RVector log_amp(dim);
  for (int n = 0; n < dim; ++n) {
    const double m = jz_value(n, params.particles);
    log_amp(n) = -m * m / (params.sigma * params.sigma);
  }
  CVector amps(dim);
  for (int n = 0; n < dim; ++n) {
    const double m = jz_value(n, params.particles);
    amps(n) = std::polar(std::exp(log_amp(n)), std::numbers::pi / 4 * m);
  }
  amps /= amps.norm();
  return SectorPureState(params.particles, std::move(amps));
}

SectoredState lossy_dicke(int particles, double eta) {
  return loss_channel(SectoredState::from_pure(dicke_state(particles)), eta);
}

SectorPureState constrained_ground_state(int particles, double lambda) {
  if (particles < 1) throw InvalidArgument("squeezed search needs at least one particle");
  const int dim = particles + 1;
  const double j = 0.5 * particles;
  RVector diag(dim);
  RVector sub(dim - 1);
  for (int n = 0; n < dim; ++n) {
    const double m = jz_value(n, particles);
    diag(n) = m * m;
    if (n + 1 < dim) sub(n) = -0.5 * lambda * std::sqrt(j * (j + 1) - m * (m + 1));
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NoConvergence("ground state eigensolver failed");

  const RVector& values = solver.eigenvalues();
  int degeneracy = 1;
  while (degeneracy < dim && values(degeneracy) - values(0) < 1e-12 * std::max(1.0, std::abs(values(0)))) {
    ++degeneracy;
  }
  RVector ground = solver.eigenvectors().col(0);
  if (degeneracy > 1) {
    // Diagonalize J_x inside the degenerate space and keep its top vector.
    const RMatrix basis = solver.eigenvectors().leftCols(degeneracy);
    RMatrix jx = RMatrix::Zero(dim, dim);
    for (int n = 0; n + 1 < dim; ++n) {
      const double m = jz_value(n, particles);
      jx(n, n + 1) = jx(n + 1, n) = 0.5 * std::sqrt(j * (j + 1) - m * (m + 1));
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> inner(basis.transpose() * jx * basis);
    ground = basis * inner.eigenvectors().col(degeneracy - 1);
  }
  Eigen::Index largest = 0;
  ground.cwiseAbs().maxCoeff(&largest);
  if (ground(largest) < 0) ground = -ground;
  return SectorPureState(particles, ground.cast<Complex>());
}

SqueezedSearchResult find_min_variance_state(const SqueezedSearchParams& params) {
  if (params.particles < 1) throw InvalidArgument("squeezed search needs at least one particle");
  if (!(params.jx_fraction > 0.0 && params.jx_fraction < 1.0)) {
    throw InvalidArgument("jx_fraction must lie in (0, 1)");
  }
  if (!(params.constraint_tol > 0.0)) throw InvalidArgument("constraint_tol must be positive");

  const double target = params.jx_fraction * 0.5 * params.particles;
  double lo = params.lambda_lo.value_or(1e-8);
  double hi = params.lambda_hi.value_or(10.0 * params.particles);
  if (!(lo > 0.0 && hi > lo)) throw InvalidArgument("lambda bracket must satisfy 0 < lo < hi");

  auto mean_jx = [&](const SectorPureState& s) {
    return collective_moments(SectoredState::from_pure(s)).mean_jx;
  };

  const double at_lo = mean_jx(constrained_ground_state(params.particles, lo));
  const double at_hi = mean_jx(constrained_ground_state(params.particles, hi));
  if (!(at_lo <= target && target <= at_hi)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "lambda bracket [" << lo << ", " << hi << "] gives <J_x> in [" << at_lo << ", " << at_hi
        << "], which does not contain the target " << target;
    throw NoConvergence(msg.str());
  }

  constexpr int kMaxIterations = 200;
  for (int it = 1; it <= kMaxIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    SectorPureState state = constrained_ground_state(params.particles, mid);
    const double value = mean_jx(state);
    if (std::abs(value - target) <= params.constraint_tol) {
      return SqueezedSearchResult{std::move(state), mid, value, it};
    }
    (value < target ? lo : hi) = mid;
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "bisection did not reach |<J_x> - " << target << "| <= " << params.constraint_tol
      << " in " << kMaxIterations << " iterations (last bracket [" << lo << ", " << hi << "])";
  throw NoConvergence(msg.str());
}

}  // namespace dicke

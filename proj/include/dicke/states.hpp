#pragma once

#include <optional>

#include "dicke/fock.hpp"

namespace dicke {

/// |N/2, N/2>: equal occupation of both modes. N must be even and positive.
SectorPureState dicke_state(int particles);

/// All particles polarized along +x: a_n = sqrt(C(N, n)) / 2^(N/2).
SectorPureState spin_coherent_x(int particles);

struct GaussianDickeParams {
  int particles;  // even, positive
  double sigma;   // width in units of number difference; 0 gives the Dicke state
};

/// a_n ~ exp(-(n - N/2)^2 / sigma^2) * exp(i pi (n - N/2) / 4), normalized.
SectorPureState gaussian_dicke(const GaussianDickeParams& params);

/// Dicke state of `particles` sent through the loss channel with rate eta.
SectoredState lossy_dicke(int particles, double eta);

struct SqueezedSearchParams {
  int particles;
  double jx_fraction;  // target <J_x> = jx_fraction * N/2, in (0, 1)
  std::optional<double> lambda_lo;  // defaults to 1e-8
  std::optional<double> lambda_hi;  // defaults to 10 N
  double constraint_tol = 1e-9;
};

struct SqueezedSearchResult {
  SectorPureState state;
  double lambda;
  double mean_jx;
  int iterations;
};

/// Ground state of J_z^2 - lambda J_x with lambda bisected until <J_x> hits
/// the target. Throws NoConvergence if the bracket misses the target.
SqueezedSearchResult find_min_variance_state(const SqueezedSearchParams& params);

inline SectorPureState min_variance_squeezed_state(const SqueezedSearchParams& params) {
  return find_min_variance_state(params).state;
}

/// Lowest eigenvector of J_z^2 - lambda J_x. Degenerate ground spaces are
/// resolved toward the largest <J_x>; the overall sign makes the largest
/// component positive.
SectorPureState constrained_ground_state(int particles, double lambda);

}  // namespace dicke

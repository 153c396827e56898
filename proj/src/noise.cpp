#include "dicke/noise.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "dicke/errors.hpp"

namespace dicke {
namespace {

void require_probability(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw InvalidArgument(std::string(name) + " must lie in [0, 1]");
  }
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

SectoredState loss_channel(const SectoredState& state, double eta) {
  require_probability(eta, "loss rate");
  if (eta == 0.0) return state;

  const int top = state.max_particles();
  std::vector<CMatrix> accum(top + 1);
  for (int m = 0; m <= top; ++m) accum[m] = CMatrix::Zero(m + 1, m + 1);

  if (eta == 1.0) {
    accum[0](0, 0) = 1.0;
  } else {
    const double log_eta = std::log(eta);
    const double log_keep = std::log1p(-eta);
    for (const auto& [in_particles, sector] : state.sectors()) {
      if (sector.weight == 0.0) continue;
      const CMatrix& rho = sector.state.matrix();
      for (int lost_a = 0; lost_a <= in_particles; ++lost_a) {
        for (int lost_b = 0; lost_a + lost_b <= in_particles; ++lost_b) {
          const int out = in_particles - lost_a - lost_b;
          const int dim = out + 1;
          // Input n in [lost_a, in - lost_b] lands on output index n - lost_a.
          const double log_common = (lost_a + lost_b) * log_eta + out * log_keep;
          RVector coeff(dim);
          for (int k = 0; k < dim; ++k) {
            const int n = k + lost_a;
            coeff(k) = std::exp(0.5 * (log_common + log_binomial(n, lost_a) +
                                       log_binomial(in_particles - n, lost_b)));
          }
          accum[out].noalias() += sector.weight * (coeff.asDiagonal() *
                                                   rho.block(lost_a, lost_a, dim, dim) *
                                                   coeff.asDiagonal());
        }
      }
    }
  }

  std::map<int, Sector> sectors;
  for (int m = 0; m <= top; ++m) {
    const double weight = accum[m].trace().real();
    if (weight <= 0.0) continue;
    sectors.emplace(m, Sector{weight, SectorDensityMatrix(m, accum[m] / weight), {}});
  }
  return SectoredState(std::move(sectors), state.source_particles());
}

double dephased_dicke_xi(int particles, double p) {
  if (particles < 2 || particles % 2 != 0) throw InvalidArgument("particle number must be even and positive");
  require_probability(p, "dephasing probability");
  return 1.0 / (particles * (1.0 - p) + 2.0 - p * p);
}

double dephasing_qubit_oracle(int particles, double p) {
  if (particles < 2 || particles % 2 != 0) throw InvalidArgument("particle number must be even and positive");
  require_probability(p, "dephasing probability");
  if (particles > kMaxOracleQubits) {
    throw ResourceLimit("qubit oracle is limited to N <= " + std::to_string(kMaxOracleQubits));
  }

  // Bit q of a basis index is 1 when qubit q sits in mode a (sigma_z = +1).
  const std::uint64_t dim = std::uint64_t{1} << particles;
  std::vector<double> psi(dim, 0.0);
  std::uint64_t count = 0;
  for (std::uint64_t x = 0; x < dim; ++x) {
    if (std::popcount(x) == particles / 2) {
      psi[x] = 1.0;
      ++count;
    }
  }
  const double norm = 1.0 / std::sqrt(static_cast<double>(count));
  for (double& a : psi) a *= norm;

  // rho[x * dim + y] = <x|rho|y>
  std::vector<Complex> rho(dim * dim);
  for (std::uint64_t x = 0; x < dim; ++x) {
    for (std::uint64_t y = 0; y < dim; ++y) rho[x * dim + y] = psi[x] * psi[y];
  }

  // P_a rho P_a + P_b rho P_b keeps the entries diagonal in qubit q, so the
  // channel scales every entry that is off-diagonal in q by (1 - p).
  for (int q = 0; q < particles; ++q) {
    const std::uint64_t bit = std::uint64_t{1} << q;
    for (std::uint64_t x = 0; x < dim; ++x) {
      for (std::uint64_t y = 0; y < dim; ++y) {
        if ((x ^ y) & bit) rho[x * dim + y] *= (1.0 - p);
      }
    }
  }

  double mean_jz = 0.0;
  double mean_jz2 = 0.0;
  for (std::uint64_t x = 0; x < dim; ++x) {
    const double weight = rho[x * dim + x].real();
    const double m = std::popcount(x) - 0.5 * particles;
    mean_jz += weight * m;
    mean_jz2 += weight * m * m;
  }

  // J_x^2 + J_y^2 = N/2 + (1/4) sum_{i != j} (sx_i sx_j + sy_i sy_j), and the
  // pair term is 2 (|01><10| + |10><01|) on qubits (i, j).
  double transverse = 0.5 * particles;
  for (int i = 0; i < particles; ++i) {
    for (int j = 0; j < particles; ++j) {
      if (i == j) continue;
      const std::uint64_t flip = (std::uint64_t{1} << i) | (std::uint64_t{1} << j);
      double pair = 0.0;
      for (std::uint64_t y = 0; y < dim; ++y) {
        const bool bi = (y >> i) & 1U;
        const bool bj = (y >> j) & 1U;
        if (bi != bj) pair += 2.0 * rho[y * dim + (y ^ flip)].real();
      }
      transverse += 0.25 * pair;
    }
  }
  const double var_jz = mean_jz2 - mean_jz * mean_jz;
  return particles * (var_jz + 0.25) / transverse;
}

}  // namespace dicke

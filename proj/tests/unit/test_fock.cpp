#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dicke/errors.hpp"
#include "dicke/fock.hpp"
#include "dicke/states.hpp"
#include "oracles.hpp"

using namespace dicke;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

SectoredState random_mixture(std::mt19937_64& rng) {
  std::map<int, Sector> sectors;
  sectors.emplace(3, Sector{0.5, SectorDensityMatrix(3, oracle::random_density(4, 2, rng)), std::nullopt});
  sectors.emplace(4, Sector{0.3, SectorDensityMatrix(4, oracle::random_density(5, 3, rng)), std::nullopt});
  const CVector psi = oracle::random_state(6, rng);
  sectors.emplace(5, Sector{0.2, SectorDensityMatrix::from_pure(SectorPureState(5, psi)), psi});
  return SectoredState(std::move(sectors), 5);
}

}  // namespace

TEST_CASE("pure states renormalize small drift and reject large drift") {
  CVector v(3);
  v << 1.0, 0.0, 1e-4;
  const SectorPureState s(2, v);
  CHECK(s.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-15));
  v << 1.0, 0.1, 0.0;
  CHECK_THROWS_AS(SectorPureState(2, v), InvalidArgument);
  CHECK_THROWS_AS(SectorPureState(3, CVector::Ones(3)), InvalidArgument);
}

TEST_CASE("density matrices must be hermitian") {
  CMatrix m = CMatrix::Identity(2, 2) * 0.5;
  m(0, 1) = 0.1;
  CHECK_THROWS_AS(SectorDensityMatrix(1, m), InvalidArgument);
}

TEST_CASE("sector operators obey the angular momentum algebra") {
  for (int particles = 0; particles <= 8; ++particles) {
    const SpinOperators ops = build_sector_operators(particles);
    const Complex i(0.0, 1.0);
    CHECK(max_abs(ops.jx * ops.jy - ops.jy * ops.jx - i * ops.jz) < 1e-12);
    CHECK(max_abs(ops.jy * ops.jz - ops.jz * ops.jy - i * ops.jx) < 1e-12);
    const double j = 0.5 * particles;
    const CMatrix casimir = ops.jx * ops.jx + ops.jy * ops.jy + ops.jz * ops.jz;
    CHECK(max_abs(casimir - j * (j + 1) * CMatrix::Identity(particles + 1, particles + 1)) < 1e-11);
    CHECK(max_abs(ops.jy - oracle::jy_dense(particles)) < 1e-14);
    for (int n = 0; n <= particles; ++n) CHECK(ops.jz(n, n).real() == jz_value(n, particles));
  }
}

TEST_CASE("jy spectrum is exact and unitary") {
  for (int particles : {1, 2, 7, 40, 101}) {
    const auto spec = jy_spectrum(particles);
    const int dim = particles + 1;
    for (int k = 0; k < dim; ++k) CHECK(spec->eigenvalues(k) == k - 0.5 * particles);
    const CMatrix& v = spec->vectors;
    CHECK(max_abs(v.adjoint() * v - CMatrix::Identity(dim, dim)) < 1e-11);
    CHECK(max_abs(v * spec->eigenvalues.cast<Complex>().asDiagonal() * v.adjoint() - oracle::jy_dense(particles)) <
          1e-10);
  }
  CHECK(jy_spectrum(12) == jy_spectrum(12));
}

TEST_CASE("rotation matches the matrix exponential and the mode transformation") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (int particles : {1, 2, 5, 12, 24}) {
    for (int trial = 0; trial < 5; ++trial) {
      const double theta = angle(rng);
      const CMatrix u = rotation_matrix(particles, theta);
      CHECK(max_abs(u - oracle::rotation_expm(particles, theta)) < 1e-10);
      CHECK(max_abs(u - oracle::rotation_polynomial(particles, theta)) < 1e-9);
    }
  }
}

TEST_CASE("rotations are unitary and compose additively") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (int particles : {3, 10, 33}) {
    const double a = angle(rng);
    const double b = angle(rng);
    const CMatrix ua = rotation_matrix(particles, a);
    const int dim = particles + 1;
    CHECK(max_abs(ua.adjoint() * ua - CMatrix::Identity(dim, dim)) < 1e-11);
    CHECK(max_abs(ua * rotation_matrix(particles, b) - rotation_matrix(particles, a + b)) < 1e-10);
    CHECK(max_abs(rotation_matrix(particles, 0.0) - CMatrix::Identity(dim, dim)) < 1e-12);
  }
}

TEST_CASE("rotate_y agrees across pure, density and sectored forms") {
  std::mt19937_64 rng(3);
  const SectorPureState psi(6, oracle::random_state(7, rng));
  const double theta = 0.37;
  const SectorPureState rotated = rotate_y(psi, theta);
  const SectorDensityMatrix rho = rotate_y(SectorDensityMatrix::from_pure(psi), theta);
  CHECK(max_abs(rho.matrix() - rotated.amplitudes() * rotated.amplitudes().adjoint()) < 1e-12);

  const SectoredState mix = random_mixture(rng);
  const SectoredState out = rotate_y(mix, theta);
  for (const auto& [particles, sector] : mix.sectors()) {
    const Sector& o = out.sectors().at(particles);
    CHECK(o.weight == doctest::Approx(sector.weight).epsilon(1e-15));
    const CMatrix u = oracle::rotation_expm(particles, theta);
    CHECK(max_abs(o.state.matrix() - u * sector.state.matrix() * u.adjoint()) < 1e-10);
  }
}

TEST_CASE("arm basis of single-particle and two-particle states") {
  CVector one(2);
  one << 0.0, 1.0;  // |1,0>
  const CVector arm = to_pm_basis(SectorPureState(1, one)).amplitudes();
  CHECK(std::abs(arm(1) - 1.0 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(arm(0) + 1.0 / std::sqrt(2.0)) < 1e-14);

  CVector two(3);
  two << 0.0, 1.0, 0.0;  // |1,1>
  const CVector arm2 = to_pm_basis(SectorPureState(2, two)).amplitudes();
  CHECK(std::abs(arm2(2) - 1.0 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(arm2(1)) < 1e-14);
  CHECK(std::abs(arm2(0) + 1.0 / std::sqrt(2.0)) < 1e-14);
}

TEST_CASE("applying the arm transform twice swaps the modes") {
  std::mt19937_64 rng(5);
  for (int particles : {1, 4, 9}) {
    const SectorPureState psi(particles, oracle::random_state(particles + 1, rng));
    const CVector twice = to_pm_basis(to_pm_basis(psi)).amplitudes();
    const CVector swap = rotate_y(psi, -std::numbers::pi).amplitudes();
    CHECK((twice - swap).norm() < 1e-12);
    // exp(i pi J_y) |n, M-n> = (-1)^n |M-n, n>
    for (int n = 0; n <= particles; ++n) {
      const double sign = n % 2 == 0 ? 1.0 : -1.0;
      CHECK(std::abs(twice(particles - n) - sign * psi.amplitudes()(n)) < 1e-12);
    }
  }
  // swap-symmetric inputs return to themselves up to a global phase
  const SectorPureState d = dicke_state(10);
  const CVector back = to_pm_basis(to_pm_basis(d)).amplitudes();
  CHECK(std::abs(std::abs(back.dot(d.amplitudes())) - 1.0) < 1e-12);
}

TEST_CASE("collective moments match dense operator expectations") {
  std::mt19937_64 rng(13);
  const SectoredState mix = random_mixture(rng);
  double jx = 0, jy = 0, jz = 0, jz2 = 0, jx2 = 0, jy2 = 0, n = 0;
  for (const auto& [particles, sector] : mix.sectors()) {
    const SpinOperators ops = build_sector_operators(particles);
    const CMatrix& rho = sector.state.matrix();
    auto ev = [&](const CMatrix& op) { return (rho * op).trace().real(); };
    jx += sector.weight * ev(ops.jx);
    jy += sector.weight * ev(ops.jy);
    jz += sector.weight * ev(ops.jz);
    jz2 += sector.weight * ev(ops.jz * ops.jz);
    jx2 += sector.weight * ev(ops.jx * ops.jx);
    jy2 += sector.weight * ev(ops.jy * ops.jy);
    n += sector.weight * particles;
  }
  const MomentRecord m = collective_moments(mix);
  CHECK(m.mean_jx == doctest::Approx(jx).epsilon(1e-12));
  CHECK(m.mean_jy == doctest::Approx(jy).epsilon(1e-12));
  CHECK(m.mean_jz == doctest::Approx(jz).epsilon(1e-12));
  CHECK(m.var_jz == doctest::Approx(jz2 - jz * jz).epsilon(1e-12));
  CHECK(m.mean_jx2_plus_jy2 == doctest::Approx(jx2 + jy2).epsilon(1e-12));
  CHECK(m.mean_particles == doctest::Approx(n).epsilon(1e-15));
  CHECK(axis_moments(mix, Axis::x).second == doctest::Approx(jx2).epsilon(1e-12));
  CHECK(axis_moments(mix, Axis::y).second == doctest::Approx(jy2).epsilon(1e-12));
  CHECK(axis_moments(mix, Axis::z).variance() == doctest::Approx(jz2 - jz * jz).epsilon(1e-12));
}

TEST_CASE("sector weights are renormalized and validated") {
  std::map<int, Sector> sectors;
  CVector v = CVector::Zero(2);
  v(0) = 1.0;
  sectors.emplace(1, Sector{-0.5, SectorDensityMatrix::from_pure(SectorPureState(1, v)), v});
  CHECK_THROWS_AS(SectoredState(sectors, 1), InvalidArgument);
}

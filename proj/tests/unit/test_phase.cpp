#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dicke/errors.hpp"
#include "dicke/phase.hpp"
#include "dicke/states.hpp"
#include "oracles.hpp"

using namespace dicke;

namespace {

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("vacuum gives a uniform phase distribution") {
  CVector one(1);
  one << 1.0;
  const auto vac = SectoredState::from_pure(SectorPureState(0, one));
  const PhaseDistribution d = relative_phase_distribution(vac, 9);
  for (double p : d.probabilities) CHECK(p == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("two-particle Dicke state has P proportional to 1 - cos 2 theta") {
  const PhaseDistribution d = relative_phase_distribution(SectoredState::from_pure(dicke_state(2)), 15);
  for (int l = 0; l < d.grid.size(); ++l) {
    CHECK(std::abs(d.probabilities[l] - (1.0 - std::cos(2.0 * d.grid.theta(l))) / 16.0) < 1e-14);
  }
  CHECK(d.fold_period == FoldPeriod::pi);
}

TEST_CASE("Toeplitz evaluation matches the phase-state double sum") {
  std::mt19937_64 rng(4);
  const auto pure = SectoredState::from_pure(SectorPureState(5, oracle::random_state(6, rng)));
  const SectoredState lossy = lossy_dicke(6, 0.3);
  for (const SectoredState* s : {&pure, &lossy}) {
    for (int mult : {1, 2, 3}) {
      const int trunc = mult * s->source_particles();
      const auto fast = relative_phase_distribution(*s, trunc).probabilities;
      const auto slow = phase_distribution_oracle(*s, trunc);
      REQUIRE(fast.size() == slow.size());
      CHECK(sum(slow) == doctest::Approx(1.0).epsilon(1e-12));
      for (std::size_t l = 0; l < fast.size(); ++l) CHECK(std::abs(fast[l] - slow[l]) < 1e-12);
    }
  }
}

TEST_CASE("pure arm states follow the analytic form") {
  for (int n : {4, 10, 30}) {
    const SectorPureState d = gaussian_dicke({n, 2.0});
    const auto analytic = pure_arm_phase_distribution(to_pm_basis(d), 4 * n);
    const auto grid = relative_phase_distribution(SectoredState::from_pure(d), 4 * n).probabilities;
    const double norm = sum(analytic);
    for (std::size_t l = 0; l < grid.size(); ++l) CHECK(std::abs(grid[l] - analytic[l] / norm) < 1e-8);
  }
}

TEST_CASE("phase distributions are normalized and non-negative") {
  for (const SectoredState& s : {SectoredState::from_pure(dicke_state(20)), lossy_dicke(20, 0.4),
                                 SectoredState::from_pure(gaussian_dicke({20, 3.0}))}) {
    const auto d = relative_phase_distribution(s, default_truncation(20));
    CHECK(std::abs(sum(d.probabilities) - 1.0) < 1e-10);
    for (double p : d.probabilities) CHECK(p >= 0.0);
  }
}

TEST_CASE("global phase per sector leaves the distribution unchanged") {
  const SectorPureState g = gaussian_dicke({12, 2.0});
  const auto base = relative_phase_distribution(SectoredState::from_pure(g), 48).probabilities;
  const SectorPureState shifted(12, g.amplitudes() * std::polar(1.0, 0.9 * 12));
  const auto moved = relative_phase_distribution(SectoredState::from_pure(shifted), 48).probabilities;
  for (std::size_t l = 0; l < base.size(); ++l) CHECK(std::abs(base[l] - moved[l]) < 1e-14);
}

TEST_CASE("truncation below the particle number is rejected") {
  CHECK_THROWS_AS(relative_phase_distribution(SectoredState::from_pure(dicke_state(10)), 9), InvalidArgument);
}

TEST_CASE("width of a point mass and of a uniform window") {
  std::vector<double> point(64, 0.0);
  point[17] = 1.0;
  CHECK(delta_theta(point).delta_theta == 0.0);

  const int size = 1001;
  std::vector<double> flat(size, 0.0);
  const int width = 101;
  for (int l = 300; l < 300 + width; ++l) flat[l] = 1.0 / width;
  const double spacing = 2.0 * std::numbers::pi / size;
  const double length = width * spacing;
  const PhaseWidth w = delta_theta(flat);
  CHECK(w.fold_period == FoldPeriod::two_pi);
  CHECK(std::abs(w.delta_theta - length / std::sqrt(12.0)) < spacing);
  CHECK(w.peak == doctest::Approx(350 * spacing).epsilon(1e-12));
  CHECK_FALSE(w.ambiguous);
}

TEST_CASE("two equal distant peaks are flagged ambiguous") {
  std::vector<double> p(400, 0.0);
  p[0] = 0.5;
  p[150] = 0.5;  // 3/8 of the circle away: outside a quarter-period window
  const PhaseWidth w = delta_theta(p);
  CHECK(w.ambiguous);
  CHECK(w.mass_outside_window == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("period-pi distributions are folded on odd grids") {
  const auto d = relative_phase_distribution(SectoredState::from_pure(dicke_state(10)), 80);
  CHECK(d.grid.size() % 2 == 1);
  CHECK(d.fold_period == FoldPeriod::pi);
  const auto g = relative_phase_distribution(SectoredState::from_pure(gaussian_dicke({10, 2.0})), 80);
  CHECK(g.fold_period == FoldPeriod::two_pi);
}

TEST_CASE("width converges when the truncation doubles") {
  for (int n : {20, 50, 100}) {
    const auto s = SectoredState::from_pure(dicke_state(n));
    const double a = relative_phase_distribution(s, 4 * n).delta_theta;
    const double b = relative_phase_distribution(s, 8 * n).delta_theta;
    CHECK(std::abs(a - b) < 1e-3);
  }
}

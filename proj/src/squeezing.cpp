#include "dicke/squeezing.hpp"

#include <cmath>

#include "dicke/errors.hpp"

namespace dicke {
namespace {

double prefactor(const SectoredState& state, const MomentRecord& moments, NConvention convention) {
  return convention == NConvention::initial_n ? static_cast<double>(state.source_particles())
                                              : moments.mean_particles;
}

}  // namespace

std::string_view to_string(NConvention convention) {
  return convention == NConvention::initial_n ? "initial_N" : "mean_particles";
}

double xi_d(const SectoredState& state, NConvention convention) {
  const MomentRecord moments = collective_moments(state);
  if (!(moments.mean_jx2_plus_jy2 > 1e-12)) {
    throw UndefinedMetric("xi_d undefined: <J_x^2 + J_y^2> vanishes");
  }
  return prefactor(state, moments, convention) * (moments.var_jz + 0.25) / moments.mean_jx2_plus_jy2;
}

double xi_s(const SectoredState& state, Axis mean_axis, Axis variance_axis, NConvention convention) {
  const MomentRecord moments = collective_moments(state);
  const double n = prefactor(state, moments, convention);
  const double mean = axis_moments(state, mean_axis).mean;
  if (!(std::abs(mean) > 1e-9 * std::max(n, 1.0))) {
    throw UndefinedMetric("xi_s undefined: mean spin along the reference axis vanishes");
  }
  const double variance = std::max(0.0, axis_moments(state, variance_axis).variance());
  return n * variance / (mean * mean);
}

int entanglement_depth_lower_bound(double xi) {
  if (!(xi > 0.0) || !std::isfinite(xi)) throw InvalidArgument("xi_d must be positive and finite");
  const double inverse = 1.0 / xi;
  const double nearest = std::round(inverse);
  const double ceiling =
      std::abs(inverse - nearest) <= 1e-9 * std::max(1.0, inverse) ? nearest : std::ceil(inverse);
  return std::max(1, static_cast<int>(ceiling) - 2);
}

SqueezingReport squeezing_report(const SectoredState& state, NConvention convention) {
  SqueezingReport report{xi_d(state, convention), std::nullopt, convention, 1};
  report.depth_lower_bound = entanglement_depth_lower_bound(report.xi_d);
  try {
    report.xi_s = xi_s(state, Axis::x, Axis::z, convention);
  } catch (const UndefinedMetric&) {
  }
  return report;
}

}  // namespace dicke

#pragma once

#include <optional>
#include <string_view>

#include "dicke/fock.hpp"

namespace dicke {

/// Which particle number enters the prefactor N of the squeezing parameters
/// for states without a fixed particle number.
enum class NConvention { initial_n, mean_particles };

std::string_view to_string(NConvention convention);

/// N (<dJ_z^2> + 1/4) / <J_x^2 + J_y^2>. Throws UndefinedMetric when the
/// denominator vanishes (vacuum).
double xi_d(const SectoredState& state, NConvention convention = NConvention::mean_particles);

/// N <dJ_variance^2> / <J_mean>^2. Throws UndefinedMetric when
/// |<J_mean>| <= 1e-9 N.
double xi_s(const SectoredState& state, Axis mean_axis = Axis::x, Axis variance_axis = Axis::z,
            NConvention convention = NConvention::mean_particles);

/// max(1, ceil(1/xi_d) - 2). Reciprocals within 1e-9 (relative) of an
/// integer are taken as that integer, so 1/(N+2) maps to N.
int entanglement_depth_lower_bound(double xi_d);

struct SqueezingReport {
  double xi_d;
  std::optional<double> xi_s;
  NConvention n_convention;
  int depth_lower_bound;
};

/// xi_s is left empty when it is undefined for the state.
SqueezingReport squeezing_report(const SectoredState& state,
                                 NConvention convention = NConvention::mean_particles);

}  // namespace dicke

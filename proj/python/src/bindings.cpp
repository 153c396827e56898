#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dicke/bayes.hpp"
#include "dicke/errors.hpp"
#include "dicke/experiments.hpp"
#include "dicke/noise.hpp"
#include "dicke/phase.hpp"
#include "dicke/squeezing.hpp"
#include "dicke/states.hpp"

namespace py = pybind11;
using namespace dicke;

namespace {

SweepConfig config_from_text(const std::string& text) {
  SweepConfig config;
  apply_config_text(config, text);
  config.validate();
  return config;
}

}  // namespace

PYBIND11_MODULE(_dicke, m) {
  m.doc() = "Two-mode Fock states, squeezing metrics and Bayesian phase estimation.";

  // InvalidArgument derives from std::invalid_argument and arrives as ValueError.
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<UndefinedMetric>(m, "UndefinedMetric", numerical.ptr());
  py::register_exception<NoConvergence>(m, "NoConvergence", numerical.ptr());
  py::register_exception<NumericalUnderflow>(m, "NumericalUnderflow", numerical.ptr());
  py::register_exception<ResourceLimit>(m, "ResourceLimit", PyExc_MemoryError);

  py::enum_<Axis>(m, "Axis").value("x", Axis::x).value("y", Axis::y).value("z", Axis::z);
  py::enum_<NConvention>(m, "NConvention")
      .value("initial_n", NConvention::initial_n)
      .value("mean_particles", NConvention::mean_particles);

  py::class_<SectorPureState>(m, "SectorPureState")
      .def(py::init<int, CVector>(), py::arg("particles"), py::arg("amplitudes"))
      .def_property_readonly("particles", &SectorPureState::particles)
      .def_property_readonly("amplitudes", &SectorPureState::amplitudes);

  py::class_<SectoredState>(m, "SectoredState")
      .def_static("from_pure", &SectoredState::from_pure)
      .def_property_readonly("source_particles", &SectoredState::source_particles)
      .def_property_readonly("max_particles", &SectoredState::max_particles)
      .def("weights", [](const SectoredState& s) {
        std::map<int, double> w;
        for (const auto& [particles, sector] : s.sectors()) w[particles] = sector.weight;
        return w;
      })
      .def("density_matrix", [](const SectoredState& s, int particles) {
        const auto it = s.sectors().find(particles);
        if (it == s.sectors().end()) throw InvalidArgument("no sector with that particle number");
        return it->second.state.matrix();
      }, py::arg("particles"));

  py::class_<MomentRecord>(m, "MomentRecord")
      .def_readonly("mean_jx", &MomentRecord::mean_jx)
      .def_readonly("mean_jy", &MomentRecord::mean_jy)
      .def_readonly("mean_jz", &MomentRecord::mean_jz)
      .def_readonly("var_jz", &MomentRecord::var_jz)
      .def_readonly("mean_jx2_plus_jy2", &MomentRecord::mean_jx2_plus_jy2)
      .def_readonly("mean_particles", &MomentRecord::mean_particles);

  m.def("dicke_state", &dicke_state, py::arg("particles"));
  m.def("spin_coherent_x", &spin_coherent_x, py::arg("particles"));
  m.def("gaussian_dicke", [](int particles, double sigma) { return gaussian_dicke({particles, sigma}); },
        py::arg("particles"), py::arg("sigma"));
  m.def("lossy_dicke", &lossy_dicke, py::arg("particles"), py::arg("eta"));
  m.def("min_variance_squeezed_state", [](int particles, double jx_fraction) {
    return min_variance_squeezed_state({.particles = particles, .jx_fraction = jx_fraction,
                                        .lambda_lo = {}, .lambda_hi = {}});
  }, py::arg("particles"), py::arg("jx_fraction") = 0.1);
  m.def("loss_channel", &loss_channel, py::arg("state"), py::arg("eta"));
  m.def("rotate_y", py::overload_cast<const SectoredState&, double>(&rotate_y), py::arg("state"),
        py::arg("theta"));
  m.def("rotation_matrix", &rotation_matrix, py::arg("particles"), py::arg("theta"));
  m.def("collective_moments", &collective_moments, py::arg("state"));

  m.def("xi_d", &xi_d, py::arg("state"), py::arg("convention") = NConvention::mean_particles);
  m.def("xi_s", &xi_s, py::arg("state"), py::arg("mean_axis") = Axis::x,
        py::arg("variance_axis") = Axis::z, py::arg("convention") = NConvention::mean_particles);
  m.def("entanglement_depth_lower_bound", &entanglement_depth_lower_bound, py::arg("xi_d"));
  m.def("dephased_dicke_xi", &dephased_dicke_xi, py::arg("particles"), py::arg("p"));
  m.def("dephasing_qubit_oracle", &dephasing_qubit_oracle, py::arg("particles"), py::arg("p"));

  m.def("relative_phase_distribution", [](const SectoredState& state, std::optional<int> s) {
    const PhaseDistribution d =
        relative_phase_distribution(state, s.value_or(default_truncation(state.max_particles())));
    py::dict out;
    std::vector<double> grid(d.grid.size());
    for (int l = 0; l < d.grid.size(); ++l) grid[l] = d.grid.theta(l);
    out["theta"] = grid;
    out["probabilities"] = d.probabilities;
    out["delta_theta"] = d.delta_theta;
    out["full_period_delta_theta"] = d.full_period_delta_theta;
    out["period_pi"] = d.fold_period == FoldPeriod::pi;
    out["ambiguous_width"] = d.ambiguous_width;
    return out;
  }, py::arg("state"), py::arg("s") = py::none());

  m.def("likelihood", [](const SectoredState& state, double theta) {
    const LikelihoodModel model(state);
    std::vector<std::pair<int, int>> outcomes;
    for (const Outcome& o : model.outcomes()) outcomes.emplace_back(o.particles, o.n);
    return std::make_pair(outcomes, model.probabilities(theta));
  }, py::arg("state"), py::arg("theta"),
        "Outcomes as (particles, n) pairs and P(outcome | theta) for each.");

  m.def("simulate", [](const SectoredState& state, double theta_r, int rounds, std::uint64_t seed,
                       double support_lo, double support_hi, int grid_points, bool full_circle) {
    const EstimatorOptions options{.support_lo = support_lo, .support_hi = support_hi,
                                   .grid_points = grid_points, .full_circle = full_circle,
                                   .keep_history = false};
    PosteriorTrace t;
    {
      py::gil_scoped_release release;
      t = simulate_experiment(state, theta_r, rounds, seed, options);
    }
    py::dict out;
    out["theta"] = t.grid.thetas();
    out["posterior"] = t.densities.back();
    out["theta_r"] = t.theta_r;
    out["theta_p"] = t.theta_p;
    out["d_theta"] = t.d_theta;
    out["theta_pr"] = t.theta_pr;
    out["mirror_folds"] = t.mirror_folds;
    return out;
  }, py::arg("state"), py::arg("theta_r"), py::arg("rounds"), py::arg("seed"),
        py::arg("support_lo") = -std::numbers::pi / 4, py::arg("support_hi") = std::numbers::pi / 4,
        py::arg("grid_points") = 4096, py::arg("full_circle") = false);

  m.def("config_hash", [](const std::string& text) { return config_hash(config_from_text(text)); },
        py::arg("config_text"));
  m.def("run_sweep", [](const std::string& text) {
    const SweepConfig config = config_from_text(text);
    py::gil_scoped_release release;
    switch (config.experiment) {
      case ExperimentKind::fig2_gaussian:
      case ExperimentKind::fig2_loss: {
        const Fig2Result r = run_fig2(config);
        return std::make_pair(fig2_csv(r, config), fig2_sidecar(r, config));
      }
      case ExperimentKind::fig3_gaussian:
      case ExperimentKind::fig3_loss: {
        const Fig3Result r = run_fig3(config);
        return std::make_pair(fig3_csv(r, config), fig3_sidecar(r, config));
      }
      case ExperimentKind::fig4_robustness: {
        const Fig4Result r = run_fig4(config);
        return std::make_pair(fig4_csv(r, config), fig4_sidecar(r, config));
      }
      case ExperimentKind::single_run:
        break;
    }
    throw InvalidArgument("experiment: run_sweep needs a fig2, fig3 or fig4 experiment");
  }, py::arg("config_text"), "Run a sweep from config text; returns (csv, sidecar_json).");
}

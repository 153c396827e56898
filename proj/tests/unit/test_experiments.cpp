#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dicke/errors.hpp"
#include "dicke/experiments.hpp"

using namespace dicke;

TEST_CASE("fit through the origin") {
  const std::vector<std::pair<double, double>> exact{{1, 2}, {2, 4}, {3, 6}};
  const FitResult f = fit_through_origin(exact);
  CHECK(f.slope == 2.0);
  CHECK(f.residual_rms == 0.0);
  CHECK(f.point_count == 3);

  const std::vector<std::pair<double, double>> two{{1, 1}, {2, 3}};
  CHECK(fit_through_origin(two).slope == doctest::Approx(1.4).epsilon(1e-15));
  CHECK(fit_through_origin(two).residual_rms > 0.0);

  const std::vector<std::pair<double, double>> one{{1, 1}};
  CHECK_THROWS_AS(fit_through_origin(one), InvalidArgument);
  const std::vector<std::pair<double, double>> flat{{0, 1}, {0, 2}};
  CHECK_THROWS_AS(fit_through_origin(flat), InvalidArgument);
}

TEST_CASE("range parsing") {
  CHECK(parse_int_range("20..200", 20).size() == 10);
  CHECK(parse_int_range("4..10:2", 20) == std::vector<std::int64_t>{4, 6, 8, 10});
  CHECK(parse_int_range("3, 5 ,9", 1) == std::vector<std::int64_t>{3, 5, 9});
  const auto eta = parse_real_range("0..0.4", 0.1);
  REQUIRE(eta.size() == 5);
  CHECK(eta[3] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(parse_real_range("0..0.99:0.01", 1.0).size() == 100);
  CHECK_THROWS_AS(parse_real_range("1..0", 0.1), InvalidArgument);
  CHECK_THROWS_AS(parse_real_range("a..2", 0.1), InvalidArgument);
  CHECK_THROWS_AS(parse_int_range("1..5:0", 1), InvalidArgument);
}

TEST_CASE("config text accumulates repeated keys and later values override") {
  SweepConfig c;
  apply_config_text(c,
                    "# sweep\n"
                    "experiment = fig3_loss\n"
                    "n = 20\n"
                    "n = 40..80\n"
                    "eta = 0.1\n"
                    "m = 20..60\n"
                    "seed = 1..3\n"
                    "support = -0.5, 0.5\n"
                    "convention = initial_N\n");
  CHECK(c.experiment == ExperimentKind::fig3_loss);
  CHECK(c.n_values == std::vector<int>{20, 40, 60, 80});
  CHECK(c.m_values == std::vector<int>{20, 40, 60});
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(c.support_lo == -0.5);
  CHECK(c.convention == NConvention::initial_n);
  c.validate();

  apply_config_value(c, "n", "10");  // a flag replaces the file's list
  CHECK(c.n_values == std::vector<int>{10});
  CHECK_THROWS_AS(apply_config_text(c, "bogus = 1\n"), InvalidArgument);
  CHECK_THROWS_AS(apply_config_text(c, "n 20\n"), InvalidArgument);
}

TEST_CASE("validation names the offending field") {
  SweepConfig c;
  c.experiment = ExperimentKind::fig2_gaussian;
  c.n_values = {21};
  c.sigma_values = {1.0};
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("n:"), InvalidArgument);
  c.n_values = {20};
  c.validate();
  c.eta_values = {1.5};
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("eta:"), InvalidArgument);
}

TEST_CASE("config hash ignores the output path and tracks parameters") {
  SweepConfig a;
  a.n_values = {20};
  SweepConfig b = a;
  b.output_path = "elsewhere.csv";
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.n_values = {22};
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("fig2: Dicke rows are identical through both families") {
  SweepConfig c;
  c.experiment = ExperimentKind::fig2_gaussian;
  c.n_values = {10, 20, 30};
  c.sigma_values = {0.0, 2.0};
  c.eta_values = {0.0, 0.2};
  const Fig2Result r = run_fig2(c);
  CHECK(r.rows.size() == 12);
  CHECK(r.errors.empty());
  for (int i = 0; i < 3; ++i) {
    const Fig2Row& g = r.rows[i];
    const Fig2Row& l = r.rows[6 + i];
    CHECK(g.spec.parameter == 0.0);
    CHECK(l.spec.family == "loss");
    CHECK(g.xi_d == l.xi_d);
    CHECK(g.delta_theta == l.delta_theta);
  }
  CHECK(r.fits.size() == 4);
  CHECK(r.overall.has_value());
  const std::string csv = fig2_csv(r, c);
  CHECK(csv.rfind("state_family,N,parameter,xi_d,sqrt_xi_d_over_n,delta_theta,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
  CHECK(csv.find(config_hash(c)) != std::string::npos);
}

TEST_CASE("fig3 output is byte-identical on rerun") {
  SweepConfig c;
  c.experiment = ExperimentKind::fig3_gaussian;
  c.n_values = {10, 20};
  c.sigma_values = {1.0};
  c.eta_values = {0.2};
  c.m_values = {10, 30};
  c.seeds = {4, 5};
  c.grid_points = 1024;
  const Fig3Result a = run_fig3(c);
  const Fig3Result b = run_fig3(c);
  CHECK(a.rows.size() == 2 * 2 * 2 * 2);
  CHECK(fig3_csv(a, c) == fig3_csv(b, c));
  CHECK(fig3_sidecar(a, c) == fig3_sidecar(b, c));
  CHECK(a.beta.has_value());
  CHECK(a.fraction_bounded >= 0.0);
  CHECK(a.fraction_bounded <= 1.0);
}

TEST_CASE("fig4 crossovers agree between coarse and fine grids") {
  SweepConfig c;
  c.experiment = ExperimentKind::fig4_robustness;
  c.n_values = {20};
  c.eta_values = parse_real_range("0..0.98:0.02", 1.0);
  c.fine_step = 0.002;
  const Fig4Result r = run_fig4(c);
  REQUIRE(r.rows.size() == c.eta_values.size());
  REQUIRE(r.xi_s_crossover.has_value());
  REQUIRE(r.xi_s_crossover_fine.has_value());
  CHECK(std::abs(*r.xi_s_crossover_fine - *r.xi_s_crossover) <= 0.02 + 1e-12);
  CHECK(*r.rows.front().xi_d < 1.0);
  CHECK(*r.rows.front().xi_s < 1.0);
  const std::string csv = fig4_csv(r, c);
  CHECK(csv.rfind("eta,xi_s,xi_d,config_hash,seed,version\n", 0) == 0);
}

TEST_CASE("number formatting keeps 17 significant digits") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(2.0) == "2");
  CHECK(format_real(std::nan("")) == "nan");
}

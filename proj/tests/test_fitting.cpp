#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cqed/calib.hpp"
#include "cqed/constants.hpp"
#include "cqed/errors.hpp"
#include "cqed/fitting.hpp"
#include "cqed/steady.hpp"

using namespace cqed;

namespace {

Spectrum synthetic_bare(const SystemParams& p, int points, double span_pm) {
  std::vector<double> grid;
  for (int i = 0; i < points; ++i)
    grid.push_back(-span_pm + 2.0 * span_pm * double(i) / double(points - 1));
  return weak_drive_spectrum(p, grid);
}

}  // namespace

TEST_CASE("nelder-mead minimizes smooth test functions") {
  auto quad = [](const Eigen::VectorXd& x) {
    return (x[0] - 1.0) * (x[0] - 1.0) + 3.0 * (x[1] + 2.0) * (x[1] + 2.0);
  };
  Eigen::VectorXd x0(2), scales(2);
  x0 << 0.0, 0.0;
  scales << 1.0, 1.0;
  const SimplexResult r = nelder_mead(quad, x0, scales, 500, 1e-14, 1, 0);
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.x[1] == doctest::Approx(-2.0).epsilon(1e-4));
  CHECK(r.fval <= 1e-8);

  auto rosen = [](const Eigen::VectorXd& x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  x0 << -1.2, 1.0;
  const SimplexResult rr = nelder_mead(rosen, x0, scales, 2000, 1e-15, 3, 0);
  CHECK(rr.x[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(rr.x[1] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("nelder-mead is deterministic for a fixed seed") {
  auto f = [](const Eigen::VectorXd& x) {
    return std::sin(3.0 * x[0]) + x[0] * x[0];
  };
  Eigen::VectorXd x0(1), scales(1);
  x0 << 2.0;
  scales << 0.7;
  const SimplexResult a = nelder_mead(f, x0, scales, 300, 1e-13, 4, 7);
  const SimplexResult b = nelder_mead(f, x0, scales, 300, 1e-13, 4, 7);
  CHECK(a.x[0] == b.x[0]);
  CHECK(a.fval == b.fval);
  // Restarts may begin above the incumbent, but the trace ends at the best
  // value seen.
  REQUIRE(!a.trace.empty());
  double best_seen = a.trace.front();
  for (double v : a.trace) best_seen = std::min(best_seen, v);
  CHECK(a.trace.back() == doctest::Approx(best_seen).epsilon(1e-12));
}

TEST_CASE("residual-walk uncertainty brackets a quadratic bowl") {
  // f = rss + (x/w)^2: the threshold rss (1 + sqrt(2/dof)) is crossed at
  // x = w sqrt(rss sqrt(2/dof)) exactly.
  const double rss = 0.5, w = 2.0;
  const int dof = 8;
  auto f = [&](const Eigen::VectorXd& x) { return rss + (x[0] / w) * (x[0] / w); };
  Eigen::VectorXd x_best(1), scales(1);
  x_best << 0.0;
  scales << 1.0;
  const Eigen::VectorXd unc =
      residual_walk_uncertainty(f, x_best, scales, rss, dof);
  const double expected = w * std::sqrt(rss * std::sqrt(2.0 / dof));
  CHECK(unc[0] == doctest::Approx(expected).epsilon(0.25));
}

TEST_CASE("bare-cavity fit recovers the generating rates") {
  SystemParams p = SystemParams::reference();
  p.g_tw = 0.0;
  const Spectrum spec = synthetic_bare(p, 301, 30.0);
  FitOptions opts;
  opts.max_iter = 2000;
  const BareCavityResult r = fit_bare_cavity(spec, opts);
  CHECK(r.fit.converged);
  CHECK(r.kappa_t == doctest::Approx(p.kappa_t()).epsilon(0.01));
  CHECK(r.kappa_e == doctest::Approx(p.kappa_e).epsilon(0.01));
  CHECK(r.gamma_beta == doctest::Approx(p.gamma_beta).epsilon(0.01));
  CHECK(std::abs(r.center_pm) < 0.1);
  CHECK(r.fit.rss < 1e-6);
  // Uncertainties are positive and small compared to the estimates.
  for (int i = 1; i < 4; ++i) {
    CHECK(r.fit.uncertainties[i] > 0.0);
    CHECK(r.fit.uncertainties[i] < r.fit.estimates[i]);
  }
}

TEST_CASE("bare-cavity fit tolerates a shifted centre") {
  SystemParams p = SystemParams::reference();
  p.g_tw = 0.0;
  p.dl_ca_m = 9.0 * consts::pm;  // doublet centred at +4.5 pm on the grid
  std::vector<double> grid;
  for (int i = 0; i < 301; ++i) grid.push_back(-25.0 + 60.0 * i / 300.0);
  const Spectrum spec = weak_drive_spectrum(p, grid);
  const BareCavityResult r = fit_bare_cavity(spec);
  CHECK(r.center_pm == doctest::Approx(9.0).epsilon(0.02));
  CHECK(r.gamma_beta == doctest::Approx(p.gamma_beta).epsilon(0.01));
}

TEST_CASE("qme fit round-trips g_tw and xi on noiseless data") {
  const SystemParams truth = SystemParams::reference();
  std::vector<double> grid;
  for (int i = 0; i < 81; ++i) grid.push_back(-28.0 + 46.0 * i / 80.0);

  std::vector<QmeData> data;
  for (double dl_ca : {-16.0, -8.0, 0.0}) {
    SystemParams p = truth;
    p.dl_ca_m = dl_ca * consts::pm;
    const Spectrum s = weak_drive_spectrum(p, grid);
    QmeData col;
    col.dl_ca_pm = dl_ca;
    col.grid_pm = grid;
    col.transmission = s.transmission;
    col.reflection = s.reflection;
    col.n_cav_max = 1e-8;
    data.push_back(col);
  }

  SystemParams start = truth;
  start.g_tw = consts::ghz_to_rads(1.8);  // mis-guessed coupling and phase
  start.xi = 0.45 * consts::pi;
  FitOptions opts;
  opts.restarts = 2;
  opts.max_iter = 300;
  const QmeFitResult r = fit_qme(data, start, {"g_tw", "xi"}, opts);
  CHECK(consts::rads_to_ghz(r.params.g_tw) ==
        doctest::Approx(2.24).epsilon(0.01));
  CHECK(std::abs(r.params.xi - 0.25 * consts::pi) < 0.02 * consts::pi);
  // The linear path used in the objective agrees with the full model.
  CHECK(r.verification_delta_t < 1e-3);
  CHECK(r.verification_delta_r < 1e-3);
}

TEST_CASE("qme fit rejects data beyond the weak-drive regime") {
  QmeData col;
  col.dl_ca_pm = 0.0;
  col.grid_pm = {-1.0, 0.0, 1.0};
  col.transmission = {1.0, 0.5, 1.0};
  col.reflection = {0.0, 0.1, 0.0};
  col.n_cav_max = 0.5;
  CHECK_THROWS_AS(fit_qme({col}, SystemParams::reference(), {"g_tw"}),
                  FitError);
  col.n_cav_max = 1e-6;
  CHECK_THROWS_AS(fit_qme({col}, SystemParams::reference(), {"bogus"}),
                  FitError);
  CHECK_THROWS_AS(fit_qme({}, SystemParams::reference(), {"g_tw"}), FitError);
}

TEST_CASE("power-law fit is exact on noiseless data") {
  std::vector<double> power, intensity;
  for (double pn : {0.2, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    power.push_back(pn);
    intensity.push_back(3.7 * std::pow(pn, 1.5));
  }
  const FitResult r = fit_power_law(power, intensity);
  CHECK(r.estimates[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(r.estimates[1] == doctest::Approx(3.7).epsilon(1e-12));
  CHECK(r.uncertainties[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
  CHECK(r.converged);
}

TEST_CASE("power-law fit reports sane errors under noise") {
  std::mt19937 rng(3);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<double> power, intensity;
  for (int i = 0; i < 25; ++i) {
    const double pn = std::pow(10.0, -1.0 + 2.0 * i / 24.0);
    power.push_back(pn);
    intensity.push_back(2.0 * std::pow(pn, 1.5) * std::exp(noise(rng)));
  }
  const FitResult r = fit_power_law(power, intensity);
  CHECK(r.estimates[0] == doctest::Approx(1.5).epsilon(0.05));
  CHECK(r.uncertainties[0] > 0.0);
  CHECK(r.uncertainties[0] < 0.1);
  CHECK_THROWS_AS(fit_power_law({1.0, 2.0}, {1.0, 2.0}), std::domain_error);
  CHECK_THROWS_AS(fit_power_law({1.0, -2.0, 3.0}, {1.0, 2.0, 3.0}),
                  std::domain_error);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cqed/calib.hpp"
#include "cqed/constants.hpp"
#include "cqed/experiments.hpp"

using namespace cqed;

TEST_CASE("linear tuning schedule is centred and uniform") {
  const TuningSchedule s = TuningSchedule::linear(2.0, 5, -3.0);
  REQUIRE(s.dl_ca_pm.size() == 5);
  CHECK(s.dl_ca_pm.front() == doctest::Approx(-7.0));
  CHECK(s.dl_ca_pm.back() == doctest::Approx(1.0));
  CHECK(s.dl_ca_pm[2] == doctest::Approx(-3.0));
  for (std::size_t i = 1; i < 5; ++i)
    CHECK(s.dl_ca_pm[i] - s.dl_ca_pm[i - 1] == doctest::Approx(2.0));
  CHECK_THROWS_AS(TuningSchedule::linear(1.0, 0), std::domain_error);
}

TEST_CASE("quadratic tuning schedule evaluates the polynomial") {
  const TuningSchedule s = TuningSchedule::quadratic(1.0, 0.5, 0.25, 4);
  REQUIRE(s.dl_ca_pm.size() == 4);
  for (int k = 0; k < 4; ++k)
    CHECK(s.dl_ca_pm[std::size_t(k)] ==
          doctest::Approx(1.0 + 0.5 * k + 0.25 * k * k));
}

TEST_CASE("anticrossing scan collects one column per schedule step") {
  SystemParams p = SystemParams::reference();
  const TuningSchedule sched = TuningSchedule::linear(8.0, 3, -11.0);
  std::vector<double> grid;
  for (int i = 0; i < 81; ++i) grid.push_back(-30.0 + 0.5 * i);
  const AnticrossingMap map = anticrossing_scan(p, sched, grid);
  REQUIRE(map.columns.size() == 3);
  REQUIRE(map.branch_peaks.size() == 3);
  CHECK(map.dl_ca_pm == sched.dl_ca_pm);
  CHECK_FALSE(map.weak_drive_warning);
  for (const Spectrum& col : map.columns) {
    REQUIRE(col.size() == grid.size());
    for (double t : col.transmission) {
      CHECK(t >= 0.0);
      CHECK(t <= 1.0 + 1e-9);
    }
  }
  // Every column shows at least one dip; near the edges of the scan the
  // exciton-free doublet is resolved into two.
  std::size_t max_dips = 0;
  for (const PeakSet& dips : map.branch_peaks) {
    CHECK(dips.size() >= 1);
    max_dips = std::max(max_dips, dips.size());
  }
  CHECK(max_dips >= 2);
}

TEST_CASE("weak-drive warning trips above the linear-response regime") {
  SystemParams p = SystemParams::reference();
  const TuningSchedule sched = TuningSchedule::linear(1.0, 1, 0.0);
  std::vector<double> grid;
  for (int i = 0; i < 11; ++i) grid.push_back(-5.0 + 1.0 * i);
  const AnticrossingMap map = anticrossing_scan(p, sched, grid, 0.2, 4);
  CHECK(map.weak_drive_warning);
}

TEST_CASE("power sweep of the empty cavity is drive-independent") {
  // With no emitter the model is linear: splitting and contrast cannot
  // change with power, and the dropped power grows linearly.
  SystemParams p = SystemParams::reference();
  p.g_tw = 0.0;
  std::vector<double> grid;
  for (int i = 0; i < 121; ++i) grid.push_back(-30.0 + 0.5 * i);
  const std::vector<double> drives = {1e-4, 1e-3, 1e-2};
  const SaturationCurve c = power_sweep(p, drives, 0.0, grid, 3);
  REQUIRE(c.n_cav.size() == 3);
  for (std::size_t i = 1; i < 3; ++i) {
    CHECK(c.splitting_pm[i] == doctest::Approx(c.splitting_pm[0]).epsilon(1e-5));
    CHECK(c.contrast[i] == doctest::Approx(c.contrast[0]).epsilon(1e-5));
    CHECK(c.peak_reflection[i] ==
          doctest::Approx(c.peak_reflection[0]).epsilon(1e-5));
  }
  CHECK(c.p_d_w[1] / c.p_d_w[0] == doctest::Approx(10.0).epsilon(1e-4));
  // Default contrast reference sits on the long-wavelength bare dip.
  const double kt = p.kappa_t();
  const double off = std::sqrt(p.gamma_beta * p.gamma_beta - kt * kt);
  const double expect_pm = detuning_frequency_to_wavelength(
                               off / consts::two_pi, p.lambda0_m) /
                           consts::pm;
  CHECK(c.reference_pm == doctest::Approx(expect_pm).epsilon(1e-10));
}

TEST_CASE("power sweep rejects non-increasing drive lists") {
  SystemParams p = SystemParams::reference();
  std::vector<double> grid;
  for (int i = 0; i < 11; ++i) grid.push_back(-5.0 + 1.0 * i);
  CHECK_THROWS_AS(power_sweep(p, {0.1, 0.1}, 0.0, grid, 2), std::domain_error);
  CHECK_THROWS_AS(power_sweep(p, {0.2, 0.1}, 0.0, grid, 2), std::domain_error);
}

TEST_CASE("min-max rescaling") {
  const std::vector<double> v = {2.0, 4.0, 3.0};
  const auto r = minmax_rescale(v);
  CHECK(r[0] == doctest::Approx(0.0));
  CHECK(r[1] == doctest::Approx(1.0));
  CHECK(r[2] == doctest::Approx(0.5));
  CHECK_THROWS_AS(minmax_rescale({1.0, 1.0}), std::domain_error);
}

TEST_CASE("saturation comparison recovers the half-saturation ratio") {
  // f(n) = n / (n + n0) has its min-max-rescaled half-crossing near n0 when
  // the sampled range covers the full transition.
  auto curve = [](double n0, std::vector<double>& n, std::vector<double>& f) {
    for (int i = 0; i <= 60; ++i) {
      const double x = std::pow(10.0, -4.0 + 6.0 * i / 60.0);
      n.push_back(x);
      f.push_back(x / (x + n0));
    }
  };
  std::vector<double> na, fa, nb, fb;
  curve(0.1, na, fa);
  curve(1.0, nb, fb);
  const SaturationComparison cmp = compare_saturation_curves(na, fa, nb, fb);
  CHECK(cmp.half_saturation_a == doctest::Approx(0.1).epsilon(0.05));
  CHECK(cmp.half_saturation_b == doctest::Approx(1.0).epsilon(0.05));
  CHECK(cmp.ratio == doctest::Approx(10.0).epsilon(0.05));
  CHECK_THROWS_AS(compare_saturation_curves({1.0}, {1.0}, na, fb),
                  std::domain_error);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cqed/calib.hpp"
#include "cqed/constants.hpp"

using namespace cqed;

namespace {

CalibInput example_input() {
  CalibInput in;
  in.input_power_w = 1e-9;
  in.taper_transmission = 0.49;
  in.contrast = 0.6;
  in.loaded_q = 1e5;
  in.wavelength_m = 1300e-9;
  in.regime = CouplingRegime::undercoupled;
  in.detuning_rads = 0.0;
  return in;
}

}  // namespace

TEST_CASE("kappa_from_q reproduces the half-linewidth convention") {
  // kappa_T = omega0 / (2 Q_T), quoted as kappa/2pi in GHz.
  CHECK(consts::rads_to_ghz(kappa_from_q(2.1e4, 1297.5e-9)) ==
        doctest::Approx(5.5013).epsilon(1e-4));
  CHECK(consts::rads_to_ghz(kappa_from_q(1e5, 1300e-9)) ==
        doctest::Approx(1.15305).epsilon(1e-5));
}

TEST_CASE("q_from_kappa inverts kappa_from_q") {
  for (double q : {1e4, 2.1e4, 1e5, 3.3e5}) {
    const double k = kappa_from_q(q, 1297.5e-9);
    CHECK(q_from_kappa(k, 1297.5e-9) == doctest::Approx(q).epsilon(1e-13));
  }
  CHECK_THROWS_AS(kappa_from_q(0.0, 1300e-9), std::domain_error);
  CHECK_THROWS_AS(kappa_from_q(1e5, -1.0), std::domain_error);
}

TEST_CASE("intrinsic Q from contrast, both branches") {
  // Q_{i+P} = 2 Q_T / (1 +- sqrt(1 - dT)).
  const double qt = 1e5;
  CHECK(q_intrinsic_from_contrast(qt, 0.5, CouplingRegime::undercoupled) ==
        doctest::Approx(2.0 * qt / (1.0 + std::sqrt(0.5))).epsilon(1e-13));
  CHECK(q_intrinsic_from_contrast(qt, 0.5, CouplingRegime::undercoupled) / qt ==
        doctest::Approx(1.171573).epsilon(1e-6));
  // Critical coupling: both branches coincide at dT = 1.
  CHECK(q_intrinsic_from_contrast(qt, 1.0, CouplingRegime::undercoupled) ==
        doctest::Approx(2.0 * qt).epsilon(1e-13));
  CHECK(q_intrinsic_from_contrast(qt, 1.0, CouplingRegime::overcoupled) ==
        doctest::Approx(2.0 * qt).epsilon(1e-13));
  // Deeply overcoupled limit diverges.
  CHECK(std::isinf(
      q_intrinsic_from_contrast(qt, 0.0, CouplingRegime::overcoupled)));
  // Loaded Q never exceeds the unloaded one.
  for (double dt : {0.05, 0.3, 0.7, 0.99}) {
    CHECK(q_intrinsic_from_contrast(qt, dt, CouplingRegime::undercoupled) >= qt);
    CHECK(q_intrinsic_from_contrast(qt, dt, CouplingRegime::overcoupled) >= qt);
  }
  CHECK_THROWS_AS(q_intrinsic_from_contrast(qt, 1.5, CouplingRegime::undercoupled),
                  std::domain_error);
}

TEST_CASE("coupling parameter") {
  CHECK(coupling_parameter(0.17, 1.27) == doctest::Approx(0.133858).epsilon(1e-5));
  CHECK_THROWS_AS(coupling_parameter(0.17, 0.0), std::domain_error);
}

TEST_CASE("wavelength <-> frequency detuning conversion") {
  // dnu = c dlambda / lambda0^2.
  CHECK(detuning_wavelength_to_frequency(37e-12, 1297.5e-9) / 1e9 ==
        doctest::Approx(6.5888).epsilon(1e-4));
  CHECK(detuning_wavelength_to_frequency(12e-12, 1300e-9) / 1e9 ==
        doctest::Approx(2.1287).epsilon(1e-4));
  // Linear and odd in dlambda; inverse round-trips.
  const double d1 = detuning_wavelength_to_frequency(5e-12, 1300e-9);
  CHECK(detuning_wavelength_to_frequency(-5e-12, 1300e-9) ==
        doctest::Approx(-d1).epsilon(1e-14));
  CHECK(detuning_frequency_to_wavelength(d1, 1300e-9) ==
        doctest::Approx(5e-12).epsilon(1e-14));
}

TEST_CASE("intracavity photon number: worked example") {
  const CalibResult r = intracavity_photon_number(example_input());
  // n = 2 sqrt(zeta) dT P Q_T / ((1 + sqrt(1 - dT)) hbar omega0 omega0),
  // with hbar omega0 = 1.52804e-19 J at 1300 nm.
  const double omega0 = consts::two_pi * consts::c_light / 1300e-9;
  CHECK(consts::hbar * omega0 == doctest::Approx(1.52804e-19).epsilon(1e-5));
  CHECK(r.photon_number == doctest::Approx(0.23240).epsilon(1e-4));
  CHECK(r.cavity_energy_j ==
        doctest::Approx(r.photon_number * consts::hbar * omega0).epsilon(1e-13));
  CHECK(r.intrinsic_q ==
        doctest::Approx(q_intrinsic_from_contrast(1e5, 0.6,
                                                  CouplingRegime::undercoupled))
            .epsilon(1e-13));
  CHECK_FALSE(r.singular);
  CHECK(r.photon_number >= 0.0);
}

TEST_CASE("intracavity photon number: trivial and limiting cases") {
  CalibInput in = example_input();
  in.contrast = 0.0;
  CHECK(intracavity_photon_number(in).photon_number == doctest::Approx(0.0));

  // Off resonance the stored energy follows a Lorentzian of HWHM kappa_T.
  CalibInput off = example_input();
  const double kt = kappa_from_q(off.loaded_q, off.wavelength_m);
  off.detuning_rads = kt;
  const double on = intracavity_photon_number(example_input()).photon_number;
  CHECK(intracavity_photon_number(off).photon_number ==
        doctest::Approx(0.5 * on).epsilon(1e-12));
  off.detuning_rads = -kt;  // even in detuning
  CHECK(intracavity_photon_number(off).photon_number ==
        doctest::Approx(0.5 * on).epsilon(1e-12));
}

TEST_CASE("photon number monotonicity in P, dT (undercoupled) and Q") {
  const double base = intracavity_photon_number(example_input()).photon_number;
  CalibInput in = example_input();
  in.input_power_w *= 2.0;
  CHECK(intracavity_photon_number(in).photon_number ==
        doctest::Approx(2.0 * base).epsilon(1e-12));  // linear in power
  in = example_input();
  in.contrast = 0.7;
  CHECK(intracavity_photon_number(in).photon_number > base);
  in = example_input();
  in.loaded_q = 1.5e5;
  CHECK(intracavity_photon_number(in).photon_number > base);
}

TEST_CASE("uncertainty propagation: quadrature of power-path entries") {
  // Power-path sensitivities are exactly 1 (n is linear in P_in), so a
  // power-only budget reduces to plain quadrature of its entries.
  UncertaintyBudget b = UncertaintyBudget::zero();
  b.laser_power = 0.03;
  b.taper_symmetry = 0.05;
  b.fiber_unions = 0.075;
  const double expected = std::sqrt(0.03 * 0.03 + 0.05 * 0.05 + 0.075 * 0.075);
  CHECK(propagate_ncav_uncertainty(example_input(), b) ==
        doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("uncertainty propagation: full default budget at dT = 0.6") {
  const UncertaintyBudget b{};  // defaults: 3/5/7.5/1/2.5/2 percent
  const double sigma = propagate_ncav_uncertainty(example_input(), b);
  // Analytic sensitivities on the undercoupled branch at resonance:
  //   d ln n / d ln P = 1 (all four power paths),
  //   d ln n / d ln dT = 1 + dT / (2 sqrt(1-dT) (1 + sqrt(1-dT))),
  //   d ln n / d ln Q_T = 1.
  const double dt = 0.6;
  const double s_dt =
      1.0 + dt / (2.0 * std::sqrt(1.0 - dt) * (1.0 + std::sqrt(1.0 - dt)));
  CHECK(s_dt == doctest::Approx(1.290569).epsilon(1e-4));
  const double expected = std::sqrt(
      0.03 * 0.03 + 0.05 * 0.05 + 0.075 * 0.075 + 0.025 * 0.025 +
      (0.01 * s_dt) * (0.01 * s_dt) + 0.02 * 0.02);
  CHECK(sigma == doctest::Approx(expected).epsilon(1e-4));
  CHECK(sigma == doctest::Approx(0.1010770).epsilon(1e-4));
}

TEST_CASE("uncertainty propagation: zero budget gives zero") {
  CHECK(propagate_ncav_uncertainty(example_input(), UncertaintyBudget::zero()) ==
        doctest::Approx(0.0));
}

TEST_CASE("uncertainty propagation: equal-sensitivity entries commute") {
  // The four power-path entries all act on P_in, so permuting their values
  // leaves the combined uncertainty unchanged.
  UncertaintyBudget a = UncertaintyBudget::zero();
  a.laser_power = 0.03;
  a.taper_symmetry = 0.05;
  a.fiber_unions = 0.075;
  a.polarization = 0.025;
  UncertaintyBudget p = UncertaintyBudget::zero();
  p.laser_power = 0.075;
  p.taper_symmetry = 0.025;
  p.fiber_unions = 0.03;
  p.polarization = 0.05;
  CHECK(propagate_ncav_uncertainty(example_input(), a) ==
        doctest::Approx(propagate_ncav_uncertainty(example_input(), p))
            .epsilon(1e-12));
}

TEST_CASE("calibration input validation") {
  CalibInput in = example_input();
  in.input_power_w = -1.0;
  CHECK_THROWS_AS(intracavity_photon_number(in), std::domain_error);
  in = example_input();
  in.loaded_q = 0.0;
  CHECK_THROWS_AS(intracavity_photon_number(in), std::domain_error);
  in = example_input();
  in.contrast = 1.2;
  CHECK_THROWS_AS(intracavity_photon_number(in), std::domain_error);
  in = example_input();
  in.taper_transmission = 1.5;
  CHECK_THROWS_AS(intracavity_photon_number(in), std::domain_error);
}

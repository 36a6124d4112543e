#include "cqed/calib.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cqed/constants.hpp"

namespace cqed {

namespace {

double branch_sign(CouplingRegime regime) {
  return regime == CouplingRegime::undercoupled ? 1.0 : -1.0;
}

}  // namespace

void CalibInput::validate() const {
  if (taper_transmission < 0.0 || taper_transmission > 1.0)
    throw std::domain_error("taper transmission must lie in [0, 1]");
  if (contrast < 0.0 || contrast > 1.0)
    throw std::domain_error("contrast must lie in [0, 1]");
  if (loaded_q <= 0.0) throw std::domain_error("loaded Q must be positive");
  if (input_power_w < 0.0) throw std::domain_error("input power must be >= 0");
  if (wavelength_m <= 0.0) throw std::domain_error("wavelength must be positive");
}

double kappa_from_q(double loaded_q, double wavelength_m) {
  if (loaded_q <= 0.0 || wavelength_m <= 0.0)
    throw std::domain_error("kappa_from_q requires positive Q and wavelength");
  const double omega0 = consts::two_pi * consts::c_light / wavelength_m;
  return omega0 / (2.0 * loaded_q);
}

double q_from_kappa(double kappa_rads, double wavelength_m) {
  if (kappa_rads <= 0.0 || wavelength_m <= 0.0)
    throw std::domain_error("q_from_kappa requires positive kappa and wavelength");
  const double omega0 = consts::two_pi * consts::c_light / wavelength_m;
  return omega0 / (2.0 * kappa_rads);
}

double q_intrinsic_from_contrast(double loaded_q, double contrast,
                                 CouplingRegime regime) {
  if (contrast < 0.0 || contrast > 1.0)
    throw std::domain_error("contrast must lie in [0, 1]");
  if (loaded_q <= 0.0) throw std::domain_error("loaded Q must be positive");
  const double denom = 1.0 + branch_sign(regime) * std::sqrt(1.0 - contrast);
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * loaded_q / denom;
}

double coupling_parameter(double kappa_e, double kappa_ip) {
  if (kappa_ip <= 0.0)
    throw std::domain_error("coupling_parameter requires kappa_{i+P} > 0");
  return kappa_e / kappa_ip;
}

double detuning_wavelength_to_frequency(double dlambda_m, double wavelength_m) {
  if (wavelength_m <= 0.0) throw std::domain_error("wavelength must be positive");
  return consts::c_light * dlambda_m / (wavelength_m * wavelength_m);
}

double detuning_frequency_to_wavelength(double dnu_hz, double wavelength_m) {
  if (wavelength_m <= 0.0) throw std::domain_error("wavelength must be positive");
  return dnu_hz * wavelength_m * wavelength_m / consts::c_light;
}

CalibResult intracavity_photon_number(const CalibInput& in) {
  in.validate();
  CalibResult out;

  const double omega0 = consts::two_pi * consts::c_light / in.wavelength_m;
  const double denom = 1.0 + branch_sign(in.regime) * std::sqrt(1.0 - in.contrast);
  if (denom == 0.0) {
    // Overcoupled with dT = 0: Q_{i+P} diverges, the inversion is singular.
    out.singular = true;
    out.intrinsic_q = std::numeric_limits<double>::infinity();
    return out;
  }

  const double kappa_t = omega0 / (2.0 * in.loaded_q);
  const double lorentz =
      1.0 / (1.0 + (in.detuning_rads / kappa_t) * (in.detuning_rads / kappa_t));
  const double n_res = 2.0 * std::sqrt(in.taper_transmission) * in.contrast *
                       in.input_power_w * in.loaded_q /
                       (denom * consts::hbar * omega0 * omega0);

  out.photon_number = n_res * lorentz;
  out.cavity_energy_j = out.photon_number * consts::hbar * omega0;
  out.intrinsic_q = 2.0 * in.loaded_q / denom;

  // kappa_e follows from the two Q's: kappa_T = kappa_{i+P} + 2 kappa_e.
  const double kappa_ip = omega0 / (2.0 * out.intrinsic_q);
  const double kappa_e = 0.5 * (kappa_t - kappa_ip);
  out.coupling_parameter = kappa_ip > 0.0 ? kappa_e / kappa_ip : 0.0;
  return out;
}

double propagate_ncav_uncertainty(const CalibInput& in,
                                  const UncertaintyBudget& budget) {
  in.validate();

  // Relative sensitivity of n_cav to a relative perturbation of one input,
  // by central finite differences.
  auto sensitivity = [&](auto mutate) {
    const double h = 1e-6;
    CalibInput up = in, dn = in;
    mutate(up, 1.0 + h);
    mutate(dn, 1.0 - h);
    const double n_up = intracavity_photon_number(up).photon_number;
    const double n_dn = intracavity_photon_number(dn).photon_number;
    const double n0 = intracavity_photon_number(in).photon_number;
    if (n0 == 0.0) return 0.0;
    return (n_up - n_dn) / (2.0 * h * n0);
  };

  auto on_power = [](CalibInput& c, double f) { c.input_power_w *= f; };
  auto on_contrast = [](CalibInput& c, double f) { c.contrast *= f; };
  auto on_q = [](CalibInput& c, double f) { c.loaded_q *= f; };

  const double s_power = sensitivity(on_power);
  const double s_contrast = sensitivity(on_contrast);
  const double s_q = sensitivity(on_q);

  // The four power-path entries all perturb the power reaching the disk.
  const std::array<double, 6> terms = {
      budget.laser_power * s_power,   budget.taper_symmetry * s_power,
      budget.fiber_unions * s_power,  budget.polarization * s_power,
      budget.contrast_noise * s_contrast, budget.linewidth * s_q};

  double sq = 0.0;
  for (double t : terms) sq += t * t;
  return std::sqrt(sq);
}

}  // namespace cqed

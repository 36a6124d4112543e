#pragma once

#include <array>
#include <string>

namespace cqed {

enum class CouplingRegime { undercoupled, overcoupled };

// Measured quantities entering the photon-number calibration.
struct CalibInput {
  double input_power_w = 0.0;       // P_in at the taper input
  double taper_transmission = 1.0;  // zeta, off-resonance taper throughput
  double contrast = 0.0;            // dT, on-resonance transmission contrast
  double loaded_q = 0.0;            // Q_T
  double wavelength_m = 0.0;        // lambda0
  CouplingRegime regime = CouplingRegime::undercoupled;
  double detuning_rads = 0.0;       // laser-cavity detuning (rad/s)

  void validate() const;  // throws std::domain_error on invariant violation
};

struct CalibResult {
  double cavity_energy_j = 0.0;      // U
  double photon_number = 0.0;        // n_cav
  double intrinsic_q = 0.0;          // Q_{i+P}
  double coupling_parameter = 0.0;   // K = kappa_e / kappa_{i+P}
  double relative_uncertainty = 0.0; // sigma_rel, filled by the propagation op
  bool singular = false;             // overcoupled with dT = 0
};

// Sweep-to-sweep relative uncertainties of the calibration inputs.
struct UncertaintyBudget {
  double laser_power = 0.03;
  double taper_symmetry = 0.05;
  double fiber_unions = 0.075;
  double contrast_noise = 0.01;
  double polarization = 0.025;
  double linewidth = 0.02;

  static UncertaintyBudget zero() { return {0, 0, 0, 0, 0, 0}; }
};

// Q <-> kappa with the half-linewidth (amplitude decay) convention
// kappa_T = omega0 / (2 Q_T).  Rates in rad/s.
double kappa_from_q(double loaded_q, double wavelength_m);
double q_from_kappa(double kappa_rads, double wavelength_m);

// Q_{i+P} = 2 Q_T / (1 +- sqrt(1 - dT)); + undercoupled, - overcoupled.
// Returns +inf for the overcoupled branch at dT = 0.
double q_intrinsic_from_contrast(double loaded_q, double contrast,
                                 CouplingRegime regime);

double coupling_parameter(double kappa_e, double kappa_ip);

// Linear small-detuning conversion dnu = c * dlambda / lambda0^2 (Hz).
double detuning_wavelength_to_frequency(double dlambda_m, double wavelength_m);
double detuning_frequency_to_wavelength(double dnu_hz, double wavelength_m);

// n_cav from the measured quantities; off resonance the stored energy is
// scaled by 1 / (1 + (Delta/kappa_T)^2) so the lineshape FWHM matches the
// transmission linewidth 2 kappa_T.
CalibResult intracavity_photon_number(const CalibInput& in);

// First-order sensitivity propagation: each budget entry perturbs the input
// it describes (the four power-path entries act on P_in, contrast_noise on
// dT, linewidth on Q_T), sensitivities by central finite differences on
// ln n_cav, combined in quadrature.
double propagate_ncav_uncertainty(const CalibInput& in,
                                  const UncertaintyBudget& budget);

}  // namespace cqed

#pragma once

#include <utility>
#include <vector>

#include "cqed/operators.hpp"

namespace cqed {

// All Table-style model rates.  Every rate is an angular-frequency
// half-linewidth (amplitude decay) quantity in rad/s; lengths in metres.
struct SystemParams {
  double kappa_e = 0.0;     // per-direction waveguide coupling
  double kappa_i = 0.0;     // intrinsic + parasitic loss
  double gamma_beta = 0.0;  // |gamma_beta|, cw<->ccw backscattering magnitude
  double xi = 0.0;          // backscattering <-> exciton relative phase (rad)
  double g_tw = 0.0;        // travelling-wave exciton-mode coupling
  double gamma_par = 0.0;   // exciton energy decay gamma_parallel
  double gamma_p = 0.0;     // pure dephasing
  double lambda0_m = 0.0;   // reference resonance wavelength
  double dl_ca_m = 0.0;     // cavity-exciton wavelength detuning, lambda_c - lambda_a
  double dl_la_m = 0.0;     // laser-exciton wavelength detuning, lambda_l - lambda_a

  double kappa_t() const { return kappa_i + 2.0 * kappa_e; }
  double gamma_perp() const { return 0.5 * gamma_par + gamma_p; }

  void validate() const;  // throws std::domain_error

  // The values used throughout the test suite (a strongly backscattering
  // disk with one resonant neutral exciton).
  static SystemParams reference();
};

// |g_sw1,2| = g_tw |1 +- e^{i xi}| / sqrt(2)
std::pair<double, double> standing_wave_couplings(double g_tw, double xi);

// Detunings entering the rotating-frame Hamiltonian, laser-minus-mode:
//   delta_c = omega_l - omega_c,  delta_a = omega_l - omega_a,
// from the wavelength detunings via the linear conversion at lambda0.
double delta_c(const SystemParams& p);
double delta_a(const SystemParams& p);

// Drive definition: power in the coupling region and the laser wavelength.
// The coherent amplitude obeys E = 2 sqrt(kappa_e) s with |s|^2 the photon
// flux, which ties the driven QME to the measured-quantity calibration.
struct DriveSpec {
  double p_wg_w = 0.0;      // sqrt(zeta) * P_in
  double lambda_l_m = 0.0;  // laser wavelength

  double photon_flux() const;                      // |s|^2 (1/s)
  double amplitude_s() const;                      // s, taken real >= 0
  double drive_e(double kappa_e) const;            // E = 2 sqrt(kappa_e) s

  // Drive whose on-resonance empty-cavity photon number equals n_cav:
  // n = 4 kappa_e |s|^2 / kappa_T^2  =>  E = kappa_T sqrt(n_cav).
  static DriveSpec from_photon_number(const SystemParams& p, double n_cav);
  static DriveSpec from_flux(double flux, double lambda_l_m);
};

// Exciton-field coupling estimate for a mode of volume v_m3:
//   g = eta * sqrt(3 c lambda0^2 / (8 pi n^3 tau_sp v)).
struct CouplingEstimate {
  double tau_sp_s = 1e-9;
  double host_index = 3.4;
  double mode_volume_m3 = 0.0;
  double dipole_factor = 1.0;  // eta
  double g_rads = 0.0;
};
double coupling_estimate(double lambda0_m, double host_index, double tau_sp_s,
                         double mode_volume_m3, double eta);
// v = factor * (lambda/n)^3 helper for the standing/travelling volumes.
double mode_volume(double lambda0_m, double host_index, double factor);

// Rotating frame at the laser:
//   H = delta_c (n_cw + n_ccw) + delta_a sigma^+ sigma
//       + |gamma_beta| (e^{i xi} a_cw^+ a_ccw + h.c.)
//       + g_tw (a_cw^+ sigma + a_ccw^+ sigma + h.c.)
//       + i (E a_cw^+ - E^* a_cw)
SpMat build_hamiltonian(const SystemParams& p, cd drive_e,
                        const HilbertLayout& layout);

// {sqrt(2 kappa_T) a_cw, sqrt(2 kappa_T) a_ccw, sqrt(gamma_par) sigma,
//  sqrt(2 gamma_p) sigma^+ sigma}
std::vector<SpMat> build_collapse_ops(const SystemParams& p,
                                      const HilbertLayout& layout);

}  // namespace cqed

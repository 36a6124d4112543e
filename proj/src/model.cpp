#include "cqed/model.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "cqed/calib.hpp"
#include "cqed/constants.hpp"

namespace cqed {

void SystemParams::validate() const {
  if (kappa_e < 0 || kappa_i < 0 || gamma_beta < 0 || g_tw < 0 ||
      gamma_par < 0 || gamma_p < 0)
    throw std::domain_error("all rates must be non-negative");
  if (lambda0_m <= 0) throw std::domain_error("lambda0 must be positive");
}

SystemParams SystemParams::reference() {
  SystemParams p;
  p.kappa_e = consts::ghz_to_rads(0.17);
  p.kappa_i = consts::ghz_to_rads(1.27);
  p.gamma_beta = consts::ghz_to_rads(1.99);
  p.xi = 0.25 * consts::pi;
  p.g_tw = consts::ghz_to_rads(2.24);
  p.gamma_par = consts::ghz_to_rads(0.55);
  p.gamma_p = consts::ghz_to_rads(0.89);
  p.lambda0_m = 1300e-9;
  p.dl_ca_m = 0.0;
  p.dl_la_m = 0.0;
  return p;
}

std::pair<double, double> standing_wave_couplings(double g_tw, double xi) {
  if (g_tw < 0) throw std::domain_error("g_tw must be non-negative");
  const double s1 = std::abs(cd(1.0) + std::exp(cd(0, xi))) / std::sqrt(2.0);
  const double s2 = std::abs(cd(1.0) - std::exp(cd(0, xi))) / std::sqrt(2.0);
  return {g_tw * s1, g_tw * s2};
}

double delta_c(const SystemParams& p) {
  // omega_l - omega_c = (2 pi c / lambda0^2) (lambda_c - lambda_l)
  return consts::two_pi *
         detuning_wavelength_to_frequency(p.dl_ca_m - p.dl_la_m, p.lambda0_m);
}

double delta_a(const SystemParams& p) {
  return consts::two_pi *
         detuning_wavelength_to_frequency(-p.dl_la_m, p.lambda0_m);
}

double DriveSpec::photon_flux() const {
  if (lambda_l_m <= 0) throw std::domain_error("laser wavelength must be positive");
  const double omega = consts::two_pi * consts::c_light / lambda_l_m;
  return p_wg_w / (consts::hbar * omega);
}

double DriveSpec::amplitude_s() const { return std::sqrt(photon_flux()); }

double DriveSpec::drive_e(double kappa_e) const {
  return 2.0 * std::sqrt(kappa_e) * amplitude_s();
}

DriveSpec DriveSpec::from_photon_number(const SystemParams& p, double n_cav) {
  if (n_cav < 0) throw std::domain_error("photon number must be >= 0");
  const double kt = p.kappa_t();
  const double s = kt * std::sqrt(n_cav) / (2.0 * std::sqrt(p.kappa_e));
  const double lambda_l = p.lambda0_m + p.dl_la_m;
  const double omega = consts::two_pi * consts::c_light / lambda_l;
  DriveSpec d;
  d.lambda_l_m = lambda_l;
  d.p_wg_w = s * s * consts::hbar * omega;
  return d;
}

DriveSpec DriveSpec::from_flux(double flux, double lambda_l_m) {
  DriveSpec d;
  d.lambda_l_m = lambda_l_m;
  const double omega = consts::two_pi * consts::c_light / lambda_l_m;
  d.p_wg_w = flux * consts::hbar * omega;
  return d;
}

double mode_volume(double lambda0_m, double host_index, double factor) {
  const double unit = lambda0_m / host_index;
  return factor * unit * unit * unit;
}

double coupling_estimate(double lambda0_m, double host_index, double tau_sp_s,
                         double mode_volume_m3, double eta) {
  if (lambda0_m <= 0 || host_index <= 0 || tau_sp_s <= 0 || mode_volume_m3 <= 0)
    throw std::domain_error("coupling_estimate requires positive inputs");
  if (eta < 0 || eta > 1) throw std::domain_error("eta must lie in [0, 1]");
  const double n3 = host_index * host_index * host_index;
  return eta * std::sqrt(3.0 * consts::c_light * lambda0_m * lambda0_m /
                         (8.0 * consts::pi * n3 * tau_sp_s * mode_volume_m3));
}

SpMat build_hamiltonian(const SystemParams& p, cd drive_e,
                        const HilbertLayout& layout) {
  p.validate();
  const SpMat a = annihilation(layout.fock_cutoff);
  const SpMat n = number_op(layout.fock_cutoff);
  const SpMat acw = embed(a, Slot::mode_cw, layout);
  const SpMat accw = embed(a, Slot::mode_ccw, layout);
  const SpMat ncw = embed(n, Slot::mode_cw, layout);
  const SpMat nccw = embed(n, Slot::mode_ccw, layout);
  const SpMat sig = embed(lowering_sigma(), Slot::emitter, layout);
  const SpMat sig_dag = SpMat(sig.adjoint());

  const cd dc(delta_c(p)), da(delta_a(p));
  const cd phase = std::exp(cd(0, p.xi));

  SpMat h = (dc * (ncw + nccw)).eval();
  h += (da * (sig_dag * sig)).eval();

  SpMat back = (p.gamma_beta * phase * (SpMat(acw.adjoint()) * accw)).eval();
  h += back;
  h += SpMat(back.adjoint());

  SpMat jc = (cd(p.g_tw) * (SpMat(acw.adjoint()) * sig +
                            SpMat(accw.adjoint()) * sig)).eval();
  h += jc;
  h += SpMat(jc.adjoint());

  SpMat drive = (cd(0, 1) * drive_e * SpMat(acw.adjoint())).eval();
  h += drive;
  h += SpMat(drive.adjoint());

  h.makeCompressed();
  return h;
}

std::vector<SpMat> build_collapse_ops(const SystemParams& p,
                                      const HilbertLayout& layout) {
  p.validate();
  const double kt = p.kappa_t();
  std::vector<SpMat> ops;
  ops.push_back((std::sqrt(2.0 * kt) *
                 embed(annihilation(layout.fock_cutoff), Slot::mode_cw, layout))
                    .eval());
  ops.push_back((std::sqrt(2.0 * kt) *
                 embed(annihilation(layout.fock_cutoff), Slot::mode_ccw, layout))
                    .eval());
  const SpMat sig = embed(lowering_sigma(), Slot::emitter, layout);
  ops.push_back((std::sqrt(p.gamma_par) * sig).eval());
  ops.push_back((std::sqrt(2.0 * p.gamma_p) * SpMat(SpMat(sig.adjoint()) * sig)).eval());
  return ops;
}

}  // namespace cqed

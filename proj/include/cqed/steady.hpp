#pragma once

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <optional>
#include <vector>

#include "cqed/model.hpp"
#include "cqed/operators.hpp"

namespace cqed {

struct SteadyState {
  Eigen::MatrixXcd rho;
  double residual = 0.0;     // || A x - b || of the kappa_T-scaled system
  double trace_error = 0.0;  // | tr rho - 1 |
  double min_eigenvalue = 0.0;
  double top_fock_population = 0.0;  // population with either mode at the cutoff
  bool truncation_flagged = false;   // top-Fock population > 1e-4
  int iterations = 0;
};

struct PointObservables {
  double transmission = 0.0;
  double reflection = 0.0;
  double n_cw = 0.0;
  double n_ccw = 0.0;
  double exciton_population = 0.0;
  double n_cav() const { return n_cw + n_ccw; }
};

struct Spectrum {
  std::vector<double> dl_la_pm;     // laser-exciton wavelength detuning (pm)
  std::vector<double> delta_omega;  // omega_l - omega_a (rad/s)
  std::vector<double> transmission;
  std::vector<double> reflection;
  std::vector<double> n_cw;
  std::vector<double> n_ccw;
  std::vector<double> exciton_population;
  std::vector<double> n_cav;
  std::vector<int> truncation_flag;

  std::size_t size() const { return dl_la_pm.size(); }
  void append(double dl_pm, double domega, const PointObservables& obs,
              bool flagged);
};

// Steady state of the driven Lindblad model.  The Liouvillian is assembled
// once per (params, drive); laser-detuning changes only touch its diagonal.
// Solves the trace-normalized system (row 0 replaced by the trace
// constraint, whole system scaled by 1/kappa_T) with an incomplete-LU
// preconditioned BiCGSTAB, re-anchoring the factorization when the detuning
// drifts from the anchor, and warm-starting from the previous solution.
class SteadySolver {
 public:
  SteadySolver(const SystemParams& params, cd drive_e,
               const HilbertLayout& layout, double tol = 1e-10);

  SteadyState solve(double dl_la_m);  // throws SolverError on non-convergence

  PointObservables observables(const SteadyState& st, double amplitude_s) const;

  const HilbertLayout& layout() const { return layout_; }

 private:
  void refactor(double dl_la_m);
  void apply_detuning(double dl_la_m);
  SteadyState finish(const Eigen::VectorXcd& x, const Eigen::VectorXcd& b,
                     int its);

  SystemParams params_;
  HilbertLayout layout_;
  cd drive_e_;
  double tol_;
  int d_;

  SpMat a_sys_;                        // scaled, trace-row-replaced system
  Eigen::VectorXcd base_diag_;         // diagonal values at zero detuning
  std::vector<Eigen::Index> diag_pos_; // positions of (j, j) in the value array
  Eigen::VectorXd coeff_n_, coeff_s_;  // detuning coefficients per vec index

  SpMat n_cw_op_, n_ccw_op_, a_cw_op_, sz_op_;
  std::vector<int> top_fock_states_;

  bool dense_ = false;  // small systems solve by direct dense LU

  Eigen::IncompleteLUT<cd> precond_;
  bool have_factor_ = false;
  double anchor_m_ = 0.0;
  double reanchor_dist_m_;
  std::optional<Eigen::VectorXcd> warm_;
};

// Default 401-point grid (pm, laser-exciton detuning) spanning +-6 kappa_T
// around the midpoint between the cavity and exciton resonances.
std::vector<double> default_grid_pm(const SystemParams& params, int points = 401,
                                    double half_width_kappa = 6.0);

// Weak-driving limit: linear-response spectrum, computed from the Lindblad
// model at fock_cutoff 1 under a vanishingly small drive.  Unlike a purely
// coherent three-amplitude solve this retains the incoherently scattered
// (spontaneous-emission) part of the reflected signal.
Spectrum weak_drive_spectrum(const SystemParams& params,
                             const std::vector<double>& grid_pm,
                             double tol = 1e-10);

// Full nonlinear steady-state spectrum at the given drive.
Spectrum spectrum(const SystemParams& params, const DriveSpec& drive,
                  const std::vector<double>& grid_pm, int fock_cutoff = 8,
                  int threads = 1, double tol = 1e-10);

// Coherent three-amplitude response (<a_cw>, <a_ccw>, <sigma>) of the
// unsaturated emitter; used for closed-form oracles and initial guesses.
Eigen::Vector3cd weak_coherent_amplitudes(const SystemParams& params,
                                          double dl_la_m, cd drive_e);

// Empty-cavity (g_tw = 0) closed forms versus laser-cavity detuning (rad/s).
double bare_transmission(double delta, double kappa_t, double kappa_e,
                         double gamma_beta);
double bare_reflection(double delta, double kappa_t, double kappa_e,
                       double gamma_beta);

}  // namespace cqed

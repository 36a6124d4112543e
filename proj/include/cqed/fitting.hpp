#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "cqed/model.hpp"
#include "cqed/steady.hpp"

namespace cqed {

struct FitResult {
  std::vector<std::string> names;
  Eigen::VectorXd estimates;
  Eigen::VectorXd uncertainties;  // residual-bound brackets
  double rss = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;  // best objective value per accepted step
};

struct FitOptions {
  int restarts = 3;       // seeded simplex restarts
  unsigned seed = 0;
  int max_iter = 500;     // per restart
  double ftol = 1e-12;
  double weight_t = 1.0;  // transmission channel weight
  double weight_r = 1.0;  // reflection channel weight
};

struct SimplexResult {
  Eigen::VectorXd x;
  double fval = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

// Derivative-free Nelder-Mead with seeded random restarts; deterministic
// for a fixed seed.
SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& x0,
                          const Eigen::VectorXd& scales, int max_iter,
                          double ftol, int restarts, unsigned seed);

// Walk each parameter away from the optimum until the objective exceeds the
// noise-scaled residual level rss * (1 + sqrt(2/dof)).
Eigen::VectorXd residual_walk_uncertainty(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x_best, const Eigen::VectorXd& scales, double rss,
    int dof);

// Bare-cavity (uncoupled) doublet fit of the transmission channel.
// Rates in rad/s, centre as a laser-detuning position on the grid.
struct BareCavityResult {
  double center_pm = 0.0;
  double kappa_t = 0.0;
  double kappa_e = 0.0;
  double gamma_beta = 0.0;
  FitResult fit;
};
BareCavityResult fit_bare_cavity(const Spectrum& spec, FitOptions opts = {});

// One measured (or synthetic) column of an anti-crossing data set.
struct QmeData {
  double dl_ca_pm = 0.0;
  std::vector<double> grid_pm;
  std::vector<double> transmission;
  std::vector<double> reflection;
  double n_cav_max = 0.0;  // largest photon number reached in the data
};

// Staged QME fit: cavity rates and the backscattering magnitude stay fixed
// (taken from fit_bare_cavity); the free set is a subset of
// {g_tw, xi, gamma_p, gamma_par, dl_ca_offset}.  g_tw/gamma_p/gamma_par are
// fitted in GHz, dl_ca_offset in pm, xi in rad.
struct QmeFitResult {
  SystemParams params;  // initial params with the fitted values applied
  FitResult fit;
  double verification_delta_t = 0.0;  // weak path vs one full-QME solve
  double verification_delta_r = 0.0;
};
QmeFitResult fit_qme(const std::vector<QmeData>& data,
                     const SystemParams& initial,
                     const std::vector<std::string>& free_names,
                     FitOptions opts = {});

// Least squares of log I against log P; estimates are {exponent, prefactor}.
FitResult fit_power_law(const std::vector<double>& power,
                        const std::vector<double>& intensity);

}  // namespace cqed

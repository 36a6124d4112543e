#pragma once

#include <vector>

#include "cqed/analysis.hpp"
#include "cqed/model.hpp"
#include "cqed/steady.hpp"

namespace cqed {

// Cavity-exciton detuning schedule for the gas-tuning protocol.
struct TuningSchedule {
  enum class Mode { linear, quadratic };
  Mode mode = Mode::linear;
  std::vector<double> dl_ca_pm;  // per-step values

  // count steps of step_pm each, centred on center_pm.
  static TuningSchedule linear(double step_pm, int count, double center_pm = 0.0);
  // dl_ca(k) = c0 + c1 k + c2 k^2, k = 0..count-1; increments must be monotone.
  static TuningSchedule quadratic(double c0, double c1, double c2, int count);
};

struct AnticrossingMap {
  std::vector<double> dl_ca_pm;         // column axis
  std::vector<double> dl_la_pm;         // row axis (shared grid)
  std::vector<Spectrum> columns;        // one spectrum per schedule step
  std::vector<PeakSet> branch_peaks;    // extracted transmission dips
  bool weak_drive_warning = false;      // predicted n_cav > 0.05
};

struct SaturationCurve {
  std::vector<double> p_d_w;       // dropped power
  std::vector<double> n_cav;       // empty-cavity-calibrated photon number
  std::vector<double> splitting_pm;
  std::vector<double> peak_reflection;
  std::vector<double> contrast;    // dT at the reference wavelength
  double reference_pm = 0.0;
};

// One weak-drive spectrum per schedule step with extracted branch positions.
AnticrossingMap anticrossing_scan(const SystemParams& params,
                                  const TuningSchedule& schedule,
                                  const std::vector<double>& grid_pm,
                                  double drive_n_cav = 0.0, int fock_cutoff = 8,
                                  int threads = 1);

// Spectra at increasing drive; drive points given as empty-cavity-calibrated
// photon numbers.  contrast is evaluated at reference_pm (defaults to the
// long-wavelength bare-cavity dip).
SaturationCurve power_sweep(const SystemParams& params,
                            const std::vector<double>& n_cav_list,
                            double dl_ca_pm, const std::vector<double>& grid_pm,
                            int fock_cutoff = 8, int threads = 1,
                            double reference_pm = 0.0,
                            bool use_reference = false);

struct SaturationComparison {
  std::vector<double> n_a, scaled_a;  // min-max rescaled responses
  std::vector<double> n_b, scaled_b;
  double half_saturation_a = 0.0;
  double half_saturation_b = 0.0;
  double ratio = 0.0;                 // b / a
};

std::vector<double> minmax_rescale(const std::vector<double>& v);

// Min-max rescale both responses and report half-saturation abscissas
// (0.5 crossing, interpolated in log drive) and their ratio.
SaturationComparison compare_saturation_curves(
    const std::vector<double>& drive_a, const std::vector<double>& resp_a,
    const std::vector<double>& drive_b, const std::vector<double>& resp_b);

}  // namespace cqed

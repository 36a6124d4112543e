#include "cqed/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cqed/calib.hpp"
#include "cqed/constants.hpp"

namespace cqed {

TuningSchedule TuningSchedule::linear(double step_pm, int count,
                                      double center_pm) {
  if (count < 1) throw std::domain_error("schedule needs at least one step");
  TuningSchedule s;
  s.mode = Mode::linear;
  const double start = center_pm - 0.5 * step_pm * double(count - 1);
  for (int k = 0; k < count; ++k)
    s.dl_ca_pm.push_back(start + step_pm * double(k));
  return s;
}

TuningSchedule TuningSchedule::quadratic(double c0, double c1, double c2,
                                         int count) {
  if (count < 1) throw std::domain_error("schedule needs at least one step");
  TuningSchedule s;
  s.mode = Mode::quadratic;
  // Increments c1 + c2 (2k - 1) are linear in k, hence monotone.
  for (int k = 0; k < count; ++k)
    s.dl_ca_pm.push_back(c0 + c1 * double(k) + c2 * double(k) * double(k));
  return s;
}

AnticrossingMap anticrossing_scan(const SystemParams& params,
                                  const TuningSchedule& schedule,
                                  const std::vector<double>& grid_pm,
                                  double drive_n_cav, int fock_cutoff,
                                  int threads) {
  AnticrossingMap map;
  map.dl_ca_pm = schedule.dl_ca_pm;
  map.dl_la_pm = grid_pm;
  map.weak_drive_warning = drive_n_cav > 0.05;

  for (double dl_ca : schedule.dl_ca_pm) {
    SystemParams p = params;
    p.dl_ca_m = dl_ca * consts::pm;
    Spectrum spec =
        drive_n_cav <= 0.0
            ? weak_drive_spectrum(p, grid_pm)
            : spectrum(p, DriveSpec::from_photon_number(p, drive_n_cav),
                       grid_pm, fock_cutoff, threads);
    map.branch_peaks.push_back(find_extrema(spec, Channel::transmission_dip));
    map.columns.push_back(std::move(spec));
  }
  return map;
}

SaturationCurve power_sweep(const SystemParams& params,
                            const std::vector<double>& n_cav_list,
                            double dl_ca_pm, const std::vector<double>& grid_pm,
                            int fock_cutoff, int threads, double reference_pm,
                            bool use_reference) {
  for (std::size_t i = 1; i < n_cav_list.size(); ++i)
    if (n_cav_list[i] <= n_cav_list[i - 1])
      throw std::domain_error("power_sweep drive list must be increasing");

  SystemParams p = params;
  p.dl_ca_m = dl_ca_pm * consts::pm;

  // Default contrast reference: the long-wavelength dip of the bare doublet.
  double ref = reference_pm;
  if (!use_reference) {
    const double kt = p.kappa_t();
    const double off =
        p.gamma_beta > kt
            ? std::sqrt(p.gamma_beta * p.gamma_beta - kt * kt)
            : 0.0;
    ref = dl_ca_pm + detuning_frequency_to_wavelength(off / consts::two_pi,
                                                      p.lambda0_m) /
                         consts::pm;
  }

  SaturationCurve curve;
  curve.reference_pm = ref;
  for (double n : n_cav_list) {
    const DriveSpec drive = DriveSpec::from_photon_number(p, n);
    const Spectrum spec = spectrum(p, drive, grid_pm, fock_cutoff, threads);
    const auto dips = find_extrema(spec, Channel::transmission_dip);
    const auto split = splitting(dips);
    const double dt = contrast_at(spec, ref);

    curve.n_cav.push_back(n);
    curve.p_d_w.push_back(drive.p_wg_w * dt);
    curve.splitting_pm.push_back(split ? split->dl_pm : 0.0);
    curve.peak_reflection.push_back(
        *std::max_element(spec.reflection.begin(), spec.reflection.end()));
    curve.contrast.push_back(dt);
  }
  return curve;
}

std::vector<double> minmax_rescale(const std::vector<double>& v) {
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  if (*mx == *mn) throw std::domain_error("minmax_rescale: degenerate response");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out[i] = (v[i] - *mn) / (*mx - *mn);
  return out;
}

namespace {

double half_crossing(const std::vector<double>& drive,
                     const std::vector<double>& scaled) {
  for (std::size_t i = 1; i < scaled.size(); ++i) {
    const double a = scaled[i - 1] - 0.5;
    const double b = scaled[i] - 0.5;
    if (a == 0.0) return drive[i - 1];
    if (a * b < 0.0) {
      const double f = -a / (b - a);
      const double lx =
          std::log(drive[i - 1]) + f * (std::log(drive[i]) - std::log(drive[i - 1]));
      return std::exp(lx);
    }
  }
  return drive.back();
}

}  // namespace

SaturationComparison compare_saturation_curves(
    const std::vector<double>& drive_a, const std::vector<double>& resp_a,
    const std::vector<double>& drive_b, const std::vector<double>& resp_b) {
  if (drive_a.size() != resp_a.size() || drive_b.size() != resp_b.size())
    throw std::domain_error("compare_saturation_curves: length mismatch");
  if (drive_a.size() < 2 || drive_b.size() < 2)
    throw std::domain_error("compare_saturation_curves: too few points");

  SaturationComparison cmp;
  cmp.n_a = drive_a;
  cmp.n_b = drive_b;
  cmp.scaled_a = minmax_rescale(resp_a);
  cmp.scaled_b = minmax_rescale(resp_b);
  cmp.half_saturation_a = half_crossing(drive_a, cmp.scaled_a);
  cmp.half_saturation_b = half_crossing(drive_b, cmp.scaled_b);
  cmp.ratio = cmp.half_saturation_b / cmp.half_saturation_a;
  return cmp;
}

}  // namespace cqed

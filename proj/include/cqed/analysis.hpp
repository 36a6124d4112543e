#pragma once

#include <optional>
#include <vector>

#include "cqed/steady.hpp"

namespace cqed {

enum class Channel { transmission_dip, reflection_peak };

struct Extremum {
  double location_pm = 0.0;    // sub-grid refined
  double location_rads = 0.0;  // interpolated delta_omega at the location
  double value = 0.0;          // channel value at the extremum
  double prominence = 0.0;
  double fwhm_pm = 0.0;
  bool is_dip = false;
};

// Sorted by location; may be empty.
using PeakSet = std::vector<Extremum>;

// Local extrema by 3-point comparison with parabolic sub-grid refinement.
// smooth applies one 3-point moving-average pass first (off by default).
PeakSet find_extrema(const std::vector<double>& x_pm,
                     const std::vector<double>& y, Channel channel,
                     bool smooth = false);
PeakSet find_extrema(const Spectrum& spec, Channel channel,
                     bool smooth = false);

struct Splitting {
  double dl_pm = 0.0;
  double domega_rads = 0.0;
};

// Separation of the two most prominent extrema; ties broken toward the
// shorter-wavelength extremum.  Empty when fewer than two extrema exist.
std::optional<Splitting> splitting(const PeakSet& peaks);

// dT = 1 - T, linearly interpolated; throws std::domain_error off-grid.
double contrast_at(const Spectrum& spec, double dl_la_pm);

struct EnsembleStats {
  std::vector<double> grid_pm;
  std::vector<double> mean;
  std::vector<double> stddev;         // sample standard deviation
  std::vector<double> rms_deviation;  // rms deviation from the mean
};

// Point-wise statistics across scans sharing one grid.
EnsembleStats ensemble_stats(const std::vector<Spectrum>& scans,
                             Channel channel = Channel::transmission_dip);

}  // namespace cqed

#include "cqed/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cqed {

namespace {

std::vector<double> smooth3(const std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<double> out(y);
  for (std::size_t i = 1; i + 1 < n; ++i)
    out[i] = (y[i - 1] + y[i] + y[i + 1]) / 3.0;
  return out;
}

double interp(const std::vector<double>& x, const std::vector<double>& y,
              double xq) {
  const auto it = std::lower_bound(x.begin(), x.end(), xq);
  if (it == x.begin()) return y.front();
  if (it == x.end()) return y.back();
  const std::size_t hi = std::size_t(it - x.begin());
  const std::size_t lo = hi - 1;
  const double f = (xq - x[lo]) / (x[hi] - x[lo]);
  return y[lo] + f * (y[hi] - y[lo]);
}

}  // namespace

PeakSet find_extrema(const std::vector<double>& x_pm,
                     const std::vector<double>& y_in, Channel channel,
                     bool smooth) {
  if (x_pm.size() != y_in.size())
    throw std::domain_error("find_extrema: grid/value length mismatch");
  const std::size_t n = x_pm.size();
  if (n < 5) throw std::domain_error("find_extrema needs at least 5 points");

  // Work on a signal whose local maxima are the wanted features.
  const bool dips = channel == Channel::transmission_dip;
  std::vector<double> y = smooth ? smooth3(y_in) : y_in;
  if (dips)
    for (double& v : y) v = -v;

  PeakSet peaks;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;

    // Topographic prominence: drop to the shallower of the two valley
    // floors reached before higher ground (or the grid edge).
    double left_min = y[i], right_min = y[i];
    for (std::size_t k = i; k-- > 0;) {
      if (y[k] > y[i]) break;
      left_min = std::min(left_min, y[k]);
    }
    for (std::size_t k = i + 1; k < n; ++k) {
      if (y[k] > y[i]) break;
      right_min = std::min(right_min, y[k]);
    }
    const double prom = y[i] - std::max(left_min, right_min);
    if (!(prom > 0.0)) continue;

    // Parabolic refinement on the uniform local stencil.
    const double denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
    double frac = 0.0;
    if (denom < 0.0) frac = 0.5 * (y[i - 1] - y[i + 1]) / denom;
    frac = std::clamp(frac, -0.5, 0.5);
    const double step = 0.5 * (x_pm[i + 1] - x_pm[i - 1]);
    const double loc = x_pm[i] + frac * step;
    const double val = y[i] - 0.25 * (y[i - 1] - y[i + 1]) * frac;

    // FWHM at half the prominence above the valley floor.
    const double level = val - 0.5 * prom;
    double xl = x_pm.front(), xr = x_pm.back();
    for (std::size_t k = i; k-- > 0;) {
      if (y[k] <= level) {
        const double f = (level - y[k]) / (y[k + 1] - y[k]);
        xl = x_pm[k] + f * (x_pm[k + 1] - x_pm[k]);
        break;
      }
    }
    for (std::size_t k = i + 1; k < n; ++k) {
      if (y[k] <= level) {
        const double f = (level - y[k - 1]) / (y[k] - y[k - 1]);
        xr = x_pm[k - 1] + f * (x_pm[k] - x_pm[k - 1]);
        break;
      }
    }

    Extremum e;
    e.location_pm = loc;
    e.value = dips ? -val : val;
    e.prominence = prom;
    e.fwhm_pm = std::max(xr - xl, 0.0);
    e.is_dip = dips;
    peaks.push_back(e);
  }

  std::sort(peaks.begin(), peaks.end(), [](const Extremum& a, const Extremum& b) {
    return a.location_pm < b.location_pm;
  });
  return peaks;
}

PeakSet find_extrema(const Spectrum& spec, Channel channel, bool smooth) {
  const auto& y = channel == Channel::transmission_dip ? spec.transmission
                                                       : spec.reflection;
  PeakSet peaks = find_extrema(spec.dl_la_pm, y, channel, smooth);
  for (Extremum& e : peaks)
    e.location_rads = interp(spec.dl_la_pm, spec.delta_omega, e.location_pm);
  return peaks;
}

std::optional<Splitting> splitting(const PeakSet& peaks) {
  if (peaks.size() < 2) return std::nullopt;
  // Two largest prominences; ties toward shorter wavelength.
  std::vector<std::size_t> order(peaks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (peaks[a].prominence != peaks[b].prominence)
      return peaks[a].prominence > peaks[b].prominence;
    return peaks[a].location_pm < peaks[b].location_pm;
  });
  const Extremum& p1 = peaks[order[0]];
  const Extremum& p2 = peaks[order[1]];
  Splitting s;
  s.dl_pm = std::abs(p1.location_pm - p2.location_pm);
  s.domega_rads = std::abs(p1.location_rads - p2.location_rads);
  return s;
}

double contrast_at(const Spectrum& spec, double dl_la_pm) {
  if (spec.size() < 2) throw std::domain_error("contrast_at: spectrum too short");
  if (dl_la_pm < spec.dl_la_pm.front() || dl_la_pm > spec.dl_la_pm.back())
    throw std::domain_error("contrast_at: wavelength outside the grid");
  return 1.0 - interp(spec.dl_la_pm, spec.transmission, dl_la_pm);
}

EnsembleStats ensemble_stats(const std::vector<Spectrum>& scans,
                             Channel channel) {
  if (scans.size() < 2)
    throw std::domain_error("ensemble_stats needs at least two scans");
  const std::size_t n = scans.front().size();
  for (const Spectrum& s : scans) {
    if (s.size() != n) throw std::domain_error("ensemble_stats: grid mismatch");
    for (std::size_t i = 0; i < n; ++i)
      if (s.dl_la_pm[i] != scans.front().dl_la_pm[i])
        throw std::domain_error("ensemble_stats: grid mismatch");
  }

  auto value = [&](const Spectrum& s, std::size_t i) {
    return channel == Channel::transmission_dip ? s.transmission[i]
                                                : s.reflection[i];
  };

  EnsembleStats st;
  st.grid_pm = scans.front().dl_la_pm;
  st.mean.resize(n);
  st.stddev.resize(n);
  st.rms_deviation.resize(n);
  const double m = double(scans.size());
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (const Spectrum& s : scans) sum += value(s, i);
    const double mu = sum / m;
    double sq = 0.0;
    for (const Spectrum& s : scans) {
      const double d = value(s, i) - mu;
      sq += d * d;
    }
    st.mean[i] = mu;
    st.stddev[i] = std::sqrt(sq / (m - 1.0));
    st.rms_deviation[i] = std::sqrt(sq / m);
  }
  return st;
}

}  // namespace cqed

#include "cqed/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cqed/analysis.hpp"
#include "cqed/calib.hpp"
#include "cqed/constants.hpp"
#include "cqed/errors.hpp"

namespace cqed {

namespace {

// One Nelder-Mead run (standard reflection/expansion/contraction/shrink).
SimplexResult simplex_once(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x0,
                           const Eigen::VectorXd& scales, int max_iter,
                           double ftol) {
  const int n = int(x0.size());
  std::vector<Eigen::VectorXd> xs(size_t(n) + 1, x0);
  std::vector<double> fs(size_t(n) + 1);
  for (int i = 0; i < n; ++i) xs[size_t(i) + 1][i] += scales[i];
  for (std::size_t i = 0; i < xs.size(); ++i) fs[i] = f(xs[i]);

  SimplexResult res;
  auto order = [&] {
    std::vector<std::size_t> idx(xs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    std::vector<Eigen::VectorXd> x2;
    std::vector<double> f2;
    for (std::size_t i : idx) {
      x2.push_back(xs[i]);
      f2.push_back(fs[i]);
    }
    xs.swap(x2);
    fs.swap(f2);
  };

  order();
  int it = 0;
  for (; it < max_iter; ++it) {
    res.trace.push_back(fs.front());
    // Relative spread with an ftol-sized absolute floor, so near-perfect
    // fits (objective approaching rounding noise) can still terminate.
    if (fs.back() - fs.front() <= ftol * (std::abs(fs.front()) + ftol)) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += xs[size_t(i)];
    centroid /= double(n);

    const Eigen::VectorXd xr = centroid + (centroid - xs.back());
    const double fr = f(xr);
    if (fr < fs.front()) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs.back());
      const double fe = f(xe);
      if (fe < fr) {
        xs.back() = xe;
        fs.back() = fe;
      } else {
        xs.back() = xr;
        fs.back() = fr;
      }
    } else if (fr < fs[size_t(n) - 1]) {
      xs.back() = xr;
      fs.back() = fr;
    } else {
      const bool outside = fr < fs.back();
      const Eigen::VectorXd xc =
          centroid + 0.5 * ((outside ? xr : xs.back()) - centroid);
      const double fc = f(xc);
      if (fc < (outside ? fr : fs.back())) {
        xs.back() = xc;
        fs.back() = fc;
      } else {
        for (std::size_t i = 1; i < xs.size(); ++i) {
          xs[i] = xs.front() + 0.5 * (xs[i] - xs.front());
          fs[i] = f(xs[i]);
        }
      }
    }
    order();
  }
  res.x = xs.front();
  res.fval = fs.front();
  res.iterations = it;
  return res;
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& x0,
                          const Eigen::VectorXd& scales, int max_iter,
                          double ftol, int restarts, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SimplexResult best = simplex_once(f, x0, scales, max_iter, ftol);
  for (int r = 1; r < restarts; ++r) {
    Eigen::VectorXd start = best.x;
    for (int i = 0; i < start.size(); ++i) start[i] += 0.5 * scales[i] * gauss(rng);
    SimplexResult cand = simplex_once(f, start, scales, max_iter, ftol);
    cand.iterations += best.iterations;
    if (cand.fval < best.fval) {
      cand.trace.insert(cand.trace.begin(), best.trace.begin(), best.trace.end());
      best = std::move(cand);
    } else {
      best.iterations = cand.iterations;
    }
  }
  return best;
}

Eigen::VectorXd residual_walk_uncertainty(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x_best, const Eigen::VectorXd& scales, double rss,
    int dof) {
  const double threshold =
      rss * (1.0 + std::sqrt(2.0 / std::max(dof, 1))) + 1e-300;
  Eigen::VectorXd unc = Eigen::VectorXd::Zero(x_best.size());
  for (int i = 0; i < x_best.size(); ++i) {
    double worst = 0.0;
    for (double sign : {+1.0, -1.0}) {
      double prev_step = 0.0, prev_val = rss;
      double step = 1e-6 * scales[i];
      double reached = 0.0;
      for (int k = 0; k < 60; ++k) {
        Eigen::VectorXd x = x_best;
        x[i] += sign * step;
        const double v = f(x);
        if (v > threshold) {
          // Interpolate the crossing between the last two probes.
          const double f1 = (threshold - prev_val) /
                            std::max(v - prev_val, 1e-300);
          reached = prev_step + f1 * (step - prev_step);
          break;
        }
        prev_step = step;
        prev_val = v;
        step *= 2.0;
        reached = step;
      }
      worst = std::max(worst, reached);
    }
    unc[i] = worst;
  }
  return unc;
}

BareCavityResult fit_bare_cavity(const Spectrum& spec, FitOptions opts) {
  if (spec.size() < 7) throw FitError("fit_bare_cavity: spectrum too short");
  // pm <-> rad/s scale taken from the spectrum's own axes (the model is
  // even in detuning, so the sign of the slope does not matter).
  const double pm_to_rads =
      std::abs((spec.delta_omega.back() - spec.delta_omega.front()) /
               (spec.dl_la_pm.back() - spec.dl_la_pm.front()));

  // Initial guesses from the extracted dips.
  const PeakSet dips = find_extrema(spec, Channel::transmission_dip);
  double center_pm0, kt0, gb0;
  if (dips.size() >= 2) {
    const auto split = splitting(dips);
    std::vector<std::size_t> order(dips.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return dips[a].prominence > dips[b].prominence;
                     });
    center_pm0 = 0.5 * (dips[order[0]].location_pm + dips[order[1]].location_pm);
    kt0 = 0.5 * dips[order[0]].fwhm_pm * pm_to_rads;
    const double half = 0.5 * split->dl_pm * pm_to_rads;
    gb0 = std::sqrt(half * half + kt0 * kt0);
  } else if (dips.size() == 1) {
    center_pm0 = dips.front().location_pm;
    kt0 = 0.5 * dips.front().fwhm_pm * pm_to_rads;
    gb0 = 0.0;
  } else {
    throw FitError("fit_bare_cavity: no transmission dip found");
  }
  const double tmin =
      *std::min_element(spec.transmission.begin(), spec.transmission.end());
  const double dt0 = std::clamp(1.0 - tmin, 1e-6, 1.0);
  const double ke0 = kt0 * (1.0 - std::sqrt(1.0 - dt0)) / 4.0;

  auto model_obj = [&](const Eigen::VectorXd& x) {
    const double center = x[0];
    const double kt = std::abs(x[1]);
    const double ke = std::abs(x[2]);
    const double gb = std::abs(x[3]);
    double rss = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const double delta = (spec.dl_la_pm[i] - center) * pm_to_rads;
      const double t = bare_transmission(delta, kt, ke, gb);
      const double d = t - spec.transmission[i];
      rss += d * d;
    }
    return rss;
  };

  Eigen::VectorXd x0(4), scales(4);
  x0 << center_pm0, kt0, ke0, gb0;
  scales << 0.5, 0.05 * kt0 + 1e6, 0.2 * ke0 + 1e6, 0.05 * gb0 + 0.05 * kt0 + 1e6;
  const SimplexResult sr = nelder_mead(model_obj, x0, scales, opts.max_iter,
                                       opts.ftol, opts.restarts, opts.seed);

  BareCavityResult out;
  out.center_pm = sr.x[0];
  out.kappa_t = std::abs(sr.x[1]);
  out.kappa_e = std::abs(sr.x[2]);
  out.gamma_beta = std::abs(sr.x[3]);
  out.fit.names = {"center_pm", "kappa_t_ghz", "kappa_e_ghz", "gamma_beta_ghz"};
  out.fit.estimates.resize(4);
  out.fit.estimates << out.center_pm, consts::rads_to_ghz(out.kappa_t),
      consts::rads_to_ghz(out.kappa_e), consts::rads_to_ghz(out.gamma_beta);
  out.fit.rss = sr.fval;
  out.fit.iterations = sr.iterations;
  out.fit.converged = sr.converged;
  out.fit.trace = sr.trace;
  const int dof = std::max(1, int(spec.size()) - 4);
  Eigen::VectorXd unc =
      residual_walk_uncertainty(model_obj, sr.x, scales, sr.fval, dof);
  out.fit.uncertainties.resize(4);
  out.fit.uncertainties << unc[0], consts::rads_to_ghz(unc[1]),
      consts::rads_to_ghz(unc[2]), consts::rads_to_ghz(unc[3]);
  // A single-dip spectrum pins gamma_beta only from above.
  if (dips.size() == 1) out.fit.uncertainties[3] = consts::rads_to_ghz(out.kappa_t);
  return out;
}

namespace {

SystemParams apply_free(const SystemParams& base,
                        const std::vector<std::string>& names,
                        const Eigen::VectorXd& x, double& dl_ca_offset_pm) {
  SystemParams p = base;
  dl_ca_offset_pm = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    const std::string& n = names[size_t(i)];
    if (n == "g_tw") p.g_tw = std::abs(consts::ghz_to_rads(x[i]));
    else if (n == "xi") p.xi = x[i];
    else if (n == "gamma_p") p.gamma_p = std::abs(consts::ghz_to_rads(x[i]));
    else if (n == "gamma_par") p.gamma_par = std::abs(consts::ghz_to_rads(x[i]));
    else if (n == "dl_ca_offset") dl_ca_offset_pm = x[i];
    else throw FitError("fit_qme: unknown free parameter '" + n + "'");
  }
  return p;
}

double initial_value(const SystemParams& p, const std::string& n) {
  if (n == "g_tw") return consts::rads_to_ghz(p.g_tw);
  if (n == "xi") return p.xi;
  if (n == "gamma_p") return consts::rads_to_ghz(p.gamma_p);
  if (n == "gamma_par") return consts::rads_to_ghz(p.gamma_par);
  if (n == "dl_ca_offset") return 0.0;
  throw FitError("fit_qme: unknown free parameter '" + n + "'");
}

double scale_of(const std::string& n) {
  if (n == "xi") return 0.1;           // rad
  if (n == "dl_ca_offset") return 1.0; // pm
  return 0.2;                          // GHz
}

}  // namespace

QmeFitResult fit_qme(const std::vector<QmeData>& data,
                     const SystemParams& initial,
                     const std::vector<std::string>& free_names,
                     FitOptions opts) {
  if (data.empty()) throw FitError("fit_qme: no data columns");
  if (free_names.empty()) throw FitError("fit_qme: empty free set");
  for (const QmeData& col : data)
    if (col.grid_pm.size() != col.transmission.size() ||
        col.grid_pm.size() != col.reflection.size())
      throw FitError("fit_qme: column length mismatch");

  double n_cav_max = 0.0;
  int npts = 0;
  for (const QmeData& col : data) {
    n_cav_max = std::max(n_cav_max, col.n_cav_max);
    npts += 2 * int(col.grid_pm.size());
  }
  const bool weak_ok = n_cav_max <= 0.01;
  if (!weak_ok)
    throw FitError("fit_qme: data beyond the weak-drive regime "
                   "(n_cav > 0.01) is not supported");

  auto objective = [&](const Eigen::VectorXd& x) {
    double offset_pm = 0.0;
    SystemParams p = apply_free(initial, free_names, x, offset_pm);
    double rss = 0.0;
    for (const QmeData& col : data) {
      SystemParams pc = p;
      pc.dl_ca_m = (col.dl_ca_pm + offset_pm) * consts::pm;
      const Spectrum model = weak_drive_spectrum(pc, col.grid_pm);
      for (std::size_t i = 0; i < col.grid_pm.size(); ++i) {
        const double dt = model.transmission[i] - col.transmission[i];
        const double dr = model.reflection[i] - col.reflection[i];
        rss += opts.weight_t * dt * dt + opts.weight_r * dr * dr;
      }
    }
    return rss;
  };

  const int n = int(free_names.size());
  Eigen::VectorXd x0(n), scales(n);
  for (int i = 0; i < n; ++i) {
    x0[i] = initial_value(initial, free_names[size_t(i)]);
    scales[i] = scale_of(free_names[size_t(i)]);
  }

  const SimplexResult sr = nelder_mead(objective, x0, scales, opts.max_iter,
                                       opts.ftol, opts.restarts, opts.seed);

  QmeFitResult out;
  double offset_pm = 0.0;
  out.params = apply_free(initial, free_names, sr.x, offset_pm);
  out.fit.names = free_names;
  out.fit.estimates = sr.x;
  out.fit.rss = sr.fval;
  out.fit.iterations = sr.iterations;
  out.fit.converged = sr.converged;
  out.fit.trace = sr.trace;
  const int dof = std::max(1, npts - n);
  out.fit.uncertainties =
      residual_walk_uncertainty(objective, sr.x, scales, sr.fval, dof);

  // One full-QME check at the centre of the first column.
  {
    SystemParams pc = out.params;
    pc.dl_ca_m = (data.front().dl_ca_pm + offset_pm) * consts::pm;
    const std::vector<double>& g = data.front().grid_pm;
    const double mid = g[g.size() / 2];
    std::vector<double> probe = {mid - 0.4, mid - 0.2, mid, mid + 0.2, mid + 0.4};
    const Spectrum weak = weak_drive_spectrum(pc, probe);
    const Spectrum full = spectrum(
        pc, DriveSpec::from_photon_number(pc, 1e-4), probe, 8);
    out.verification_delta_t =
        std::abs(full.transmission[2] - weak.transmission[2]);
    out.verification_delta_r =
        std::abs(full.reflection[2] - weak.reflection[2]);
  }
  return out;
}

FitResult fit_power_law(const std::vector<double>& power,
                        const std::vector<double>& intensity) {
  if (power.size() != intensity.size() || power.size() < 3)
    throw std::domain_error("fit_power_law needs >= 3 matched points");
  for (std::size_t i = 0; i < power.size(); ++i)
    if (power[i] <= 0.0 || intensity[i] <= 0.0)
      throw std::domain_error("fit_power_law requires positive data");

  const int n = int(power.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(power[size_t(i)]);
    const double y = std::log(intensity[size_t(i)]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = double(n) * sxx - sx * sx;
  if (denom == 0.0) throw std::domain_error("fit_power_law: degenerate abscissa");
  const double slope = (double(n) * sxy - sx * sy) / denom;
  const double icept = (sy - slope * sx) / double(n);

  double rss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = std::log(intensity[size_t(i)]) -
                     (icept + slope * std::log(power[size_t(i)]));
    rss += r * r;
  }
  const double sigma2 = rss / std::max(1, n - 2);
  const double se_slope = std::sqrt(sigma2 * double(n) / denom);
  const double se_icept = std::sqrt(sigma2 * sxx / denom);

  FitResult out;
  out.names = {"exponent", "prefactor"};
  out.estimates.resize(2);
  out.estimates << slope, std::exp(icept);
  out.uncertainties.resize(2);
  out.uncertainties << se_slope, std::exp(icept) * se_icept;
  out.rss = rss;
  out.iterations = 1;
  out.converged = true;
  return out;
}

}  // namespace cqed

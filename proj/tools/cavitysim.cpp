#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include "cqed/analysis.hpp"
#include "cqed/calib.hpp"
#include "cqed/constants.hpp"
#include "cqed/errors.hpp"
#include "cqed/experiments.hpp"
#include "cqed/fitting.hpp"
#include "cqed/io.hpp"
#include "cqed/model.hpp"
#include "cqed/steady.hpp"

using nlohmann::json;
using namespace cqed;

namespace {

// Exit codes: 0 ok, 2 config error, 3 solver failure, 4 fit non-convergence.
constexpr int kOk = 0, kConfig = 2, kSolver = 3, kFit = 4;

struct CalibArgs {
  double power_nw = 0.0;
  double zeta = 1.0;
  double contrast = 0.0;
  double q = 0.0;
  double lambda_nm = 0.0;
  std::string regime = "undercoupled";
  double detuning_ghz = 0.0;
  bool no_budget = false;
};

int run_calib(const CalibArgs& a) {
  CalibInput in;
  in.input_power_w = a.power_nw * 1e-9;
  in.taper_transmission = a.zeta;
  in.contrast = a.contrast;
  in.loaded_q = a.q;
  in.wavelength_m = a.lambda_nm * consts::nm;
  in.detuning_rads = consts::ghz_to_rads(a.detuning_ghz);
  if (a.regime == "undercoupled") in.regime = CouplingRegime::undercoupled;
  else if (a.regime == "overcoupled") in.regime = CouplingRegime::overcoupled;
  else throw ConfigError("--regime must be undercoupled or overcoupled");

  CalibResult res = intracavity_photon_number(in);
  if (!a.no_budget && !res.singular)
    res.relative_uncertainty = propagate_ncav_uncertainty(in, UncertaintyBudget{});

  json out = calib_result_to_json(res);
  out["config"] = {{"power_nw", a.power_nw},   {"zeta", a.zeta},
                   {"contrast", a.contrast},   {"q", a.q},
                   {"lambda_nm", a.lambda_nm}, {"regime", a.regime},
                   {"detuning_ghz", a.detuning_ghz}};
  std::cout << out.dump(2) << "\n";
  return kOk;
}

std::string manifest_for(const RunConfig& cfg, const std::string& command,
                         std::string& hash_out) {
  const std::string manifest = resolved_config_json(cfg, command).dump(2) + "\n";
  hash_out = fnv1a_hex(manifest);
  return manifest;
}

void write_output(const RunConfig& cfg, const std::string& manifest,
                  const std::string& body) {
  if (cfg.output_path.empty()) {
    std::cout << body;
  } else {
    write_file(cfg.output_path, body);
    write_file(cfg.output_path + ".manifest.json", manifest);
  }
}

int run_spectrum(const std::string& config_path) {
  const RunConfig cfg = parse_run_config(read_file(config_path), "spectrum");
  const std::vector<double> grid = cfg.grid.materialize(cfg.system);
  std::string hash;
  const std::string manifest = manifest_for(cfg, "spectrum", hash);

  Spectrum spec;
  if (cfg.weak && !cfg.drive_n_cav && !cfg.drive_p_wg_nw) {
    spec = weak_drive_spectrum(cfg.system, grid, cfg.tol);
  } else {
    DriveSpec drive =
        cfg.drive_n_cav
            ? DriveSpec::from_photon_number(cfg.system, *cfg.drive_n_cav)
            : DriveSpec::from_flux(0.0, cfg.system.lambda0_m);
    if (cfg.drive_p_wg_nw) {
      drive.lambda_l_m = cfg.system.lambda0_m + cfg.system.dl_la_m;
      drive.p_wg_w = *cfg.drive_p_wg_nw * 1e-9;
    }
    spec = spectrum(cfg.system, drive, grid, cfg.fock_cutoff, cfg.threads,
                    cfg.tol);
  }
  write_output(cfg, manifest, spectrum_to_csv(spec, hash));
  return kOk;
}

int run_anticross(const std::string& config_path) {
  const RunConfig cfg = parse_run_config(read_file(config_path), "anticross");
  const std::vector<double> grid = cfg.grid.materialize(cfg.system);
  std::string hash;
  const std::string manifest = manifest_for(cfg, "anticross", hash);
  const AnticrossingMap map =
      anticrossing_scan(cfg.system, *cfg.schedule, grid,
                        cfg.drive_n_cav.value_or(0.0), cfg.fock_cutoff,
                        cfg.threads);
  if (map.weak_drive_warning)
    std::cerr << "warning: predicted n_cav > 0.05; the scan is not in the "
                 "weak-drive regime\n";
  write_output(cfg, manifest, anticrossing_to_csv(map, hash));
  return kOk;
}

int run_powersweep(const std::string& config_path) {
  const RunConfig cfg = parse_run_config(read_file(config_path), "powersweep");
  const std::vector<double> grid = cfg.grid.materialize(cfg.system);
  std::string hash;
  const std::string manifest = manifest_for(cfg, "powersweep", hash);
  const SaturationCurve curve = power_sweep(
      cfg.system, cfg.n_cav_list, cfg.sweep_dl_ca_pm, grid, cfg.fock_cutoff,
      cfg.threads, cfg.reference_pm.value_or(0.0), cfg.reference_pm.has_value());
  write_output(cfg, manifest, saturation_to_csv(curve, hash));
  return kOk;
}

int run_fit_bare(const std::string& data_path, const std::string& out_path,
                 unsigned seed) {
  const SpectrumCsv data = spectrum_from_csv(read_file(data_path));
  FitOptions opts;
  opts.seed = seed;
  const BareCavityResult res = fit_bare_cavity(data.spectrum, opts);
  json j = fit_result_to_json(res.fit);
  j["config"] = {{"data", data_path}, {"seed", seed}};
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty()) std::cout << text;
  else write_file(out_path, text);
  if (!res.fit.converged) return kFit;
  return kOk;
}

int run_fit_qme(const std::string& config_path) {
  const RunConfig cfg = parse_run_config(read_file(config_path), "fit-qme");
  std::vector<QmeData> data;
  for (const auto& ref : cfg.data) {
    const SpectrumCsv csv = spectrum_from_csv(read_file(ref.csv_path));
    QmeData col;
    col.dl_ca_pm = ref.dl_ca_pm;
    col.grid_pm = csv.spectrum.dl_la_pm;
    col.transmission = csv.spectrum.transmission;
    col.reflection = csv.spectrum.reflection;
    col.n_cav_max = csv.spectrum.n_cav.empty()
                        ? 0.0
                        : *std::max_element(csv.spectrum.n_cav.begin(),
                                            csv.spectrum.n_cav.end());
    data.push_back(std::move(col));
  }
  const QmeFitResult res = fit_qme(data, cfg.system, cfg.free_names,
                                   cfg.fit_options);
  std::string hash;
  const std::string manifest = manifest_for(cfg, "fit-qme", hash);
  json j = fit_result_to_json(res.fit);
  j["fitted_system"] = system_params_to_json(res.params);
  j["verification_delta_t"] = res.verification_delta_t;
  j["verification_delta_r"] = res.verification_delta_r;
  j["manifest_hash"] = hash;
  const std::string text = j.dump(2) + "\n";
  if (cfg.output_path.empty()) {
    std::cout << text;
  } else {
    write_file(cfg.output_path, text);
    write_file(cfg.output_path + ".manifest.json", manifest);
  }
  if (!res.fit.converged) return kFit;
  return kOk;
}

int run_fit_powerlaw(const std::string& data_path, const std::string& out_path) {
  std::vector<double> p, i;
  power_law_from_csv(read_file(data_path), p, i);
  FitResult res;
  try {
    res = fit_power_law(p, i);
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  json j = fit_result_to_json(res);
  j["config"] = {{"data", data_path}};
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty()) std::cout << text;
  else write_file(out_path, text);
  return kOk;
}

struct AnalyzeArgs {
  std::string input;
  std::vector<std::string> ensemble;
  std::string channel = "transmission";
  bool peaks = false;
  bool do_splitting = false;
  bool smooth = false;
  double contrast_at_pm = 0.0;
  bool has_contrast_at = false;
};

int run_analyze(const AnalyzeArgs& a) {
  json out;
  const Channel ch = a.channel == "reflection" ? Channel::reflection_peak
                                               : Channel::transmission_dip;
  if (!a.ensemble.empty()) {
    std::vector<Spectrum> scans;
    for (const auto& path : a.ensemble)
      scans.push_back(spectrum_from_csv(read_file(path)).spectrum);
    EnsembleStats st;
    try {
      st = ensemble_stats(scans, ch);
    } catch (const std::domain_error& e) {
      throw ConfigError(e.what());
    }
    out["grid_pm"] = st.grid_pm;
    out["mean"] = st.mean;
    out["stddev"] = st.stddev;
    out["rms_deviation"] = st.rms_deviation;
  } else {
    if (a.input.empty()) throw ConfigError("analyze: --input is required");
    const Spectrum spec = spectrum_from_csv(read_file(a.input)).spectrum;
    const PeakSet ps = find_extrema(spec, ch, a.smooth);
    if (a.peaks) {
      json arr = json::array();
      for (const Extremum& e : ps)
        arr.push_back({{"location_pm", e.location_pm},
                       {"location_rads", e.location_rads},
                       {"value", e.value},
                       {"prominence", e.prominence},
                       {"fwhm_pm", e.fwhm_pm},
                       {"is_dip", e.is_dip}});
      out["peaks"] = arr;
    }
    if (a.do_splitting) {
      const auto s = splitting(ps);
      if (s) {
        out["splitting_pm"] = s->dl_pm;
        out["splitting_ghz"] = s->domega_rads / (consts::two_pi * 1e9);
      } else {
        out["splitting_pm"] = nullptr;
      }
    }
    if (a.has_contrast_at) {
      try {
        out["contrast"] = contrast_at(spec, a.contrast_at_pm);
      } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
      }
    }
  }
  std::cout << out.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady-state simulator and parameter-estimation toolkit for a "
               "fiber-coupled microdisk cavity with a single quantum-dot "
               "exciton"};
  app.require_subcommand(1);

  CalibArgs cal;
  auto* c_calib = app.add_subcommand("calib", "photon-number calibration");
  c_calib->add_option("--power-nw", cal.power_nw, "input power (nW)")->required();
  c_calib->add_option("--zeta", cal.zeta, "taper transmission");
  c_calib->add_option("--contrast", cal.contrast, "on-resonance contrast dT")->required();
  c_calib->add_option("--q", cal.q, "loaded Q")->required();
  c_calib->add_option("--lambda-nm", cal.lambda_nm, "resonance wavelength (nm)")->required();
  c_calib->add_option("--regime", cal.regime, "undercoupled|overcoupled");
  c_calib->add_option("--detuning-ghz", cal.detuning_ghz, "laser-cavity detuning (GHz)");
  c_calib->add_flag("--no-budget", cal.no_budget, "skip uncertainty propagation");

  std::string cfg_spectrum, cfg_anticross, cfg_powersweep, cfg_fitqme;
  app.add_subcommand("spectrum", "one spectrum to CSV")
      ->add_option("--config", cfg_spectrum, "run configuration JSON")->required();
  app.add_subcommand("anticross", "anti-crossing map to CSV")
      ->add_option("--config", cfg_anticross, "run configuration JSON")->required();
  app.add_subcommand("powersweep", "saturation curve to CSV")
      ->add_option("--config", cfg_powersweep, "run configuration JSON")->required();
  app.add_subcommand("fit-qme", "staged QME fit")
      ->add_option("--config", cfg_fitqme, "run configuration JSON")->required();

  std::string fb_data, fb_out;
  unsigned fb_seed = 0;
  auto* c_fitbare = app.add_subcommand("fit-bare", "bare-cavity doublet fit");
  c_fitbare->add_option("--data", fb_data, "spectrum CSV")->required();
  c_fitbare->add_option("--out", fb_out, "output JSON path (default stdout)");
  c_fitbare->add_option("--seed", fb_seed, "restart seed");

  std::string fp_data, fp_out;
  auto* c_fitpl = app.add_subcommand("fit-powerlaw", "power-law exponent fit");
  c_fitpl->add_option("--data", fp_data, "CSV of power,intensity")->required();
  c_fitpl->add_option("--out", fp_out, "output JSON path (default stdout)");

  AnalyzeArgs an;
  auto* c_an = app.add_subcommand("analyze", "peaks/splitting/contrast/ensemble");
  c_an->add_option("--input", an.input, "spectrum CSV");
  c_an->add_option("--ensemble", an.ensemble, "spectrum CSVs for ensemble stats");
  c_an->add_option("--channel", an.channel, "transmission|reflection");
  c_an->add_flag("--peaks", an.peaks, "list extrema");
  c_an->add_flag("--splitting", an.do_splitting, "dominant-pair separation");
  c_an->add_flag("--smooth", an.smooth, "3-point moving average first");
  c_an->add_option("--contrast-at", an.contrast_at_pm, "dT at dl_la (pm)")
      ->each([&](const std::string&) { an.has_contrast_at = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (c_calib->parsed()) return run_calib(cal);
    if (app.get_subcommand("spectrum")->parsed()) return run_spectrum(cfg_spectrum);
    if (app.get_subcommand("anticross")->parsed()) return run_anticross(cfg_anticross);
    if (app.get_subcommand("powersweep")->parsed()) return run_powersweep(cfg_powersweep);
    if (app.get_subcommand("fit-qme")->parsed()) return run_fit_qme(cfg_fitqme);
    if (c_fitbare->parsed()) return run_fit_bare(fb_data, fb_out, fb_seed);
    if (c_fitpl->parsed()) return run_fit_powerlaw(fp_data, fp_out);
    if (c_an->parsed()) return run_analyze(an);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what()
              << " (residual " << e.residual << ")\n";
    return kSolver;
  } catch (const FitError& e) {
    std::cerr << "fit error: " << e.what() << "\n";
    return kFit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}

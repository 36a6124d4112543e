#include "cqed/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"

using nlohmann::json;

namespace cqed {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& context) {
  if (!j.is_object())
    throw ConfigError(context + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) { ok = true; break; }
    if (!ok) throw ConfigError(context + ": unknown key '" + key + "'");
  }
}

double require_number(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key))
    throw ConfigError(ctx + ": missing key '" + key + "'");
  if (!j[key].is_number())
    throw ConfigError(ctx + ": key '" + std::string(key) + "' must be a number");
  return j[key].get<double>();
}

double number_or(const json& j, const char* key, double fallback,
                 const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number())
    throw ConfigError(ctx + ": key '" + std::string(key) + "' must be a number");
  return j[key].get<double>();
}

}  // namespace

json system_params_to_json(const SystemParams& p) {
  json j;
  j["kappa_e_ghz"] = consts::rads_to_ghz(p.kappa_e);
  j["kappa_i_ghz"] = consts::rads_to_ghz(p.kappa_i);
  j["gamma_beta_ghz"] = consts::rads_to_ghz(p.gamma_beta);
  j["xi_rad"] = p.xi;
  j["g_tw_ghz"] = consts::rads_to_ghz(p.g_tw);
  j["gamma_par_ghz"] = consts::rads_to_ghz(p.gamma_par);
  j["gamma_p_ghz"] = consts::rads_to_ghz(p.gamma_p);
  j["lambda0_nm"] = p.lambda0_m / consts::nm;
  j["dl_ca_pm"] = p.dl_ca_m / consts::pm;
  j["dl_la_pm"] = p.dl_la_m / consts::pm;
  return j;
}

SystemParams system_params_from_json(const json& j) {
  const std::string ctx = "system";
  check_keys(j,
             {"kappa_e_ghz", "kappa_i_ghz", "gamma_beta_ghz", "xi_rad",
              "g_tw_ghz", "gamma_par_ghz", "gamma_p_ghz", "lambda0_nm",
              "dl_ca_pm", "dl_la_pm"},
             ctx);
  SystemParams p;
  p.kappa_e = consts::ghz_to_rads(require_number(j, "kappa_e_ghz", ctx));
  p.kappa_i = consts::ghz_to_rads(require_number(j, "kappa_i_ghz", ctx));
  p.gamma_beta = consts::ghz_to_rads(require_number(j, "gamma_beta_ghz", ctx));
  p.xi = number_or(j, "xi_rad", 0.0, ctx);
  p.g_tw = consts::ghz_to_rads(number_or(j, "g_tw_ghz", 0.0, ctx));
  p.gamma_par = consts::ghz_to_rads(number_or(j, "gamma_par_ghz", 0.0, ctx));
  p.gamma_p = consts::ghz_to_rads(number_or(j, "gamma_p_ghz", 0.0, ctx));
  p.lambda0_m = require_number(j, "lambda0_nm", ctx) * consts::nm;
  p.dl_ca_m = number_or(j, "dl_ca_pm", 0.0, ctx) * consts::pm;
  p.dl_la_m = number_or(j, "dl_la_pm", 0.0, ctx) * consts::pm;
  try {
    p.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
  return p;
}

json calib_result_to_json(const CalibResult& r) {
  json j;
  j["cavity_energy_j"] = r.cavity_energy_j;
  j["n_cav"] = r.photon_number;
  j["intrinsic_q"] = r.intrinsic_q;
  j["coupling_parameter"] = r.coupling_parameter;
  j["relative_uncertainty"] = r.relative_uncertainty;
  j["singular"] = r.singular;
  return j;
}

json fit_result_to_json(const FitResult& r) {
  json params = json::object();
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    params[r.names[i]] = {{"value", r.estimates[Eigen::Index(i)]},
                          {"uncertainty", r.uncertainties[Eigen::Index(i)]}};
  }
  json j;
  j["parameters"] = params;
  j["rss"] = r.rss;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["trace"] = r.trace;
  return j;
}

std::string spectrum_to_csv(const Spectrum& spec,
                            const std::string& manifest_hash) {
  std::ostringstream os;
  os << "# cavitysim spectrum v1\n";
  os << "# units: dl_la_pm=pm delta_omega_rads=rad/s others=dimensionless\n";
  os << "# manifest_hash: " << manifest_hash << "\n";
  os << "dl_la_pm,delta_omega_rads,transmission,reflection,n_cw,n_ccw,"
        "exciton_population,n_cav,truncation_flag\n";
  for (std::size_t i = 0; i < spec.size(); ++i) {
    os << format_double(spec.dl_la_pm[i]) << ','
       << format_double(spec.delta_omega[i]) << ','
       << format_double(spec.transmission[i]) << ','
       << format_double(spec.reflection[i]) << ','
       << format_double(spec.n_cw[i]) << ',' << format_double(spec.n_ccw[i])
       << ',' << format_double(spec.exciton_population[i]) << ','
       << format_double(spec.n_cav[i]) << ',' << spec.truncation_flag[i]
       << '\n';
  }
  return os.str();
}

SpectrumCsv spectrum_from_csv(const std::string& text) {
  SpectrumCsv out;
  std::istringstream is(text);
  std::string line;
  bool header_seen = false;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string tag = "# manifest_hash: ";
      if (line.rfind(tag, 0) == 0) out.manifest_hash = line.substr(tag.size());
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // column header row
      continue;
    }
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9)
      throw ConfigError("spectrum CSV line " + std::to_string(lineno) +
                        ": expected 9 columns, got " +
                        std::to_string(cells.size()));
    Spectrum& s = out.spectrum;
    s.dl_la_pm.push_back(std::stod(cells[0]));
    s.delta_omega.push_back(std::stod(cells[1]));
    s.transmission.push_back(std::stod(cells[2]));
    s.reflection.push_back(std::stod(cells[3]));
    s.n_cw.push_back(std::stod(cells[4]));
    s.n_ccw.push_back(std::stod(cells[5]));
    s.exciton_population.push_back(std::stod(cells[6]));
    s.n_cav.push_back(std::stod(cells[7]));
    s.truncation_flag.push_back(std::stoi(cells[8]));
  }
  return out;
}

std::string anticrossing_to_csv(const AnticrossingMap& map,
                                const std::string& manifest_hash) {
  std::ostringstream os;
  os << "# cavitysim anticross v1 (long format)\n";
  os << "# manifest_hash: " << manifest_hash << "\n";
  os << "dl_ca_pm,dl_la_pm,transmission,reflection\n";
  for (std::size_t c = 0; c < map.columns.size(); ++c) {
    const Spectrum& s = map.columns[c];
    for (std::size_t i = 0; i < s.size(); ++i)
      os << format_double(map.dl_ca_pm[c]) << ','
         << format_double(s.dl_la_pm[i]) << ','
         << format_double(s.transmission[i]) << ','
         << format_double(s.reflection[i]) << '\n';
  }
  return os.str();
}

std::string saturation_to_csv(const SaturationCurve& curve,
                              const std::string& manifest_hash) {
  std::ostringstream os;
  os << "# cavitysim powersweep v1\n";
  os << "# manifest_hash: " << manifest_hash << "\n";
  os << "# contrast_reference_pm: " << format_double(curve.reference_pm) << "\n";
  os << "p_d_w,n_cav,splitting_pm,peak_reflection,contrast\n";
  for (std::size_t i = 0; i < curve.n_cav.size(); ++i)
    os << format_double(curve.p_d_w[i]) << ',' << format_double(curve.n_cav[i])
       << ',' << format_double(curve.splitting_pm[i]) << ','
       << format_double(curve.peak_reflection[i]) << ','
       << format_double(curve.contrast[i]) << '\n';
  return os.str();
}

void power_law_from_csv(const std::string& text, std::vector<double>& power,
                        std::vector<double>& intensity) {
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string a, b;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ','))
      throw ConfigError("power-law CSV line " + std::to_string(lineno) +
                        ": expected two columns");
    try {
      power.push_back(std::stod(a));
      intensity.push_back(std::stod(b));
    } catch (const std::exception&) {
      if (lineno == 1 || (power.empty() && intensity.empty())) continue;  // header
      throw ConfigError("power-law CSV line " + std::to_string(lineno) +
                        ": not numeric");
    }
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write file: " + path);
  f << text;
}

std::vector<double> GridConfig::materialize(const SystemParams& p) const {
  if (points < 2) throw ConfigError("grid: points must be >= 2");
  if (min_pm && max_pm) {
    if (*max_pm <= *min_pm) throw ConfigError("grid: max_pm must exceed min_pm");
    std::vector<double> g(static_cast<size_t>(points));
    for (int i = 0; i < points; ++i)
      g[size_t(i)] = *min_pm + (*max_pm - *min_pm) * double(i) / double(points - 1);
    return g;
  }
  return default_grid_pm(p, points, half_width_kappa);
}

RunConfig parse_run_config(const std::string& json_text,
                           const std::string& command) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config JSON parse error: ") + e.what());
  }

  check_keys(j,
             {"system", "grid", "drive", "fock_cutoff", "threads", "tol",
              "seed", "schedule", "powersweep", "fit", "data", "output"},
             "config");

  RunConfig cfg;
  if (!j.contains("system"))
    throw ConfigError("config: missing 'system' block");
  cfg.system = system_params_from_json(j["system"]);

  if (j.contains("grid")) {
    const json& g = j["grid"];
    check_keys(g, {"points", "min_pm", "max_pm", "half_width_kappa"}, "grid");
    cfg.grid.points = int(number_or(g, "points", 401, "grid"));
    if (g.contains("min_pm")) cfg.grid.min_pm = require_number(g, "min_pm", "grid");
    if (g.contains("max_pm")) cfg.grid.max_pm = require_number(g, "max_pm", "grid");
    cfg.grid.half_width_kappa = number_or(g, "half_width_kappa", 6.0, "grid");
  }

  if (j.contains("drive")) {
    const json& d = j["drive"];
    check_keys(d, {"n_cav", "p_wg_nw", "weak"}, "drive");
    if (d.contains("n_cav")) cfg.drive_n_cav = require_number(d, "n_cav", "drive");
    if (d.contains("p_wg_nw"))
      cfg.drive_p_wg_nw = require_number(d, "p_wg_nw", "drive");
    if (d.contains("weak")) {
      if (!d["weak"].is_boolean()) throw ConfigError("drive: 'weak' must be bool");
      cfg.weak = d["weak"].get<bool>();
    }
  } else {
    cfg.weak = true;
  }

  cfg.fock_cutoff = int(number_or(j, "fock_cutoff", 8, "config"));
  cfg.threads = int(number_or(j, "threads", 1, "config"));
  cfg.tol = number_or(j, "tol", 1e-10, "config");
  cfg.seed = unsigned(number_or(j, "seed", 0, "config"));
  if (cfg.fock_cutoff < 1) throw ConfigError("config: fock_cutoff must be >= 1");
  if (cfg.threads < 1) throw ConfigError("config: threads must be >= 1");

  if (command == "anticross") {
    if (!j.contains("schedule"))
      throw ConfigError("config: anticross needs a 'schedule' block");
    const json& s = j["schedule"];
    check_keys(s, {"mode", "step_pm", "count", "center_pm", "c0", "c1", "c2"},
               "schedule");
    const std::string mode =
        s.contains("mode") ? s["mode"].get<std::string>() : "linear";
    const int count = int(number_or(s, "count", 20, "schedule"));
    if (mode == "linear") {
      cfg.schedule = TuningSchedule::linear(
          number_or(s, "step_pm", 12.0, "schedule"), count,
          number_or(s, "center_pm", 0.0, "schedule"));
    } else if (mode == "quadratic") {
      cfg.schedule = TuningSchedule::quadratic(
          require_number(s, "c0", "schedule"), require_number(s, "c1", "schedule"),
          require_number(s, "c2", "schedule"), count);
    } else {
      throw ConfigError("schedule: mode must be 'linear' or 'quadratic'");
    }
  }

  if (command == "powersweep") {
    if (!j.contains("powersweep"))
      throw ConfigError("config: powersweep needs a 'powersweep' block");
    const json& p = j["powersweep"];
    check_keys(p, {"n_cav_list", "dl_ca_pm", "reference_pm"}, "powersweep");
    if (!p.contains("n_cav_list") || !p["n_cav_list"].is_array())
      throw ConfigError("powersweep: 'n_cav_list' array required");
    for (const auto& v : p["n_cav_list"]) {
      if (!v.is_number()) throw ConfigError("powersweep: n_cav_list entries must be numbers");
      cfg.n_cav_list.push_back(v.get<double>());
    }
    cfg.sweep_dl_ca_pm = number_or(p, "dl_ca_pm", 0.0, "powersweep");
    if (p.contains("reference_pm"))
      cfg.reference_pm = require_number(p, "reference_pm", "powersweep");
  }

  if (j.contains("fit")) {
    const json& f = j["fit"];
    check_keys(f, {"free", "restarts", "max_iter", "ftol", "weight_t", "weight_r"},
               "fit");
    if (f.contains("free")) {
      if (!f["free"].is_array()) throw ConfigError("fit: 'free' must be an array");
      for (const auto& v : f["free"]) cfg.free_names.push_back(v.get<std::string>());
    }
    cfg.fit_options.restarts = int(number_or(f, "restarts", 3, "fit"));
    cfg.fit_options.max_iter = int(number_or(f, "max_iter", 500, "fit"));
    cfg.fit_options.ftol = number_or(f, "ftol", 1e-12, "fit");
    cfg.fit_options.weight_t = number_or(f, "weight_t", 1.0, "fit");
    cfg.fit_options.weight_r = number_or(f, "weight_r", 1.0, "fit");
    cfg.fit_options.seed = cfg.seed;
  }

  if (command == "fit-qme") {
    if (!j.contains("data") || !j["data"].is_array() || j["data"].empty())
      throw ConfigError("config: fit-qme needs a non-empty 'data' array");
    for (const auto& d : j["data"]) {
      check_keys(d, {"dl_ca_pm", "csv"}, "data");
      RunConfig::DataRef ref;
      ref.dl_ca_pm = require_number(d, "dl_ca_pm", "data");
      if (!d.contains("csv")) throw ConfigError("data: missing 'csv' path");
      ref.csv_path = d["csv"].get<std::string>();
      cfg.data.push_back(ref);
    }
    if (cfg.free_names.empty())
      throw ConfigError("config: fit-qme needs fit.free parameters");
  }

  if (j.contains("output")) {
    if (!j["output"].is_string()) throw ConfigError("config: 'output' must be a string");
    cfg.output_path = j["output"].get<std::string>();
  }
  return cfg;
}

json resolved_config_json(const RunConfig& cfg, const std::string& command) {
  json j;
  j["command"] = command;
  j["system"] = system_params_to_json(cfg.system);
  json grid;
  grid["points"] = cfg.grid.points;
  if (cfg.grid.min_pm) grid["min_pm"] = *cfg.grid.min_pm;
  if (cfg.grid.max_pm) grid["max_pm"] = *cfg.grid.max_pm;
  grid["half_width_kappa"] = cfg.grid.half_width_kappa;
  j["grid"] = grid;
  json drive;
  drive["weak"] = cfg.weak;
  if (cfg.drive_n_cav) drive["n_cav"] = *cfg.drive_n_cav;
  if (cfg.drive_p_wg_nw) drive["p_wg_nw"] = *cfg.drive_p_wg_nw;
  j["drive"] = drive;
  j["fock_cutoff"] = cfg.fock_cutoff;
  j["threads"] = cfg.threads;
  j["tol"] = cfg.tol;
  j["seed"] = cfg.seed;
  if (cfg.schedule) {
    json s;
    s["mode"] = cfg.schedule->mode == TuningSchedule::Mode::linear ? "linear"
                                                                   : "quadratic";
    s["dl_ca_pm"] = cfg.schedule->dl_ca_pm;
    j["schedule"] = s;
  }
  if (!cfg.n_cav_list.empty()) {
    json p;
    p["n_cav_list"] = cfg.n_cav_list;
    p["dl_ca_pm"] = cfg.sweep_dl_ca_pm;
    if (cfg.reference_pm) p["reference_pm"] = *cfg.reference_pm;
    j["powersweep"] = p;
  }
  if (!cfg.free_names.empty()) {
    json f;
    f["free"] = cfg.free_names;
    f["restarts"] = cfg.fit_options.restarts;
    f["max_iter"] = cfg.fit_options.max_iter;
    f["ftol"] = cfg.fit_options.ftol;
    f["weight_t"] = cfg.fit_options.weight_t;
    f["weight_r"] = cfg.fit_options.weight_r;
    j["fit"] = f;
  }
  if (!cfg.data.empty()) {
    json arr = json::array();
    for (const auto& d : cfg.data)
      arr.push_back({{"dl_ca_pm", d.dl_ca_pm}, {"csv", d.csv_path}});
    j["data"] = arr;
  }
  if (!cfg.output_path.empty()) j["output"] = cfg.output_path;
  return j;
}

}  // namespace cqed

#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "cqed/calib.hpp"
#include "cqed/experiments.hpp"
#include "cqed/fitting.hpp"
#include "cqed/model.hpp"
#include "cqed/steady.hpp"

namespace cqed {

// Canonical float formatting ("%.17g"): parse -> print round-trips the
// exact bytes, which makes CSV write -> read -> write byte-identical.
std::string format_double(double v);

// FNV-1a 64-bit, reported as 16 hex digits; used as the manifest hash.
std::string fnv1a_hex(const std::string& data);

// SystemParams <-> flat JSON: rates as value/2pi in GHz (suffix _ghz),
// xi in rad, lengths in nm/pm.  Strict: unknown keys are errors.
nlohmann::json system_params_to_json(const SystemParams& p);
SystemParams system_params_from_json(const nlohmann::json& j);

nlohmann::json calib_result_to_json(const CalibResult& r);
nlohmann::json fit_result_to_json(const FitResult& r);

// Spectrum CSV: '#' header comments (format tag, units, manifest hash),
// one header row, '\n' endings.
std::string spectrum_to_csv(const Spectrum& spec,
                            const std::string& manifest_hash);
struct SpectrumCsv {
  Spectrum spectrum;
  std::string manifest_hash;
};
SpectrumCsv spectrum_from_csv(const std::string& text);

std::string anticrossing_to_csv(const AnticrossingMap& map,
                                const std::string& manifest_hash);
std::string saturation_to_csv(const SaturationCurve& curve,
                              const std::string& manifest_hash);

// Two-column (power, intensity) CSV for the power-law fit; '#' comments and
// a header row are skipped.
void power_law_from_csv(const std::string& text, std::vector<double>& power,
                        std::vector<double>& intensity);

std::string read_file(const std::string& path);   // throws ConfigError
void write_file(const std::string& path, const std::string& text);

// Run configuration shared by the sweep/fit subcommands.
struct GridConfig {
  int points = 401;
  std::optional<double> min_pm;
  std::optional<double> max_pm;
  double half_width_kappa = 6.0;

  std::vector<double> materialize(const SystemParams& p) const;
};

struct RunConfig {
  SystemParams system;
  GridConfig grid;
  std::optional<double> drive_n_cav;     // empty-cavity-calibrated drive
  std::optional<double> drive_p_wg_nw;   // or explicit waveguide power
  bool weak = false;
  int fock_cutoff = 8;
  int threads = 1;
  double tol = 1e-10;
  unsigned seed = 0;

  // anticross
  std::optional<TuningSchedule> schedule;
  // powersweep
  std::vector<double> n_cav_list;
  double sweep_dl_ca_pm = 0.0;
  std::optional<double> reference_pm;
  // fit-qme
  std::vector<std::string> free_names;
  FitOptions fit_options;
  struct DataRef {
    double dl_ca_pm = 0.0;
    std::string csv_path;
  };
  std::vector<DataRef> data;

  std::string output_path;
};

// Parses and validates a config for the given command; strict about
// unknown keys.  Throws ConfigError with the offending key.
RunConfig parse_run_config(const std::string& json_text,
                           const std::string& command);

// Fully-resolved config (defaults materialized) used as the manifest.
nlohmann::json resolved_config_json(const RunConfig& cfg,
                                    const std::string& command);

}  // namespace cqed

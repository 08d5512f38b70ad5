#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace dpmimo {

/// Scalar parameters of one simulation campaign. Powers in mW, noise in dBm.
/// Field names double as the keys of the config file format.
struct SystemConfig {
  int M = 100;          ///< BS ports (M/2 dual-polarized elements); even
  int K = 10;
  int tau_c = 200;
  int tau_p = 0;        ///< 0 selects 2K; otherwise must equal 2K
  int tau_uni_p = 0;    ///< 0 selects K
  double xpd_db = 7.0;
  int N_clusters = 6;
  double asd_deg = 5.0;
  double sigma_sf = 7.0;
  double noise_dbm = -94.0;
  double p_kV = 100.0;
  double p_kH = 100.0;
  double rho_kV = 100.0;
  double rho_kH = 100.0;
  double p_uni = 200.0;
  double rho_uni = 200.0;
  double bandwidth_mhz = 20.0;  ///< metadata only
  std::uint64_t seed = 1;
  int drops = 200;
  int mc_trials = 1000;

  int pilot_length() const { return tau_p > 0 ? tau_p : 2 * K; }
  int uni_pilot_length() const { return tau_uni_p > 0 ? tau_uni_p : K; }
  double noise_var_mw() const;

  /// Throws Error(kInvalidConfig) on violated invariants.
  void validate() const;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown or repeated
/// keys are errors (Error(kInvalidConfig)). Missing keys keep defaults.
SystemConfig parse_config(std::istream& in);
SystemConfig load_config(const std::string& path);

/// Canonical `key = value` listing of every field, in declaration order.
std::string serialize_config(const SystemConfig& config);

/// 16 hex digits (FNV-1a 64) of serialize_config.
std::string config_digest(const SystemConfig& config);

}  // namespace dpmimo

// dpmimo: experiment driver for the dual-polarized massive MIMO downlink.
//
//   dpmimo m-sweep   [--m-values 20,40,...]   sum SE vs array size
//   dpmimo cdf                                per-UE SE samples at config M
//   dpmimo xpd-sweep [--xpd-values 0,7,inf]   dual-pol sum SE vs XPD
//   dpmimo validate                           invariant battery
//
// Exit status: 0 ok, 2 validation failure, 1 any other error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dpmimo/config.hpp"
#include "dpmimo/errors.hpp"
#include "dpmimo/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitValidationFailed = 2;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> drops;
  std::string out;
  unsigned workers = 0;
  bool resume = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "master seed (overrides config)");
  cmd->add_option("--out", args.out, "output CSV path (stdout if omitted)");
  cmd->add_option("--trials", args.trials, "Monte Carlo trials per cell (overrides mc_trials)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--drops", args.drops, "UE drops (overrides config)")->check(CLI::PositiveNumber);
  cmd->add_option("--workers", args.workers, "drop-level threads, 0 = hardware concurrency");
}

void add_resume(CLI::App* cmd, CommonArgs& args) {
  cmd->add_flag("--resume", args.resume,
                "reuse completed drops from an existing --out file with the same config");
}

// Rows of a previous run at args.out, if its sidecar carries the same digest.
std::vector<dpmimo::ResultRow> previous_rows(const CommonArgs& args,
                                             const dpmimo::SystemConfig& config) {
  if (!args.resume) return {};
  if (args.out.empty()) throw std::runtime_error("--resume needs --out");
  std::ifstream csv(args.out, std::ios::binary);
  if (!csv) return {};
  std::ifstream meta(args.out + ".meta.json");
  if (!meta) throw std::runtime_error("--resume: missing " + args.out + ".meta.json");
  const auto j = nlohmann::json::parse(meta);
  if (j.at("config_digest").get<std::string>() != dpmimo::config_digest(config)) {
    throw std::runtime_error("--resume: " + args.out + " was produced with a different config");
  }
  return dpmimo::read_rows_csv(csv);
}

dpmimo::SystemConfig resolve_config(const CommonArgs& args) {
  dpmimo::SystemConfig config;
  if (!args.config_path.empty()) config = dpmimo::load_config(args.config_path);
  if (args.seed) config.seed = *args.seed;
  if (args.trials) config.mc_trials = *args.trials;
  if (args.drops) config.drops = *args.drops;
  config.validate();
  return config;
}

std::vector<double> parse_xpd_list(const std::vector<std::string>& items) {
  std::vector<double> values;
  for (const auto& s : items) {
    if (s == "inf" || s == "+inf") {
      values.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || !std::isfinite(v)) {
      throw dpmimo::Error(dpmimo::ErrorCode::kInvalidConfig, "bad XPD value '" + s + "'");
    }
    values.push_back(v);
  }
  return values;
}

void emit_rows(const CommonArgs& args, const dpmimo::SystemConfig& config,
               const std::string& experiment, const std::vector<dpmimo::ResultRow>& rows) {
  if (args.out.empty()) {
    dpmimo::write_rows_csv(std::cout, rows);
    return;
  }
  std::ofstream csv(args.out, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot open " + args.out);
  dpmimo::write_rows_csv(csv, rows);
  std::ofstream meta(args.out + ".meta.json", std::ios::binary);
  if (!meta) throw std::runtime_error("cannot open " + args.out + ".meta.json");
  dpmimo::write_metadata_json(meta, config, experiment);
  if (!csv || !meta) throw std::runtime_error("write failed for " + args.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-polarized massive MIMO downlink SE experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dpmimo::artifact_version()));

  CommonArgs args;
  std::vector<int> m_values{20, 40, 60, 80, 100};
  std::vector<int> xpd_m_values{40, 100};
  std::vector<std::string> xpd_items{"0", "7", "inf"};
  bool mr_markers = false;
  bool corrupt_gamma = false;

  auto* m_sweep = app.add_subcommand("m-sweep", "average sum SE versus M, dual and uni");
  add_common(m_sweep, args);
  add_resume(m_sweep, args);
  m_sweep->add_option("--m-values", m_values, "comma separated even M values")->delimiter(',');
  m_sweep->add_flag("--mr-markers", mr_markers, "also Monte Carlo the dual-pol MR points");

  auto* cdf = app.add_subcommand("cdf", "per-UE SE samples at config M");
  add_common(cdf, args);
  add_resume(cdf, args);
  cdf->add_flag("--mr-markers", mr_markers, "also Monte Carlo the dual-pol MR points");

  auto* xpd = app.add_subcommand("xpd-sweep", "dual-pol average sum SE versus XPD");
  add_common(xpd, args);
  add_resume(xpd, args);
  xpd->add_option("--m-values", xpd_m_values, "comma separated even M values")->delimiter(',');
  xpd->add_option("--xpd-values", xpd_items, "comma separated XPD values in dB, inf allowed")
      ->delimiter(',');

  auto* val = app.add_subcommand("validate", "run the invariant battery on drop 0");
  add_common(val, args);
  val->add_flag("--corrupt-gamma", corrupt_gamma, "fault injection: inflate Gamma_v by 1.5");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    const dpmimo::SystemConfig config = resolve_config(args);
    dpmimo::RunOptions options;
    options.mr_markers = mr_markers;
    options.workers = args.workers;
    const auto completed = previous_rows(args, config);
    options.completed = completed;

    if (m_sweep->parsed()) {
      emit_rows(args, config, "m-sweep", dpmimo::run_m_sweep(config, m_values, options));
    } else if (cdf->parsed()) {
      emit_rows(args, config, "cdf", dpmimo::run_cdf(config, options));
    } else if (xpd->parsed()) {
      const auto xpd_values = parse_xpd_list(xpd_items);
      emit_rows(args, config, "xpd-sweep",
                dpmimo::run_xpd_sweep(config, xpd_m_values, xpd_values, options));
    } else if (val->parsed()) {
      dpmimo::ValidationHooks hooks;
      hooks.corrupt_gamma = corrupt_gamma;
      const auto report = dpmimo::validate(config, hooks);
      std::cout << report.text();
      if (!args.out.empty()) {
        std::ofstream csv(args.out, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot open " + args.out);
        report.write_csv(csv);
      }
      return report.passed() ? kExitOk : kExitValidationFailed;
    }
  } catch (const dpmimo::Error& e) {
    std::cerr << "dpmimo: " << dpmimo::to_string(e.code()) << ": " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "dpmimo: " << e.what() << '\n';
    return kExitError;
  }
  return kExitOk;
}

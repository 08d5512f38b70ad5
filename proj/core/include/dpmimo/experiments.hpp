#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dpmimo/config.hpp"
#include "dpmimo/link.hpp"
#include "dpmimo/scenario.hpp"

namespace dpmimo {

enum class Setup { kDual, kUni };

const char* to_string(Setup setup);

/// One CSV row. drop_index == -1 marks an average over drops and
/// ue_index == -1 a sum over UEs. Failed cells carry se = 0 and a method
/// of the form "failed:<ErrorName>". Uni-polarized rows repeat the
/// campaign XPD, which the uni model does not use.
struct ResultRow {
  std::string experiment;
  int M = 0;
  int K = 0;
  PrecoderScheme precoder = PrecoderScheme::kMR;
  Setup setup = Setup::kDual;
  double xpd_db = 0.0;
  int drop_index = -1;
  int ue_index = -1;
  double se = 0.0;
  std::string method;
  std::uint64_t seed = 0;
};

struct RunOptions {
  /// Also run Monte Carlo for dual-polarized MR next to its closed form.
  bool mr_markers = false;
  /// Drop-level worker threads; 0 uses std::thread::hardware_concurrency().
  unsigned workers = 0;
  /// Rows of an earlier run with the same config. A drop whose per-drop rows
  /// are all present is taken from here instead of being recomputed.
  std::span<const ResultRow> completed;
};

/// Large-scale realization of one UE drop. Depends on (seed, drop_index)
/// and the array size only, so every M and XPD sees the same UEs.
struct DropRealization {
  int drop_index = 0;
  std::vector<UEDrop> ues;
  std::vector<ComplexMatrix> R_bs;  ///< M/2 x M/2 per UE
};

DropRealization realize_drop(const SystemConfig& config, int m, int drop_index);

DualPolLink make_dual_link(const SystemConfig& config, const DropRealization& drop,
                           double xpd_db);
UniPolLink make_uni_link(const SystemConfig& config, const DropRealization& drop);

/// Monte Carlo spec of one (M, drop, setup, precoder) cell. The seed does
/// not depend on the XPD, so XPD sweeps share random numbers across points.
MonteCarloSpec cell_monte_carlo_spec(const SystemConfig& config, int m, int drop_index,
                                     Setup setup, PrecoderScheme precoder);

/// Recomputes a single cell from its row metadata. MR uses the closed forms
/// unless monte_carlo_mr is set; ZF is always Monte Carlo.
SEReport evaluate_cell(const SystemConfig& config, int m, int drop_index, double xpd_db,
                       Setup setup, PrecoderScheme precoder, bool monte_carlo_mr = false);

/// Average sum SE versus M for the dual- and uni-polarized setups, MR and ZF.
std::vector<ResultRow> run_m_sweep(const SystemConfig& config, std::span<const int> m_values,
                                   const RunOptions& options = {});

/// Per-UE SE samples at config.M for the four (setup, precoder) pairs.
std::vector<ResultRow> run_cdf(const SystemConfig& config, const RunOptions& options = {});

/// Dual-polarized sum SE versus XPD (same XPD for all UEs), MR and ZF.
std::vector<ResultRow> run_xpd_sweep(const SystemConfig& config, std::span<const int> m_values,
                                     std::span<const double> xpd_values_db,
                                     const RunOptions& options = {});

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  std::string config_digest;
  std::uint64_t seed = 0;

  bool passed() const;
  std::string text() const;
  void write_csv(std::ostream& out) const;
};

/// Fault injection for exercising the validator itself.
struct ValidationHooks {
  bool corrupt_gamma = false;
};

ValidationReport validate(const SystemConfig& config, const ValidationHooks& hooks = {});

// CSV output.

/// experiment,M,K,precoder,setup,xpd_db,drop_index,ue_index,se,method,seed
inline constexpr const char* kResultCsvHeader =
    "experiment,M,K,precoder,setup,xpd_db,drop_index,ue_index,se,method,seed";

/// %.9g; infinities as inf / -inf.
std::string format_float(double value);

void write_rows_csv(std::ostream& out, std::span<const ResultRow> rows);

/// Inverse of write_rows_csv. Throws std::runtime_error on malformed input.
std::vector<ResultRow> read_rows_csv(std::istream& in);

/// JSON sidecar with the config digest, seed and artifact version.
void write_metadata_json(std::ostream& out, const SystemConfig& config,
                         const std::string& experiment);

const char* artifact_version();

}  // namespace dpmimo

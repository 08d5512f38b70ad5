#include "dpmimo/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <cstdlib>
#include <map>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "dpmimo/errors.hpp"

namespace dpmimo {
namespace {

// Substream tags; part of the reproducibility contract.
constexpr std::uint64_t kDropStream = 1;
constexpr std::uint64_t kMonteCarloStream = 2;
constexpr std::uint64_t kValidationStream = 3;
constexpr std::size_t kValidationTrials = 10000;

template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < n; i = next++) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Result of one (setup, precoder) cell of one drop.
struct CellOutcome {
  Setup setup = Setup::kDual;
  PrecoderScheme precoder = PrecoderScheme::kMR;
  std::string method;
  std::optional<SEReport> report;
};

CellOutcome guarded(Setup setup, PrecoderScheme precoder, const std::function<SEReport()>& fn) {
  CellOutcome out{setup, precoder, {}, std::nullopt};
  try {
    out.report = fn();
    out.method = to_string(out.report->method);
  } catch (const Error& e) {
    out.method = std::string("failed:") + to_string(e.code());
  }
  return out;
}

ResultRow make_row(const std::string& experiment, const SystemConfig& config, int m,
                   double xpd_db, int drop, int ue, const CellOutcome& cell, double se) {
  ResultRow row;
  row.experiment = experiment;
  row.M = m;
  row.K = config.K;
  row.precoder = cell.precoder;
  row.setup = cell.setup;
  row.xpd_db = xpd_db;
  row.drop_index = drop;
  row.ue_index = ue;
  row.se = se;
  row.method = cell.method;
  row.seed = config.seed;
  return row;
}

using CellLayout = std::vector<std::pair<Setup, PrecoderScheme>>;

// Cell order produced by evaluate_drop.
CellLayout cell_layout(bool with_uni, bool mr_markers) {
  CellLayout out{{Setup::kDual, PrecoderScheme::kMR}, {Setup::kDual, PrecoderScheme::kZF}};
  if (mr_markers) out.emplace_back(Setup::kDual, PrecoderScheme::kMR);
  if (with_uni) {
    out.emplace_back(Setup::kUni, PrecoderScheme::kMR);
    out.emplace_back(Setup::kUni, PrecoderScheme::kZF);
  }
  return out;
}

// Per-drop rows of an earlier run, grouped by (M, XPD, drop).
class CompletedIndex {
 public:
  CompletedIndex(std::span<const ResultRow> rows, const std::string& experiment,
                 const SystemConfig& config) {
    for (const auto& r : rows) {
      if (r.experiment == experiment && r.drop_index >= 0 && r.seed == config.seed &&
          r.K == config.K) {
        groups_[key(r.M, r.xpd_db, r.drop_index)].push_back(&r);
      }
    }
  }

  // per_ue == 0 means one sum row per cell.
  std::optional<std::vector<CellOutcome>> lookup(int m, double xpd_db, int drop,
                                                 const CellLayout& layout, int per_ue) const {
    const auto it = groups_.find(key(m, xpd_db, drop));
    if (it == groups_.end()) return std::nullopt;
    const auto& rows = it->second;
    const std::size_t stride = per_ue > 0 ? static_cast<std::size_t>(per_ue) : 1;
    if (rows.size() != layout.size() * stride) return std::nullopt;
    std::vector<CellOutcome> cells;
    for (std::size_t c = 0; c < layout.size(); ++c) {
      CellOutcome cell{layout[c].first, layout[c].second, rows[c * stride]->method, std::nullopt};
      SEReport report;
      for (std::size_t u = 0; u < stride; ++u) {
        const ResultRow& r = *rows[c * stride + u];
        const int want_ue = per_ue > 0 ? static_cast<int>(u) : -1;
        if (r.setup != cell.setup || r.precoder != cell.precoder || r.ue_index != want_ue ||
            r.method != cell.method) {
          return std::nullopt;
        }
        report.per_ue_se.push_back(r.se);
        report.sum_se += r.se;
      }
      if (cell.method.rfind("failed:", 0) != 0) cell.report = std::move(report);
      cells.push_back(std::move(cell));
    }
    return cells;
  }

 private:
  static std::string key(int m, double xpd_db, int drop) {
    return std::to_string(m) + '|' + format_float(xpd_db) + '|' + std::to_string(drop);
  }
  std::map<std::string, std::vector<const ResultRow*>> groups_;
};

// Evaluates the requested cells of one drop, in the given order.
std::vector<CellOutcome> evaluate_drop(const SystemConfig& config, int m, double xpd_db,
                                       const DropRealization& drop, bool with_uni,
                                       bool mr_markers) {
  std::vector<CellOutcome> cells;
  std::optional<DualPolLink> dual;
  std::optional<Error> dual_error;
  try {
    dual.emplace(make_dual_link(config, drop, xpd_db));
  } catch (const Error& e) {
    dual_error = e;
  }
  auto with_dual = [&](const std::function<SEReport(const DualPolLink&)>& fn) {
    return [&, fn] {
      if (!dual) throw *dual_error;
      return fn(*dual);
    };
  };
  const int d = drop.drop_index;
  cells.push_back(guarded(Setup::kDual, PrecoderScheme::kMR,
                          with_dual([](const DualPolLink& l) { return l.closed_form_mr(); })));
  cells.push_back(guarded(Setup::kDual, PrecoderScheme::kZF, with_dual([&](const DualPolLink& l) {
    return l.monte_carlo(PrecoderScheme::kZF, EstimationPath::kDirect,
                         cell_monte_carlo_spec(config, m, d, Setup::kDual, PrecoderScheme::kZF));
  })));
  if (mr_markers) {
    cells.push_back(guarded(Setup::kDual, PrecoderScheme::kMR, with_dual([&](const DualPolLink& l) {
      return l.monte_carlo(PrecoderScheme::kMR, EstimationPath::kDirect,
                           cell_monte_carlo_spec(config, m, d, Setup::kDual, PrecoderScheme::kMR));
    })));
  }
  if (with_uni) {
    std::optional<UniPolLink> uni;
    std::optional<Error> uni_error;
    try {
      uni.emplace(make_uni_link(config, drop));
    } catch (const Error& e) {
      uni_error = e;
    }
    auto with_uni_link = [&](const std::function<SEReport(const UniPolLink&)>& fn) {
      return [&, fn] {
        if (!uni) throw *uni_error;
        return fn(*uni);
      };
    };
    cells.push_back(guarded(Setup::kUni, PrecoderScheme::kMR,
                            with_uni_link([](const UniPolLink& l) { return l.closed_form_mr(); })));
    cells.push_back(guarded(Setup::kUni, PrecoderScheme::kZF, with_uni_link([&](const UniPolLink& l) {
      return l.monte_carlo(PrecoderScheme::kZF,
                           cell_monte_carlo_spec(config, m, d, Setup::kUni, PrecoderScheme::kZF));
    })));
  }
  return cells;
}

// Per-drop sum rows followed by one average row per cell position.
// Averages are taken over the per-drop values as printed, so a resumed run
// reproduces them exactly from its own CSV.
double as_printed(double value) { return std::strtod(format_float(value).c_str(), nullptr); }

void append_sum_rows(const std::string& experiment, const SystemConfig& config, int m,
                     double xpd_db, const std::vector<std::vector<CellOutcome>>& per_drop,
                     std::vector<ResultRow>& rows) {
  for (std::size_t d = 0; d < per_drop.size(); ++d) {
    for (const auto& cell : per_drop[d]) {
      rows.push_back(make_row(experiment, config, m, xpd_db, static_cast<int>(d), -1, cell,
                              cell.report ? cell.report->sum_se : 0.0));
    }
  }
  if (per_drop.empty()) return;
  for (std::size_t c = 0; c < per_drop.front().size(); ++c) {
    double total = 0.0;
    std::size_t ok = 0;
    std::string method;
    for (const auto& drop : per_drop) {
      const auto& cell = drop[c];
      if (!cell.report) continue;
      total += as_printed(cell.report->sum_se);
      method = cell.method;
      ++ok;
    }
    CellOutcome summary = per_drop.front()[c];
    summary.method = ok > 0 ? method : per_drop.front()[c].method;
    rows.push_back(make_row(experiment, config, m, xpd_db, -1, -1, summary,
                            ok > 0 ? total / static_cast<double>(ok) : 0.0));
  }
}

void require_even_m(int m) {
  if (m < 2 || m % 2 != 0) {
    throw Error(ErrorCode::kInvalidConfig, "M must be a positive even number, got " + std::to_string(m));
  }
}

}  // namespace

const char* to_string(Setup setup) { return setup == Setup::kDual ? "dual" : "uni"; }

DropRealization realize_drop(const SystemConfig& config, int m, int drop_index) {
  require_even_m(m);
  RandomStream rng(derive_seed(config.seed, {kDropStream, static_cast<std::uint64_t>(drop_index)}));
  DropParams params;
  params.shadow_std_db = config.sigma_sf;
  params.clusters = static_cast<std::size_t>(config.N_clusters);

  DropRealization drop;
  drop.drop_index = drop_index;
  drop.ues = drop_ues(static_cast<std::size_t>(config.K), Geometry{}, rng, params);
  const double asd = degrees_to_radians(config.asd_deg);
  drop.R_bs.reserve(drop.ues.size());
  for (const auto& ue : drop.ues) {
    drop.R_bs.push_back(local_scattering_cov(ue.beta, ue.cluster_angles, asd, m / 2));
  }
  return drop;
}

DualPolLink make_dual_link(const SystemConfig& config, const DropRealization& drop,
                           double xpd_db) {
  const double q = xpd_from_db(xpd_db).q;
  std::vector<CorrelationSet> corrs;
  corrs.reserve(drop.R_bs.size());
  for (const auto& r : drop.R_bs) corrs.push_back(build_correlation_set(r, q));
  std::vector<PilotPowers> pilot(corrs.size(), PilotPowers{config.p_kV, config.p_kH});
  std::vector<StreamPowers> rho(corrs.size(), StreamPowers{config.rho_kV, config.rho_kH});
  return DualPolLink(std::move(corrs), std::move(pilot), std::move(rho), config.tau_c,
                     config.noise_var_mw());
}

UniPolLink make_uni_link(const SystemConfig& config, const DropRealization& drop) {
  return UniPolLink(drop.R_bs, config.p_uni, config.rho_uni, config.uni_pilot_length(),
                    config.tau_c, config.noise_var_mw());
}

MonteCarloSpec cell_monte_carlo_spec(const SystemConfig& config, int m, int drop_index,
                                     Setup setup, PrecoderScheme precoder) {
  MonteCarloSpec spec;
  spec.trials = static_cast<std::size_t>(config.mc_trials);
  spec.seed = derive_seed(config.seed, {kMonteCarloStream, static_cast<std::uint64_t>(drop_index),
                                        static_cast<std::uint64_t>(m),
                                        static_cast<std::uint64_t>(setup),
                                        static_cast<std::uint64_t>(precoder)});
  spec.workers = 1;
  return spec;
}

SEReport evaluate_cell(const SystemConfig& config, int m, int drop_index, double xpd_db,
                       Setup setup, PrecoderScheme precoder, bool monte_carlo_mr) {
  config.validate();
  const DropRealization drop = realize_drop(config, m, drop_index);
  const MonteCarloSpec spec = cell_monte_carlo_spec(config, m, drop_index, setup, precoder);
  if (setup == Setup::kDual) {
    const DualPolLink link = make_dual_link(config, drop, xpd_db);
    if (precoder == PrecoderScheme::kMR && !monte_carlo_mr) return link.closed_form_mr();
    return link.monte_carlo(precoder, EstimationPath::kDirect, spec);
  }
  const UniPolLink link = make_uni_link(config, drop);
  if (precoder == PrecoderScheme::kMR && !monte_carlo_mr) return link.closed_form_mr();
  return link.monte_carlo(precoder, spec);
}

std::vector<ResultRow> run_m_sweep(const SystemConfig& config, std::span<const int> m_values,
                                   const RunOptions& options) {
  config.validate();
  const CompletedIndex index(options.completed, "m-sweep", config);
  const CellLayout layout = cell_layout(true, options.mr_markers);
  std::vector<ResultRow> rows;
  for (int m : m_values) {
    require_even_m(m);
    std::vector<std::vector<CellOutcome>> per_drop(static_cast<std::size_t>(config.drops));
    parallel_for(per_drop.size(), options.workers, [&](std::size_t d) {
      if (auto done = index.lookup(m, config.xpd_db, static_cast<int>(d), layout, 0)) {
        per_drop[d] = std::move(*done);
        return;
      }
      const DropRealization drop = realize_drop(config, m, static_cast<int>(d));
      per_drop[d] = evaluate_drop(config, m, config.xpd_db, drop, true, options.mr_markers);
    });
    append_sum_rows("m-sweep", config, m, config.xpd_db, per_drop, rows);
  }
  return rows;
}

std::vector<ResultRow> run_cdf(const SystemConfig& config, const RunOptions& options) {
  config.validate();
  const int m = config.M;
  const CompletedIndex index(options.completed, "cdf", config);
  const CellLayout layout = cell_layout(true, options.mr_markers);
  std::vector<std::vector<CellOutcome>> per_drop(static_cast<std::size_t>(config.drops));
  parallel_for(per_drop.size(), options.workers, [&](std::size_t d) {
    if (auto done = index.lookup(m, config.xpd_db, static_cast<int>(d), layout, config.K)) {
      per_drop[d] = std::move(*done);
      return;
    }
    const DropRealization drop = realize_drop(config, m, static_cast<int>(d));
    per_drop[d] = evaluate_drop(config, m, config.xpd_db, drop, true, options.mr_markers);
  });

  std::vector<ResultRow> rows;
  for (std::size_t d = 0; d < per_drop.size(); ++d) {
    for (const auto& cell : per_drop[d]) {
      for (int k = 0; k < config.K; ++k) {
        const double se = cell.report ? cell.report->per_ue_se[static_cast<std::size_t>(k)] : 0.0;
        rows.push_back(make_row("cdf", config, m, config.xpd_db, static_cast<int>(d), k, cell, se));
      }
    }
  }
  return rows;
}

std::vector<ResultRow> run_xpd_sweep(const SystemConfig& config, std::span<const int> m_values,
                                     std::span<const double> xpd_values_db,
                                     const RunOptions& options) {
  config.validate();
  for (double x : xpd_values_db) {
    if (std::isnan(x)) throw Error(ErrorCode::kInvalidConfig, "XPD value is NaN");
  }
  const CompletedIndex index(options.completed, "xpd-sweep", config);
  const CellLayout layout = cell_layout(false, options.mr_markers);
  std::vector<ResultRow> rows;
  for (int m : m_values) {
    require_even_m(m);
    const auto n_drops = static_cast<std::size_t>(config.drops);
    // [xpd][drop] -> cells
    std::vector<std::vector<std::vector<CellOutcome>>> grid(
        xpd_values_db.size(), std::vector<std::vector<CellOutcome>>(n_drops));
    parallel_for(n_drops, options.workers, [&](std::size_t d) {
      std::optional<DropRealization> drop;
      for (std::size_t x = 0; x < xpd_values_db.size(); ++x) {
        const int di = static_cast<int>(d);
        if (auto done = index.lookup(m, xpd_values_db[x], di, layout, 0)) {
          grid[x][d] = std::move(*done);
          continue;
        }
        if (!drop) drop.emplace(realize_drop(config, m, di));
        grid[x][d] = evaluate_drop(config, m, xpd_values_db[x], *drop, false, options.mr_markers);
      }
    });
    for (std::size_t x = 0; x < xpd_values_db.size(); ++x) {
      append_sum_rows("xpd-sweep", config, m, xpd_values_db[x], grid[x], rows);
    }
  }
  return rows;
}

// Validation

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string ValidationReport::text() const {
  std::ostringstream out;
  out << "validation config_digest=" << config_digest << " seed=" << seed << '\n';
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " measured=" << format_float(c.measured)
        << " tolerance=" << format_float(c.tolerance);
    if (!c.detail.empty()) out << " (" << c.detail << ')';
    out << '\n';
  }
  out << "RESULT " << (passed() ? "PASS" : "FAIL") << '\n';
  return out.str();
}

void ValidationReport::write_csv(std::ostream& out) const {
  out << "check,passed,measured,tolerance,config_digest,seed\n";
  for (const auto& c : checks) {
    out << c.name << ',' << (c.passed ? 1 : 0) << ',' << format_float(c.measured) << ','
        << format_float(c.tolerance) << ',' << config_digest << ',' << seed << '\n';
  }
}

ValidationReport validate(const SystemConfig& config, const ValidationHooks& hooks) {
  config.validate();
  ValidationReport report;
  report.config_digest = config_digest(config);
  report.seed = config.seed;
  auto add = [&](std::string name, double measured, double tolerance, std::string detail = {}) {
    report.checks.push_back(
        {std::move(name), measured <= tolerance, measured, tolerance, std::move(detail)});
  };

  const DropRealization drop = realize_drop(config, config.M, 0);
  const DualPolLink link = make_dual_link(config, drop, config.xpd_db);
  const auto& corrs = link.correlations();
  const auto& stats = link.statistics();

  double split = 0.0;
  double traces = 0.0;
  double gamma_plus_c = 0.0;
  double equal_traces = 0.0;
  for (std::size_t k = 0; k < corrs.size(); ++k) {
    const auto& c = corrs[k];
    const auto& s = *stats[k];
    split = std::max(split, (c.R_v + c.R_h - c.R).cwiseAbs().maxCoeff() / c.R.norm());
    const double tr_bs = c.R_bs.trace().real();
    traces = std::max({traces, std::abs(c.R_v.trace().real() - tr_bs) / tr_bs,
                       std::abs(c.R_h.trace().real() - tr_bs) / tr_bs});
    gamma_plus_c = std::max({gamma_plus_c, (s.Gamma_v + s.C_v - c.R_v).norm() / c.R_v.norm(),
                             (s.Gamma_h + s.C_h - c.R_h).norm() / c.R_h.norm()});
    if (s.p_v == s.p_h) {
      equal_traces = std::max(equal_traces, std::abs(s.trace_Gamma_v - s.trace_Gamma_h) /
                                                std::max(s.trace_Gamma_v, kMinEstimateTrace));
    }
  }
  add("R_v+R_h=R", split, 1e-12);
  add("tr(R_v)=tr(R_h)=tr(R_bs)", traces, 1e-10);
  add("Gamma+C=R", gamma_plus_c, 1e-10);
  add("tr(Gamma_v)=tr(Gamma_h)", equal_traces, 1e-10);

  // Channel XPD statistics on UE 0.
  {
    RandomStream rng(derive_seed(config.seed, {kValidationStream, 1}));
    std::vector<DualPolChannel> samples(20000);
    for (auto& s : samples) s = sample_dual_channel(corrs.front(), rng);
    const double measured = empirical_xpd(samples);
    const double error = std::isinf(config.xpd_db)
                             ? (std::isinf(measured) ? 0.0 : std::numeric_limits<double>::infinity())
                             : std::abs(measured - config.xpd_db);
    add("empirical_xpd", error, 0.3, "measured " + format_float(measured) + " dB");
  }

  // MMSE orthogonality on the end-to-end pilot path, UE 0.
  {
    RandomStream rng(derive_seed(config.seed, {kValidationStream, 2}));
    const std::size_t n = 2000;
    const Eigen::Index m = link.ports();
    ComplexMatrix cross = ComplexMatrix::Zero(m, m);
    for (std::size_t t = 0; t < n; ++t) {
      const auto draws = link.draw(EstimationPath::kEndToEnd, rng);
      const auto& d = draws.front();
      cross += d.estimate.hhat_v * (d.channel.h_v - d.estimate.hhat_v).adjoint();
    }
    cross /= static_cast<double>(n);
    const double bound = 5.0 * corrs.front().R_v.norm() / std::sqrt(static_cast<double>(n));
    add("mmse_orthogonality", cross.cwiseAbs().maxCoeff() / bound, 1.0,
        "max |E{hhat e^H}| relative to 5 ||R_v||_F / sqrt(n)");
  }

  // The 3-sigma checks need a usable standard error even for small campaigns.
  MonteCarloSpec spec;
  spec.trials = std::max<std::size_t>(static_cast<std::size_t>(config.mc_trials), kValidationTrials);
  spec.seed = derive_seed(config.seed, {kValidationStream, 3});

  // Closed form versus the generic bound, MR.
  {
    SEReport closed;
    if (hooks.corrupt_gamma) {
      std::vector<std::shared_ptr<const EstimatorStatistics>> corrupted;
      for (const auto& s : stats) {
        auto copy = std::make_shared<EstimatorStatistics>(*s);
        copy->Gamma_v *= 1.5;
        copy->trace_Gamma_v *= 1.5;
        corrupted.push_back(copy);
      }
      closed = closed_form_se_mr(corrs, corrupted, link.downlink_powers(), link.noise_var(),
                                 link.prelog());
    } else {
      closed = link.closed_form_mr();
    }
    const SEReport mc = link.monte_carlo(PrecoderScheme::kMR, EstimationPath::kDirect, spec);
    double worst = 0.0;
    for (std::size_t k = 0; k < closed.per_ue_se.size(); ++k) {
      const double allowed = std::max(3.0 * mc.per_ue_std_error[k], 0.02);
      worst = std::max(worst, std::abs(closed.per_ue_se[k] - mc.per_ue_se[k]) / allowed);
    }
    add("closed_form_vs_monte_carlo", worst, 1.0, "max |cf - mc| / max(3 se, 0.02)");
  }

  // Estimator path equivalence, MR.
  {
    MonteCarloSpec e2e = spec;
    e2e.seed = derive_seed(config.seed, {kValidationStream, 4});
    const SEReport direct = link.monte_carlo(PrecoderScheme::kMR, EstimationPath::kDirect, spec);
    const SEReport pilots = link.monte_carlo(PrecoderScheme::kMR, EstimationPath::kEndToEnd, e2e);
    double worst = 0.0;
    for (std::size_t k = 0; k < direct.per_ue_se.size(); ++k) {
      const double joint = std::hypot(direct.per_ue_std_error[k], pilots.per_ue_std_error[k]);
      const double allowed = std::max(3.0 * joint, 1e-12);
      worst = std::max(worst, std::abs(direct.per_ue_se[k] - pilots.per_ue_se[k]) / allowed);
    }
    add("estimator_path_equivalence", worst, 1.0, "max |direct - pilots| / (3 joint se)");
  }
  return report;
}

}  // namespace dpmimo

// Acceptance battery. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dpmimo/channel.hpp"
#include "dpmimo/config.hpp"
#include "dpmimo/correlation.hpp"
#include "dpmimo/experiments.hpp"
#include "dpmimo/link.hpp"
#include "dpmimo/precoding.hpp"
#include "dpmimo/scenario.hpp"
#include "dpmimo/se.hpp"

using namespace dpmimo;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

// 1. Closed form against the Monte Carlo bound, MR.
Outcome closed_form_validation() {
  double worst = 0.0;
  double worst_gap = 0.0;
  for (int m : {32, 64}) {
    SystemConfig config;
    config.M = m;
    config.K = 4;
    for (int drop = 0; drop < 5; ++drop) {
      const auto link = make_dual_link(config, realize_drop(config, m, drop), config.xpd_db);
      MonteCarloSpec spec;
      spec.trials = 20'000;
      spec.seed = derive_seed(config.seed, {101, static_cast<std::uint64_t>(m),
                                            static_cast<std::uint64_t>(drop)});
      const auto mc = link.monte_carlo(PrecoderScheme::kMR, EstimationPath::kDirect, spec);
      const auto cf = link.closed_form_mr();
      for (std::size_t k = 0; k < cf.per_ue_se.size(); ++k) {
        const double gap = std::abs(cf.per_ue_se[k] - mc.per_ue_se[k]);
        const double allowed = std::max(3.0 * mc.per_ue_std_error[k], 0.02);
        worst = std::max(worst, gap / allowed);
        worst_gap = std::max(worst_gap, gap);
      }
    }
  }
  return {worst <= 1.0, fmt("worst |cf - mc| / max(3 se, 0.02) = %.3f, largest gap %.4f bit/s/Hz",
                            worst, worst_gap)};
}

struct Ratios {
  double mr = 0.0;
  double zf = 0.0;
  std::string failures;
};

Ratios dual_uni_ratios(int m, int drops) {
  SystemConfig config;
  config.drops = drops;
  const std::vector<int> ms{m};
  std::map<std::string, double> avg;
  Ratios out;
  for (const auto& r : run_m_sweep(config, ms)) {
    if (r.method.rfind("failed:", 0) == 0) out.failures += " " + r.method;
    if (r.drop_index >= 0) continue;
    avg[std::string(to_string(r.setup)) + to_string(r.precoder)] = r.se;
  }
  out.mr = avg["dualMR"] / avg["uniMR"];
  out.zf = avg["dualZF"] / avg["uniZF"];
  return out;
}

// 2. Dual/uni average sum-SE ratio, full and reduced variants.
Outcome dual_uni_ratio() {
  const Ratios full = dual_uni_ratios(100, 100);
  const Ratios ci = dual_uni_ratios(60, 30);
  const bool full_ok = full.mr >= 1.55 && full.mr <= 1.85 && full.zf >= 1.45 && full.zf <= 1.75;
  const bool ci_ok = ci.mr >= 1.45 && ci.mr <= 1.95 && ci.zf >= 1.35 && ci.zf <= 1.85;
  std::string detail = fmt("M=100/100 drops: MR %.3f in [1.55,1.85], ZF %.3f in [1.45,1.75]; "
                           "M=60/30 drops: MR %.3f in [1.45,1.95], ZF %.3f in [1.35,1.85]",
                           full.mr, full.zf, ci.mr, ci.zf);
  if (!full.failures.empty() || !ci.failures.empty()) detail += "; failed cells:" + full.failures + ci.failures;
  return {full_ok && ci_ok && full.failures.empty() && ci.failures.empty(), detail};
}

// 3. Exact algebraic identities and ZF nulling on estimates.
Outcome algebraic_identities() {
  SystemConfig config;
  double split = 0.0, gamma_c = 0.0, traces = 0.0, nulling = 0.0;
  for (int drop = 0; drop < 5; ++drop) {
    const auto link = make_dual_link(config, realize_drop(config, config.M, drop), config.xpd_db);
    for (std::size_t k = 0; k < link.num_ues(); ++k) {
      const auto& c = link.correlations()[k];
      const auto& s = *link.statistics()[k];
      split = std::max(split, (c.R_v + c.R_h - c.R).norm() / c.R.norm());
      gamma_c = std::max({gamma_c, (s.Gamma_v + s.C_v - c.R_v).norm() / c.R_v.norm(),
                          (s.Gamma_h + s.C_h - c.R_h).norm() / c.R_h.norm()});
      traces = std::max(traces, std::abs(s.trace_Gamma_v - s.trace_Gamma_h) / s.trace_Gamma_v);
    }
    RandomStream rng(derive_seed(config.seed, {103, static_cast<std::uint64_t>(drop)}));
    for (int t = 0; t < 20; ++t) {
      std::vector<ChannelEstimate> est;
      for (auto& d : link.draw(EstimationPath::kDirect, rng)) est.push_back(std::move(d.estimate));
      const ComplexMatrix h = stack_estimates(est);
      const ComplexMatrix w = zf_directions(h);
      nulling = std::max(nulling, (h * w - ComplexMatrix::Identity(h.rows(), h.rows())).cwiseAbs().maxCoeff());
    }
  }
  const bool ok = split <= 1e-10 && gamma_c <= 1e-10 && traces <= 1e-10 && nulling <= 1e-8;
  return {ok, fmt("R_v+R_h=R %.2e, Gamma+C=R %.2e, tr equality %.2e (<= 1e-10); "
                  "ZF nulling %.2e (<= 1e-8)",
                  split, gamma_c, traces, nulling)};
}

// 4. Per-slot channel variances and empirical XPD.
Outcome channel_statistics() {
  const double beta = 1e-9;
  const double q = xpd_from_db(7.0).q;
  const int half_m = 4;
  const auto corr = build_correlation_set(beta * ComplexMatrix::Identity(half_m, half_m), q);
  RandomStream rng(derive_seed(1, {104}));
  const int n = 100'000;
  std::vector<DualPolChannel> samples(n);
  double co = 0.0, cross = 0.0;
  for (auto& h : samples) {
    h = sample_dual_channel(corr, rng);
    for (int m = 0; m < half_m; ++m) {
      co += std::norm(h.h_v(2 * m)) + std::norm(h.h_h(2 * m + 1));
      cross += std::norm(h.h_v(2 * m + 1)) + std::norm(h.h_h(2 * m));
    }
  }
  co /= 2.0 * half_m * n;
  cross /= 2.0 * half_m * n;
  const double co_err = std::abs(co / (beta * (1 - q)) - 1.0);
  const double cross_err = std::abs(cross / (beta * q) - 1.0);
  const double xpd = empirical_xpd(samples);
  const bool ok = co_err <= 0.03 && cross_err <= 0.03 && std::abs(xpd - 7.0) <= 0.3;
  return {ok, fmt("co-polar rel. err %.4f, cross-polar rel. err %.4f (<= 0.03); XPD %.3f dB (7 +- 0.3)",
                  co_err, cross_err, xpd)};
}

// 5. Average sum SE ordered in XPD for both precoders.
Outcome xpd_monotonicity() {
  SystemConfig config;
  config.drops = 50;
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<int> ms{40, 100};
  const std::vector<double> xpd{inf, 7.0, 0.0};
  std::map<std::tuple<int, std::string, double>, double> avg;
  std::string failures;
  for (const auto& r : run_xpd_sweep(config, ms, xpd)) {
    if (r.method.rfind("failed:", 0) == 0) failures += " " + r.method;
    if (r.drop_index < 0) avg[{r.M, to_string(r.precoder), r.xpd_db}] = r.se;
  }
  bool ok = failures.empty();
  std::ostringstream detail;
  for (int m : ms) {
    for (const char* p : {"MR", "ZF"}) {
      const double a = avg[{m, p, inf}], b = avg[{m, p, 7.0}], c = avg[{m, p, 0.0}];
      ok = ok && a >= b && b >= c;
      detail << "M=" << m << ' ' << p << ": " << fmt("%.3f >= %.3f >= %.3f", a, b, c) << "; ";
    }
  }
  if (!failures.empty()) detail << "failed cells:" << failures;
  return {ok, detail.str()};
}

// 6. Uncorrelated, leakage-free simplification against the general closed form.
Outcome simplification_consistency() {
  RandomStream rng(derive_seed(1, {106}));
  double worst = 0.0;
  for (int point = 0; point < 20; ++point) {
    const int k = 1 + static_cast<int>(rng.uniform(0.0, 10.0));
    const int half_m = 2 * k + static_cast<int>(rng.uniform(0.0, 50.0));
    std::vector<double> betas;
    std::vector<CorrelationSet> corrs;
    std::vector<PilotPowers> pilot;
    std::vector<StreamPowers> rho;
    for (int u = 0; u < k; ++u) {
      betas.push_back(db_to_linear(rng.uniform(-140.0, -60.0)));
      corrs.push_back(build_correlation_set(betas.back() * ComplexMatrix::Identity(half_m, half_m), 0.0));
      pilot.push_back({rng.uniform(1.0, 200.0), rng.uniform(1.0, 200.0)});
      rho.push_back({rng.uniform(1.0, 200.0), rng.uniform(1.0, 200.0)});
    }
    const double noise = db_to_linear(rng.uniform(-100.0, -85.0));
    const DualPolLink link(corrs, pilot, rho, 200, noise);
    const auto cf = link.closed_form_mr();
    const auto s = simplified_se_uncorrelated(betas, pilot, rho, 2 * half_m, link.tau_p(), noise,
                                              link.prelog());
    for (int u = 0; u < k; ++u) {
      worst = std::max(worst, std::abs(s.per_ue_se[u] - cf.per_ue_se[u]) / cf.per_ue_se[u]);
    }
  }
  return {worst <= 1e-10, fmt("worst relative difference %.2e (<= 1e-10) over 20 points", worst)};
}

// 7. End-to-end pilot synthesis against direct estimate sampling.
Outcome estimator_path_equivalence() {
  SystemConfig config;
  config.M = 32;
  config.K = 4;
  const auto link = make_dual_link(config, realize_drop(config, config.M, 0), config.xpd_db);
  double worst = 0.0;
  for (auto scheme : {PrecoderScheme::kMR, PrecoderScheme::kZF}) {
    MonteCarloSpec direct_spec;
    direct_spec.trials = 10'000;
    direct_spec.seed = derive_seed(config.seed, {107, 1, static_cast<std::uint64_t>(scheme)});
    MonteCarloSpec e2e_spec = direct_spec;
    e2e_spec.seed = derive_seed(config.seed, {107, 2, static_cast<std::uint64_t>(scheme)});
    const auto direct = link.monte_carlo(scheme, EstimationPath::kDirect, direct_spec);
    const auto e2e = link.monte_carlo(scheme, EstimationPath::kEndToEnd, e2e_spec);
    for (std::size_t k = 0; k < direct.per_ue_se.size(); ++k) {
      const double joint = std::hypot(direct.per_ue_std_error[k], e2e.per_ue_std_error[k]);
      worst = std::max(worst, std::abs(direct.per_ue_se[k] - e2e.per_ue_se[k]) / (3.0 * joint));
    }
  }
  return {worst <= 1.0, fmt("worst |direct - pilots| / (3 joint se) = %.3f over MR and ZF", worst)};
}

// 8. Byte-identical CSV on re-run.
Outcome determinism() {
  SystemConfig config;
  config.M = 20;
  config.K = 4;
  config.drops = 3;
  config.mc_trials = 300;
  config.seed = 2024;
  auto csv = [](const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    write_rows_csv(out, rows);
    return out.str();
  };
  const std::vector<int> ms{12, 20};
  const std::vector<double> xpd{0.0, 7.0, std::numeric_limits<double>::infinity()};
  RunOptions serial;
  serial.workers = 1;
  RunOptions threaded;
  threaded.workers = 3;
  threaded.mr_markers = serial.mr_markers = true;
  const bool ok =
      csv(run_m_sweep(config, ms, serial)) == csv(run_m_sweep(config, ms, threaded)) &&
      csv(run_cdf(config, serial)) == csv(run_cdf(config, serial)) &&
      csv(run_xpd_sweep(config, ms, xpd, serial)) == csv(run_xpd_sweep(config, ms, xpd, threaded)) &&
      validate(config).text() == validate(config).text();
  return {ok, ok ? "m-sweep, cdf, xpd-sweep and validate outputs identical across re-runs"
                 : "outputs differ between re-runs"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 closed-form validation", closed_form_validation},
      {"2 dual/uni ratio", dual_uni_ratio},
      {"3 algebraic identities", algebraic_identities},
      {"4 channel statistics", channel_statistics},
      {"5 XPD monotonicity", xpd_monotonicity},
      {"6 simplification consistency", simplification_consistency},
      {"7 estimator-path equivalence", estimator_path_equivalence},
      {"8 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s [%s] %s (%.1f s)\n", out.passed ? "PASS" : "FAIL", name.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
    failed += out.passed ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

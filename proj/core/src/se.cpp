#include "dpmimo/se.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dpmimo/errors.hpp"

namespace dpmimo {
namespace {

void finalize(SEReport& report) {
  report.sum_se = std::accumulate(report.per_ue_se.begin(), report.per_ue_se.end(), 0.0);
  if (report.per_ue_std_error.size() != report.per_ue_se.size()) {
    report.per_ue_std_error.assign(report.per_ue_se.size(), 0.0);
  }
}

double checked_ratio(double numerator, double trace, double rho) {
  if (rho == 0.0) return 0.0;
  if (!(trace > kMinEstimateTrace)) {
    std::ostringstream msg;
    msg << "tr(Gamma) = " << trace << " with rho = " << rho;
    throw Error(ErrorCode::kDegenerateTrace, msg.str());
  }
  return rho * numerator / trace;
}

// log2 det of a Hermitian matrix of order 1 or 2, closed form. Throws when the
// matrix is not positive definite.
double log2det_small(const ComplexMatrix& x) {
  if (x.rows() == 1) {
    const double a = x(0, 0).real();
    if (!(a > 0.0)) throw Error(ErrorCode::kIndefiniteEffectiveNoise, "1x1 effective noise <= 0");
    return std::log2(a);
  }
  if (x.rows() == 2) {
    const double a = x(0, 0).real();
    const double d = x(1, 1).real();
    const double det = a * d - std::norm(0.5 * (x(0, 1) + std::conj(x(1, 0))));
    if (!(a > 0.0 && det > 0.0)) {
      throw Error(ErrorCode::kIndefiniteEffectiveNoise, "2x2 effective noise not PD");
    }
    return std::log2(det);
  }
  throw std::invalid_argument("log2det_small: only orders 1 and 2 are supported");
}

// Per-batch sums of the per-UE blocks A_k and B_k.
struct BatchSums {
  std::vector<ComplexMatrix> a;
  std::vector<ComplexMatrix> b;
  std::size_t count = 0;
};

BatchSums run_batch(const TrialSource& source, std::size_t trials, RandomStream& rng) {
  const std::size_t k = source.num_ues();
  const Eigen::Index d = source.streams_per_ue();
  BatchSums sums;
  sums.a.assign(k, ComplexMatrix::Zero(d, d));
  sums.b.assign(k, ComplexMatrix::Zero(d, d));
  for (std::size_t t = 0; t < trials; ++t) {
    const ComplexMatrix g = source.sample(rng);
    const ComplexMatrix gg = g * g.adjoint();
    for (std::size_t u = 0; u < k; ++u) {
      const auto r = static_cast<Eigen::Index>(u) * d;
      sums.a[u] += g.block(r, r, d, d);
      sums.b[u] += gg.block(r, r, d, d);
    }
  }
  sums.count = trials;
  return sums;
}

double se_from_moments(const ComplexMatrix& a, const ComplexMatrix& b, double noise_var,
                       double prelog) {
  const Eigen::Index d = a.rows();
  const ComplexMatrix total = 0.5 * (b + b.adjoint()) +
                              noise_var * ComplexMatrix::Identity(d, d);
  const ComplexMatrix effective = total - a * a.adjoint();
  // det(I + A^H Omega A) = det(B + s I) / det(B + s I - A A^H).
  const double value = prelog * (log2det_small(total) - log2det_small(effective));
  return std::max(value, 0.0);
}

}  // namespace

const char* to_string(SEMethod method) {
  switch (method) {
    case SEMethod::kClosedFormMR: return "closed_form_mr";
    case SEMethod::kMonteCarlo: return "monte_carlo";
    case SEMethod::kSimplified: return "simplified";
    case SEMethod::kUniClosedFormMR: return "uni_closed_form_mr";
  }
  return "unknown";
}

double prelog_factor(Eigen::Index tau_c, Eigen::Index tau_p) {
  if (tau_c < 1 || tau_p < 0 || tau_p >= tau_c) {
    throw std::invalid_argument("prelog_factor: need 0 <= tau_p < tau_c");
  }
  return static_cast<double>(tau_c - tau_p) / static_cast<double>(tau_c);
}

SEReport monte_carlo_se(const TrialSource& source, double noise_var, double prelog,
                        const MonteCarloSpec& spec) {
  if (spec.trials < MonteCarloSpec::kMinTrials) {
    throw std::invalid_argument("monte_carlo_se: at least 100 trials required");
  }
  if (!(noise_var > 0.0)) throw std::invalid_argument("monte_carlo_se: noise_var <= 0");

  const std::size_t batch = spec.batch > 0 ? spec.batch : std::max<std::size_t>(1, spec.trials / 20);
  const std::size_t batches = (spec.trials + batch - 1) / batch;
  std::vector<BatchSums> sums(batches);

  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < batches; i += stride) {
      RandomStream rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(i)}));
      const std::size_t n = std::min(batch, spec.trials - i * batch);
      sums[i] = run_batch(source, n, rng);
    }
  };
  unsigned workers = spec.workers > 0 ? spec.workers : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(batches)));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }

  // Reduce in batch order so the result is independent of scheduling.
  const std::size_t k = source.num_ues();
  const Eigen::Index d = source.streams_per_ue();
  std::vector<ComplexMatrix> a_total(k, ComplexMatrix::Zero(d, d));
  std::vector<ComplexMatrix> b_total(k, ComplexMatrix::Zero(d, d));
  for (const auto& s : sums) {
    for (std::size_t u = 0; u < k; ++u) {
      a_total[u] += s.a[u];
      b_total[u] += s.b[u];
    }
  }

  SEReport report;
  report.method = SEMethod::kMonteCarlo;
  report.prelog = prelog;
  report.trials = spec.trials;
  report.per_ue_se.resize(k);
  report.per_ue_std_error.assign(k, 0.0);
  const auto n_total = static_cast<double>(spec.trials);
  std::vector<std::vector<double>> leave_out(k, std::vector<double>(batches));
  for (std::size_t u = 0; u < k; ++u) {
    report.per_ue_se[u] =
        se_from_moments(a_total[u] / n_total, b_total[u] / n_total, noise_var, prelog);
    if (batches < 2) continue;
    for (std::size_t i = 0; i < batches; ++i) {
      const auto n = static_cast<double>(spec.trials - sums[i].count);
      leave_out[u][i] = se_from_moments((a_total[u] - sums[i].a[u]) / n,
                                        (b_total[u] - sums[i].b[u]) / n, noise_var, prelog);
    }
  }
  if (batches >= 2) {
    const auto nb = static_cast<double>(batches);
    std::vector<double> sum_leave_out(batches, 0.0);
    for (std::size_t u = 0; u < k; ++u) {
      for (std::size_t i = 0; i < batches; ++i) sum_leave_out[i] += leave_out[u][i];
    }
    auto jackknife = [nb](const std::vector<double>& values) {
      const double mean = std::accumulate(values.begin(), values.end(), 0.0) / nb;
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      return std::sqrt((nb - 1.0) / nb * ss);
    };
    for (std::size_t u = 0; u < k; ++u) report.per_ue_std_error[u] = jackknife(leave_out[u]);
    report.sum_std_error = jackknife(sum_leave_out);
  }
  finalize(report);
  return report;
}

SEReport closed_form_se_mr(std::span<const CorrelationSet> corrs,
                           std::span<const std::shared_ptr<const EstimatorStatistics>> stats,
                           std::span<const StreamPowers> rho, double noise_var, double prelog) {
  const std::size_t k = corrs.size();
  if (stats.size() != k || rho.size() != k) {
    throw std::invalid_argument("closed_form_se_mr: per-UE inputs differ in length");
  }
  if (!(noise_var > 0.0)) throw std::invalid_argument("closed_form_se_mr: noise_var <= 0");

  SEReport report;
  report.method = SEMethod::kClosedFormMR;
  report.prelog = prelog;
  report.per_ue_se.resize(k);
  for (std::size_t u = 0; u < k; ++u) {
    const auto& r_v = corrs[u].R_v;
    const auto& r_h = corrs[u].R_h;
    double interference_v = noise_var;
    double interference_h = noise_var;
    for (std::size_t l = 0; l < k; ++l) {
      const auto& s = *stats[l];
      if (rho[l].rho_v != 0.0) {
        interference_v +=
            checked_ratio(trace_product(s.Gamma_v, r_v).real(), s.trace_Gamma_v, rho[l].rho_v);
        interference_h +=
            checked_ratio(trace_product(s.Gamma_v, r_h).real(), s.trace_Gamma_v, rho[l].rho_v);
      }
      if (rho[l].rho_h != 0.0) {
        interference_v +=
            checked_ratio(trace_product(s.Gamma_h, r_v).real(), s.trace_Gamma_h, rho[l].rho_h);
        interference_h +=
            checked_ratio(trace_product(s.Gamma_h, r_h).real(), s.trace_Gamma_h, rho[l].rho_h);
      }
    }
    const double signal_v = rho[u].rho_v * stats[u]->trace_Gamma_v;
    const double signal_h = rho[u].rho_h * stats[u]->trace_Gamma_h;
    report.per_ue_se[u] = prelog * (std::log2(1.0 + signal_v / interference_v) +
                                    std::log2(1.0 + signal_h / interference_h));
  }
  finalize(report);
  return report;
}

SEReport simplified_se_uncorrelated(std::span<const double> betas,
                                    std::span<const PilotPowers> pilot,
                                    std::span<const StreamPowers> rho, Eigen::Index m,
                                    Eigen::Index tau_p, double noise_var, double prelog) {
  const std::size_t k = betas.size();
  if (pilot.size() != k || rho.size() != k) {
    throw std::invalid_argument("simplified_se_uncorrelated: per-UE inputs differ in length");
  }
  const double half_m = static_cast<double>(m) / 2.0;
  const auto tau = static_cast<double>(tau_p);
  double rho_v_total = 0.0;
  double rho_h_total = 0.0;
  for (const auto& r : rho) {
    rho_v_total += r.rho_v;
    rho_h_total += r.rho_h;
  }

  SEReport report;
  report.method = SEMethod::kSimplified;
  report.prelog = prelog;
  report.per_ue_se.resize(k);
  for (std::size_t u = 0; u < k; ++u) {
    const double beta = betas[u];
    const double est_v = pilot[u].p_v * tau * beta * beta / (pilot[u].p_v * tau * beta + noise_var);
    const double est_h = pilot[u].p_h * tau * beta * beta / (pilot[u].p_h * tau * beta + noise_var);
    const double sinr_v = half_m * rho[u].rho_v * est_v / (rho_v_total * beta + noise_var);
    const double sinr_h = half_m * rho[u].rho_h * est_h / (rho_h_total * beta + noise_var);
    report.per_ue_se[u] = prelog * (std::log2(1.0 + sinr_v) + std::log2(1.0 + sinr_h));
  }
  finalize(report);
  return report;
}

SEReport uni_closed_form_se_mr(
    std::span<const std::shared_ptr<const UniEstimatorStatistics>> stats, double rho,
    double noise_var, double prelog) {
  if (!(noise_var > 0.0)) throw std::invalid_argument("uni_closed_form_se_mr: noise_var <= 0");
  const std::size_t k = stats.size();
  SEReport report;
  report.method = SEMethod::kUniClosedFormMR;
  report.prelog = prelog;
  report.per_ue_se.resize(k);
  for (std::size_t u = 0; u < k; ++u) {
    double interference = noise_var;
    for (std::size_t l = 0; l < k; ++l) {
      interference +=
          checked_ratio(trace_product(stats[l]->Gamma, stats[u]->R).real(), stats[l]->trace_Gamma, rho);
    }
    report.per_ue_se[u] = prelog * std::log2(1.0 + rho * stats[u]->trace_Gamma / interference);
  }
  finalize(report);
  return report;
}

SEReport uni_closed_form_se_mr(std::span<const ComplexMatrix> R_bs, double p_uni, double rho_uni,
                               Eigen::Index tau_uni_p, double noise_var, double prelog) {
  std::vector<std::shared_ptr<const UniEstimatorStatistics>> stats;
  stats.reserve(R_bs.size());
  for (const auto& r : R_bs) stats.push_back(uni_estimator_statistics(r, p_uni, tau_uni_p, noise_var));
  return uni_closed_form_se_mr(stats, rho_uni, noise_var, prelog);
}

}  // namespace dpmimo

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dpmimo/estimation.hpp"
#include "dpmimo/precoding.hpp"

namespace dpmimo {

enum class SEMethod { kClosedFormMR, kMonteCarlo, kSimplified, kUniClosedFormMR };

const char* to_string(SEMethod method);

/// Spectral efficiency in bit/s/Hz, per UE and summed.
struct SEReport {
  std::vector<double> per_ue_se;
  /// Monte Carlo standard error per UE (delete-one-batch jackknife); zeros for
  /// analytical methods.
  std::vector<double> per_ue_std_error;
  double sum_se = 0.0;
  double sum_std_error = 0.0;
  SEMethod method = SEMethod::kClosedFormMR;
  double prelog = 1.0;
  std::size_t trials = 0;
  std::string config_digest;
};

/// (tau_c - tau_p) / tau_c.
double prelog_factor(Eigen::Index tau_c, Eigen::Index tau_p);

struct MonteCarloSpec {
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  /// Trials per accumulation batch; 0 picks trials / 20.
  std::size_t batch = 0;
  /// Worker threads; 0 uses std::thread::hardware_concurrency().
  unsigned workers = 1;

  static constexpr std::size_t kMinTrials = 100;
};

/// Produces one joint realization of the effective downlink channel
/// G = H_all W_all, where the rows of H_all are the receive antennas of
/// all UEs (UE-major) and the columns of W_all all streams (UE-major).
/// Implementations must be safe to call concurrently with distinct streams.
class TrialSource {
 public:
  virtual ~TrialSource() = default;
  virtual std::size_t num_ues() const = 0;
  virtual Eigen::Index streams_per_ue() const = 0;
  virtual ComplexMatrix sample(RandomStream& rng) const = 0;
};

/// Generic hardening lower bound. Estimates A_k = E{H_k W_k} and
/// B_k = E{H_k sum_l W_l W_l^H H_k^H} by sample averages and returns
/// prelog * log2 det(I + A_k^H (B_k + noise I - A_k A_k^H)^{-1} A_k).
/// Batches use substreams derived from spec.seed, so the result does not
/// depend on the worker count.
/// Throws Error(kIndefiniteEffectiveNoise) when B_k + noise I - A_k A_k^H is
/// not positive definite.
SEReport monte_carlo_se(const TrialSource& source, double noise_var, double prelog,
                        const MonteCarloSpec& spec);

/// Closed-form SE of MR precoding with MMSE estimates: per UE, the sum of
/// a V-stream and an H-stream log2(1 + SINR) term, interference summed over
/// all UEs including the UE itself.
/// Throws Error(kDegenerateTrace) when tr(Gamma) <= 1e-30 on a powered stream.
SEReport closed_form_se_mr(std::span<const CorrelationSet> corrs,
                           std::span<const std::shared_ptr<const EstimatorStatistics>> stats,
                           std::span<const StreamPowers> rho, double noise_var, double prelog);

/// Closed-form MR SE specialized to R_bs = beta I and q = 0, where each
/// stream has array gain M/2 and only co-polar interference remains.
SEReport simplified_se_uncorrelated(std::span<const double> betas,
                                    std::span<const PilotPowers> pilot,
                                    std::span<const StreamPowers> rho, Eigen::Index m,
                                    Eigen::Index tau_p, double noise_var, double prelog);

/// Single-polarization MR closed form,
/// SE_k = prelog log2(1 + rho tr(Gamma_k) / (sum_l rho tr(Gamma_l R_k) / tr(Gamma_l) + noise)).
SEReport uni_closed_form_se_mr(
    std::span<const std::shared_ptr<const UniEstimatorStatistics>> stats, double rho,
    double noise_var, double prelog);

SEReport uni_closed_form_se_mr(std::span<const ComplexMatrix> R_bs, double p_uni, double rho_uni,
                               Eigen::Index tau_uni_p, double noise_var, double prelog);

}  // namespace dpmimo

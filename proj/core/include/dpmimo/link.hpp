#pragma once

#include <memory>
#include <vector>

#include "dpmimo/se.hpp"

namespace dpmimo {

/// How Monte Carlo trials obtain channel estimates.
enum class EstimationPath {
  kDirect,    ///< draw (estimate, error) from their Gaussian laws
  kEndToEnd,  ///< synthesize pilots, correlate, apply the MMSE estimator
};

/// Dual-polarized single-cell downlink: per-UE statistics plus powers.
class DualPolLink {
 public:
  DualPolLink(std::vector<CorrelationSet> corrs, std::vector<PilotPowers> pilot,
              std::vector<StreamPowers> rho, Eigen::Index tau_c, double noise_var);

  std::size_t num_ues() const { return corrs_.size(); }
  Eigen::Index ports() const { return corrs_.front().ports(); }
  double noise_var() const { return noise_var_; }
  Eigen::Index tau_p() const { return book_.tau_p; }
  double prelog() const { return prelog_; }

  const std::vector<CorrelationSet>& correlations() const { return corrs_; }
  const std::vector<std::shared_ptr<const EstimatorStatistics>>& statistics() const {
    return stats_;
  }
  const std::vector<StreamPowers>& downlink_powers() const { return rho_; }
  const PilotBook& pilot_book() const { return book_; }

  /// Estimates and true channels of all UEs for one coherence block.
  std::vector<EstimateDraw> draw(EstimationPath path, RandomStream& rng) const;

  SEReport closed_form_mr() const;
  SEReport monte_carlo(PrecoderScheme scheme, EstimationPath path,
                       const MonteCarloSpec& spec) const;

 private:
  std::vector<CorrelationSet> corrs_;
  std::vector<StreamPowers> rho_;
  PilotBook book_;
  double noise_var_;
  double prelog_;
  std::vector<std::shared_ptr<const EstimatorStatistics>> stats_;
};

/// TrialSource view of a DualPolLink with a fixed precoder and estimation path.
class DualPolTrials : public TrialSource {
 public:
  DualPolTrials(const DualPolLink& link, PrecoderScheme scheme, EstimationPath path)
      : link_(link), scheme_(scheme), path_(path) {}

  std::size_t num_ues() const override { return link_.num_ues(); }
  Eigen::Index streams_per_ue() const override { return 2; }
  ComplexMatrix sample(RandomStream& rng) const override;

 private:
  const DualPolLink& link_;
  PrecoderScheme scheme_;
  EstimationPath path_;
};

/// Uni-polarized baseline with M/2 antennas and one stream per UE.
class UniPolLink {
 public:
  UniPolLink(std::vector<ComplexMatrix> R_bs, double p_uni, double rho_uni,
             Eigen::Index tau_uni_p, Eigen::Index tau_c, double noise_var);

  std::size_t num_ues() const { return stats_.size(); }
  double noise_var() const { return noise_var_; }
  double rho() const { return rho_; }
  double prelog() const { return prelog_; }
  const std::vector<std::shared_ptr<const UniEstimatorStatistics>>& statistics() const {
    return stats_;
  }

  SEReport closed_form_mr() const;
  SEReport monte_carlo(PrecoderScheme scheme, const MonteCarloSpec& spec) const;

 private:
  std::vector<std::shared_ptr<const UniEstimatorStatistics>> stats_;
  double rho_;
  double noise_var_;
  double prelog_;
};

class UniPolTrials : public TrialSource {
 public:
  UniPolTrials(const UniPolLink& link, PrecoderScheme scheme) : link_(link), scheme_(scheme) {}

  std::size_t num_ues() const override { return link_.num_ues(); }
  Eigen::Index streams_per_ue() const override { return 1; }
  ComplexMatrix sample(RandomStream& rng) const override;

 private:
  const UniPolLink& link_;
  PrecoderScheme scheme_;
};

}  // namespace dpmimo

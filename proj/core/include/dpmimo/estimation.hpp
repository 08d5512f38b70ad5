#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "dpmimo/channel.hpp"
#include "dpmimo/correlation.hpp"

namespace dpmimo {

struct PilotPowers {
  double p_v = 0.0;  // mW
  double p_h = 0.0;  // mW
};

/// Orthogonal pilot codebook. Column pair (2k, 2k + 1) of V belongs to UE k
/// (V port, H port); V^H V = tau_p I.
struct PilotBook {
  Eigen::Index tau_p = 0;
  ComplexMatrix V;  ///< tau_p x 2K
  std::vector<PilotPowers> powers;

  std::size_t num_ues() const { return powers.size(); }
  /// V_k, tau_p x 2.
  ComplexMatrix ue_columns(std::size_t k) const;
  /// Phi_k = L_k^{1/2} V_k^T, 2 x tau_p.
  ComplexMatrix pilot_signal(std::size_t k) const;
};

/// tau_p = 2K columns taken from a scaled tau_p-point DFT matrix.
/// Throws Error(kPilotBudgetExceeded) when 2K > tau_c.
PilotBook build_pilot_book(std::size_t k, std::vector<PilotPowers> powers, Eigen::Index tau_c);

struct ProcessedPilot {
  ComplexVector y_v;  ///< first column of Y V_k^*
  ComplexVector y_h;  ///< second column
};

/// Synthesizes Y = sum_l H_l^H Phi_l + N with CN(0, noise_var) noise and
/// correlates it with each UE's pilot: Y V_k^* = tau_p H_k^H L_k^{1/2} + N V_k^*.
std::vector<ProcessedPilot> process_pilots(std::span<const DualPolChannel> channels,
                                           const PilotBook& book, double noise_var,
                                           RandomStream& rng);

/// Hermitian matrix with no coupling between V ports and H ports, held as
/// its two M/2 x M/2 port blocks.
struct PortBlocks {
  ComplexMatrix v_ports;
  ComplexMatrix h_ports;

  Eigen::Index ports() const { return 2 * v_ports.rows(); }
  ComplexMatrix dense() const;
  ComplexVector apply(const ComplexVector& x) const;
  double trace() const;
};

/// MMSE estimator quantities of one UE, shared read-only by every trial.
/// Gamma is the estimate covariance, C the error covariance, C = R - Gamma.
struct EstimatorStatistics {
  double p_v = 0.0;
  double p_h = 0.0;
  Eigen::Index tau_p = 0;
  double noise_var = 0.0;

  ComplexMatrix Gamma_v, Gamma_h;
  ComplexMatrix C_v, C_h;
  double trace_Gamma_v = 0.0;
  double trace_Gamma_h = 0.0;

  PortBlocks gain_v, gain_h;  ///< sqrt(p) R Psi, maps processed pilot to estimate
  PortBlocks sqrt_Gamma_v, sqrt_Gamma_h;
  PortBlocks sqrt_C_v, sqrt_C_h;
};

/// Psi = (p tau_p R + noise_var I)^{-1}, Gamma = p tau_p R Psi R per
/// polarization. Requires noise_var > 0.
std::shared_ptr<const EstimatorStatistics> estimator_statistics(const CorrelationSet& corr,
                                                                PilotPowers powers,
                                                                Eigen::Index tau_p,
                                                                double noise_var);

struct ChannelEstimate {
  ComplexVector hhat_v;
  ComplexVector hhat_h;
  std::shared_ptr<const EstimatorStatistics> stats;

  const ComplexMatrix& Gamma_v() const { return stats->Gamma_v; }
  const ComplexMatrix& Gamma_h() const { return stats->Gamma_h; }
  const ComplexMatrix& C_v() const { return stats->C_v; }
  const ComplexMatrix& C_h() const { return stats->C_h; }
};

/// hhat_v = sqrt(p_v) R_v Psi_v y_v and likewise for H.
ChannelEstimate mmse_estimate(const ProcessedPilot& pilot,
                              std::shared_ptr<const EstimatorStatistics> stats);

ChannelEstimate mmse_estimate(const ProcessedPilot& pilot, const CorrelationSet& corr,
                              PilotPowers powers, Eigen::Index tau_p, double noise_var);

/// A jointly distributed (estimate, true channel) pair.
struct EstimateDraw {
  ChannelEstimate estimate;
  DualPolChannel channel;
};

/// Draws hhat ~ CN(0, Gamma) and an independent error e ~ CN(0, C), and
/// returns the true channel h = hhat + e. Same joint law as the pilot path.
EstimateDraw sample_estimate_directly(std::shared_ptr<const EstimatorStatistics> stats,
                                      RandomStream& rng);

// Uni-polarized baseline: M/2 antennas, one stream per UE.

struct UniEstimatorStatistics {
  double p = 0.0;
  Eigen::Index tau_p = 0;
  double noise_var = 0.0;
  ComplexMatrix R;
  ComplexMatrix Gamma;
  ComplexMatrix C;
  double trace_Gamma = 0.0;
  ComplexMatrix gain;
  HermitianFactor sqrt_Gamma;
  HermitianFactor sqrt_C;
};

std::shared_ptr<const UniEstimatorStatistics> uni_estimator_statistics(const ComplexMatrix& R_bs,
                                                                       double p,
                                                                       Eigen::Index tau_p,
                                                                       double noise_var);

struct UniEstimateDraw {
  ComplexVector hhat;
  ComplexVector h;
};

UniEstimateDraw sample_uni_estimate_directly(const UniEstimatorStatistics& stats,
                                             RandomStream& rng);

}  // namespace dpmimo

#include "dpmimo/link.hpp"

#include <stdexcept>

#include "dpmimo/errors.hpp"

namespace dpmimo {

DualPolLink::DualPolLink(std::vector<CorrelationSet> corrs, std::vector<PilotPowers> pilot,
                         std::vector<StreamPowers> rho, Eigen::Index tau_c, double noise_var)
    : corrs_(std::move(corrs)),
      rho_(std::move(rho)),
      book_(build_pilot_book(corrs_.size(), pilot, tau_c)),
      noise_var_(noise_var),
      prelog_(prelog_factor(tau_c, book_.tau_p)) {
  if (rho_.size() != corrs_.size()) {
    throw std::invalid_argument("DualPolLink: one downlink power pair per UE");
  }
  stats_.reserve(corrs_.size());
  for (std::size_t k = 0; k < corrs_.size(); ++k) {
    stats_.push_back(estimator_statistics(corrs_[k], pilot[k], book_.tau_p, noise_var_));
  }
}

std::vector<EstimateDraw> DualPolLink::draw(EstimationPath path, RandomStream& rng) const {
  const std::size_t k = num_ues();
  std::vector<EstimateDraw> draws(k);
  if (path == EstimationPath::kDirect) {
    for (std::size_t u = 0; u < k; ++u) draws[u] = sample_estimate_directly(stats_[u], rng);
    return draws;
  }
  std::vector<DualPolChannel> channels(k);
  for (std::size_t u = 0; u < k; ++u) channels[u] = sample_dual_channel(corrs_[u], rng);
  const auto pilots = process_pilots(channels, book_, noise_var_, rng);
  for (std::size_t u = 0; u < k; ++u) {
    draws[u].estimate = mmse_estimate(pilots[u], stats_[u]);
    draws[u].channel = std::move(channels[u]);
  }
  return draws;
}

SEReport DualPolLink::closed_form_mr() const {
  return closed_form_se_mr(corrs_, stats_, rho_, noise_var_, prelog_);
}

SEReport DualPolLink::monte_carlo(PrecoderScheme scheme, EstimationPath path,
                                  const MonteCarloSpec& spec) const {
  return monte_carlo_se(DualPolTrials(*this, scheme, path), noise_var_, prelog_, spec);
}

ComplexMatrix DualPolTrials::sample(RandomStream& rng) const {
  const std::size_t k = link_.num_ues();
  const Eigen::Index m = link_.ports();
  const auto draws = link_.draw(path_, rng);

  ComplexMatrix h_all(static_cast<Eigen::Index>(2 * k), m);
  for (std::size_t u = 0; u < k; ++u) {
    const auto r = static_cast<Eigen::Index>(2 * u);
    h_all.row(r) = draws[u].channel.h_v.adjoint();
    h_all.row(r + 1) = draws[u].channel.h_h.adjoint();
  }

  ComplexMatrix w_all(m, static_cast<Eigen::Index>(2 * k));
  const auto& rho = link_.downlink_powers();
  if (scheme_ == PrecoderScheme::kMR) {
    for (std::size_t u = 0; u < k; ++u) {
      w_all.middleCols(static_cast<Eigen::Index>(2 * u), 2) =
          mr_precoder_dual(draws[u].estimate, rho[u]);
    }
  } else {
    std::vector<ChannelEstimate> estimates;
    estimates.reserve(k);
    for (const auto& d : draws) estimates.push_back(d.estimate);
    const PrecoderSet zf = zf_precoder_dual(estimates, rho);
    for (std::size_t u = 0; u < k; ++u) {
      w_all.middleCols(static_cast<Eigen::Index>(2 * u), 2) = zf.W[u];
    }
  }
  return h_all * w_all;
}

UniPolLink::UniPolLink(std::vector<ComplexMatrix> R_bs, double p_uni, double rho_uni,
                       Eigen::Index tau_uni_p, Eigen::Index tau_c, double noise_var)
    : rho_(rho_uni), noise_var_(noise_var), prelog_(prelog_factor(tau_c, tau_uni_p)) {
  if (static_cast<Eigen::Index>(R_bs.size()) > tau_uni_p) {
    throw Error(ErrorCode::kPilotBudgetExceeded, "uni-polarized setup needs tau_uni_p >= K");
  }
  stats_.reserve(R_bs.size());
  for (const auto& r : R_bs) {
    stats_.push_back(uni_estimator_statistics(r, p_uni, tau_uni_p, noise_var));
  }
}

SEReport UniPolLink::closed_form_mr() const {
  return uni_closed_form_se_mr(stats_, rho_, noise_var_, prelog_);
}

SEReport UniPolLink::monte_carlo(PrecoderScheme scheme, const MonteCarloSpec& spec) const {
  return monte_carlo_se(UniPolTrials(*this, scheme), noise_var_, prelog_, spec);
}

ComplexMatrix UniPolTrials::sample(RandomStream& rng) const {
  const auto& stats = link_.statistics();
  const std::size_t k = stats.size();
  const Eigen::Index n = stats.front()->Gamma.rows();

  std::vector<ComplexVector> estimates(k);
  ComplexMatrix h_all(static_cast<Eigen::Index>(k), n);
  for (std::size_t u = 0; u < k; ++u) {
    auto d = sample_uni_estimate_directly(*stats[u], rng);
    h_all.row(static_cast<Eigen::Index>(u)) = d.h.adjoint();
    estimates[u] = std::move(d.hhat);
  }

  ComplexMatrix w_all(n, static_cast<Eigen::Index>(k));
  if (scheme_ == PrecoderScheme::kMR) {
    for (std::size_t u = 0; u < k; ++u) {
      w_all.col(static_cast<Eigen::Index>(u)) =
          mr_precoder_uni(estimates[u], stats[u]->trace_Gamma, link_.rho());
    }
  } else {
    const PrecoderSet zf = zf_precoder_uni(estimates, link_.rho());
    for (std::size_t u = 0; u < k; ++u) w_all.col(static_cast<Eigen::Index>(u)) = zf.W[u];
  }
  return h_all * w_all;
}

}  // namespace dpmimo

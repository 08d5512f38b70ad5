#include "dpmimo/precoding.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dpmimo/errors.hpp"

namespace dpmimo {
namespace {

ComplexVector mr_column(const ComplexVector& hhat, double trace_gamma, double rho) {
  if (rho < 0.0) throw std::invalid_argument("negative downlink power");
  if (rho == 0.0) return ComplexVector::Zero(hhat.size());
  if (!(trace_gamma > kMinEstimateTrace)) {
    std::ostringstream msg;
    msg << "tr(Gamma) = " << trace_gamma;
    throw Error(ErrorCode::kDegenerateEstimateStatistics, msg.str());
  }
  return (std::sqrt(rho / trace_gamma)) * hhat;
}

ComplexVector scaled_unit(const ComplexVector& direction, double rho) {
  const double n = direction.norm();
  if (!(n > 0.0)) throw Error(ErrorCode::kRankDeficient, "zero ZF direction");
  return (std::sqrt(rho) / n) * direction;
}

}  // namespace

const char* to_string(PrecoderScheme scheme) {
  return scheme == PrecoderScheme::kMR ? "MR" : "ZF";
}

ComplexMatrix mr_precoder_dual(const ChannelEstimate& est, StreamPowers powers) {
  ComplexMatrix w(est.hhat_v.size(), 2);
  w.col(0) = mr_column(est.hhat_v, est.stats->trace_Gamma_v, powers.rho_v);
  w.col(1) = mr_column(est.hhat_h, est.stats->trace_Gamma_h, powers.rho_h);
  return w;
}

ComplexMatrix zf_directions(const ComplexMatrix& stacked_estimates) {
  const Eigen::Index streams = stacked_estimates.rows();
  if (streams > stacked_estimates.cols()) {
    std::ostringstream msg;
    msg << streams << " streams on " << stacked_estimates.cols() << " antennas";
    throw Error(ErrorCode::kTooManyUes, msg.str());
  }
  const ComplexMatrix gram = stacked_estimates * stacked_estimates.adjoint();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const double largest = eig.eigenvalues().maxCoeff();
  const double smallest = eig.eigenvalues().minCoeff();
  if (!(smallest > 0.0) || largest / smallest > kMaxGramCondition) {
    std::ostringstream msg;
    msg << "Gram eigenvalues [" << smallest << ", " << largest << "]";
    throw Error(ErrorCode::kRankDeficient, msg.str());
  }
  // W = H^H G^{-1} = (G^{-1} H)^H with G Hermitian.
  return hermitian_solve(gram, stacked_estimates).adjoint();
}

ComplexMatrix stack_estimates(std::span<const ChannelEstimate> estimates) {
  if (estimates.empty()) return {};
  const Eigen::Index m = estimates.front().hhat_v.size();
  ComplexMatrix h(static_cast<Eigen::Index>(2 * estimates.size()), m);
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(2 * k);
    h.row(row) = estimates[k].hhat_v.adjoint();
    h.row(row + 1) = estimates[k].hhat_h.adjoint();
  }
  return h;
}

PrecoderSet zf_precoder_dual(std::span<const ChannelEstimate> estimates,
                             std::span<const StreamPowers> powers) {
  if (estimates.size() != powers.size()) {
    throw std::invalid_argument("zf_precoder_dual: one power pair per UE");
  }
  PrecoderSet out;
  out.scheme = PrecoderScheme::kZF;
  if (estimates.empty()) return out;
  const ComplexMatrix w_all = zf_directions(stack_estimates(estimates));
  out.W.reserve(estimates.size());
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(2 * k);
    ComplexMatrix w(w_all.rows(), 2);
    w.col(0) = scaled_unit(w_all.col(col), powers[k].rho_v);
    w.col(1) = scaled_unit(w_all.col(col + 1), powers[k].rho_h);
    out.W.push_back(std::move(w));
  }
  return out;
}

ComplexVector mr_precoder_uni(const ComplexVector& hhat, double trace_gamma, double rho) {
  return mr_column(hhat, trace_gamma, rho);
}

PrecoderSet zf_precoder_uni(std::span<const ComplexVector> estimates, double rho) {
  PrecoderSet out;
  out.scheme = PrecoderScheme::kZF;
  if (estimates.empty()) return out;
  const Eigen::Index n = estimates.front().size();
  ComplexMatrix h(static_cast<Eigen::Index>(estimates.size()), n);
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    h.row(static_cast<Eigen::Index>(k)) = estimates[k].adjoint();
  }
  const ComplexMatrix w_all = zf_directions(h);
  out.W.reserve(estimates.size());
  for (Eigen::Index k = 0; k < w_all.cols(); ++k) {
    out.W.emplace_back(scaled_unit(w_all.col(k), rho));
  }
  return out;
}

}  // namespace dpmimo

#include "dpmimo/estimation.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "dpmimo/errors.hpp"

namespace dpmimo {
namespace {

using StridedVector = Eigen::Map<ComplexVector, 0, Eigen::InnerStride<2>>;
using ConstStridedVector = Eigen::Map<const ComplexVector, 0, Eigen::InnerStride<2>>;

// Port weights of R_v and R_h: R_v = R_bs (x) diag(1 - q, q).
struct PortWeights {
  double v_port;
  double h_port;
};

PortWeights v_receive_weights(double q) { return {1.0 - q, q}; }
PortWeights h_receive_weights(double q) { return {q, 1.0 - q}; }

// Spectral forms of the per-port MMSE quantities for a port covariance
// w R_bs = U diag(w lambda) U^H. Working in the eigenbasis keeps Gamma and C
// PSD to rounding even when C is many orders of magnitude below R.
struct PortEstimator {
  ComplexMatrix gain, gamma, sqrt_gamma, sqrt_c;
};

PortEstimator port_estimator(const HermitianSpectrum& spectrum, double weight, double p,
                             double tau_p, double noise_var) {
  const double sp = std::sqrt(p);
  PortEstimator out;
  out.gain = spectrum.apply([&](double l) {
    const double r = weight * l;
    return sp * r / (p * tau_p * r + noise_var);
  });
  out.gamma = spectrum.apply([&](double l) {
    const double r = weight * l;
    return p * tau_p * r * r / (p * tau_p * r + noise_var);
  });
  out.sqrt_gamma = spectrum.apply([&](double l) {
    const double r = weight * l;
    return std::sqrt(p * tau_p * r * r / (p * tau_p * r + noise_var));
  });
  out.sqrt_c = spectrum.apply([&](double l) {
    const double r = weight * l;
    return std::sqrt(noise_var * r / (p * tau_p * r + noise_var));
  });
  return out;
}

void fill_polarization(const CorrelationSet& corr, PortWeights w, double p, double tau_p,
                       double noise_var, const ComplexMatrix& r_dense, ComplexMatrix& gamma,
                       ComplexMatrix& c, double& trace_gamma, PortBlocks& gain,
                       PortBlocks& sqrt_gamma, PortBlocks& sqrt_c) {
  const PortEstimator v = port_estimator(corr.spectrum_bs, w.v_port, p, tau_p, noise_var);
  const PortEstimator h = port_estimator(corr.spectrum_bs, w.h_port, p, tau_p, noise_var);
  gain = {v.gain, h.gain};
  sqrt_gamma = {v.sqrt_gamma, h.sqrt_gamma};
  sqrt_c = {v.sqrt_c, h.sqrt_c};
  const PortBlocks gamma_blocks{v.gamma, h.gamma};
  gamma = gamma_blocks.dense();
  c = r_dense - gamma;
  trace_gamma = gamma_blocks.trace();
}

}  // namespace

ComplexMatrix PilotBook::ue_columns(std::size_t k) const {
  return V.middleCols(static_cast<Eigen::Index>(2 * k), 2);
}

ComplexMatrix PilotBook::pilot_signal(std::size_t k) const {
  const ComplexMatrix vk = ue_columns(k);
  ComplexMatrix phi(2, tau_p);
  phi.row(0) = std::sqrt(powers[k].p_v) * vk.col(0).transpose();
  phi.row(1) = std::sqrt(powers[k].p_h) * vk.col(1).transpose();
  return phi;
}

PilotBook build_pilot_book(std::size_t k, std::vector<PilotPowers> powers, Eigen::Index tau_c) {
  if (k == 0) throw std::invalid_argument("build_pilot_book: K must be at least 1");
  if (powers.size() != k) throw std::invalid_argument("build_pilot_book: one power pair per UE");
  for (const auto& p : powers) {
    if (p.p_v < 0.0 || p.p_h < 0.0) throw std::invalid_argument("negative pilot power");
  }
  const auto tau_p = static_cast<Eigen::Index>(2 * k);
  if (tau_p > tau_c) {
    std::ostringstream msg;
    msg << "tau_p = " << tau_p << " exceeds tau_c = " << tau_c;
    throw Error(ErrorCode::kPilotBudgetExceeded, msg.str());
  }

  PilotBook book;
  book.tau_p = tau_p;
  book.V.resize(tau_p, tau_p);
  for (Eigen::Index i = 0; i < tau_p; ++i) {
    for (Eigen::Index j = 0; j < tau_p; ++j) {
      const auto phase = static_cast<double>((i * j) % tau_p);
      book.V(i, j) = std::polar(1.0, -2.0 * std::numbers::pi * phase / static_cast<double>(tau_p));
    }
  }
  book.powers = std::move(powers);
  return book;
}

std::vector<ProcessedPilot> process_pilots(std::span<const DualPolChannel> channels,
                                           const PilotBook& book, double noise_var,
                                           RandomStream& rng) {
  if (channels.size() != book.num_ues()) {
    throw Error(ErrorCode::kDimensionMismatch, "one channel per pilot-book UE required");
  }
  if (noise_var < 0.0) throw std::invalid_argument("process_pilots: negative noise variance");
  const Eigen::Index m = channels.front().h_v.size();

  ComplexMatrix y(m, book.tau_p);
  const double noise_std = std::sqrt(noise_var);
  for (Eigen::Index j = 0; j < book.tau_p; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) y(i, j) = noise_std * rng.complex_normal();
  }
  ComplexMatrix h_herm(m, 2);
  for (std::size_t l = 0; l < channels.size(); ++l) {
    h_herm.col(0) = channels[l].h_v;
    h_herm.col(1) = channels[l].h_h;
    y.noalias() += h_herm * book.pilot_signal(l);
  }

  std::vector<ProcessedPilot> out(channels.size());
  for (std::size_t k = 0; k < channels.size(); ++k) {
    const ComplexMatrix yp = y * book.ue_columns(k).conjugate();
    out[k] = {yp.col(0), yp.col(1)};
  }
  return out;
}

ComplexMatrix PortBlocks::dense() const {
  const Eigen::Index half = v_ports.rows();
  ComplexMatrix out = ComplexMatrix::Zero(2 * half, 2 * half);
  for (Eigen::Index i = 0; i < half; ++i) {
    for (Eigen::Index j = 0; j < half; ++j) {
      out(2 * i, 2 * j) = v_ports(i, j);
      out(2 * i + 1, 2 * j + 1) = h_ports(i, j);
    }
  }
  return out;
}

ComplexVector PortBlocks::apply(const ComplexVector& x) const {
  const Eigen::Index half = v_ports.rows();
  ComplexVector out(2 * half);
  StridedVector(out.data(), half).noalias() = v_ports * ConstStridedVector(x.data(), half);
  StridedVector(out.data() + 1, half).noalias() = h_ports * ConstStridedVector(x.data() + 1, half);
  return out;
}

double PortBlocks::trace() const { return v_ports.trace().real() + h_ports.trace().real(); }

std::shared_ptr<const EstimatorStatistics> estimator_statistics(const CorrelationSet& corr,
                                                                PilotPowers powers,
                                                                Eigen::Index tau_p,
                                                                double noise_var) {
  if (!(noise_var > 0.0)) throw std::invalid_argument("estimator_statistics: noise_var <= 0");
  if (tau_p < 1) throw std::invalid_argument("estimator_statistics: tau_p < 1");
  if (powers.p_v < 0.0 || powers.p_h < 0.0) throw std::invalid_argument("negative pilot power");

  auto stats = std::make_shared<EstimatorStatistics>();
  stats->p_v = powers.p_v;
  stats->p_h = powers.p_h;
  stats->tau_p = tau_p;
  stats->noise_var = noise_var;
  const auto tau = static_cast<double>(tau_p);
  fill_polarization(corr, v_receive_weights(corr.q), powers.p_v, tau, noise_var, corr.R_v,
                    stats->Gamma_v, stats->C_v, stats->trace_Gamma_v, stats->gain_v,
                    stats->sqrt_Gamma_v, stats->sqrt_C_v);
  fill_polarization(corr, h_receive_weights(corr.q), powers.p_h, tau, noise_var, corr.R_h,
                    stats->Gamma_h, stats->C_h, stats->trace_Gamma_h, stats->gain_h,
                    stats->sqrt_Gamma_h, stats->sqrt_C_h);
  return stats;
}

ChannelEstimate mmse_estimate(const ProcessedPilot& pilot,
                              std::shared_ptr<const EstimatorStatistics> stats) {
  ChannelEstimate est;
  est.hhat_v = stats->gain_v.apply(pilot.y_v);
  est.hhat_h = stats->gain_h.apply(pilot.y_h);
  est.stats = std::move(stats);
  return est;
}

ChannelEstimate mmse_estimate(const ProcessedPilot& pilot, const CorrelationSet& corr,
                              PilotPowers powers, Eigen::Index tau_p, double noise_var) {
  return mmse_estimate(pilot, estimator_statistics(corr, powers, tau_p, noise_var));
}

EstimateDraw sample_estimate_directly(std::shared_ptr<const EstimatorStatistics> stats,
                                      RandomStream& rng) {
  const Eigen::Index m = stats->Gamma_v.rows();
  EstimateDraw draw;
  draw.estimate.hhat_v = stats->sqrt_Gamma_v.apply(sample_standard_complex_gaussian(m, rng));
  draw.estimate.hhat_h = stats->sqrt_Gamma_h.apply(sample_standard_complex_gaussian(m, rng));
  draw.channel.h_v =
      draw.estimate.hhat_v + stats->sqrt_C_v.apply(sample_standard_complex_gaussian(m, rng));
  draw.channel.h_h =
      draw.estimate.hhat_h + stats->sqrt_C_h.apply(sample_standard_complex_gaussian(m, rng));
  draw.estimate.stats = std::move(stats);
  return draw;
}

std::shared_ptr<const UniEstimatorStatistics> uni_estimator_statistics(const ComplexMatrix& R_bs,
                                                                       double p,
                                                                       Eigen::Index tau_p,
                                                                       double noise_var) {
  if (!(noise_var > 0.0)) throw std::invalid_argument("uni_estimator_statistics: noise_var <= 0");
  if (tau_p < 1) throw std::invalid_argument("uni_estimator_statistics: tau_p < 1");
  if (p < 0.0) throw std::invalid_argument("negative pilot power");

  const HermitianSpectrum spectrum = hermitian_spectrum(R_bs);
  const PortEstimator e =
      port_estimator(spectrum, 1.0, p, static_cast<double>(tau_p), noise_var);
  auto stats = std::make_shared<UniEstimatorStatistics>();
  stats->p = p;
  stats->tau_p = tau_p;
  stats->noise_var = noise_var;
  stats->R = R_bs;
  stats->Gamma = e.gamma;
  stats->C = R_bs - e.gamma;
  stats->trace_Gamma = e.gamma.trace().real();
  stats->gain = e.gain;
  stats->sqrt_Gamma = {e.gamma, e.sqrt_gamma, spectrum.eigen_floor};
  stats->sqrt_C = {stats->C, e.sqrt_c, spectrum.eigen_floor};
  return stats;
}

UniEstimateDraw sample_uni_estimate_directly(const UniEstimatorStatistics& stats,
                                             RandomStream& rng) {
  const Eigen::Index n = stats.Gamma.rows();
  UniEstimateDraw draw;
  draw.hhat = stats.sqrt_Gamma.factor * sample_standard_complex_gaussian(n, rng);
  draw.h = draw.hhat + stats.sqrt_C.factor * sample_standard_complex_gaussian(n, rng);
  return draw;
}

}  // namespace dpmimo

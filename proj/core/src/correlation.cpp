#include "dpmimo/correlation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dpmimo {
namespace {

ComplexMatrix port_weights(double first, double second) {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = first;
  d(1, 1) = second;
  return d;
}

}  // namespace

XPDSpec xpd_from_db(double xpd_db) {
  if (std::isnan(xpd_db)) throw std::invalid_argument("xpd_from_db: NaN");
  XPDSpec spec;
  spec.xpd_db = xpd_db;
  if (std::isinf(xpd_db)) {
    spec.q = xpd_db > 0 ? 0.0 : 1.0;
  } else {
    spec.q = 1.0 / (1.0 + std::pow(10.0, xpd_db / 10.0));
  }
  return spec;
}

ComplexMatrix local_scattering_cov(double beta, std::span<const double> cluster_angles,
                                   double asd_rad, Eigen::Index half_m) {
  if (half_m < 1) throw std::invalid_argument("local_scattering_cov: half_m must be >= 1");
  if (asd_rad < 0.0) throw std::invalid_argument("local_scattering_cov: negative ASD");
  if (cluster_angles.empty()) throw std::invalid_argument("local_scattering_cov: no clusters");

  using std::numbers::pi;
  const double n = static_cast<double>(cluster_angles.size());

  // Toeplitz: entry (s, m) depends only on s - m; fill from the first column.
  ComplexVector first_col(half_m);
  for (Eigen::Index d = 0; d < half_m; ++d) {
    Complex sum{0.0, 0.0};
    for (double phi : cluster_angles) {
      const double spread = pi * static_cast<double>(d) * std::cos(phi);
      const double damping = std::exp(-0.5 * asd_rad * asd_rad * spread * spread);
      sum += std::polar(damping, pi * static_cast<double>(d) * std::sin(phi));
    }
    first_col(d) = beta * sum / n;
  }

  ComplexMatrix r(half_m, half_m);
  for (Eigen::Index s = 0; s < half_m; ++s) {
    for (Eigen::Index m = 0; m < half_m; ++m) {
      r(s, m) = s >= m ? first_col(s - m) : std::conj(first_col(m - s));
    }
  }
  return r;
}

CorrelationSet build_correlation_set(const ComplexMatrix& R_bs, double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("build_correlation_set: q must lie in [0, 1]");
  }
  CorrelationSet out;
  out.spectrum_bs = hermitian_spectrum(R_bs);
  out.sqrt_R_bs.base = R_bs;
  out.sqrt_R_bs.factor = out.spectrum_bs.apply([](double x) { return std::sqrt(x); });
  out.sqrt_R_bs.eigen_floor = out.spectrum_bs.eigen_floor;
  out.R_bs = R_bs;
  out.q = q;

  const ComplexMatrix eye2 = ComplexMatrix::Identity(2, 2);
  out.R = kron(R_bs, eye2);
  out.R_v = kron(R_bs, port_weights(1.0 - q, q));
  out.R_h = kron(R_bs, port_weights(q, 1.0 - q));

  out.sqrt_R.base = out.R;
  out.sqrt_R.factor = kron(out.sqrt_R_bs.factor, eye2);
  out.sqrt_R.eigen_floor = out.sqrt_R_bs.eigen_floor;
  return out;
}

std::pair<ComplexMatrix, ComplexMatrix> polarization_covariances_from_factor(
    const ComplexMatrix& sqrt_R, double q) {
  const Eigen::Index m = sqrt_R.cols();
  if (m % 2 != 0) throw std::invalid_argument("factor must have an even number of columns");
  Eigen::VectorXd d_v(m);
  Eigen::VectorXd d_h(m);
  for (Eigen::Index i = 0; i < m; i += 2) {
    d_v(i) = 1.0 - q;
    d_v(i + 1) = q;
    d_h(i) = q;
    d_h(i + 1) = 1.0 - q;
  }
  ComplexMatrix r_v = sqrt_R * d_v.asDiagonal() * sqrt_R.adjoint();
  ComplexMatrix r_h = sqrt_R * d_h.asDiagonal() * sqrt_R.adjoint();
  return {std::move(r_v), std::move(r_h)};
}

ComplexMatrix block_covariance(const CorrelationSet& corr) {
  const Eigen::Index m = corr.ports();
  ComplexMatrix out = ComplexMatrix::Zero(2 * m, 2 * m);
  out.topLeftCorner(m, m) = corr.R_v;
  out.bottomRightCorner(m, m) = corr.R_h;
  return out;
}

}  // namespace dpmimo

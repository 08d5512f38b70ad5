#pragma once

#include <limits>
#include <span>

#include "dpmimo/numerics.hpp"

namespace dpmimo {

/// Cross-polar discrimination XPD = (1 - q) / q, with q the fraction of
/// power leaking into the orthogonal polarization.
struct XPDSpec {
  double xpd_db = std::numeric_limits<double>::infinity();
  double q = 0.0;
};

/// q = 1 / (1 + 10^(xpd_db / 10)); +inf maps to q = 0.
XPDSpec xpd_from_db(double xpd_db);

/// Gaussian local scattering covariance of a half-wavelength ULA with
/// half_m elements. Entry (s, m) averages, over the clusters, the steering
/// phase exp(j pi (s - m) sin phi_n) damped by
/// exp(-asd^2 / 2 (pi (s - m) cos phi_n)^2). The diagonal equals beta.
ComplexMatrix local_scattering_cov(double beta, std::span<const double> cluster_angles,
                                   double asd_rad, Eigen::Index half_m);

/// Second-order statistics of one UE's dual-polarized channel. Antenna ports
/// are interleaved (V, H, V, H, ...), so port 2m is the V element of
/// dual-polarized antenna m and port 2m + 1 its H element.
struct CorrelationSet {
  ComplexMatrix R_bs;       ///< M/2 x M/2 spatial correlation (includes beta)
  double q = 0.0;           ///< XPD leakage fraction
  ComplexMatrix R;          ///< R_bs (x) I_2
  ComplexMatrix R_v;        ///< covariance of the V-receive channel h_v
  ComplexMatrix R_h;        ///< covariance of the H-receive channel h_h
  HermitianFactor sqrt_R;   ///< Hermitian root of R, equal to sqrt(R_bs) (x) I_2
  HermitianFactor sqrt_R_bs;
  HermitianSpectrum spectrum_bs;  ///< eigendecomposition of R_bs

  Eigen::Index ports() const { return R.rows(); }
};

/// Builds R, R_v = R_bs (x) diag(1 - q, q), R_h = R_bs (x) diag(q, 1 - q).
/// Throws whatever hermitian_psd_sqrt throws for R_bs, and
/// std::invalid_argument for q outside [0, 1].
CorrelationSet build_correlation_set(const ComplexMatrix& R_bs, double q);

/// Definitional construction F D_v F^H and F D_h F^H for a square-root
/// factor F of R, with D_v = I (x) diag(1 - q, q). Used to cross-check the
/// Kronecker shortcut.
std::pair<ComplexMatrix, ComplexMatrix> polarization_covariances_from_factor(
    const ComplexMatrix& sqrt_R, double q);

/// blockdiag(R_v, R_h): covariance of vec(H^H) = [h_v; h_h].
ComplexMatrix block_covariance(const CorrelationSet& corr);

}  // namespace dpmimo

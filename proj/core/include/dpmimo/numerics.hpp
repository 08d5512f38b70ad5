#pragma once

#include <complex>

#include <Eigen/Dense>

#include "dpmimo/random.hpp"

namespace dpmimo {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Relative tolerances shared by the Hermitian primitives. All are relative
/// to a norm of the input; channel gains span many orders of magnitude.
inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kPsdEigenFloor = 1e-10;
inline constexpr double kSingularPivotFloor = 1e-14;

/// A Hermitian PSD matrix together with its Hermitian square root,
/// factor * factor^H == base.
struct HermitianFactor {
  ComplexMatrix base;
  ComplexMatrix factor;
  double eigen_floor = 0.0;  ///< absolute clamp threshold that was applied
};

/// Eigendecomposition A = U diag(values) U^H of a numerically PSD Hermitian
/// matrix; eigenvalues in [-1e-10 ||A||_2, 0) are clamped to zero.
struct HermitianSpectrum {
  Eigen::VectorXd values;  ///< ascending, all >= 0
  ComplexMatrix vectors;
  double eigen_floor = 0.0;

  /// U diag(f(values)) U^H.
  template <typename F>
  ComplexMatrix apply(F&& f) const {
    Eigen::VectorXd mapped(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) mapped(i) = f(values(i));
    ComplexMatrix out = vectors * mapped.asDiagonal() * vectors.adjoint();
    return 0.5 * (out + out.adjoint());
  }
};

/// Throws Error(kNotHermitian), Error(kNotPsd), Error(kDimensionMismatch).
HermitianSpectrum hermitian_spectrum(const ComplexMatrix& a);

/// Unique Hermitian PSD square root U sqrt(L) U^H. Eigenvalues in
/// [-1e-10 ||A||_2, 0) are clamped to zero.
/// Throws Error(kNotHermitian), Error(kNotPsd), Error(kDimensionMismatch).
HermitianFactor hermitian_psd_sqrt(const ComplexMatrix& a);

/// Solves A X = B for Hermitian positive definite A (Cholesky).
/// Throws Error(kSingular) when a pivot falls below 1e-14 ||A||.
ComplexMatrix hermitian_solve(const ComplexMatrix& a, const ComplexMatrix& b);

/// tr(A B) without forming A B. The summation order is canonical in the
/// pair, so trace_product(A, B) == trace_product(B, A) bit for bit.
Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// n i.i.d. CN(0, 1) entries.
ComplexVector sample_standard_complex_gaussian(Eigen::Index n, RandomStream& rng);

/// (A + A^H) / 2.
ComplexMatrix hermitian_part(const ComplexMatrix& a);

/// ||A - A^H||_F <= rel_tol ||A||_F.
bool is_hermitian(const ComplexMatrix& a, double rel_tol = kHermitianTolerance);

/// Kronecker product A (x) B.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace dpmimo

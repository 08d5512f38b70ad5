#include "dpmimo/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dpmimo/errors.hpp"

namespace dpmimo {
namespace {

void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    std::ostringstream msg;
    msg << what << " expects a non-empty square matrix, got " << a.rows() << "x" << a.cols();
    throw Error(ErrorCode::kDimensionMismatch, msg.str());
  }
}

}  // namespace

ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  return 0.5 * (a + a.adjoint());
}

bool is_hermitian(const ComplexMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).norm() <= rel_tol * a.norm();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

HermitianSpectrum hermitian_spectrum(const ComplexMatrix& a) {
  require_square(a, "hermitian_spectrum");
  if (!a.allFinite()) {
    throw Error(ErrorCode::kNotHermitian, "matrix has non-finite entries");
  }
  if (!is_hermitian(a, kHermitianTolerance)) {
    throw Error(ErrorCode::kNotHermitian, "asymmetry exceeds relative tolerance");
  }

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(hermitian_part(a));
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::kNotHermitian, "eigendecomposition did not converge");
  }
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double spectral_norm = lambda.cwiseAbs().maxCoeff();
  const double floor = kPsdEigenFloor * spectral_norm;
  if (lambda.minCoeff() < -floor) {
    std::ostringstream msg;
    msg << "eigenvalue " << lambda.minCoeff() << " below -" << floor;
    throw Error(ErrorCode::kNotPsd, msg.str());
  }
  HermitianSpectrum out;
  out.values = lambda.cwiseMax(0.0);
  out.vectors = eig.eigenvectors();
  out.eigen_floor = floor;
  return out;
}

HermitianFactor hermitian_psd_sqrt(const ComplexMatrix& a) {
  const HermitianSpectrum spectrum = hermitian_spectrum(a);
  HermitianFactor out;
  out.base = a;
  out.factor = spectrum.apply([](double x) { return std::sqrt(x); });
  out.eigen_floor = spectrum.eigen_floor;
  return out;
}

ComplexMatrix hermitian_solve(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square(a, "hermitian_solve");
  if (b.rows() != a.rows()) {
    std::ostringstream msg;
    msg << "hermitian_solve: A is " << a.rows() << "x" << a.cols() << ", B has " << b.rows()
        << " rows";
    throw Error(ErrorCode::kDimensionMismatch, msg.str());
  }
  // ||A||_1 bounds ||A||_2 from above for Hermitian A.
  const double scale = a.cwiseAbs().colwise().sum().maxCoeff();
  Eigen::LLT<ComplexMatrix> llt(a);
  if (llt.info() != Eigen::Success || scale == 0.0) {
    throw Error(ErrorCode::kSingular, "Cholesky factorization failed");
  }
  const double min_pivot = llt.matrixLLT().diagonal().real().cwiseAbs2().minCoeff();
  if (min_pivot < kSingularPivotFloor * scale) {
    std::ostringstream msg;
    msg << "pivot " << min_pivot << " below " << kSingularPivotFloor << " * " << scale;
    throw Error(ErrorCode::kSingular, msg.str());
  }
  return llt.solve(b);
}

Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.cols() || a.cols() != b.rows()) {
    std::ostringstream msg;
    msg << "trace_product: " << a.rows() << "x" << a.cols() << " times " << b.rows() << "x"
        << b.cols();
    throw Error(ErrorCode::kDimensionMismatch, msg.str());
  }
  if (a.rows() != a.cols()) {
    // Walk the shorter row dimension outermost so both argument orders visit
    // the same products in the same order.
    const ComplexMatrix& p = a.rows() <= b.rows() ? a : b;
    const ComplexMatrix& q = a.rows() <= b.rows() ? b : a;
    Complex sum{0.0, 0.0};
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      for (Eigen::Index j = 0; j < p.cols(); ++j) {
        sum += p(i, j) * q(j, i);
      }
    }
    return sum;
  }
  const Eigen::Index n = a.rows();
  Complex sum{0.0, 0.0};
  for (Eigen::Index i = 0; i < n; ++i) {
    sum += a(i, i) * b(i, i);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      // x + y with the operands swapped is still the same IEEE sum.
      sum += a(i, j) * b(j, i) + a(j, i) * b(i, j);
    }
  }
  return sum;
}

ComplexVector sample_standard_complex_gaussian(Eigen::Index n, RandomStream& rng) {
  ComplexVector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.complex_normal();
  return z;
}

}  // namespace dpmimo

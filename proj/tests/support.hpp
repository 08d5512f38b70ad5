#pragma once

#include <cmath>
#include <vector>

#include "dpmimo/numerics.hpp"
#include "dpmimo/random.hpp"

namespace dpmimo::testing {

inline ComplexMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, RandomStream& rng) {
  ComplexMatrix a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = rng.complex_normal();
  return a;
}

// X X^H + ridge I, Hermitian by construction.
inline ComplexMatrix random_hpd(Eigen::Index n, RandomStream& rng, double ridge = 0.1) {
  const ComplexMatrix x = random_matrix(n, n, rng);
  ComplexMatrix a = x * x.adjoint() + ridge * ComplexMatrix::Identity(n, n);
  return 0.5 * (a + a.adjoint());
}

// Rank-deficient PSD: X X^H with X n x r.
inline ComplexMatrix random_psd(Eigen::Index n, Eigen::Index rank, RandomStream& rng) {
  const ComplexMatrix x = random_matrix(n, rank, rng);
  ComplexMatrix a = x * x.adjoint();
  return 0.5 * (a + a.adjoint());
}

inline double rel_error(const ComplexMatrix& got, const ComplexMatrix& want) {
  return (got - want).norm() / want.norm();
}

inline double max_abs(const ComplexMatrix& a) { return a.cwiseAbs().maxCoeff(); }

inline ComplexMatrix sample_covariance(const std::vector<ComplexVector>& xs) {
  ComplexMatrix c = ComplexMatrix::Zero(xs.front().size(), xs.front().size());
  for (const auto& x : xs) c += x * x.adjoint();
  return c / static_cast<double>(xs.size());
}

inline ComplexMatrix sample_cross(const std::vector<ComplexVector>& xs,
                                  const std::vector<ComplexVector>& ys) {
  ComplexMatrix c = ComplexMatrix::Zero(xs.front().size(), ys.front().size());
  for (std::size_t i = 0; i < xs.size(); ++i) c += xs[i] * ys[i].adjoint();
  return c / static_cast<double>(xs.size());
}

}  // namespace dpmimo::testing

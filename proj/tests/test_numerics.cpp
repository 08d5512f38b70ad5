#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "dpmimo/errors.hpp"
#include "dpmimo/numerics.hpp"
#include "support.hpp"

namespace dpmimo {
namespace {

using testing::max_abs;
using testing::random_hpd;
using testing::random_matrix;
using testing::random_psd;
using testing::rel_error;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no dpmimo::Error thrown";
  return ErrorCode::kInvalidConfig;
}

TEST(HermitianSqrt, IdentityMapsToIdentity) {
  const ComplexMatrix i3 = ComplexMatrix::Identity(3, 3);
  const auto f = hermitian_psd_sqrt(i3);
  EXPECT_LE(max_abs(f.factor - i3), 1e-14);
}

TEST(HermitianSqrt, DiagonalRoot) {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = 4.0;
  a(1, 1) = 1.0;
  const auto f = hermitian_psd_sqrt(a);
  EXPECT_NEAR(f.factor(0, 0).real(), 2.0, 1e-14);
  EXPECT_NEAR(f.factor(1, 1).real(), 1.0, 1e-14);
  EXPECT_LE(std::abs(f.factor(0, 1)), 1e-14);
}

TEST(HermitianSqrt, ReconstructsRandomPsd) {
  RandomStream rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const ComplexMatrix a = random_hpd(8, rng);
    const auto f = hermitian_psd_sqrt(a);
    // Oracle: B B reproduces A since B is Hermitian.
    EXPECT_LE(max_abs(f.factor * f.factor - a) / a.norm(), 1e-10);
    EXPECT_LE((f.factor * f.factor.adjoint() - a).norm(), 1e-10 * a.norm());
    EXPECT_LE((f.factor - f.factor.adjoint()).norm(), 1e-12 * f.factor.norm());
  }
}

TEST(HermitianSqrt, RankDeficientIsClamped) {
  RandomStream rng(12);
  const ComplexMatrix a = random_psd(10, 3, rng);
  const auto f = hermitian_psd_sqrt(a);
  EXPECT_LE(rel_error(f.factor * f.factor.adjoint(), a), 1e-10);
}

TEST(HermitianSqrt, RejectsNonHermitian) {
  ComplexMatrix a = ComplexMatrix::Identity(2, 2);
  a(0, 1) = 0.5;
  EXPECT_EQ(code_of([&] { hermitian_psd_sqrt(a); }), ErrorCode::kNotHermitian);
}

TEST(HermitianSqrt, RejectsIndefinite) {
  ComplexMatrix a = ComplexMatrix::Identity(2, 2);
  a(1, 1) = -0.5;
  EXPECT_EQ(code_of([&] { hermitian_psd_sqrt(a); }), ErrorCode::kNotPsd);
}

TEST(HermitianSqrt, TinyNegativeEigenvalueAccepted) {
  ComplexMatrix a = ComplexMatrix::Identity(2, 2);
  a(1, 1) = -1e-12;
  const auto f = hermitian_psd_sqrt(a);
  EXPECT_EQ(f.factor(1, 1), Complex(0.0, 0.0));
}

TEST(HermitianSolve, IdentitySystem) {
  RandomStream rng(21);
  const ComplexMatrix b = random_matrix(4, 3, rng);
  EXPECT_LE(max_abs(hermitian_solve(ComplexMatrix::Identity(4, 4), b) - b), 1e-15);
}

TEST(HermitianSolve, DiagonalSystem) {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 4.0;
  const ComplexMatrix x = hermitian_solve(a, ComplexMatrix::Identity(2, 2));
  EXPECT_NEAR(x(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(x(1, 1).real(), 0.25, 1e-15);
  EXPECT_EQ(x(0, 1), Complex(0.0, 0.0));
}

TEST(HermitianSolve, MatchesExplicitInverse) {
  RandomStream rng(22);
  for (int rep = 0; rep < 10; ++rep) {
    const ComplexMatrix a = random_hpd(16, rng);
    const ComplexMatrix b = random_matrix(16, 5, rng);
    const ComplexMatrix oracle = a.inverse() * b;  // LU based
    const ComplexMatrix x = hermitian_solve(a, b);
    EXPECT_LE(rel_error(x, oracle), 1e-8);
    EXPECT_LE((a * x - b).norm(), 1e-8 * b.norm());
  }
}

TEST(HermitianSolve, SingularAndShapeErrors) {
  RandomStream rng(23);
  const ComplexMatrix a = random_psd(6, 2, rng);
  EXPECT_EQ(code_of([&] { hermitian_solve(a, ComplexMatrix::Identity(6, 6)); }),
            ErrorCode::kSingular);
  EXPECT_EQ(code_of([&] {
              hermitian_solve(ComplexMatrix::Identity(3, 3), ComplexMatrix::Identity(4, 4));
            }),
            ErrorCode::kDimensionMismatch);
}

TEST(TraceProduct, SmallExamples) {
  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  EXPECT_EQ(trace_product(i2, i2), Complex(2.0, 0.0));
  ComplexMatrix a(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;
  EXPECT_EQ(trace_product(a, i2), Complex(5.0, 0.0));
}

TEST(TraceProduct, MatchesFullProduct) {
  RandomStream rng(31);
  const ComplexMatrix a = random_matrix(10, 10, rng);
  const ComplexMatrix b = random_matrix(10, 10, rng);
  const Complex oracle = (a * b).trace();
  EXPECT_LE(std::abs(trace_product(a, b) - oracle), 1e-12 * std::abs(oracle) + 1e-12);
}

TEST(TraceProduct, CommutesExactly) {
  RandomStream rng(32);
  for (int rep = 0; rep < 50; ++rep) {
    const ComplexMatrix a = random_matrix(7, 7, rng);
    const ComplexMatrix b = random_matrix(7, 7, rng);
    EXPECT_EQ(trace_product(a, b), trace_product(b, a));
    const ComplexMatrix c = random_matrix(3, 5, rng);
    const ComplexMatrix d = random_matrix(5, 3, rng);
    EXPECT_EQ(trace_product(c, d), trace_product(d, c));
  }
}

TEST(TraceProduct, ShapeMismatch) {
  EXPECT_EQ(code_of([] {
              trace_product(ComplexMatrix::Zero(2, 3), ComplexMatrix::Zero(2, 3));
            }),
            ErrorCode::kDimensionMismatch);
}

TEST(ComplexGaussian, FirstAndSecondMoments) {
  RandomStream rng(41);
  const Eigen::Index n = 1'000'000;
  const ComplexVector z = sample_standard_complex_gaussian(n, rng);
  const Complex mean = z.mean();
  EXPECT_LE(std::abs(mean.real()), 5e-3);
  EXPECT_LE(std::abs(mean.imag()), 5e-3);
  const double var = z.squaredNorm() / static_cast<double>(n);
  EXPECT_NEAR(var, 1.0, 1e-2);
  // Circular symmetry: E{z z} vanishes.
  Complex pseudo(0.0, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) pseudo += z(i) * z(i);
  pseudo /= static_cast<double>(n);
  EXPECT_LE(std::abs(pseudo), 5e-3);
}

TEST(ComplexGaussian, RealAndImaginaryHalfVariance) {
  RandomStream rng(42);
  const Eigen::Index n = 200'000;
  const ComplexVector z = sample_standard_complex_gaussian(n, rng);
  double re = 0.0, im = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    re += z(i).real() * z(i).real();
    im += z(i).imag() * z(i).imag();
  }
  EXPECT_NEAR(re / n, 0.5, 1e-2);
  EXPECT_NEAR(im / n, 0.5, 1e-2);
}

TEST(Random, SubstreamsAreDeterministicAndDistinct) {
  EXPECT_EQ(derive_seed(7, {1, 2}), derive_seed(7, {1, 2}));
  EXPECT_NE(derive_seed(7, {1, 2}), derive_seed(7, {2, 1}));
  EXPECT_NE(derive_seed(7, {1}), derive_seed(8, {1}));
  RandomStream a(5), b(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.complex_normal(), b.complex_normal());
}

TEST(Kron, MatchesDefinition) {
  RandomStream rng(51);
  const ComplexMatrix a = random_matrix(3, 2, rng);
  const ComplexMatrix b = random_matrix(2, 4, rng);
  const ComplexMatrix k = kron(a, b);
  ASSERT_EQ(k.rows(), 6);
  ASSERT_EQ(k.cols(), 8);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j)
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 4; ++c) EXPECT_EQ(k(i * 2 + r, j * 4 + c), a(i, j) * b(r, c));
}

}  // namespace
}  // namespace dpmimo

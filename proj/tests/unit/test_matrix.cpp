#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "qsuff/errors.hpp"
#include "qsuff/matrix.hpp"
#include "qsuff/random.hpp"

using namespace qsuff;

namespace {

Matrix diag(std::initializer_list<double> v) {
  Matrix m = Matrix::Zero(static_cast<Index>(v.size()), static_cast<Index>(v.size()));
  Index k = 0;
  for (double x : v) m(k, k) = x, ++k;
  return m;
}

}  // namespace

TEST(Spectral, IdentityAndDiagonal) {
  const SpectralData id = spectral(Matrix::Identity(2, 2));
  EXPECT_NEAR(id.eigenvalues(0), 1.0, 1e-15);
  EXPECT_NEAR(id.eigenvalues(1), 1.0, 1e-15);
  const SpectralData d = spectral(diag({1.0, 3.0}));
  EXPECT_NEAR(d.eigenvalues(0), 3.0, 1e-15);
  EXPECT_NEAR(d.eigenvalues(1), 1.0, 1e-15);
}

TEST(Spectral, ReconstructsRandomHermitian) {
  Rng rng(11);
  const Matrix a = random_hermitian(4, rng);
  const SpectralData sd = spectral(a);
  const Matrix back = sd.eigenvectors * sd.eigenvalues.cast<Complex>().asDiagonal() * sd.eigenvectors.adjoint();
  EXPECT_LE((back - a).norm(), 1e-12);
}

TEST(Spectral, RejectsNonHermitian) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = 1.0;
  EXPECT_THROW(spectral(a), DomainError);
}

TEST(MatFun, ExpOfDiagonal) {
  const Matrix r = mat_fun(diag({0.0, std::log(2.0)}), [](double x) { return Complex(std::exp(x), 0.0); });
  EXPECT_LE((r - diag({1.0, 2.0})).norm(), 1e-14);
}

TEST(MatFun, SqrtRoundTrip) {
  Rng rng(3);
  const Matrix d = random_density(4, rng);
  const Matrix s = psd_power(d, 0.5);
  EXPECT_LE((s * s - d).norm(), 1e-10);
}

TEST(MatFun, UndefinedValueIsDomainError) {
  EXPECT_THROW(mat_fun(diag({1.0, -1.0}), [](double x) { return Complex(std::log(x), 0.0); }), DomainError);
}

TEST(ImaginaryPower, ZeroAndDiagonal) {
  Rng rng(5);
  const Matrix d = random_density(3, rng);
  EXPECT_LE((imaginary_power(d, 0.0) - Matrix::Identity(3, 3)).norm(), 1e-12);
  const Matrix p = imaginary_power(diag({0.25, 0.75}), 1.3);
  EXPECT_NEAR(std::abs(p(0, 0) - std::exp(Complex(0.0, 1.3 * std::log(0.25)))), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(p(1, 1) - std::exp(Complex(0.0, 1.3 * std::log(0.75)))), 0.0, 1e-14);
}

TEST(ImaginaryPower, GroupProperty) {
  Rng rng(8);
  const Matrix d = random_density(2, rng);
  EXPECT_LE((imaginary_power(d, 0.7) * imaginary_power(d, -0.7) - Matrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(Support, ProjectionAndRank) {
  EXPECT_LE((support_projection(diag({0.5, 0.0})) - diag({1.0, 0.0})).norm(), 1e-15);
  Rng rng(2);
  EXPECT_LE((support_projection(random_density(3, rng)) - Matrix::Identity(3, 3)).norm(), 1e-12);
  const Matrix r2 = random_density(4, rng, 2);
  EXPECT_EQ(support_rank(r2), 2);
  EXPECT_NEAR(support_projection(r2).trace().real(), 2.0, 1e-12);
  EXPECT_EQ(support_projection(Matrix::Zero(2, 2)).norm(), 0.0);
}

TEST(Support, PseudoInverse) {
  EXPECT_LE((pinv_on_support(diag({2.0, 0.0})) - diag({0.5, 0.0})).norm(), 1e-15);
  EXPECT_LE((pinv_on_support(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm(), 1e-15);
  Rng rng(4);
  const Matrix d = random_density(5, rng, 3);
  EXPECT_LE((d * pinv_on_support(d) * d - d).norm(), 1e-10);
}

TEST(Kron, BasicIdentities) {
  Rng rng(6);
  const Matrix a = random_ginibre(3, 3, rng);
  const Matrix b = random_ginibre(3, 3, rng);
  EXPECT_LE((kron(a, Matrix::Identity(1, 1)) - a).norm(), 0.0);
  EXPECT_LE((kron(diag({1.0, 2.0}), diag({3.0, 5.0})) - diag({3.0, 5.0, 6.0, 10.0})).norm(), 0.0);
  EXPECT_NEAR(std::abs(kron(a, b).trace() - a.trace() * b.trace()), 0.0, 1e-12);
}

TEST(PartialTrace, ProductAndEntangled) {
  Rng rng(9);
  const Matrix ra = random_density(2, rng);
  const Matrix rb = random_density(3, rng);
  const std::array<Index, 2> dims{2, 3};
  EXPECT_LE((partial_trace(kron(ra, rb), dims, std::array<Index, 1>{0}) - ra).norm(), 1e-14);
  EXPECT_LE((partial_trace(kron(ra, rb), dims, std::array<Index, 1>{1}) - rb).norm(), 1e-14);
  const Matrix both = kron(ra, rb);
  EXPECT_LE((partial_trace(both, dims, std::array<Index, 2>{0, 1}) - both).norm(), 0.0);

  Vector bell = Vector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const std::array<Index, 2> qubits{2, 2};
  const Matrix half = partial_trace(bell * bell.adjoint(), qubits, std::array<Index, 1>{0});
  EXPECT_LE((half - 0.5 * Matrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(PartialTrace, RejectsMismatchedDims) {
  const std::array<Index, 2> dims{2, 2};
  EXPECT_THROW(partial_trace(Matrix::Identity(6, 6), dims, std::array<Index, 1>{0}), DomainError);
}

TEST(Resolvent, QuadratureMatchesSpectral) {
  EXPECT_LE(resolvent_quadrature_check(Matrix::Identity(2, 2), ResolventIntegral::kSqrt), 1e-6);
  EXPECT_LE((resolvent_integral(diag({4.0, 1.0}), ResolventIntegral::kSqrt) - diag({2.0, 1.0})).norm(), 1e-6);
  EXPECT_LE((resolvent_integral(diag({std::exp(1.0), 1.0}), ResolventIntegral::kLog) - diag({1.0, 0.0})).norm(), 1e-6);
}

TEST(FrechetExp, ZeroCommutingAndFiniteDifference) {
  Rng rng(10);
  const Matrix e = random_hermitian(3, rng);
  EXPECT_LE((frechet_exp(Matrix::Zero(3, 3), e) - e).norm(), 1e-12);
  const Matrix h = diag({0.3, -0.2, 1.1});
  const Matrix ed = diag({1.0, 2.0, -1.0});
  EXPECT_LE((frechet_exp(h, ed) - expm_hermitian(h) * ed).norm(), 1e-12);

  const Matrix hr = random_hermitian(3, rng);
  const double step = 1e-5;
  const Matrix fd = (expm_hermitian(hr + step * e) - expm_hermitian(hr - step * e)) / (2.0 * step);
  EXPECT_LE((frechet_exp(hr, e) - fd).norm(), 1e-6 * std::max(1.0, fd.norm()));
}

TEST(Vec, RoundTrip) {
  Rng rng(12);
  const Matrix a = random_ginibre(3, 3, rng);
  EXPECT_EQ((unvec(vec(a), 3) - a).norm(), 0.0);
  EXPECT_NEAR(std::abs(hs_inner(a, a) - Complex(a.squaredNorm(), 0.0)), 0.0, 1e-12);
}

#include <gtest/gtest.h>

#include <cmath>

#include "constructions.hpp"

using namespace qsuff;
using namespace qsuff::testing;

namespace {

Matrix diag(std::initializer_list<double> v) {
  Matrix m = Matrix::Zero(static_cast<Index>(v.size()), static_cast<Index>(v.size()));
  Index k = 0;
  for (double x : v) m(k, k) = x, ++k;
  return m;
}

Matrix pauli_x() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = m(1, 0) = 1.0;
  return m;
}

ExponentialFamily qubit_tilt() { return ExponentialFamily(Matrix::Zero(2, 2), {diag({1.0, -1.0})}); }

std::vector<double> means(const ExponentialFamily& fam, const std::vector<double>& xi) {
  const Matrix d = density_at(fam, xi);
  std::vector<double> out;
  for (const Matrix& a : fam.generators()) out.push_back((d * a).trace().real());
  return out;
}

}  // namespace

TEST(DensityAt, Cases) {
  Rng rng(1);
  const Matrix omega = random_density(3, rng);
  const ExponentialFamily fam = ExponentialFamily::around(omega, {random_hermitian(3, rng)});
  EXPECT_LE((density_at(fam, {0.0}) - omega).norm(), 1e-12);

  const double s = 0.7;
  const Matrix q = density_at(qubit_tilt(), {s});
  EXPECT_NEAR(q(0, 0).real(), std::exp(s) / (std::exp(s) + std::exp(-s)), 1e-14);
  EXPECT_NEAR(q(1, 1).real(), std::exp(-s) / (std::exp(s) + std::exp(-s)), 1e-14);

  const ExponentialFamily classical(diag({0.1, -0.3, 0.5}), {diag({1.0, 2.0, -1.0})});
  const Matrix c = density_at(classical, {0.4});
  const double w[3] = {std::exp(0.1 + 0.4), std::exp(-0.3 + 0.8), std::exp(0.5 - 0.4)};
  const double z = w[0] + w[1] + w[2];
  for (Index k = 0; k < 3; ++k) EXPECT_NEAR(c(k, k).real(), w[k] / z, 1e-14);

  // Large parameters do not overflow.
  const Matrix big = density_at(qubit_tilt(), {800.0});
  EXPECT_TRUE(big.allFinite());
  EXPECT_NEAR(big(0, 0).real(), 1.0, 1e-12);
}

TEST(PerturbedState, Cases) {
  Rng rng(2);
  const Matrix omega = random_density(3, rng);
  EXPECT_LE((perturbed_state(omega, Matrix::Zero(3, 3)) - omega).norm(), 1e-12);
  EXPECT_LE((perturbed_state(omega, 2.5 * Matrix::Identity(3, 3)) - omega).norm(), 1e-12);

  // Variational principle: ψ ↦ S(ψ, ω) − ψ(a) is minimized at the output.
  const Matrix a = random_hermitian(3, rng);
  const Matrix best = perturbed_state(omega, a);
  const double at_best = relative_entropy(best, omega) - (best * a).trace().real();
  for (int k = 0; k < 20; ++k) {
    const Matrix psi = hermitian_part(0.95 * best + 0.05 * random_density(3, rng));
    EXPECT_GE(relative_entropy(psi, omega) - (psi * a).trace().real(), at_best - 1e-9);
  }
  EXPECT_THROW(perturbed_state(diag({1.0, 0.0}), Matrix::Zero(2, 2)), PreconditionError);
}

TEST(LogPartition, ValuesAndGradient) {
  // H = diag(0.2, −0.2), a = σ_x, ξ = 0.3; see tests/oracles/oracles.py.
  const ExponentialFamily fam(diag({0.2, -0.2}), {pauli_x()});
  const LogPartition lp = log_partition(fam, {0.3});
  EXPECT_NEAR(lp.value, -0.04377056810344937, 1e-12);
  EXPECT_NEAR(lp.gradient[0], -0.28764220958269326, 1e-12);

  Rng rng(3);
  const Matrix omega = random_density(3, rng);
  const ExponentialFamily centered = ExponentialFamily::around(omega, {random_hermitian(3, rng), random_hermitian(3, rng)});
  const LogPartition zero = log_partition(centered, {0.0, 0.0});
  EXPECT_NEAR(zero.value, 0.0, 1e-14);
  EXPECT_NEAR(zero.gradient[0], 0.0, 1e-12);
  EXPECT_NEAR(zero.gradient[1], 0.0, 1e-12);

  // Commuting case: classical cumulant generating function.
  const ExponentialFamily classical(diag({0.0, 0.0, 0.0}), {diag({1.0, 0.0, -1.0})});
  const double xi = 0.8;
  EXPECT_NEAR(log_partition(classical, {xi}).value, -std::log((std::exp(xi) + 1.0 + std::exp(-xi)) / 3.0), 1e-14);

  const std::vector<double> at{0.12, -0.07};
  const LogPartition g = log_partition(centered, at);
  const double h = 1e-5;
  for (std::size_t j = 0; j < 2; ++j) {
    std::vector<double> up = at, down = at;
    up[j] += h;
    down[j] -= h;
    const double fd = (log_partition(centered, up).value - log_partition(centered, down).value) / (2.0 * h);
    EXPECT_LE(std::abs(fd - g.gradient[j]), 1e-6 * std::max(1e-3, std::abs(fd)));
  }
}

TEST(MomentMatch, ClosedForms) {
  const MomentMatch m = moment_match(qubit_tilt(), {0.4});
  EXPECT_NEAR(m.xi[0], 0.42364893019360184, 1e-9);
  EXPECT_LE(m.residual, 1e-10);
  EXPECT_NEAR(moment_match(qubit_tilt(), {0.0}).xi[0], 0.0, 1e-12);

  // Classical family: scalar Newton on the cumulant function.
  const ExponentialFamily classical(diag({0.0, 0.0, 0.0}), {diag({1.0, 0.0, -1.0})});
  const MomentMatch c = moment_match(classical, {0.3});
  const double x = c.xi[0];
  EXPECT_NEAR((std::exp(x) - std::exp(-x)) / (std::exp(x) + 1.0 + std::exp(-x)), 0.3, 1e-10);
}

TEST(MomentMatch, RoundTripAndRegionExit) {
  Rng rng(4);
  const Matrix omega = random_density(3, rng);
  const ExponentialFamily fam = ExponentialFamily::around(omega, {random_hermitian(3, rng), random_hermitian(3, rng)});
  const std::vector<double> xi{0.15, -0.2};
  const MomentMatch m = moment_match(fam, means(fam, xi));
  EXPECT_NEAR(m.xi[0], xi[0], 1e-9);
  EXPECT_NEAR(m.xi[1], xi[1], 1e-9);

  try {
    moment_match(qubit_tilt(), {1.5});
    FAIL() << "expected RegionExitError";
  } catch (const RegionExitError& e) {
    EXPECT_EQ(e.last_iterate().size(), 1u);
    EXPECT_GT(e.residual(), 1e-10);
  }
}

TEST(ExpFamSubalgebra, Cases) {
  Rng rng(5);
  // ω = ρ ⊗ τ, generators a ⊗ 1: A = B(ℂ²) ⊗ 1 is modular invariant and contains them.
  const Matrix omega = kron(random_density(2, rng), random_density(2, rng));
  const ExponentialFamily inside =
      ExponentialFamily::around(omega, {kron(random_hermitian(2, rng), Matrix::Identity(2, 2))});
  const MatrixStarAlgebra left = MatrixStarAlgebra::left_tensor_factor(2, 2);
  const ExpFamSubalgebraVerdict good = expfam_subalgebra_sufficiency(inside, left);
  EXPECT_EQ(good.verdict, Verdict::kSufficient);
  EXPECT_TRUE(good.agree);

  const ExponentialFamily outside = ExponentialFamily::around(omega, {random_hermitian(4, rng)});
  const ExpFamSubalgebraVerdict bad = expfam_subalgebra_sufficiency(outside, left);
  EXPECT_EQ(bad.verdict, Verdict::kInsufficient);
  EXPECT_GT(bad.expectation_residual, 1e-3);

  EXPECT_EQ(expfam_subalgebra_sufficiency(outside, MatrixStarAlgebra::full(4)).verdict, Verdict::kSufficient);
}

TEST(ExpFamChannel, Cases) {
  Rng rng(6);
  const Matrix omega = kron(random_density(2, rng), random_density(2, rng));
  const ExponentialFamily fam = ExponentialFamily::around(omega, {kron(random_hermitian(2, rng), Matrix::Identity(2, 2))});
  EXPECT_EQ(expfam_channel_sufficiency(fam, Channel::identity(4)).verdict, Verdict::kSufficient);

  std::vector<Matrix> kraus;
  for (Index j = 0; j < 2; ++j) {
    Matrix v = Matrix::Zero(4, 2);
    for (Index i = 0; i < 2; ++i) v(2 * i + j, i) = 1.0;
    kraus.push_back(v);
  }
  const Channel emb(kraus);
  const ExpFamChannelVerdict good = expfam_channel_sufficiency(fam, emb);
  EXPECT_EQ(good.verdict, Verdict::kSufficient);
  EXPECT_LE(good.preimage_residual, 1e-9);

  const ExponentialFamily generic = ExponentialFamily::around(omega, {random_hermitian(4, rng)});
  const ExpFamChannelVerdict bad = expfam_channel_sufficiency(generic, emb);
  EXPECT_EQ(bad.verdict, Verdict::kInsufficient);
  EXPECT_GT(bad.preimage_residual, 1e-3);
}

TEST(CommutativeFamily, Cases) {
  const Matrix omega = diag({0.5, 0.3, 0.2});
  const ExponentialFamily classical = ExponentialFamily::around(omega, {diag({1.0, -1.0, 0.5})});
  const CommutativeFamilyVerdict c = commutative_family_check(classical, MatrixStarAlgebra::diagonal(3));
  EXPECT_EQ(c.verdict, Verdict::kSufficient);
  EXPECT_LE(c.closed_form_residual, 1e-9);

  // Generators commuting with a non-diagonal ω.
  Rng rng(7);
  const Matrix u = random_unitary(3, rng);
  const Matrix w = u * omega * u.adjoint();
  const Matrix g = u * diag({0.3, -0.2, 1.0}) * u.adjoint();
  const MatrixStarAlgebra rotated = generate_algebra({hermitian_part(g)}, 3);
  const CommutativeFamilyVerdict r = commutative_family_check(ExponentialFamily::around(w, {hermitian_part(g)}), rotated);
  EXPECT_LE(r.closed_form_residual, 1e-9);

  // Commutative A containing a generator that does not commute with ω.
  const Matrix off = hermitian_part(u * diag({1.0, -1.0, 0.0}) * u.adjoint());
  const CommutativeFamilyVerdict f =
      commutative_family_check(ExponentialFamily::around(omega, {off}), generate_algebra({off}, 3));
  EXPECT_EQ(f.verdict, Verdict::kInsufficient);

  EXPECT_THROW(commutative_family_check(classical, MatrixStarAlgebra::full(3)), DomainError);
}

TEST(ExponentialFamily, Validation) {
  EXPECT_THROW(ExponentialFamily(Matrix::Zero(2, 2), {diag({1.0, -1.0}), diag({2.0, -2.0})}), DomainError);
  Matrix nonherm = Matrix::Zero(2, 2);
  nonherm(0, 1) = 1.0;
  EXPECT_THROW(ExponentialFamily(Matrix::Zero(2, 2), {nonherm}), DomainError);
}

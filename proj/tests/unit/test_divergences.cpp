#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "constructions.hpp"

using namespace qsuff;

namespace {

Matrix diag(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

// Fixed test pair and the amplitude-damping channel (γ = 0.3), see
// tests/oracles/oracles.py.
Matrix rho1() {
  Matrix m(2, 2);
  m << 0.7, Complex(0.2, 0.1), Complex(0.2, -0.1), 0.3;
  return m;
}

Matrix rho2() {
  Matrix m(2, 2);
  m << 0.4, Complex(0.0, -0.1), Complex(0.0, 0.1), 0.6;
  return m;
}

Channel amplitude_damping(double gamma) {
  Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  return Channel({k0, k1});
}

}  // namespace

TEST(TransitionProbability, Values) {
  Rng rng(1);
  const Matrix d = random_density(3, rng);
  EXPECT_NEAR(transition_probability(d, d), 1.0, 1e-12);
  EXPECT_NEAR(transition_probability(diag(1, 0), diag(0, 1)), 0.0, 1e-15);
  EXPECT_NEAR(transition_probability(diag(0.5, 0.5), diag(0.9, 0.1)), 0.8944271909999159, 1e-12);
  EXPECT_NEAR(transition_probability(rho1(), rho2()), 0.9069981695028833, 1e-12);
}

TEST(RelativeEntropy, Values) {
  Rng rng(2);
  const Matrix d = random_density(3, rng);
  EXPECT_NEAR(relative_entropy(d, d), 0.0, 1e-12);
  EXPECT_NEAR(relative_entropy(diag(1, 0), diag(0.5, 0.5)), std::log(2.0), 1e-14);
  EXPECT_EQ(relative_entropy(diag(0.5, 0.5), diag(1, 0)), std::numeric_limits<double>::infinity());
  EXPECT_NEAR(relative_entropy(rho1(), rho2()), 0.3577985231147019, 1e-12);
}

TEST(VonNeumannEntropy, Values) {
  Rng rng(3);
  EXPECT_NEAR(von_neumann_entropy(random_density(3, rng, 1)), 0.0, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(Matrix::Identity(4, 4) / 4.0), std::log(4.0), 1e-14);
  EXPECT_NEAR(von_neumann_entropy(diag(0.9, 0.1)), 0.3250829733914482, 1e-14);
  EXPECT_NEAR(von_neumann_entropy(rho1()), 0.5004024235381879, 1e-12);
}

TEST(ConnesCocycle, Cases) {
  Rng rng(4);
  const Matrix phi = random_density(3, rng);
  const Matrix omega = random_density(3, rng);
  EXPECT_LE((connes_cocycle(phi, omega, 0.0).u - Matrix::Identity(3, 3)).norm(), 1e-12);
  EXPECT_LE((connes_cocycle(omega, omega, 1.7).u - Matrix::Identity(3, 3)).norm(), 1e-12);

  const CocycleSample s = connes_cocycle(diag(0.3, 0.7), diag(0.6, 0.4), 0.9);
  EXPECT_NEAR(std::abs(s.u(0, 0) - std::exp(Complex(0.0, 0.9 * std::log(0.5)))), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(s.u(1, 1) - std::exp(Complex(0.0, 0.9 * std::log(1.75)))), 0.0, 1e-13);

  const Matrix rank_one = random_density(2, rng, 1);
  EXPECT_THROW(connes_cocycle(diag(0.5, 0.5), rank_one, 1.0), DomainError);
}

TEST(ModularFlow, Cases) {
  Rng rng(5);
  const Matrix omega = random_density(2, rng);
  const Matrix x = random_ginibre(2, 2, rng);
  EXPECT_LE((modular_flow(omega, x, 0.0) - x).norm(), 1e-12);
  const Matrix commuting = 2.0 * omega + Matrix::Identity(2, 2);
  EXPECT_LE((modular_flow(omega, commuting, 2.3) - commuting).norm(), 1e-12);

  const Matrix d = diag(0.8, 0.2);
  Matrix e01 = Matrix::Zero(2, 2);
  e01(0, 1) = 1.0;
  const Matrix f = modular_flow(d, e01, 1.0);
  EXPECT_NEAR(std::abs(f(0, 1) - std::exp(Complex(0.0, std::log(0.8) - std::log(0.2)))), 0.0, 1e-13);
  EXPECT_THROW(modular_flow(diag(1, 0), e01, 1.0), PreconditionError);
}

TEST(ModularAudit, IdentityUnitaryAndPartialTrace) {
  Rng rng(6);
  const Matrix d1 = random_density(3, rng);
  const Matrix d2 = random_density(3, rng);
  const ModularAudit id = relative_modular_audit(Channel::identity(3), d1, d2, positive_t_grid());
  EXPECT_LE((id.delta - id.delta0).norm(), 1e-10);
  EXPECT_LE((id.v - Matrix::Identity(9, 9)).norm(), 1e-10);
  EXPECT_LE(id.max_violation, 1e-10);

  const ModularAudit un = relative_modular_audit(Channel::unitary(random_unitary(3, rng)), d1, d2, positive_t_grid());
  EXPECT_NEAR(un.contraction_norm, 1.0, 1e-10);
  EXPECT_LE(un.max_violation, 1e-10);

  // Tr_B on ℂ² ⊗ ℂ² with Kraus (1 ⊗ ⟨j|).
  std::vector<Matrix> kraus;
  for (Index j = 0; j < 2; ++j) {
    Matrix v = Matrix::Zero(2, 4);
    for (Index i = 0; i < 2; ++i) v(i, 2 * i + j) = 1.0;
    kraus.push_back(v);
  }
  const Channel ptr(kraus);
  ASSERT_TRUE(ptr.is_trace_preserving());
  const Matrix p1 = kron(random_density(2, rng), random_density(2, rng));
  const Matrix p2 = kron(random_density(2, rng), random_density(2, rng));
  const ModularAudit pa = relative_modular_audit(ptr, p1, p2, positive_t_grid());
  EXPECT_LE(pa.contraction_norm, 1.0 + 1e-10);
  EXPECT_LE(pa.max_violation, 1e-9);

  const Channel non_tp({0.5 * Matrix::Identity(3, 3)});
  EXPECT_THROW(relative_modular_audit(non_tp, d1, d2, positive_t_grid()), PreconditionError);
}

TEST(Monotonicity, Gaps) {
  Rng rng(7);
  const Matrix d1 = random_density(3, rng);
  const Matrix d2 = random_density(3, rng);
  EXPECT_NEAR(monotonicity_gap(Channel::identity(3), d1, d2, Divergence::kTransition), 0.0, 1e-12);
  EXPECT_NEAR(monotonicity_gap(Channel::identity(3), d1, d2, Divergence::kRelativeEntropy), 0.0, 1e-12);
  EXPECT_NEAR(monotonicity_gap(Channel::completely_depolarizing(3), d1, d2, Divergence::kTransition),
              1.0 - transition_probability(d1, d2), 1e-12);

  const Channel damp = amplitude_damping(0.3);
  EXPECT_NEAR(monotonicity_gap(damp, rho1(), rho2(), Divergence::kTransition), 0.9395757545555664 - 0.9069981695028833,
              1e-12);
  EXPECT_NEAR(monotonicity_gap(damp, rho1(), rho2(), Divergence::kRelativeEntropy),
              0.3577985231147019 - 0.22359510101822572, 1e-12);

  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const Channel t(random_trace_preserving_kraus(3, 3, 1 + rng.index(4), rng));
    const Matrix a = random_density(3, rng);
    const Matrix b = random_density(3, rng);
    worst = std::min({worst, monotonicity_gap(t, a, b, Divergence::kTransition),
                      monotonicity_gap(t, a, b, Divergence::kRelativeEntropy)});
  }
  EXPECT_GE(worst, -1e-10);
}

TEST(Grid, DefaultGrid) {
  const std::vector<double> g = default_t_grid();
  ASSERT_EQ(g.size(), 16u);
  EXPECT_NEAR(*std::max_element(g.begin(), g.end()), 0.37 * 8, 1e-15);
  EXPECT_EQ(positive_t_grid().size(), 8u);
}

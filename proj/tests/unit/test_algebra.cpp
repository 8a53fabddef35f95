#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "constructions.hpp"

using namespace qsuff;

namespace {

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix m = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

MatrixStarAlgebra m2_plus_m3() {
  Rng rng(99);
  return generate_algebra({block_diag(random_hermitian(2, rng), Matrix::Zero(3, 3)),
                           block_diag(random_hermitian(2, rng), Matrix::Zero(3, 3)),
                           block_diag(Matrix::Zero(2, 2), random_hermitian(3, rng)),
                           block_diag(Matrix::Zero(2, 2), random_hermitian(3, rng))},
                          5);
}

std::vector<std::pair<Index, Index>> shapes(const BlockStructure& bs) {
  std::vector<std::pair<Index, Index>> out;
  for (const Block& b : bs.blocks) out.emplace_back(b.d, b.m);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(GenerateAlgebra, Dimensions) {
  EXPECT_EQ(generate_algebra({}, 3).dimension(), 1);
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = 1, d(1, 1) = 2, d(2, 2) = 3;
  const MatrixStarAlgebra diag = generate_algebra({d}, 3);
  EXPECT_EQ(diag.dimension(), 3);
  EXPECT_LE(containment_residual(MatrixStarAlgebra::diagonal(3), diag), 1e-12);
  Rng rng(1);
  EXPECT_EQ(generate_algebra({random_hermitian(3, rng), random_hermitian(3, rng)}, 3).dimension(), 9);
  EXPECT_LE(m2_plus_m3().closure_defect(), 1e-10);
  EXPECT_EQ(m2_plus_m3().dimension(), 13);
}

TEST(Commutant, Cases) {
  EXPECT_EQ(commutant(MatrixStarAlgebra::full(3)).dimension(), 1);
  EXPECT_EQ(commutant(MatrixStarAlgebra::scalars(3)).dimension(), 9);
  const MatrixStarAlgebra c = commutant(MatrixStarAlgebra::left_tensor_factor(2, 3));
  EXPECT_EQ(c.dimension(), 9);
  EXPECT_LE(containment_residual(MatrixStarAlgebra::right_tensor_factor(2, 3), c), 1e-10);
  const MatrixStarAlgebra a = m2_plus_m3();
  const MatrixStarAlgebra cc = commutant(commutant(a));
  EXPECT_EQ(cc.dimension(), a.dimension());
  EXPECT_LE(containment_residual(a, cc), 1e-10);
}

TEST(Center, Cases) {
  EXPECT_EQ(center(MatrixStarAlgebra::full(3)).dimension(), 1);
  EXPECT_EQ(center(MatrixStarAlgebra::diagonal(4)).dimension(), 4);
  const MatrixStarAlgebra z = center(m2_plus_m3());
  EXPECT_EQ(z.dimension(), 2);
  EXPECT_TRUE(z.contains(block_diag(Matrix::Identity(2, 2), Matrix::Zero(3, 3))));
}

TEST(StructureDecomposition, Shapes) {
  EXPECT_EQ(shapes(structure_decomposition(MatrixStarAlgebra::full(3))), (std::vector<std::pair<Index, Index>>{{3, 1}}));
  EXPECT_EQ(shapes(structure_decomposition(MatrixStarAlgebra::diagonal(3))),
            (std::vector<std::pair<Index, Index>>{{1, 1}, {1, 1}, {1, 1}}));

  Rng rng(2);
  const Matrix u = random_unitary(4, rng);
  std::vector<Matrix> gens;
  for (const Matrix& e : MatrixStarAlgebra::left_tensor_factor(2, 2).elements()) gens.push_back(u * e * u.adjoint());
  const MatrixStarAlgebra rotated = generate_algebra(gens, 4);
  const BlockStructure bs = structure_decomposition(rotated);
  EXPECT_EQ(shapes(bs), (std::vector<std::pair<Index, Index>>{{2, 2}}));
  EXPECT_LE(block_pattern_residual(rotated, bs), 1e-8);
  EXPECT_LE((bs.unitary.adjoint() * bs.unitary - Matrix::Identity(4, 4)).norm(), 1e-10);

  const BlockStructure two = structure_decomposition(m2_plus_m3());
  EXPECT_EQ(shapes(two), (std::vector<std::pair<Index, Index>>{{2, 1}, {3, 1}}));
  const MatrixStarAlgebra back = algebra_from_blocks(two);
  EXPECT_LE(containment_residual(back, m2_plus_m3()), 1e-8);
}

TEST(StructureDecomposition, NonUnitalSubalgebra) {
  // p M₂ p ⊕ 0 inside M₃: the complement of the unit is reported separately.
  std::vector<Matrix> gens;
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) {
      Matrix e = Matrix::Zero(3, 3);
      e(i, j) = 1.0;
      gens.push_back(e);
    }
  }
  SpanBuilder span(9);
  for (const Matrix& g : gens) span.add(vec(g));
  const MatrixStarAlgebra a(3, span.basis());
  const BlockStructure bs = structure_decomposition(a);
  ASSERT_EQ(bs.blocks.size(), 1u);
  EXPECT_EQ(bs.blocks[0].d, 2);
  EXPECT_EQ(bs.blocks[0].m, 1);
}

TEST(EmbeddingChannel, IsUnitalAndReproducesAlgebra) {
  const BlockStructure bs = structure_decomposition(m2_plus_m3());
  const Channel emb = embedding_channel(bs);
  EXPECT_TRUE(emb.is_unital(1e-10));
  EXPECT_EQ(emb.in_dim(), 5);
  Rng rng(3);
  const Matrix y = emb.apply(block_diag(random_ginibre(2, 2, rng), random_ginibre(3, 3, rng)));
  EXPECT_TRUE(m2_plus_m3().contains(y));
}

TEST(MultiplicativeDomain, Cases) {
  Rng rng(4);
  const Channel u = Channel::unitary(random_unitary(3, rng));
  EXPECT_EQ(multiplicative_domain(u).dimension(), 9);
  EXPECT_EQ(multiplicative_domain(Channel::completely_depolarizing(3)).dimension(), 1);
  EXPECT_EQ(multiplicative_domain(Channel::identity(2)).dimension(), 4);

  // Pinching by p₀ = diag(1,1,0), p₁ = diag(0,0,1).
  Matrix p0 = Matrix::Zero(3, 3), p1 = Matrix::Zero(3, 3);
  p0(0, 0) = p0(1, 1) = 1.0;
  p1(2, 2) = 1.0;
  const Channel pinch({p0, p1});
  const MatrixStarAlgebra dom = multiplicative_domain(pinch);
  EXPECT_EQ(dom.dimension(), 5);
  EXPECT_TRUE(dom.contains(block_diag(random_ginibre(2, 2, rng), random_ginibre(1, 1, rng))));
  for (const Matrix& a : dom.elements()) EXPECT_LE(schwarz_defect(pinch, a).norm(), 1e-9);
}

TEST(FixedPointAlgebra, Cases) {
  EXPECT_EQ(fixed_point_algebra(Channel::identity(3)).algebra.dimension(), 9);

  Rng rng(5);
  const Matrix omega = random_density(3, rng);
  const Channel dep = Channel::completely_depolarizing(3);
  EXPECT_EQ(fixed_point_algebra(petz_dual(dep, omega), &dep).algebra.dimension(), 1);

  // Embedding of B(ℂ²) ⊗ 1 with ω = ρ ⊗ τ (modular invariant): Fix(σ∘σ*_ω) = σ(N).
  std::vector<Matrix> kraus;
  for (Index j = 0; j < 2; ++j) {
    Matrix v = Matrix::Zero(4, 2);
    for (Index i = 0; i < 2; ++i) v(2 * i + j, i) = 1.0;
    kraus.push_back(v);
  }
  const Channel emb(kraus);
  const Matrix prod = kron(random_density(2, rng), random_density(2, rng));
  const FixedPointResult fp = fixed_point_algebra(petz_dual(emb, prod), &emb);
  EXPECT_EQ(fp.algebra.dimension(), 4);
  EXPECT_LE(containment_residual(MatrixStarAlgebra::left_tensor_factor(2, 2), fp.algebra), 1e-10);
  EXPECT_GT(fp.spectral_gap, 1e-6);
}

TEST(ModularInvariance, Cases) {
  Rng rng(6);
  const std::vector<double> grid = positive_t_grid();
  const Matrix omega = random_density(3, rng);
  EXPECT_TRUE(modular_invariance_check(MatrixStarAlgebra::full(3), omega, grid).invariant);
  const Matrix block = block_diag(random_density(2, rng), random_density(3, rng)) / 2.0;
  EXPECT_TRUE(modular_invariance_check(m2_plus_m3(), block, grid).invariant);
  Matrix off(2, 2);
  off << 0.6, 0.2, 0.2, 0.4;
  const ModularInvariance bad = modular_invariance_check(MatrixStarAlgebra::diagonal(2), off, grid);
  EXPECT_FALSE(bad.invariant);
  EXPECT_GT(bad.max_deviation, 1e-3);
}

TEST(Algebra, MembershipAndProjection) {
  const MatrixStarAlgebra left = MatrixStarAlgebra::left_tensor_factor(2, 2);
  Rng rng(7);
  const Matrix a = kron(random_ginibre(2, 2, rng), Matrix::Identity(2, 2));
  EXPECT_TRUE(left.contains(a));
  EXPECT_FALSE(left.contains(random_ginibre(4, 4, rng)));
  EXPECT_LE((left.project(a) - a).norm(), 1e-12);
  EXPECT_THROW(MatrixStarAlgebra(3, Matrix::Zero(4, 1)), DomainError);
}

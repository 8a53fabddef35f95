#pragma once

// Finite-dimensional matrix *-algebras stored as Hilbert–Schmidt orthonormal
// spans, with generation, commutants, centers and block decomposition.

#include <cstdint>
#include <string>
#include <vector>

#include "qsuff/channel.hpp"
#include "qsuff/matrix.hpp"
#include "qsuff/random.hpp"

namespace qsuff {

/// Relative singular-value / residual threshold for span rank decisions.
inline constexpr double kRankTol = 1e-9;

/// Accumulates linear equations A x = 0 block by block, keeping only a
/// triangular factor, and returns an orthonormal null-space basis.
class NullSpaceSolver {
 public:
  /// Singular values at or below rel_tol·max(σ_max, scale) count as zero,
  /// so an all-zero system has the full space as null space.
  explicit NullSpaceSolver(Index unknowns, double scale = 1.0);

  void add(const Matrix& rows);
  Index unknowns() const { return n_; }

  /// Columns spanning {x : A x = 0}.
  Matrix solve(double rel_tol = kRankTol) const;

  /// Smallest retained singular value divided by the largest; 1 when none.
  double gap(double rel_tol = kRankTol) const;

 private:
  Index n_;
  double scale_;
  Matrix r_;
};

/// Orthonormal columns spanning `columns`, with twice-iterated Gram–Schmidt.
class SpanBuilder {
 public:
  explicit SpanBuilder(Index vector_dim);

  /// Adds v when its residual after projection exceeds
  /// rel_tol·max(‖v‖, scale). Returns whether the span grew.
  bool add(const Vector& v, double rel_tol = kRankTol, double scale = 0.0);
  double residual(const Vector& v) const;

  Index size() const { return count_; }
  Matrix basis() const { return q_.leftCols(count_); }
  Vector column(Index k) const { return q_.col(k); }

 private:
  Index dim_;
  Index count_ = 0;
  Matrix q_;
};

class MatrixStarAlgebra {
 public:
  /// `basis_vectors`: d² x k matrix whose orthonormal columns are vec'd
  /// basis elements.
  MatrixStarAlgebra(Index ambient_dim, Matrix basis_vectors);
  /// Empty placeholder (ambient dimension 0).
  MatrixStarAlgebra() : d_(0), basis_(0, 0) {}

  static MatrixStarAlgebra full(Index d);
  static MatrixStarAlgebra scalars(Index d);
  static MatrixStarAlgebra diagonal(Index d);
  /// B(ℂ^{d_left}) ⊗ ℂ1_{d_right}.
  static MatrixStarAlgebra left_tensor_factor(Index d_left, Index d_right);
  /// ℂ1_{d_left} ⊗ B(ℂ^{d_right}).
  static MatrixStarAlgebra right_tensor_factor(Index d_left, Index d_right);

  Index ambient_dim() const { return d_; }
  Index dimension() const { return basis_.cols(); }
  const Matrix& basis_vectors() const { return basis_; }
  Matrix element(Index k) const { return unvec(basis_.col(k), d_); }
  std::vector<Matrix> elements() const;

  /// Hilbert–Schmidt orthogonal projection onto the span; for a unital
  /// *-subalgebra this is the trace-preserving conditional expectation.
  Matrix project(const Matrix& x) const;
  /// ‖x − project(x)‖_F.
  double residual(const Matrix& x) const;
  bool contains(const Matrix& x, double rel_tol = 1e-8) const;

  /// Largest residual of adjoints, pairwise products and the identity.
  double closure_defect() const;

  /// Generic self-adjoint element (random real combination of the
  /// self-adjoint parts of the basis).
  Matrix generic_self_adjoint(Rng& rng) const;

 private:
  Index d_;
  Matrix basis_;
};

/// Smallest unital *-algebra containing the generators.
MatrixStarAlgebra generate_algebra(const std::vector<Matrix>& generators, Index ambient_dim,
                                   double rel_tol = kRankTol);

MatrixStarAlgebra commutant(const MatrixStarAlgebra& a, std::uint64_t seed = kDefaultSeed);
MatrixStarAlgebra center(const MatrixStarAlgebra& a, std::uint64_t seed = kDefaultSeed);

/// Intersection of the two spans.
MatrixStarAlgebra intersect(const MatrixStarAlgebra& a, const MatrixStarAlgebra& b);

/// Maximal HS residual of the basis of `inner` projected onto `outer`.
double containment_residual(const MatrixStarAlgebra& inner, const MatrixStarAlgebra& outer);

struct Block {
  Index d = 1;       // size of the factor M_d
  Index m = 1;       // multiplicity
  Index offset = 0;  // first column of the block in BlockStructure::unitary
};

/// U* a U = ⊕ₙ aₙ ⊗ 1_{mₙ} for every a in the algebra. Columns of the unitary
/// are ordered block by block, inside a block with the factor index major.
/// Columns past the last block span the complement of the algebra's unit.
struct BlockStructure {
  Matrix unitary;
  std::vector<Block> blocks;
  std::vector<Matrix> block_projections;

  Index ambient_dim() const { return unitary.rows(); }
  /// d x (dₙ mₙ) isometry onto the n-th block.
  Matrix isometry(std::size_t n) const;
  /// Vₙ* x Vₙ.
  Matrix block_of(std::size_t n, const Matrix& x) const;
  /// Σ dₙ².
  Index algebra_dimension() const;
};

struct DecompositionOptions {
  std::uint64_t seed = kDefaultSeed;
  int attempts = 5;
};

/// Minimal central projections and factor alignment. Throws NumericalFailure
/// with diagnostics after the configured number of attempts.
BlockStructure structure_decomposition(const MatrixStarAlgebra& a, const DecompositionOptions& opts = {});

/// Largest deviation of U* b U from the ⊕ bₙ ⊗ 1 pattern over the basis.
double block_pattern_residual(const MatrixStarAlgebra& a, const BlockStructure& bs);

/// Rebuilds the span of ⊕ M_{dₙ} ⊗ 1_{mₙ} in ambient coordinates.
MatrixStarAlgebra algebra_from_blocks(const BlockStructure& bs);

/// Channel ⊕ B(ℂ^{dₙ}) → B(H), (aₙ) ↦ U(⊕ aₙ ⊗ 1_{mₙ})U*. Inputs are
/// block-diagonal matrices of size Σ dₙ.
Channel embedding_channel(const BlockStructure& bs);

/// Multiplicative domain {a : σ(a*a) = σ(a)*σ(a), σ(aa*) = σ(a)σ(a)*} of a
/// unital channel.
MatrixStarAlgebra multiplicative_domain(const Channel& ch);

struct FixedPointResult {
  MatrixStarAlgebra algebra;
  /// Smallest singular value of (Φ − id) outside its numerical kernel.
  double spectral_gap = 0.0;
};

/// Fixed points of Φ = compose_with ∘ ch (or ch alone), intersected with the
/// multiplicative domain of Φ.
FixedPointResult fixed_point_algebra(const Channel& ch, const Channel* compose_with = nullptr);

struct ModularInvariance {
  bool invariant = false;
  double max_deviation = 0.0;
};

/// Checks D_ω^{it} A D_ω^{-it} ⊆ A on the grid.
ModularInvariance modular_invariance_check(const MatrixStarAlgebra& a, const Matrix& omega,
                                           const std::vector<double>& t_grid, double tol = 1e-8);

}  // namespace qsuff

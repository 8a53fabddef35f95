#pragma once

// Random instances with known answers, shared by unit and acceptance tests.

#include <cstddef>
#include <vector>

#include "qsuff/qsuff.hpp"

namespace qsuff::testing {

struct BlockSpec {
  Index d = 1;  // dim H^L
  Index m = 1;  // dim H^R
};

/// D_θ = Σₙ s_n(θ) Uₙ (D_n(θ) ⊗ D^R_n) Uₙ*.
struct BlockFamily {
  Experiment experiment;
  std::vector<BlockSpec> blocks;
  Matrix unitary;                                // columns block by block, left index major
  std::vector<std::vector<double>> weights;      // [θ][n]
  std::vector<std::vector<Matrix>> left;         // [θ][n]
  std::vector<Matrix> right;                     // [n]

  Index dim() const { return unitary.rows(); }
  Matrix isometry(std::size_t n) const;
  /// ⊕ B(H^L_n) ⊗ 1, a sufficient subalgebra.
  MatrixStarAlgebra sufficient_algebra() const;
};

BlockFamily block_family(const std::vector<BlockSpec>& blocks, std::size_t count, Rng& rng, bool rotate = true);

/// `count` random faithful densities on ℂ^d.
Experiment generic_family(Index d, std::size_t count, Rng& rng);

/// Diagonal family p_θ(x); a partition of the sample space into cells
/// defines the commutative subalgebra spanned by the cell indicators.
struct ClassicalInstance {
  std::vector<std::vector<double>> distributions;  // [θ][x], strictly positive
  std::vector<int> cell;                           // cell index of each x
  int cells = 0;
  Experiment experiment;
  MatrixStarAlgebra algebra;
};

/// With `sufficient`, p_θ(x) = q_θ(cell) r(x | cell); otherwise all
/// distributions are independent draws.
ClassicalInstance classical_instance(Index d, std::size_t count, int cells, bool sufficient, Rng& rng);

/// Brute-force likelihood-ratio test: p_θ(x)/p_ω(x) constant on every cell
/// for every θ (relative tolerance `tol`).
bool classical_sufficient_oracle(const std::vector<std::vector<double>>& distributions,
                                 const std::vector<double>& weights, const std::vector<int>& cell, double tol);

MatrixStarAlgebra diagonal_partition_algebra(const std::vector<int>& cell, int cells);

/// Random (eq. structure) components for the SSA equality construction.
std::vector<SsaComponent> random_ssa_components(Index d_a, Index d_c, const std::vector<BlockSpec>& blocks, Rng& rng);

/// Unitary exp(i ε H) with H = X_B ⊗ X_C coupling the first two basis
/// vectors of H_B with the first two of H_C (needs d_B, d_C ≥ 2).
Matrix entangling_rotation(const TripartiteDims& dims, double eps);

/// Unitary channel σ(a) = U* a U, i.e. Kraus {U*}.
Channel conjugation(const Matrix& u);

}  // namespace qsuff::testing

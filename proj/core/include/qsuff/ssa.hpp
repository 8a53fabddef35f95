#pragma once

// Strong subadditivity S(ABC) + S(B) ≤ S(AB) + S(BC) on H_A ⊗ H_B ⊗ H_C:
// the gap, and in the equality case the splitting
// H_B = ⊕ₙ H^L_n ⊗ H^R_n with ω_ABC = Σₙ wₙ D^L_n ⊗ D^R_n.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "qsuff/algebra.hpp"
#include "qsuff/divergences.hpp"
#include "qsuff/matrix.hpp"
#include "qsuff/random.hpp"
#include "qsuff/sufficiency.hpp"

namespace qsuff {

using TripartiteDims = std::array<Index, 3>;

/// Validates a density on H_A ⊗ H_B ⊗ H_C (DomainError otherwise).
void require_tripartite(const Matrix& rho, const TripartiteDims& dims);

struct SsaGap {
  double entropy_form = 0.0;           // S(AB) + S(BC) − S(ABC) − S(B)
  double relative_entropy_form = 0.0;  // S(ABC‖A⊗BC) − S(AB‖A⊗B)
  double discrepancy = 0.0;            // |difference| of the two forms
};

SsaGap ssa_gap(const Matrix& rho, const TripartiteDims& dims);

struct SsaComponent {
  double weight = 0.0;  // ω_B(pₙ)
  Index d_left = 1;     // dim H^L_n
  Index d_right = 1;    // dim H^R_n
  Matrix left;          // D^L_n on H_A ⊗ H^L_n
  Matrix right;         // D^R_n on H^R_n ⊗ H_C
};

struct SsaStructure {
  BlockStructure b_structure;  // on H_B; blocks (dim H^L, dim H^R)
  std::vector<SsaComponent> components;
  double gap = 0.0;
  double reconstruction_residual = 0.0;
  double weight_residual = 0.0;  // |wₙ − ω_B(pₙ)|
  bool pure_state_path = false;
  std::optional<SufficiencyVerdict> cross_check;  // B(H_A⊗H_B)⊗1 for {ω_ABC, ω_A⊗ω_BC}
};

struct SsaOptions {
  std::vector<double> t_grid = default_t_grid();
  double equality_tol = 1e-7;
  double reconstruction_tol = 1e-7;
  std::uint64_t seed = kDefaultSeed;
  bool cross_check = true;
};

/// Throws InsufficientError ("not an equality case") when the gap exceeds
/// equality_tol, PreconditionError for a non-faithful state that is not
/// pure, NumericalFailure when the components do not reconstruct the state.
SsaStructure ssa_equality_structure(const Matrix& rho, const TripartiteDims& dims, const SsaOptions& opts = {});

/// ω_ABC = Σₙ wₙ Jₙ (D^L_n ⊗ D^R_n) Jₙ* where Jₙ places H^L_n ⊗ H^R_n as
/// consecutive basis vectors of H_B (n in order). d_B = Σ d_left·d_right.
Matrix build_ssa_equality_state(const std::vector<SsaComponent>& components, Index d_a, Index d_c);

/// Rebuilds ω_ABC from a structure.
Matrix reconstruct_ssa_state(const SsaStructure& s, const TripartiteDims& dims);

}  // namespace qsuff

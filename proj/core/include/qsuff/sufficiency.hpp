#pragma once

// Sufficiency of subalgebras and coarse-grainings for finite families of
// states, minimal sufficient subalgebras, the block decomposition of the
// family, factorization of the densities and the Kraus structure of
// sufficient channels.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsuff/algebra.hpp"
#include "qsuff/channel.hpp"
#include "qsuff/divergences.hpp"
#include "qsuff/states.hpp"

namespace qsuff {

enum class Verdict { kSufficient, kInsufficient, kBorderline };

const char* to_string(Verdict v);

struct SufficiencyOptions {
  std::vector<double> t_grid = default_t_grid();
  /// Residuals below tol count as zero; above 10·tol as nonzero.
  double tol = 1e-7;
  std::uint64_t seed = kDefaultSeed;
};

struct ConditionResult {
  std::string label;
  double residual = 0.0;
  Verdict verdict = Verdict::kBorderline;
  bool evaluated = true;
};

struct SufficiencyVerdict {
  Verdict verdict = Verdict::kBorderline;
  std::vector<ConditionResult> conditions;
  /// Every state equals the dominating state.
  bool trivial = false;
  /// Evaluated on supports after compression (non-faithful reference state).
  bool compressed = false;
  std::vector<std::string> warnings;

  bool sufficient() const { return verdict == Verdict::kSufficient; }
  const ConditionResult* find(const std::string& label) const;
  /// Residual of a condition; throws std::out_of_range when absent.
  double residual(const std::string& label) const;
};

/// Is A sufficient for the experiment? Conditions: cocycle_membership,
/// cocycle_restriction, transition_probability, relative_entropy,
/// petz_invariance. The recovery condition decides; a condition on the other
/// side of the band makes the verdict borderline, one inside the band only
/// adds a warning. A non-faithful reference state is handled by
/// compressing to the supports and testing the induced coarse-graining
/// (see channel_sufficiency for the labels used then).
SufficiencyVerdict subalgebra_sufficiency(const Experiment& exp, const MatrixStarAlgebra& a,
                                          const SufficiencyOptions& opts = {});

/// Is the unital coarse-graining σ: N → M (states live on M, the output
/// side) sufficient? Conditions: petz_invariance, transition_probability,
/// relative_entropy, cocycle_intertwining, multiplicative_domain_sufficiency
/// and fixed_point_sufficiency (only when the unit eigenspace of σ∘σ*_ω is
/// separated by more than 1e-6).
SufficiencyVerdict channel_sufficiency(const Experiment& exp, const Channel& sigma,
                                       const SufficiencyOptions& opts = {});

struct MinimalAlgebraResult {
  MatrixStarAlgebra algebra;
  std::vector<double> t_grid;  // final, refined grid
  int refinements = 0;
  std::vector<std::string> log;
};

/// Algebra generated by the cocycles [Dφ_θ, Dω]_t over the grid, closed
/// under the modular flow of ω, certified by one grid halving. Requires a
/// faithful reference state. Throws NonStabilizingError after 3 refinements.
MinimalAlgebraResult minimal_sufficient_algebra(const Experiment& exp, const SufficiencyOptions& opts = {});

struct SBlock {
  Index d = 1;                      // dim H^L
  Index m = 1;                      // dim H^R
  std::vector<double> weights;      // s_n(θ), one per state
  std::vector<Matrix> left;         // D_n(θ) on H^L (zero when s_n(θ) = 0)
  Matrix right;                     // D^R_n on H^R
  double central = 0.0;            // z_n
};

/// D_θ = Σₙ s_n(θ) W_n (D_n(θ) ⊗ D^R_n) W_n* with W_n the block isometries
/// of `structure`.
struct SDecomposition {
  MatrixStarAlgebra algebra;   // minimal sufficient subalgebra
  BlockStructure structure;    // of the algebra; H^L ⊗ H^R per block
  std::vector<SBlock> blocks;
  double reconstruction_residual = 0.0;
  double weight_residual = 0.0;        // |s_n(θ) − φ_θ(p_n)|
  double right_factor_spread = 0.0;    // θ-dependence of D^R_n
};

/// Throws NumericalFailure when the reconstruction residual exceeds 1e-8.
SDecomposition s_decomposition(const Experiment& exp, const SufficiencyOptions& opts = {});

/// Rebuilds D_θ for state index k from a decomposition.
Matrix reconstruct_state(const SDecomposition& s, std::size_t k);

struct FactorizationResult {
  std::vector<Matrix> theta_factors;  // D_{θ,0} = E_A(D_θ)
  Matrix commutant_factor;            // D_{ω₁} = E_{A'}(D_ω)
  Matrix central_factor;              // z
  double product_residual = 0.0;      // max_θ ‖D_θ − D_{θ,0} D_{ω₁} z‖_F
  double commutation_residual = 0.0;
  SufficiencyVerdict verdict;
};

/// Requires A invariant under the modular flow of ω (PreconditionError
/// otherwise).
FactorizationResult factorization_check(const Experiment& exp, const MatrixStarAlgebra& a,
                                        const SufficiencyOptions& opts = {});

struct LFactorReport {
  MatrixStarAlgebra generated;        // M_L
  Matrix r0;                          // L_θ = D_{S,θ} R₀
  double factor_residual = 0.0;       // max_θ ‖L_θ − D_{S,θ} R₀‖
  double membership_residual = 0.0;   // R₀ in M_L
  double commutation_residual = 0.0;  // max_θ ‖[R₀, D_{S,θ}]‖
  double containment_residual = 0.0;  // M_S ⊆ M_L
  double invariance_deviation = 0.0;  // M_L under σ^ω
  SufficiencyVerdict verdict;         // of M_L
};

/// D_θ = L_θ R with [L_θ, R] = 0 and R invertible (validated, DomainError
/// otherwise).
LFactorReport decompose_L_factors(const Experiment& exp, const std::vector<Matrix>& l_factors,
                                  const Matrix& r, const SufficiencyOptions& opts = {});

struct ChannelBlock {
  std::size_t output_block = 0;  // n on H
  std::size_t input_block = 0;   // k on K
  Index d = 1;
  Index m_out = 1;
  Index m_in = 1;
  Matrix unitary;                // U_n: K^L → H^L
  std::vector<Matrix> kraus;     // L_{i,n}: K^R → H^R
  double unitality_residual = 0.0;  // ‖Σ L L* − 1‖
};

struct ChannelStructure {
  BlockStructure output_structure;  // M_S on H
  BlockStructure input_structure;   // N_{S₀} on K
  std::vector<ChannelBlock> blocks;
  double projection_residual = 0.0;  // max ‖α(q_k) − p_n‖
  double choi_distance = 0.0;        // reassembled vs original
  SufficiencyVerdict verdict;
};

/// V_i = Σₙ Uₙ ⊗ L_{i,n} for a sufficient unital α: B(K) → B(H). Throws
/// InsufficientError when α is not sufficient, NumericalFailure when the
/// decomposition does not reassemble within 1e-8, PreconditionError when ω
/// or ω∘α is not faithful.
ChannelStructure channel_structure(const Experiment& exp, const Channel& alpha, const SufficiencyOptions& opts = {});

struct StatePreservingBlock {
  std::vector<Matrix> kraus;          // L_{i,n} on H^R
  double form_residual = 0.0;         // ‖Wₙ* V_i Wₙ − 1 ⊗ L_{i,n}‖
  double commutation_residual = 0.0;  // ‖[L_{i,n}, D^R_n]‖
  double unitality_residual = 0.0;
};

struct StatePreservingStructure {
  SDecomposition decomposition;
  std::vector<StatePreservingBlock> blocks;
  double off_block_residual = 0.0;
  double preservation_residual = 0.0;
  bool structured = false;  // all residuals ≤ 1e-8
};

/// V_i = Σₙ 1 ⊗ L_{i,n} with [L_{i,n}, D^R_n] = 0 for a channel that fixes
/// every state. Throws PreconditionError when some φ_θ∘α ≠ φ_θ (1e-9).
StatePreservingStructure state_preserving_structure(const Experiment& exp, const Channel& alpha,
                                                    const SufficiencyOptions& opts = {});

}  // namespace qsuff

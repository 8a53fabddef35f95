#pragma once

// Completely positive maps in Kraus form.
//
// A Channel holds operators V_i of shape out_dim x in_dim and acts as
// a ↦ Σ V_i a V_i*. Read as a Heisenberg-picture coarse-graining σ: N → M
// it is unital when Σ V_i V_i* = I_out; read as a Schrödinger map on
// densities it is trace preserving when Σ V_i* V_i = I_in.

#include <functional>
#include <vector>

#include "qsuff/matrix.hpp"

namespace qsuff {

inline constexpr double kChannelTol = 1e-10;

class Channel {
 public:
  explicit Channel(std::vector<Matrix> kraus);

  static Channel identity(Index d);
  static Channel unitary(const Matrix& u);
  /// a ↦ Tr(a)/d · I, Kraus {|i⟩⟨j| / √d}.
  static Channel completely_depolarizing(Index d);

  Index in_dim() const { return in_dim_; }
  Index out_dim() const { return out_dim_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }

  Matrix apply(const Matrix& a) const;

  /// Trace dual: Kraus V_i*, so Tr(dual(x)·y) = Tr(x·apply(y)).
  Channel dual() const;

  /// d_out² x d_in² matrix acting on column-major vec.
  Matrix superoperator() const;

  bool is_unital(double tol = kChannelTol) const;
  bool is_trace_preserving(double tol = kChannelTol) const;

  /// Kraus-wise composition: (this ∘ inner)(a) = this(inner(a)).
  Channel compose(const Channel& inner) const;

 private:
  std::vector<Matrix> kraus_;
  Index in_dim_ = 0;
  Index out_dim_ = 0;
};

/// Σ_ij E_ij ⊗ f(E_ij) for an arbitrary linear map f on in_dim x in_dim matrices.
Matrix choi_of_map(const std::function<Matrix(const Matrix&)>& f, Index in_dim);

/// Choi matrix (id ⊗ ch)(|Ω⟩⟨Ω|), |Ω⟩ = Σ|ii⟩ unnormalized.
Matrix choi_matrix(const Channel& ch);

/// σ(a*a) − σ(a)*σ(a); PSD for unital CP σ. Throws PreconditionError for a
/// non-unital channel.
Matrix schwarz_defect(const Channel& ch, const Matrix& a);

/// Kraus operators whose action is a ↦ P* σ(Q a Q*) P for isometries P (out side)
/// and Q (in side).
Channel compress_channel(const Channel& ch, const Matrix& out_isometry, const Matrix& in_isometry);

}  // namespace qsuff

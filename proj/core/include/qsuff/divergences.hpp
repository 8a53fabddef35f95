#pragma once

// Transition probability, relative and von Neumann entropy, Connes cocycles,
// modular flow, and an explicit relative-modular-operator audit of a
// trace-preserving map.

#include <vector>

#include "qsuff/channel.hpp"
#include "qsuff/matrix.hpp"

namespace qsuff {

/// ±0.37·k for k = 1..8. Irregular spacing keeps (p/q)^{it} away from its
/// periods on rational spectra.
std::vector<double> default_t_grid();
/// Positive half of default_t_grid().
std::vector<double> positive_t_grid();

/// P_A(D₁, D₂) = Tr D₁^{1/2} D₂^{1/2}.
double transition_probability(const Matrix& d1, const Matrix& d2);

/// Tr D₁(log D₁ − log D₂); +∞ when supp D₁ ≰ supp D₂.
double relative_entropy(const Matrix& d1, const Matrix& d2);

double von_neumann_entropy(const Matrix& d);

struct CocycleSample {
  double t = 0.0;
  Matrix u;
};

/// u_t = D_φ^{it} D_ω^{-it} on supp D_ω. Throws DomainError when
/// supp D_φ ≰ supp D_ω.
CocycleSample connes_cocycle(const Matrix& d_phi, const Matrix& d_omega, double t);

/// σ_t^ω(x) = D_ω^{it} x D_ω^{-it}; requires faithful ω.
Matrix modular_flow(const Matrix& d_omega, const Matrix& x, double t);

struct ModularAudit {
  Matrix delta;    // Δa = D₂ a D₁⁻¹ on B(H)
  Matrix delta0;   // Δ₀x = T(D₂) x T(D₁)⁻¹ on B(K)
  Matrix v;        // V(x T(D₁)^{1/2} + ξ) = T*(x) D₁^{1/2}
  double contraction_norm = 0.0;     // ‖V‖
  double intertwining = 0.0;         // ‖V T(D₁)^{1/2} − D₁^{1/2}‖
  double form_violation = 0.0;       // λ_max(V*ΔV − Δ₀), clipped at 0
  double resolvent_operator_violation = 0.0;  // λ_max((Δ₀+t)⁻¹ − (V*ΔV+t)⁻¹)
  double resolvent_violation = 0.0;  // scalar inequality, max over grid
  double max_violation = 0.0;
};

/// T is the Schrödinger-picture map (trace preserving). Throws
/// PreconditionError otherwise, DomainError above dimension 16.
ModularAudit relative_modular_audit(const Channel& t, const Matrix& d1, const Matrix& d2,
                                    const std::vector<double>& t_grid);

enum class Divergence { kTransition, kRelativeEntropy };

/// P_A(T D₁, T D₂) − P_A(D₁, D₂), or S(D₁,D₂) − S(T D₁, T D₂). Both are ≥ 0.
double monotonicity_gap(const Channel& t, const Matrix& d1, const Matrix& d2, Divergence which);

/// max_t ‖T*(T(D₂)^{it} T(D₁)^{-it}) p₁ − D₂^{it} D₁^{-it} p₁‖_F with p₁ = supp D₁.
double intertwining_residual(const Channel& t, const Matrix& d1, const Matrix& d2,
                             const std::vector<double>& t_grid);

}  // namespace qsuff

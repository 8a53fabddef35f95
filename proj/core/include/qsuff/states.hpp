#pragma once

// Density matrices, statistical experiments, conditional expectations and
// the state-dependent dual (recovery map) of a coarse-graining.

#include <optional>
#include <string>
#include <vector>

#include "qsuff/algebra.hpp"
#include "qsuff/channel.hpp"
#include "qsuff/matrix.hpp"

namespace qsuff {

/// Validated density matrix: Hermitian, trace 1 within 1e-10, min
/// eigenvalue ≥ −1e-12.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m);

  const Matrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }
  operator const Matrix&() const { return m_; }  // NOLINT(google-explicit-constructor)

 private:
  Matrix m_;
};

/// Throws DomainError unless `d` is a density matrix (see DensityMatrix).
void require_density(const Matrix& d, const char* what);

/// A finite family of states together with a dominating state
/// ω = Σ λₙ D_{θₙ}.
struct Experiment {
  std::vector<std::string> labels;
  std::vector<Matrix> states;
  std::vector<double> weights;
  Matrix dominating;

  Index dim() const { return dominating.rows(); }
  std::size_t size() const { return states.size(); }
};

/// Builds ω from the weights (uniform by default) and checks that every
/// support lies under supp ω. Throws DomainError for an empty family or
/// invalid weights.
Experiment build_dominating_state(std::vector<Matrix> states,
                                  std::optional<std::vector<double>> weights = std::nullopt,
                                  std::vector<std::string> labels = {});

/// The same experiment with an explicitly chosen dominating state; support
/// domination is still enforced.
Experiment with_dominating_state(Experiment exp, Matrix omega);

/// Experiment restricted to supp ω: states P* D P for the support isometry P.
struct CompressedExperiment {
  Experiment experiment;
  Matrix isometry;  // d x r
};
CompressedExperiment compress_to_support(const Experiment& exp, double cutoff = kSupportCutoff);

/// Trace-preserving conditional expectation onto A (Hilbert–Schmidt projection).
Matrix conditional_expectation(const MatrixStarAlgebra& a, const Matrix& x);

/// E_ω(x) = E(D)^{-1/2} E(D^{1/2} x D^{1/2}) E(D)^{-1/2}. Throws
/// PreconditionError when ω is not faithful.
Matrix petz_conditional_expectation(const MatrixStarAlgebra& a, const Matrix& omega, const Matrix& x);

/// Density of φ∘E_ω: D^{1/2} E(D)^{-1/2} E(D_φ) E(D)^{-1/2} D^{1/2}.
Matrix petz_recovered_density(const MatrixStarAlgebra& a, const Matrix& omega, const Matrix& phi);

/// Dual σ*_ω: x ↦ D_{ωσ}^{-1/2} σᵀ(D_ω^{1/2} x D_ω^{1/2}) D_{ωσ}^{-1/2} of a unital
/// σ: N → M with ω on M; Kraus D_{ωσ}^{-1/2} V_i* D_ω^{1/2}. Requires ω
/// and ω∘σ faithful.
Channel petz_dual(const Channel& sigma, const Matrix& omega);

/// Density of ω∘σ on N: Σ V_i* D_ω V_i.
Matrix pullback_density(const Channel& sigma, const Matrix& omega);

}  // namespace qsuff

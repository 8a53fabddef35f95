#pragma once

// Dense complex matrix calculus on small Hermitian operators: spectral
// decomposition, functional calculus restricted to supports, tensor products
// and partial traces.

#include <complex>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qsuff {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Default relative eigenvalue cutoff below which a PSD eigenvalue counts as
/// zero (relative to the largest eigenvalue).
inline constexpr double kSupportCutoff = 1e-10;
/// Hermiticity tolerance, relative to the Frobenius norm.
inline constexpr double kHermitianTol = 1e-10;
/// Accuracy expected from the dense eigensolver.
inline constexpr double kSpectralTol = 1e-9;

struct SpectralData {
  RealVector eigenvalues;  // descending
  Matrix eigenvectors;     // columns, unitary
};

bool is_hermitian(const Matrix& a, double rel_tol = kHermitianTol);

/// Hermitian eigendecomposition, eigenvalues sorted descending.
/// Throws DomainError when `a` is not square or not Hermitian.
SpectralData spectral(const Matrix& a);

/// U f(diag λ) U*. With `support_only`, eigenvalues at or below
/// `cutoff * λ_max` are mapped to zero instead of being passed to `f`.
/// Throws DomainError when `f` returns a non-finite value on a retained
/// eigenvalue.
Matrix mat_fun(const Matrix& a, const std::function<Complex(double)>& f, bool support_only = false,
               double cutoff = kSupportCutoff);

/// D^{it} on supp D, zero on the kernel; D^{i0} is the support projection.
Matrix imaginary_power(const Matrix& d, double t, double cutoff = kSupportCutoff);

/// D^p on supp D (any real p, negative powers are generalized inverses).
Matrix psd_power(const Matrix& d, double p, double cutoff = kSupportCutoff);

/// log D on supp D, zero on the kernel.
Matrix psd_log(const Matrix& d, double cutoff = kSupportCutoff);

Matrix support_projection(const Matrix& d, double cutoff = kSupportCutoff);
Index support_rank(const Matrix& d, double cutoff = kSupportCutoff);

/// Isometry (d x rank) whose columns span supp D.
Matrix support_isometry(const Matrix& d, double cutoff = kSupportCutoff);

/// Generalized inverse: D D⁻ = D⁻ D = supp D.
Matrix pinv_on_support(const Matrix& d, double cutoff = kSupportCutoff);

/// Throws DomainError unless `d` is Hermitian with min eigenvalue ≥ -tol·max(1, λ_max).
void require_psd(const Matrix& d, const char* what, double tol = 1e-12);

Matrix kron(const Matrix& a, const Matrix& b);
Matrix kron(std::initializer_list<Matrix> factors);

/// Partial trace of `a` on the tensor product with local dimensions `dims`
/// (first factor most significant), keeping the factors listed in `keep`
/// in their original order.
Matrix partial_trace(const Matrix& a, std::span<const Index> dims, std::span<const Index> keep);

/// Matrix exponential of a general square matrix.
Matrix expm(const Matrix& a);

/// exp of a Hermitian matrix via its spectral decomposition.
Matrix expm_hermitian(const Matrix& h);

/// Directional derivative d/ds exp(H + sE) at s = 0, read off the upper-right
/// block of exp([[H, E], [0, H]]).
Matrix frechet_exp(const Matrix& h, const Matrix& e);

/// Hilbert–Schmidt inner product Tr(a* b).
Complex hs_inner(const Matrix& a, const Matrix& b);

/// Column-major vectorization; vec(A X B) = (Bᵀ ⊗ A) vec(X).
Vector vec(const Matrix& a);
Matrix unvec(const Vector& v, Index rows, Index cols);
Matrix unvec(const Vector& v, Index dim);

Matrix hermitian_part(const Matrix& a);

/// Largest singular value.
double operator_norm(const Matrix& a);

enum class ResolventIntegral { kSqrt, kLog };

/// Evaluates x^{1/2} = (1/π)∫₀^∞ t^{-1/2} − t^{1/2}(x+t)^{-1} dt or
/// log x = ∫₀^∞ (1+t)^{-1} − (x+t)^{-1} dt at the matrix D by adaptive
/// Gauss–Kronrod quadrature of resolvents. Throws NumericalFailure when the
/// quadrature does not reach its tolerance.
Matrix resolvent_integral(const Matrix& d, ResolventIntegral which);

/// ‖resolvent_integral(D) − mat_fun(D)‖_F.
double resolvent_quadrature_check(const Matrix& d, ResolventIntegral which);

}  // namespace qsuff

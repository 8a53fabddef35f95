#include "qsuff/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "qsuff/errors.hpp"
#include "qsuff/quadrature.hpp"

namespace qsuff {

bool is_hermitian(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.norm());
  return (a - a.adjoint()).norm() <= rel_tol * scale;
}

Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

SpectralData spectral(const Matrix& a) {
  if (a.rows() != a.cols()) throw DomainError("spectral: matrix is not square");
  if (!a.allFinite()) throw DomainError("spectral: non-finite entries");
  if (!is_hermitian(a)) throw DomainError("spectral: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a));
  if (es.info() != Eigen::Success) throw NumericalFailure("spectral: eigensolver failed");
  const Index n = a.rows();
  SpectralData out;
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors = es.eigenvectors().rowwise().reverse();
  (void)n;
  return out;
}

namespace {

double retained_cutoff(const RealVector& evals, double cutoff) {
  const double top = evals.size() > 0 ? evals(0) : 0.0;
  return top > 0.0 ? cutoff * top : 0.0;
}

}  // namespace

Matrix mat_fun(const Matrix& a, const std::function<Complex(double)>& f, bool support_only,
               double cutoff) {
  const SpectralData sd = spectral(a);
  const Index n = a.rows();
  const double floor = retained_cutoff(sd.eigenvalues, cutoff);
  Vector fvals(n);
  for (Index k = 0; k < n; ++k) {
    const double lambda = sd.eigenvalues(k);
    if (support_only && !(lambda > floor)) {
      fvals(k) = 0.0;
      continue;
    }
    const Complex v = f(lambda);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream msg;
      msg << "mat_fun: function undefined at eigenvalue " << lambda;
      throw DomainError(msg.str());
    }
    fvals(k) = v;
  }
  return sd.eigenvectors * fvals.asDiagonal() * sd.eigenvectors.adjoint();
}

void require_psd(const Matrix& d, const char* what, double tol) {
  if (d.rows() != d.cols() || !is_hermitian(d)) {
    throw DomainError(std::string(what) + ": operator is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(d), Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  if (es.eigenvalues().minCoeff() < -tol * std::max(1.0, top)) {
    throw DomainError(std::string(what) + ": operator is not positive semidefinite");
  }
}

Matrix imaginary_power(const Matrix& d, double t, double cutoff) {
  return mat_fun(
      d, [t](double x) { return std::exp(Complex(0.0, t * std::log(x))); }, true, cutoff);
}

Matrix psd_power(const Matrix& d, double p, double cutoff) {
  return mat_fun(d, [p](double x) { return Complex(std::pow(x, p), 0.0); }, true, cutoff);
}

Matrix psd_log(const Matrix& d, double cutoff) {
  return mat_fun(d, [](double x) { return Complex(std::log(x), 0.0); }, true, cutoff);
}

Matrix support_projection(const Matrix& d, double cutoff) {
  return mat_fun(d, [](double) { return Complex(1.0, 0.0); }, true, cutoff);
}

Index support_rank(const Matrix& d, double cutoff) {
  const SpectralData sd = spectral(d);
  const double floor = retained_cutoff(sd.eigenvalues, cutoff);
  Index r = 0;
  for (Index k = 0; k < sd.eigenvalues.size(); ++k) {
    if (sd.eigenvalues(k) > floor) ++r;
  }
  return r;
}

Matrix support_isometry(const Matrix& d, double cutoff) {
  const SpectralData sd = spectral(d);
  const double floor = retained_cutoff(sd.eigenvalues, cutoff);
  Index r = 0;
  while (r < sd.eigenvalues.size() && sd.eigenvalues(r) > floor) ++r;
  return sd.eigenvectors.leftCols(r);
}

Matrix pinv_on_support(const Matrix& d, double cutoff) { return psd_power(d, -1.0, cutoff); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix kron(std::initializer_list<Matrix> factors) {
  Matrix out = Matrix::Identity(1, 1);
  for (const Matrix& f : factors) out = kron(out, f);
  return out;
}

Matrix partial_trace(const Matrix& a, std::span<const Index> dims, std::span<const Index> keep) {
  Index total = 1;
  for (Index d : dims) {
    if (d <= 0) throw DomainError("partial_trace: dimensions must be positive");
    total *= d;
  }
  if (a.rows() != total || a.cols() != total) {
    throw DomainError("partial_trace: product of dims does not match matrix dimension");
  }
  const auto nf = static_cast<Index>(dims.size());
  std::vector<bool> kept(dims.size(), false);
  for (Index k : keep) {
    if (k < 0 || k >= nf) throw DomainError("partial_trace: keep index out of range");
    kept[static_cast<std::size_t>(k)] = true;
  }
  Index kept_dim = 1;
  for (Index f = 0; f < nf; ++f) {
    if (kept[static_cast<std::size_t>(f)]) kept_dim *= dims[static_cast<std::size_t>(f)];
  }

  // Split every flat index into its kept part and its traced part.
  std::vector<Index> kept_idx(static_cast<std::size_t>(total));
  std::vector<Index> traced_idx(static_cast<std::size_t>(total));
  for (Index flat = 0; flat < total; ++flat) {
    Index rem = flat;
    Index kidx = 0, kstride = 1, tidx = 0, tstride = 1;
    for (Index f = nf - 1; f >= 0; --f) {
      const Index df = dims[static_cast<std::size_t>(f)];
      const Index digit = rem % df;
      rem /= df;
      if (kept[static_cast<std::size_t>(f)]) {
        kidx += digit * kstride;
        kstride *= df;
      } else {
        tidx += digit * tstride;
        tstride *= df;
      }
    }
    kept_idx[static_cast<std::size_t>(flat)] = kidx;
    traced_idx[static_cast<std::size_t>(flat)] = tidx;
  }

  Matrix out = Matrix::Zero(kept_dim, kept_dim);
  for (Index j = 0; j < total; ++j) {
    for (Index i = 0; i < total; ++i) {
      if (traced_idx[static_cast<std::size_t>(i)] == traced_idx[static_cast<std::size_t>(j)]) {
        out(kept_idx[static_cast<std::size_t>(i)], kept_idx[static_cast<std::size_t>(j)]) += a(i, j);
      }
    }
  }
  return out;
}

Matrix expm(const Matrix& a) { return a.exp(); }

Matrix expm_hermitian(const Matrix& h) {
  const SpectralData sd = spectral(h);
  const RealVector e = sd.eigenvalues.array().exp();
  return sd.eigenvectors * e.cast<Complex>().asDiagonal() * sd.eigenvectors.adjoint();
}

Matrix frechet_exp(const Matrix& h, const Matrix& e) {
  const Index n = h.rows();
  if (h.cols() != n || e.rows() != n || e.cols() != n) {
    throw DomainError("frechet_exp: dimension mismatch");
  }
  Matrix block = Matrix::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = h;
  block.topRightCorner(n, n) = e;
  block.bottomRightCorner(n, n) = h;
  return expm(block).topRightCorner(n, n);
}

Complex hs_inner(const Matrix& a, const Matrix& b) { return (a.adjoint() * b).trace(); }

Vector vec(const Matrix& a) { return Eigen::Map<const Vector>(a.data(), a.size()); }

Matrix unvec(const Vector& v, Index rows, Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix unvec(const Vector& v, Index dim) { return unvec(v, dim, dim); }

double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

namespace {

// Integrand after t = (1 - u)/u; evaluated through u on t ∈ [1, ∞) and
// through v = 1 - u on t ∈ (0, 1] so that both endpoints stay resolvable.
Matrix resolvent_term(const Matrix& d, double t, ResolventIntegral which) {
  const Index n = d.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Eigen::PartialPivLU<Matrix> lu(d + t * id);
  if (which == ResolventIntegral::kSqrt) {
    // t^{-1/2} - t^{1/2}(D+t)^{-1} = t^{-1/2}(I - t(D+t)^{-1}) = t^{-1/2} D (D+t)^{-1}
    if (t < 1.0) return (id - t * lu.inverse()) / std::sqrt(t);
    return lu.solve(d) / std::sqrt(t);
  }
  // (1+t)^{-1} - (D+t)^{-1} = (D - I)(D+t)^{-1}/(1+t)
  return lu.solve(d - id) / (1.0 + t);
}

}  // namespace

Matrix resolvent_integral(const Matrix& d, ResolventIntegral which) {
  require_psd(d, "resolvent_integral");
  const Index n = d.rows();
  if (which == ResolventIntegral::kLog) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(d), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      throw DomainError("resolvent_integral: log requires a strictly positive operator");
    }
  }
  const Matrix dh = hermitian_part(d);
  const double scale = std::max(1.0, dh.norm());

  // Geometric panels toward both endpoints of the substituted interval.
  constexpr int kPanels = 100;
  const double panel_tol = 1e-13 * scale;
  Matrix total = Matrix::Zero(n, n);
  double err = 0.0;
  bool converged = true;
  int evals = 0;

  const std::function<Matrix(double)> upper = [&](double u) -> Matrix {  // t ∈ [1, ∞)
    const double t = (1.0 - u) / u;
    return resolvent_term(dh, t, which) / (u * u);
  };
  const std::function<Matrix(double)> lower = [&](double v) -> Matrix {  // t ∈ (0, 1]
    const double t = v / (1.0 - v);
    return resolvent_term(dh, t, which) / ((1.0 - v) * (1.0 - v));
  };
  for (int k = 1; k <= kPanels; ++k) {
    const double hi = std::ldexp(1.0, -k);
    const double lo = std::ldexp(1.0, -k - 1);
    for (const auto* integrand : {&upper, &lower}) {
      QuadratureResult r = integrate_gk15(*integrand, lo, hi, panel_tol, 1e-13, 40);
      total += r.value;
      err += r.error_estimate;
      evals += r.evaluations;
      converged = converged && r.converged;
    }
  }
  if (which == ResolventIntegral::kSqrt) total /= std::numbers::pi;
  if (!converged || !total.allFinite()) {
    std::ostringstream msg;
    msg << "resolvent_integral: quadrature did not converge (error estimate " << err << ", "
        << evals << " evaluations)";
    throw NumericalFailure(msg.str());
  }
  return total;
}

double resolvent_quadrature_check(const Matrix& d, ResolventIntegral which) {
  const Matrix quad = resolvent_integral(d, which);
  const Matrix spec = which == ResolventIntegral::kSqrt
                          ? mat_fun(d, [](double x) { return Complex(std::sqrt(std::max(x, 0.0)), 0.0); })
                          : mat_fun(d, [](double x) { return Complex(std::log(x), 0.0); });
  return (quad - spec).norm();
}

}  // namespace qsuff

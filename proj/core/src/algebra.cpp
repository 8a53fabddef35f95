#include "qsuff/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qsuff/errors.hpp"

namespace qsuff {

// ---------------------------------------------------------------------------
// NullSpaceSolver

NullSpaceSolver::NullSpaceSolver(Index unknowns, double scale) : n_(unknowns), scale_(scale), r_(0, unknowns) {}

void NullSpaceSolver::add(const Matrix& rows) {
  if (rows.cols() != n_) throw DomainError("NullSpaceSolver::add: column count mismatch");
  if (rows.rows() == 0) return;
  Matrix stacked(r_.rows() + rows.rows(), n_);
  stacked << r_, rows;
  if (stacked.rows() <= n_) {
    // Not yet overdetermined; defer factorization until it pays off.
    r_ = std::move(stacked);
    return;
  }
  Eigen::HouseholderQR<Matrix> qr(stacked);
  r_ = qr.matrixQR().topRows(n_).triangularView<Eigen::Upper>();
}

Matrix NullSpaceSolver::solve(double rel_tol) const {
  if (r_.rows() == 0) return Matrix::Identity(n_, n_);
  Eigen::JacobiSVD<Matrix> svd(r_, Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  const double top = s.size() > 0 ? s(0) : 0.0;
  const double cut = rel_tol * std::max(top, scale_);
  Index rank = 0;
  for (Index k = 0; k < s.size(); ++k) {
    if (s(k) > cut) ++rank;
  }
  return svd.matrixV().rightCols(n_ - rank);
}

double NullSpaceSolver::gap(double rel_tol) const {
  if (r_.rows() == 0) return 1.0;
  Eigen::JacobiSVD<Matrix> svd(r_);
  const RealVector& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= rel_tol * scale_) return 1.0;
  double smallest = 1.0;
  for (Index k = 0; k < s.size(); ++k) {
    if (s(k) > rel_tol * std::max(s(0), scale_)) smallest = std::min(smallest, s(k) / s(0));
  }
  return smallest;
}

// ---------------------------------------------------------------------------
// SpanBuilder

SpanBuilder::SpanBuilder(Index vector_dim) : dim_(vector_dim), q_(vector_dim, std::min<Index>(vector_dim, 16)) {}

double SpanBuilder::residual(const Vector& v) const {
  if (count_ == 0) return v.norm();
  const auto q = q_.leftCols(count_);
  return (v - q * (q.adjoint() * v)).norm();
}

bool SpanBuilder::add(const Vector& v, double rel_tol, double scale) {
  if (v.size() != dim_) throw DomainError("SpanBuilder::add: dimension mismatch");
  const double norm0 = v.norm();
  if (!(norm0 > 0.0) || count_ == dim_) return false;
  Vector w = v / norm0;
  for (int pass = 0; pass < 2 && count_ > 0; ++pass) {
    const auto q = q_.leftCols(count_);
    w -= q * (q.adjoint() * w);
  }
  const double r = w.norm();
  if (r * norm0 <= rel_tol * std::max(norm0, scale)) return false;
  if (count_ == q_.cols()) q_.conservativeResize(Eigen::NoChange, std::min<Index>(dim_, 2 * q_.cols()));
  q_.col(count_++) = w / r;
  return true;
}

// ---------------------------------------------------------------------------
// MatrixStarAlgebra

MatrixStarAlgebra::MatrixStarAlgebra(Index ambient_dim, Matrix basis_vectors)
    : d_(ambient_dim), basis_(std::move(basis_vectors)) {
  if (basis_.rows() != d_ * d_) throw DomainError("MatrixStarAlgebra: basis rows must equal d²");
}

MatrixStarAlgebra MatrixStarAlgebra::full(Index d) {
  return MatrixStarAlgebra(d, Matrix::Identity(d * d, d * d));
}

MatrixStarAlgebra MatrixStarAlgebra::scalars(Index d) {
  return MatrixStarAlgebra(d, vec(Matrix::Identity(d, d)) / std::sqrt(static_cast<double>(d)));
}

MatrixStarAlgebra MatrixStarAlgebra::diagonal(Index d) {
  Matrix b = Matrix::Zero(d * d, d);
  for (Index k = 0; k < d; ++k) b(k * d + k, k) = 1.0;
  return MatrixStarAlgebra(d, std::move(b));
}

MatrixStarAlgebra MatrixStarAlgebra::left_tensor_factor(Index d_left, Index d_right) {
  const Index d = d_left * d_right;
  Matrix b(d * d, d_left * d_left);
  const Matrix id = Matrix::Identity(d_right, d_right) / std::sqrt(static_cast<double>(d_right));
  Index col = 0;
  for (Index j = 0; j < d_left; ++j) {
    for (Index i = 0; i < d_left; ++i) {
      Matrix e = Matrix::Zero(d_left, d_left);
      e(i, j) = 1.0;
      b.col(col++) = vec(kron(e, id));
    }
  }
  return MatrixStarAlgebra(d, std::move(b));
}

MatrixStarAlgebra MatrixStarAlgebra::right_tensor_factor(Index d_left, Index d_right) {
  const Index d = d_left * d_right;
  Matrix b(d * d, d_right * d_right);
  const Matrix id = Matrix::Identity(d_left, d_left) / std::sqrt(static_cast<double>(d_left));
  Index col = 0;
  for (Index j = 0; j < d_right; ++j) {
    for (Index i = 0; i < d_right; ++i) {
      Matrix e = Matrix::Zero(d_right, d_right);
      e(i, j) = 1.0;
      b.col(col++) = vec(kron(id, e));
    }
  }
  return MatrixStarAlgebra(d, std::move(b));
}

std::vector<Matrix> MatrixStarAlgebra::elements() const {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(dimension()));
  for (Index k = 0; k < dimension(); ++k) out.push_back(element(k));
  return out;
}

Matrix MatrixStarAlgebra::project(const Matrix& x) const {
  if (x.rows() != d_ || x.cols() != d_) throw DomainError("MatrixStarAlgebra::project: dimension mismatch");
  const Vector v = vec(x);
  return unvec(basis_ * (basis_.adjoint() * v), d_);
}

double MatrixStarAlgebra::residual(const Matrix& x) const {
  const Vector v = vec(x);
  return (v - basis_ * (basis_.adjoint() * v)).norm();
}

bool MatrixStarAlgebra::contains(const Matrix& x, double rel_tol) const {
  return residual(x) <= rel_tol * std::max(1.0, x.norm());
}

double MatrixStarAlgebra::closure_defect() const {
  double worst = residual(Matrix::Identity(d_, d_));
  const std::vector<Matrix> el = elements();
  for (const Matrix& a : el) {
    worst = std::max(worst, residual(a.adjoint()));
    for (const Matrix& b : el) worst = std::max(worst, residual(a * b));
  }
  return worst;
}

Matrix MatrixStarAlgebra::generic_self_adjoint(Rng& rng) const {
  Matrix h = Matrix::Zero(d_, d_);
  const Complex i(0.0, 1.0);
  for (Index k = 0; k < dimension(); ++k) {
    const Matrix b = element(k);
    h += rng.normal() * 0.5 * (b + b.adjoint());
    h += rng.normal() * 0.5 * i * (b - b.adjoint());
  }
  return hermitian_part(h);
}

// ---------------------------------------------------------------------------
// Generation, commutant, center

MatrixStarAlgebra generate_algebra(const std::vector<Matrix>& generators, Index ambient_dim,
                                   double rel_tol) {
  const Index d = ambient_dim;
  SpanBuilder span(d * d);
  std::vector<Matrix> frontier;
  std::vector<Matrix> gens;

  span.add(vec(Matrix::Identity(d, d)), rel_tol);
  frontier.push_back(Matrix::Identity(d, d) / std::sqrt(static_cast<double>(d)));
  // Only the linear span of the generators and their adjoints matters.
  SpanBuilder gen_span(d * d);
  for (const Matrix& g : generators) {
    if (g.rows() != d || g.cols() != d) throw DomainError("generate_algebra: generator has wrong shape");
    if (gen_span.add(vec(g), rel_tol)) gens.push_back(unvec(gen_span.column(gen_span.size() - 1), d));
    if (gen_span.add(vec(g.adjoint()), rel_tol)) gens.push_back(unvec(gen_span.column(gen_span.size() - 1), d));
  }
  // Right multiplication of every new basis element by every generator
  // enumerates all words, hence the whole generated algebra.
  while (!frontier.empty()) {
    std::vector<Matrix> next;
    for (const Matrix& x : frontier) {
      for (const Matrix& g : gens) {
        if (span.add(vec(x * g), rel_tol, 1.0)) next.push_back(unvec(span.column(span.size() - 1), d));
      }
    }
    frontier = std::move(next);
  }
  return MatrixStarAlgebra(d, span.basis());
}

namespace {

// Rows of vec(x) ↦ vec(x b − b x).
Matrix commutator_rows(const Matrix& b) {
  const Index d = b.rows();
  const Matrix id = Matrix::Identity(d, d);
  return kron(b.transpose(), id) - kron(id, b);
}

double commutation_defect(const MatrixStarAlgebra& x, const MatrixStarAlgebra& a) {
  double worst = 0.0;
  const std::vector<Matrix> xs = x.elements();
  const std::vector<Matrix> as = a.elements();
  for (const Matrix& u : xs) {
    for (const Matrix& v : as) worst = std::max(worst, (u * v - v * u).norm());
  }
  return worst;
}

}  // namespace

MatrixStarAlgebra commutant(const MatrixStarAlgebra& a, std::uint64_t seed) {
  const Index d = a.ambient_dim();
  Rng rng(seed);
  NullSpaceSolver solver(d * d);
  solver.add(commutator_rows(a.generic_self_adjoint(rng)));
  solver.add(commutator_rows(a.generic_self_adjoint(rng)));
  MatrixStarAlgebra c(d, solver.solve());
  if (commutation_defect(c, a) <= 1e-8) return c;
  NullSpaceSolver full(d * d);
  for (const Matrix& b : a.elements()) full.add(commutator_rows(b));
  return MatrixStarAlgebra(d, full.solve());
}

MatrixStarAlgebra center(const MatrixStarAlgebra& a, std::uint64_t seed) {
  const Index d = a.ambient_dim();
  const Index k = a.dimension();
  const std::vector<Matrix> el = a.elements();
  auto rows_for = [&](const Matrix& b) {
    Matrix rows(d * d, k);
    for (Index j = 0; j < k; ++j) rows.col(j) = vec(el[static_cast<std::size_t>(j)] * b - b * el[static_cast<std::size_t>(j)]);
    return rows;
  };
  Rng rng(seed);
  NullSpaceSolver solver(k);
  solver.add(rows_for(a.generic_self_adjoint(rng)));
  solver.add(rows_for(a.generic_self_adjoint(rng)));
  MatrixStarAlgebra z(d, a.basis_vectors() * solver.solve());
  if (commutation_defect(z, a) <= 1e-8) return z;
  NullSpaceSolver full(k);
  for (const Matrix& b : el) full.add(rows_for(b));
  return MatrixStarAlgebra(d, a.basis_vectors() * full.solve());
}

MatrixStarAlgebra intersect(const MatrixStarAlgebra& a, const MatrixStarAlgebra& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw DomainError("intersect: ambient dimensions differ");
  const Matrix& qa = a.basis_vectors();
  const Matrix& qb = b.basis_vectors();
  NullSpaceSolver solver(qa.cols());
  solver.add(qa - qb * (qb.adjoint() * qa));
  const Matrix c = solver.solve();
  Matrix basis = qa * c;
  // Re-orthonormalize against rounding.
  if (basis.cols() > 0) {
    Eigen::HouseholderQR<Matrix> qr(basis);
    basis = qr.householderQ() * Matrix::Identity(basis.rows(), basis.cols());
  }
  return MatrixStarAlgebra(a.ambient_dim(), std::move(basis));
}

double containment_residual(const MatrixStarAlgebra& inner, const MatrixStarAlgebra& outer) {
  const Matrix& qi = inner.basis_vectors();
  const Matrix& qo = outer.basis_vectors();
  const Matrix r = qi - qo * (qo.adjoint() * qi);
  double worst = 0.0;
  for (Index k = 0; k < r.cols(); ++k) worst = std::max(worst, r.col(k).norm());
  return worst;
}

// ---------------------------------------------------------------------------
// Channels and algebras

MatrixStarAlgebra multiplicative_domain(const Channel& ch) {
  if (!ch.is_unital(1e-9)) throw PreconditionError("multiplicative_domain: channel is not unital");
  const Index din = ch.in_dim();
  const Index dout = ch.out_dim();
  const Matrix s = ch.superoperator();
  const Matrix id_in = Matrix::Identity(din, din);
  const Matrix id_out = Matrix::Identity(dout, dout);
  // σ(a*a) = σ(a)*σ(a) iff a V_i* = V_i* σ(a) for every Kraus operator.
  NullSpaceSolver solver(din * din);
  for (const Matrix& v : ch.kraus()) {
    solver.add(kron(v.conjugate(), id_in) - kron(id_out, v.adjoint()) * s);
  }
  const MatrixStarAlgebra right(din, solver.solve());
  Matrix adj(right.basis_vectors().rows(), right.dimension());
  for (Index k = 0; k < right.dimension(); ++k) adj.col(k) = vec(right.element(k).adjoint());
  return intersect(right, MatrixStarAlgebra(din, std::move(adj)));
}

FixedPointResult fixed_point_algebra(const Channel& ch, const Channel* compose_with) {
  const Channel phi = compose_with != nullptr ? compose_with->compose(ch) : ch;
  if (phi.in_dim() != phi.out_dim()) {
    throw DomainError("fixed_point_algebra: composed map is not an endomorphism");
  }
  const Index d = phi.in_dim();
  NullSpaceSolver solver(d * d);
  solver.add(phi.superoperator() - Matrix::Identity(d * d, d * d));
  MatrixStarAlgebra fixed(d, solver.solve());
  const double gap = solver.gap();
  const MatrixStarAlgebra mult = multiplicative_domain(phi);
  if (mult.dimension() == d * d) return {std::move(fixed), gap};
  return {intersect(fixed, mult), gap};
}

ModularInvariance modular_invariance_check(const MatrixStarAlgebra& a, const Matrix& omega,
                                           const std::vector<double>& t_grid, double tol) {
  if (support_rank(omega) != omega.rows()) {
    throw PreconditionError("modular_invariance_check: state is not faithful");
  }
  ModularInvariance out;
  const std::vector<Matrix> el = a.elements();
  for (double t : t_grid) {
    const Matrix u = imaginary_power(omega, t);
    for (const Matrix& x : el) {
      out.max_deviation = std::max(out.max_deviation, a.residual(u * x * u.adjoint()));
    }
  }
  out.invariant = out.max_deviation <= tol;
  return out;
}

}  // namespace qsuff

#include "qsuff/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qsuff/errors.hpp"

namespace qsuff {

std::vector<double> default_t_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 8; ++k) {
    g.push_back(0.37 * k);
    g.push_back(-0.37 * k);
  }
  return g;
}

std::vector<double> positive_t_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 8; ++k) g.push_back(0.37 * k);
  return g;
}

namespace {

void require_same_dim(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError(std::string(what) + ": dimension mismatch");
}

double max_eigenvalue(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace

double transition_probability(const Matrix& d1, const Matrix& d2) {
  require_same_dim(d1, d2, "transition_probability");
  return (psd_power(d1, 0.5) * psd_power(d2, 0.5)).trace().real();
}

double relative_entropy(const Matrix& d1, const Matrix& d2) {
  require_same_dim(d1, d2, "relative_entropy");
  const Matrix p1 = support_projection(d1);
  const Matrix p2 = support_projection(d2);
  if ((p1 - p2 * p1).norm() > 1e-9) return std::numeric_limits<double>::infinity();
  const double s = (d1 * (psd_log(d1) - psd_log(d2))).trace().real();
  return std::max(s, 0.0);
}

double von_neumann_entropy(const Matrix& d) {
  const SpectralData sd = spectral(d);
  const double floor = sd.eigenvalues.size() > 0 ? kSupportCutoff * std::max(sd.eigenvalues(0), 0.0) : 0.0;
  double s = 0.0;
  for (Index k = 0; k < sd.eigenvalues.size(); ++k) {
    const double l = sd.eigenvalues(k);
    if (l > floor) s -= l * std::log(l);
  }
  return std::max(s, 0.0);
}

CocycleSample connes_cocycle(const Matrix& d_phi, const Matrix& d_omega, double t) {
  require_same_dim(d_phi, d_omega, "connes_cocycle");
  const Matrix p = support_projection(d_omega);
  const Matrix q = support_projection(d_phi);
  if ((q - p * q).norm() > 1e-9) throw DomainError("connes_cocycle: supp D_phi is not under supp D_omega");
  return {t, imaginary_power(d_phi, t) * imaginary_power(d_omega, -t)};
}

Matrix modular_flow(const Matrix& d_omega, const Matrix& x, double t) {
  if (support_rank(d_omega) != d_omega.rows()) throw PreconditionError("modular_flow: state is not faithful");
  const Matrix u = imaginary_power(d_omega, t);
  return u * x * u.adjoint();
}

ModularAudit relative_modular_audit(const Channel& t, const Matrix& d1, const Matrix& d2,
                                    const std::vector<double>& t_grid) {
  if (!t.is_trace_preserving(1e-9)) throw PreconditionError("relative_modular_audit: map is not trace preserving");
  const Index dh = t.in_dim();
  const Index dk = t.out_dim();
  if (dh > 16 || dk > 16) throw DomainError("relative_modular_audit: dimensions above 16 are not supported");
  require_same_dim(d1, d2, "relative_modular_audit");

  const Matrix td1 = hermitian_part(t.apply(d1));
  const Matrix td2 = hermitian_part(t.apply(d2));
  const Matrix id_h = Matrix::Identity(dh, dh);
  const Matrix id_k = Matrix::Identity(dk, dk);

  ModularAudit out;
  out.delta = kron(pinv_on_support(d1).transpose(), d2);
  out.delta0 = kron(pinv_on_support(td1).transpose(), td2);
  const Matrix g = psd_power(td1, -0.5);
  const Matrix sqrt_d1 = psd_power(d1, 0.5);
  const Matrix sqrt_td1 = psd_power(td1, 0.5);
  out.v = kron(sqrt_d1.transpose(), id_h) * t.dual().superoperator() * kron(g.transpose(), id_k);

  out.contraction_norm = operator_norm(out.v);
  out.intertwining = (out.v * vec(sqrt_td1) - vec(sqrt_d1)).norm();
  const Matrix vdv = hermitian_part(out.v.adjoint() * out.delta * out.v);
  out.form_violation = std::max(0.0, max_eigenvalue(vdv - out.delta0));

  const Vector x = vec(sqrt_d1);
  const Vector y = vec(sqrt_td1);
  const Matrix big_h = hermitian_part(out.delta);
  const Matrix big_k = hermitian_part(out.delta0);
  for (double s : t_grid) {
    const double tt = std::abs(s);
    if (!(tt > 0.0)) continue;
    const Matrix id_hh = Matrix::Identity(big_h.rows(), big_h.cols());
    const Matrix id_kk = Matrix::Identity(big_k.rows(), big_k.cols());
    const Eigen::LDLT<Matrix> lh(big_h + tt * id_hh);
    const Eigen::LDLT<Matrix> lk(big_k + tt * id_kk);
    const Eigen::LDLT<Matrix> lv(vdv + tt * id_kk);
    const double lhs = x.dot(lh.solve(x)).real();
    const double rhs = y.dot(lk.solve(y)).real();
    out.resolvent_violation = std::max(out.resolvent_violation, rhs - lhs);
    const Matrix diff = lk.solve(id_kk) - lv.solve(id_kk);
    out.resolvent_operator_violation = std::max(out.resolvent_operator_violation, max_eigenvalue(diff));
  }
  out.resolvent_violation = std::max(0.0, out.resolvent_violation);
  out.resolvent_operator_violation = std::max(0.0, out.resolvent_operator_violation);
  out.max_violation = std::max({out.contraction_norm - 1.0, out.intertwining, out.form_violation,
                                out.resolvent_operator_violation, out.resolvent_violation, 0.0});
  return out;
}

double monotonicity_gap(const Channel& t, const Matrix& d1, const Matrix& d2, Divergence which) {
  const Matrix td1 = hermitian_part(t.apply(d1));
  const Matrix td2 = hermitian_part(t.apply(d2));
  if (which == Divergence::kTransition) return transition_probability(td1, td2) - transition_probability(d1, d2);
  const double before = relative_entropy(d1, d2);
  const double after = relative_entropy(td1, td2);
  if (std::isinf(before) && std::isinf(after)) return 0.0;
  return before - after;
}

double intertwining_residual(const Channel& t, const Matrix& d1, const Matrix& d2,
                             const std::vector<double>& t_grid) {
  const Channel heis = t.dual();
  const Matrix td1 = hermitian_part(t.apply(d1));
  const Matrix td2 = hermitian_part(t.apply(d2));
  const Matrix p1 = support_projection(d1);
  double worst = 0.0;
  for (double s : t_grid) {
    const Matrix lhs = heis.apply(imaginary_power(td2, s) * imaginary_power(td1, -s)) * p1;
    const Matrix rhs = imaginary_power(d2, s) * imaginary_power(d1, -s) * p1;
    worst = std::max(worst, (lhs - rhs).norm());
  }
  return worst;
}

}  // namespace qsuff

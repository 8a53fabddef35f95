#include "qsuff/expfam.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qsuff/divergences.hpp"
#include "qsuff/errors.hpp"
#include "qsuff/states.hpp"

namespace qsuff {

ExponentialFamily::ExponentialFamily(Matrix h, std::vector<Matrix> generators)
    : h_(std::move(h)), gens_(std::move(generators)) {
  if (h_.rows() == 0 || h_.rows() != h_.cols()) throw DomainError("ExponentialFamily: H is not square");
  if (!is_hermitian(h_)) throw DomainError("ExponentialFamily: H is not Hermitian");
  h_ = hermitian_part(h_);
  const auto m = static_cast<Index>(gens_.size());
  RealMatrix gram(m, m);
  for (Index i = 0; i < m; ++i) {
    Matrix& a = gens_[static_cast<std::size_t>(i)];
    if (a.rows() != h_.rows() || a.cols() != h_.cols()) throw DomainError("ExponentialFamily: generator has wrong shape");
    if (!is_hermitian(a)) throw DomainError("ExponentialFamily: generator is not Hermitian");
    a = hermitian_part(a);
  }
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      gram(i, j) = hs_inner(gens_[static_cast<std::size_t>(i)], gens_[static_cast<std::size_t>(j)]).real();
    }
  }
  if (m > 0) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(gram, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 1e-10) throw DomainError("ExponentialFamily: generators are linearly dependent");
  }
}

ExponentialFamily ExponentialFamily::around(const Matrix& omega, std::vector<Matrix> generators, bool center) {
  require_density(omega, "ExponentialFamily::around");
  if (support_rank(omega) != omega.rows()) throw PreconditionError("ExponentialFamily::around: state is not faithful");
  if (center) {
    for (Matrix& a : generators) {
      if (a.rows() != omega.rows()) throw DomainError("ExponentialFamily::around: generator has wrong shape");
      const double mean = (omega * a).trace().real();
      a -= mean * Matrix::Identity(a.rows(), a.cols());
    }
  }
  return ExponentialFamily(psd_log(omega), std::move(generators));
}

namespace {

Matrix exponent(const ExponentialFamily& fam, const std::vector<double>& xi) {
  if (xi.size() != fam.size()) throw DomainError("exponential family: parameter length mismatch");
  Matrix k = fam.h();
  for (std::size_t i = 0; i < xi.size(); ++i) k += xi[i] * fam.generators()[i];
  return hermitian_part(k);
}

double top_eigenvalue(const Matrix& k) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(k, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// e^{K − λ_max} and log Tr e^K.
std::pair<Matrix, double> shifted_exp(const Matrix& k) {
  const double top = top_eigenvalue(k);
  Matrix e = expm_hermitian(k - top * Matrix::Identity(k.rows(), k.cols()));
  const double z = e.trace().real();
  return {std::move(e), top + std::log(z)};
}

std::vector<double> means(const ExponentialFamily& fam, const Matrix& d) {
  std::vector<double> out;
  for (const Matrix& a : fam.generators()) out.push_back((d * a).trace().real());
  return out;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

Matrix ExponentialFamily::reference() const {
  return density_at(*this, std::vector<double>(gens_.size(), 0.0));
}

bool ExponentialFamily::centered(double tol) const {
  const Matrix d = reference();
  for (const Matrix& a : gens_) {
    if (std::abs((d * a).trace().real()) > tol) return false;
  }
  return true;
}

Matrix density_at(const ExponentialFamily& fam, const std::vector<double>& xi) {
  auto [e, log_z] = shifted_exp(exponent(fam, xi));
  (void)log_z;
  return hermitian_part(e / e.trace().real());
}

Matrix perturbed_state(const Matrix& omega, const Matrix& a) {
  require_density(omega, "perturbed_state");
  if (support_rank(omega) != omega.rows()) throw PreconditionError("perturbed_state: state is not faithful");
  if (a.rows() != omega.rows() || !is_hermitian(a)) throw DomainError("perturbed_state: perturbation must be Hermitian");
  auto [e, log_z] = shifted_exp(hermitian_part(psd_log(omega) + a));
  (void)log_z;
  return hermitian_part(e / e.trace().real());
}

LogPartition log_partition(const ExponentialFamily& fam, const std::vector<double>& xi) {
  const Matrix k = exponent(fam, xi);
  const double top = top_eigenvalue(k);
  const Matrix ks = k - top * Matrix::Identity(k.rows(), k.cols());
  const auto [e, log_z] = shifted_exp(k);
  const auto [e0, log_z0] = shifted_exp(fam.h());
  (void)e0;
  LogPartition out;
  out.at = xi;
  out.value = -log_z + log_z0;
  const double z = e.trace().real();
  for (const Matrix& a : fam.generators()) out.gradient.push_back(-frechet_exp(ks, a).trace().real() / z);
  return out;
}

MomentMatch moment_match(const ExponentialFamily& fam, const std::vector<double>& target) {
  const std::size_t m = fam.size();
  if (target.size() != m) throw DomainError("moment_match: target length mismatch");
  auto residual_at = [&](const std::vector<double>& xi) {
    std::vector<double> f = means(fam, density_at(fam, xi));
    for (std::size_t j = 0; j < m; ++j) f[j] -= target[j];
    return f;
  };

  MomentMatch out;
  out.xi.assign(m, 0.0);
  std::vector<double> f = residual_at(out.xi);
  for (int it = 0;; ++it) {
    out.residual = inf_norm(f);
    out.iterations = it;
    if (out.residual <= 1e-10) return out;
    if (it >= 200) throw RegionExitError("moment_match: no convergence within 200 iterations", out.xi, out.residual);

    const Matrix k = exponent(fam, out.xi);
    const Matrix ks = k - top_eigenvalue(k) * Matrix::Identity(k.rows(), k.cols());
    const Matrix e = expm_hermitian(ks);
    const double z = e.trace().real();
    const std::vector<double> phi = means(fam, e / z);
    RealMatrix jac(static_cast<Index>(m), static_cast<Index>(m));
    for (std::size_t c = 0; c < m; ++c) {
      const Matrix fr = frechet_exp(ks, fam.generators()[c]);
      for (std::size_t r = 0; r < m; ++r) {
        jac(static_cast<Index>(r), static_cast<Index>(c)) =
            (fr * fam.generators()[r]).trace().real() / z - phi[r] * phi[c];
      }
    }
    jac = 0.5 * (jac + jac.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(jac);
    const RealVector& lam = es.eigenvalues();
    if (lam.size() > 0 && lam.minCoeff() <= 1e-12 * std::max(1.0, lam.cwiseAbs().maxCoeff())) {
      throw RegionExitError("moment_match: singular Jacobian, target outside the mean-value region", out.xi,
                            out.residual);
    }
    RealVector rhs(static_cast<Index>(m));
    for (std::size_t j = 0; j < m; ++j) rhs(static_cast<Index>(j)) = -f[j];
    const RealVector step =
        es.eigenvectors() * lam.cwiseInverse().asDiagonal() * (es.eigenvectors().transpose() * rhs);

    double s = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= 30; ++halving, s *= 0.5) {
      std::vector<double> trial = out.xi;
      for (std::size_t j = 0; j < m; ++j) trial[j] += s * step(static_cast<Index>(j));
      const std::vector<double> ft = residual_at(trial);
      if (l2_norm(ft) < l2_norm(f)) {
        out.xi = std::move(trial);
        f = ft;
        accepted = true;
        break;
      }
    }
    if (!accepted) throw RegionExitError("moment_match: line search failed", out.xi, out.residual);
    if (l2_norm(out.xi) > 1e2) {
      throw RegionExitError("moment_match: parameters left the region ‖ξ‖ ≤ 100", out.xi, inf_norm(f));
    }
  }
}

std::vector<std::vector<double>> sample_parameters(std::size_t m, Rng& rng, std::size_t count, double radius) {
  std::vector<std::vector<double>> out;
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<double> x(m);
    for (double& v : x) v = rng.normal();
    const double n = l2_norm(x);
    const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(std::max<std::size_t>(m, 1)));
    for (double& v : x) v = n > 0.0 ? v * r / n : 0.0;
    out.push_back(std::move(x));
  }
  return out;
}

namespace {

Experiment sampled_experiment(const ExponentialFamily& fam, const SufficiencyOptions& opts) {
  Rng rng(opts.seed);
  std::vector<Matrix> states{fam.reference()};
  std::vector<std::string> labels{"reference"};
  const auto points = sample_parameters(fam.size(), rng);
  for (std::size_t k = 0; k < points.size(); ++k) {
    states.push_back(density_at(fam, points[k]));
    labels.push_back("sample" + std::to_string(k));
  }
  return with_dominating_state(build_dominating_state(states, std::nullopt, labels), fam.reference());
}

Verdict combine(double r1, double r2, double tol) {
  const double r = std::max(r1, r2);
  if (r < tol) return Verdict::kSufficient;
  if (r > 10.0 * tol) return Verdict::kInsufficient;
  return Verdict::kBorderline;
}

}  // namespace

ExpFamSubalgebraVerdict expfam_subalgebra_sufficiency(const ExponentialFamily& fam, const MatrixStarAlgebra& a,
                                                      const SufficiencyOptions& opts) {
  if (a.ambient_dim() != fam.dim()) throw DomainError("expfam_subalgebra_sufficiency: dimension mismatch");
  const Matrix omega = fam.reference();
  ExpFamSubalgebraVerdict out;
  for (const Matrix& g : fam.generators()) {
    const double scale = std::max(1.0, g.norm());
    for (double t : opts.t_grid) out.flow_residual = std::max(out.flow_residual, a.residual(modular_flow(omega, g, t)) / scale);
    out.expectation_residual =
        std::max(out.expectation_residual, (petz_conditional_expectation(a, omega, g) - g).norm() / scale);
  }
  out.generic = subalgebra_sufficiency(sampled_experiment(fam, opts), a, opts);
  const Verdict flow = combine(out.flow_residual, 0.0, opts.tol);
  const Verdict expectation = combine(out.expectation_residual, 0.0, opts.tol);
  out.agree = flow == expectation && flow == out.generic.verdict;
  out.verdict = out.agree ? flow : Verdict::kBorderline;
  return out;
}

ExpFamChannelVerdict expfam_channel_sufficiency(const ExponentialFamily& fam, const Channel& sigma,
                                                const SufficiencyOptions& opts) {
  if (sigma.out_dim() != fam.dim()) throw DomainError("expfam_channel_sufficiency: channel output does not match");
  const Matrix omega = fam.reference();
  const Matrix omega0 = pullback_density(sigma, omega);
  if (support_rank(omega0) != omega0.rows()) {
    throw PreconditionError("expfam_channel_sufficiency: pulled-back reference state is not faithful");
  }

  ExpFamChannelVerdict out;
  const MatrixStarAlgebra domain = multiplicative_domain(sigma);
  const Index din = sigma.in_dim();
  std::vector<Matrix> herm;
  for (Index k = 0; k < domain.dimension(); ++k) {
    const Matrix b = domain.element(k);
    herm.push_back(hermitian_part(b));
    herm.push_back(hermitian_part(Complex(0.0, -1.0) * b));
  }
  const Index rows = 2 * fam.dim() * fam.dim();
  RealMatrix lhs(rows, static_cast<Index>(herm.size()));
  for (std::size_t k = 0; k < herm.size(); ++k) {
    const Vector v = vec(sigma.apply(herm[k]));
    lhs.col(static_cast<Index>(k)) << v.real(), v.imag();
  }
  const Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(lhs);
  for (const Matrix& b : fam.generators()) {
    const Vector v = vec(b);
    RealVector rhs(rows);
    rhs << v.real(), v.imag();
    const RealVector c = herm.empty() ? RealVector() : RealVector(cod.solve(rhs));
    Matrix a = Matrix::Zero(din, din);
    for (std::size_t k = 0; k < herm.size(); ++k) a += c(static_cast<Index>(k)) * herm[k];
    out.preimage_residual = std::max(out.preimage_residual, (sigma.apply(a) - b).norm() / std::max(1.0, b.norm()));
    out.preimages.push_back(hermitian_part(a));
  }

  Rng rng(opts.seed);
  for (const auto& theta : sample_parameters(fam.size(), rng)) {
    const Matrix pulled = pullback_density(sigma, density_at(fam, theta));
    Matrix x = Matrix::Zero(din, din);
    for (std::size_t i = 0; i < theta.size(); ++i) x += theta[i] * out.preimages[i];
    const Matrix e = perturbed_state(omega0, x);
    out.family_residual = std::max(out.family_residual, (pulled - e).norm());
  }

  out.generic = channel_sufficiency(sampled_experiment(fam, opts), sigma, opts);
  out.verdict = combine(out.preimage_residual, out.family_residual, opts.tol);
  out.agree = out.verdict == out.generic.verdict;
  if (!out.agree) out.verdict = Verdict::kBorderline;
  return out;
}

CommutativeFamilyVerdict commutative_family_check(const ExponentialFamily& fam, const MatrixStarAlgebra& a,
                                                  const SufficiencyOptions& opts) {
  if (a.ambient_dim() != fam.dim()) throw DomainError("commutative_family_check: dimension mismatch");
  const std::vector<Matrix> el = a.elements();
  for (const Matrix& x : el) {
    for (const Matrix& y : el) {
      if ((x * y - y * x).norm() > 1e-9) throw DomainError("commutative_family_check: algebra is not commutative");
    }
  }
  const Matrix omega = fam.reference();
  CommutativeFamilyVerdict out;
  for (const Matrix& g : fam.generators()) {
    out.membership_residual = std::max(out.membership_residual, a.residual(g) / std::max(1.0, g.norm()));
  }
  Rng rng(opts.seed);
  for (const auto& theta : sample_parameters(fam.size(), rng)) {
    Matrix x = Matrix::Zero(fam.dim(), fam.dim());
    for (std::size_t i = 0; i < theta.size(); ++i) x += theta[i] * fam.generators()[i];
    Matrix closed = omega * expm_hermitian(hermitian_part(x));
    closed /= closed.trace();
    out.closed_form_residual = std::max(out.closed_form_residual, (density_at(fam, theta) - closed).norm());
  }
  out.generic = subalgebra_sufficiency(sampled_experiment(fam, opts), a, opts);
  out.verdict = combine(out.membership_residual, out.closed_form_residual, opts.tol);
  out.agree = out.verdict == out.generic.verdict;
  if (!out.agree) out.verdict = Verdict::kBorderline;
  return out;
}

}  // namespace qsuff

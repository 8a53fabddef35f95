#include "qsuff/states.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "qsuff/errors.hpp"

namespace qsuff {

void require_density(const Matrix& d, const char* what) {
  if (d.rows() == 0 || d.rows() != d.cols()) throw DomainError(std::string(what) + ": not a square matrix");
  if (!d.allFinite()) throw DomainError(std::string(what) + ": non-finite entries");
  if (!is_hermitian(d)) throw DomainError(std::string(what) + ": not Hermitian");
  const double tr = d.trace().real();
  if (std::abs(tr - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << what << ": trace " << tr << " differs from 1";
    throw DomainError(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(d), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12) {
    std::ostringstream msg;
    msg << what << ": negative eigenvalue " << es.eigenvalues().minCoeff();
    throw DomainError(msg.str());
  }
}

DensityMatrix::DensityMatrix(Matrix m) : m_(std::move(m)) { require_density(m_, "DensityMatrix"); }

namespace {

void check_domination(const Experiment& exp) {
  const Matrix p = support_projection(exp.dominating);
  for (std::size_t k = 0; k < exp.states.size(); ++k) {
    const Matrix q = support_projection(exp.states[k]);
    if ((q - p * q).norm() > 1e-9) {
      throw DomainError("experiment: support of state '" + exp.labels[k] +
                        "' is not dominated by the reference state");
    }
  }
}

}  // namespace

Experiment build_dominating_state(std::vector<Matrix> states, std::optional<std::vector<double>> weights,
                                  std::vector<std::string> labels) {
  if (states.empty()) throw DomainError("build_dominating_state: empty family");
  const Index d = states.front().rows();
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (states[k].rows() != d) throw DomainError("build_dominating_state: states have different dimensions");
    require_density(states[k], "build_dominating_state");
    states[k] = hermitian_part(states[k]);
  }
  std::vector<double> w;
  if (weights) {
    w = *weights;
    if (w.size() != states.size()) throw DomainError("build_dominating_state: weight count mismatch");
    for (double x : w) {
      if (!(x > 0.0)) throw DomainError("build_dominating_state: weights must be positive");
    }
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    if (std::abs(s - 1.0) > 1e-9) throw DomainError("build_dominating_state: weights must sum to 1");
  } else {
    w.assign(states.size(), 1.0 / static_cast<double>(states.size()));
  }
  if (labels.empty()) {
    for (std::size_t k = 0; k < states.size(); ++k) labels.push_back("state" + std::to_string(k));
  }
  if (labels.size() != states.size()) throw DomainError("build_dominating_state: label count mismatch");

  Experiment exp;
  exp.dominating = Matrix::Zero(d, d);
  for (std::size_t k = 0; k < states.size(); ++k) exp.dominating += w[k] * states[k];
  exp.dominating = hermitian_part(exp.dominating);
  exp.states = std::move(states);
  exp.weights = std::move(w);
  exp.labels = std::move(labels);
  check_domination(exp);
  return exp;
}

Experiment with_dominating_state(Experiment exp, Matrix omega) {
  require_density(omega, "with_dominating_state");
  exp.dominating = hermitian_part(omega);
  exp.weights.clear();
  check_domination(exp);
  return exp;
}

CompressedExperiment compress_to_support(const Experiment& exp, double cutoff) {
  CompressedExperiment out;
  out.isometry = support_isometry(exp.dominating, cutoff);
  const Matrix& p = out.isometry;
  out.experiment.labels = exp.labels;
  out.experiment.weights = exp.weights;
  for (const Matrix& s : exp.states) {
    Matrix c = hermitian_part(p.adjoint() * s * p);
    c /= c.trace().real();
    out.experiment.states.push_back(std::move(c));
  }
  out.experiment.dominating = hermitian_part(p.adjoint() * exp.dominating * p);
  out.experiment.dominating /= out.experiment.dominating.trace().real();
  return out;
}

Matrix conditional_expectation(const MatrixStarAlgebra& a, const Matrix& x) { return a.project(x); }

namespace {

void require_faithful(const Matrix& d, const char* what) {
  if (support_rank(d) != d.rows()) {
    throw PreconditionError(std::string(what) +
                            ": state is not faithful; compress the experiment to its support first");
  }
}

}  // namespace

Matrix petz_conditional_expectation(const MatrixStarAlgebra& a, const Matrix& omega, const Matrix& x) {
  require_faithful(omega, "petz_conditional_expectation");
  const Matrix e_inv_sqrt = psd_power(a.project(omega), -0.5);
  const Matrix sqrt_d = psd_power(omega, 0.5);
  return e_inv_sqrt * a.project(sqrt_d * x * sqrt_d) * e_inv_sqrt;
}

Matrix petz_recovered_density(const MatrixStarAlgebra& a, const Matrix& omega, const Matrix& phi) {
  require_faithful(omega, "petz_recovered_density");
  const Matrix e_inv_sqrt = psd_power(a.project(omega), -0.5);
  const Matrix sqrt_d = psd_power(omega, 0.5);
  return hermitian_part(sqrt_d * e_inv_sqrt * a.project(phi) * e_inv_sqrt * sqrt_d);
}

Matrix pullback_density(const Channel& sigma, const Matrix& omega) {
  return hermitian_part(sigma.dual().apply(omega));
}

Channel petz_dual(const Channel& sigma, const Matrix& omega) {
  if (!sigma.is_unital(1e-9)) throw PreconditionError("petz_dual: channel is not unital");
  require_faithful(omega, "petz_dual");
  const Matrix pulled = pullback_density(sigma, omega);
  if (support_rank(pulled) != pulled.rows()) {
    throw PreconditionError("petz_dual: pulled-back state is not faithful; compress to its support first");
  }
  const Matrix left = psd_power(pulled, -0.5);
  const Matrix right = psd_power(omega, 0.5);
  std::vector<Matrix> kraus;
  kraus.reserve(sigma.kraus().size());
  for (const Matrix& v : sigma.kraus()) kraus.push_back(left * v.adjoint() * right);
  return Channel(std::move(kraus));
}

}  // namespace qsuff

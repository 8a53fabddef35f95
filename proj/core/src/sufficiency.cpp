#include "qsuff/sufficiency.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qsuff/errors.hpp"

namespace qsuff {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kSufficient:
      return "sufficient";
    case Verdict::kInsufficient:
      return "insufficient";
    case Verdict::kBorderline:
      return "borderline";
  }
  return "borderline";
}

const ConditionResult* SufficiencyVerdict::find(const std::string& label) const {
  for (const ConditionResult& c : conditions) {
    if (c.label == label) return &c;
  }
  return nullptr;
}

double SufficiencyVerdict::residual(const std::string& label) const {
  const ConditionResult* c = find(label);
  if (c == nullptr) throw std::out_of_range("no condition named " + label);
  return c->residual;
}

namespace {

bool is_faithful(const Matrix& d) { return support_rank(d) == d.rows(); }

Verdict classify(double r, double tol) {
  if (r < tol) return Verdict::kSufficient;
  if (r > 10.0 * tol) return Verdict::kInsufficient;
  return Verdict::kBorderline;
}

void finish(SufficiencyVerdict& v, double tol) {
  Verdict authoritative = Verdict::kBorderline;
  for (ConditionResult& c : v.conditions) {
    if (!c.evaluated) continue;
    c.verdict = classify(c.residual, tol);
    if (c.label == "petz_invariance") authoritative = c.verdict;
  }
  v.verdict = authoritative;
  for (const ConditionResult& c : v.conditions) {
    if (!c.evaluated || c.verdict == authoritative) continue;
    if (c.verdict == Verdict::kBorderline) {
      v.warnings.push_back(c.label + " is inside the borderline band");
    } else {
      v.verdict = Verdict::kBorderline;
    }
  }
}

bool all_equal_reference(const Experiment& exp) {
  for (const Matrix& s : exp.states) {
    if ((s - exp.dominating).norm() > 1e-12) return false;
  }
  return true;
}

void warn_conditioning(SufficiencyVerdict& v, const Matrix& omega) {
  const SpectralData sd = spectral(omega);
  const double lo = sd.eigenvalues(sd.eigenvalues.size() - 1);
  if (lo > 0.0 && sd.eigenvalues(0) / lo > 1e8) {
    std::ostringstream msg;
    msg << "reference state is ill-conditioned (condition number " << sd.eigenvalues(0) / lo << ")";
    v.warnings.push_back(msg.str());
  }
}

double entropy_difference(const Matrix& a1, const Matrix& a2, const Matrix& b1, const Matrix& b2) {
  const double s = relative_entropy(a1, a2);
  const double r = relative_entropy(b1, b2);
  if (std::isinf(s) && std::isinf(r)) return 0.0;
  return std::abs(s - r);
}

double petz_residual(const MatrixStarAlgebra& a, const Experiment& exp) {
  double worst = 0.0;
  for (const Matrix& d : exp.states) {
    worst = std::max(worst, (petz_recovered_density(a, exp.dominating, d) - d).norm());
  }
  return worst;
}

Experiment pulled_back(const Experiment& exp, const Channel& sigma) {
  Experiment out;
  out.labels = exp.labels;
  out.weights = exp.weights;
  for (const Matrix& s : exp.states) out.states.push_back(pullback_density(sigma, s));
  out.dominating = pullback_density(sigma, exp.dominating);
  return out;
}

// Coarse-graining qAq → pB(H)p, x ↦ p x p, written on block coordinates of A
// restricted to q = supp E_A(D_ω).
Channel compressed_embedding(const MatrixStarAlgebra& a, const Matrix& omega, const Matrix& p_iso,
                             std::uint64_t seed) {
  const BlockStructure bs = structure_decomposition(a, {seed, 5});
  const Matrix e_omega = a.project(omega);
  std::vector<Matrix> supports;
  Index total = 0;
  for (std::size_t n = 0; n < bs.blocks.size(); ++n) {
    const Block& b = bs.blocks[n];
    const std::array<Index, 2> dims{b.d, b.m};
    const std::array<Index, 1> keep{0};
    const Matrix y = hermitian_part(partial_trace(bs.block_of(n, e_omega), dims, keep));
    supports.push_back(support_isometry(y));
    total += supports.back().cols();
  }
  std::vector<Matrix> kraus;
  Index offset = 0;
  for (std::size_t n = 0; n < bs.blocks.size(); ++n) {
    const Block& b = bs.blocks[n];
    const Matrix& pi = supports[n];
    if (pi.cols() == 0) continue;
    const Matrix w = bs.isometry(n);
    for (Index k = 0; k < b.m; ++k) {
      Matrix sel = Matrix::Zero(b.d * b.m, total);
      for (Index j = 0; j < pi.cols(); ++j) {
        for (Index i = 0; i < b.d; ++i) sel(i * b.m + k, offset + j) = pi(i, j);
      }
      kraus.push_back(p_iso.adjoint() * w * sel);
    }
    offset += pi.cols();
  }
  return Channel(std::move(kraus));
}

}  // namespace

// ---------------------------------------------------------------------------
// Sufficiency tests

SufficiencyVerdict subalgebra_sufficiency(const Experiment& exp, const MatrixStarAlgebra& a,
                                          const SufficiencyOptions& opts) {
  if (a.ambient_dim() != exp.dim()) throw DomainError("subalgebra_sufficiency: algebra and states differ in dimension");
  if (!is_faithful(exp.dominating)) {
    const CompressedExperiment c = compress_to_support(exp);
    const Channel alpha = compressed_embedding(a, exp.dominating, c.isometry, opts.seed);
    SufficiencyVerdict v = channel_sufficiency(c.experiment, alpha, opts);
    v.compressed = true;
    v.trivial = all_equal_reference(exp);
    v.warnings.push_back("reference state not faithful; tested the compressed coarse-graining");
    return v;
  }

  SufficiencyVerdict v;
  v.trivial = all_equal_reference(exp);
  warn_conditioning(v, exp.dominating);
  const Matrix& omega = exp.dominating;
  const Matrix e_omega = hermitian_part(a.project(omega));

  std::vector<Matrix> omega_neg;
  std::vector<Matrix> e_omega_neg;
  for (double t : opts.t_grid) {
    omega_neg.push_back(imaginary_power(omega, -t));
    e_omega_neg.push_back(imaginary_power(e_omega, -t));
  }

  double membership = 0.0;
  double restriction = 0.0;
  double transition = 0.0;
  double entropy = 0.0;
  double petz = 0.0;
  for (const Matrix& d : exp.states) {
    const Matrix e_d = hermitian_part(a.project(d));
    transition = std::max(transition, std::abs(transition_probability(d, omega) - transition_probability(e_d, e_omega)));
    entropy = std::max(entropy, entropy_difference(d, omega, e_d, e_omega));
    petz = std::max(petz, (petz_recovered_density(a, omega, d) - d).norm());
    for (std::size_t k = 0; k < opts.t_grid.size(); ++k) {
      const double t = opts.t_grid[k];
      const Matrix u = imaginary_power(d, t) * omega_neg[k];
      membership = std::max(membership, a.residual(u));
      restriction = std::max(restriction, (u - imaginary_power(e_d, t) * e_omega_neg[k]).norm());
    }
  }
  v.conditions = {
      {"cocycle_membership", membership},
      {"cocycle_restriction", restriction},
      {"transition_probability", transition},
      {"relative_entropy", entropy},
      {"petz_invariance", petz},
  };
  finish(v, opts.tol);
  return v;
}

SufficiencyVerdict channel_sufficiency(const Experiment& exp, const Channel& sigma, const SufficiencyOptions& opts) {
  if (sigma.out_dim() != exp.dim()) throw DomainError("channel_sufficiency: channel output does not match the states");
  if (!sigma.is_unital(1e-9)) throw PreconditionError("channel_sufficiency: coarse-graining is not unital");

  const Matrix pulled_omega = pullback_density(sigma, exp.dominating);
  if (!is_faithful(exp.dominating) || !is_faithful(pulled_omega)) {
    const CompressedExperiment c = compress_to_support(exp);
    const Matrix q = support_isometry(pulled_omega);
    const Channel compressed = compress_channel(sigma, c.isometry, q);
    SufficiencyVerdict v = channel_sufficiency(c.experiment, compressed, opts);
    v.compressed = true;
    v.trivial = all_equal_reference(exp);
    v.warnings.push_back("states compressed to supp ω and supp ω∘σ");
    return v;
  }

  SufficiencyVerdict v;
  v.trivial = all_equal_reference(exp);
  warn_conditioning(v, exp.dominating);
  const Matrix& omega = exp.dominating;
  const Experiment pulled = pulled_back(exp, sigma);
  const Channel recovery = petz_dual(sigma, omega);
  const Channel recovery_dual = recovery.dual();

  std::vector<Matrix> omega_neg;
  std::vector<Matrix> pulled_neg;
  for (double t : opts.t_grid) {
    omega_neg.push_back(imaginary_power(omega, -t));
    pulled_neg.push_back(imaginary_power(pulled.dominating, -t));
  }

  double petz = 0.0;
  double transition = 0.0;
  double entropy = 0.0;
  double intertwining = 0.0;
  for (std::size_t j = 0; j < exp.size(); ++j) {
    const Matrix& d = exp.states[j];
    const Matrix& pd = pulled.states[j];
    petz = std::max(petz, (hermitian_part(recovery_dual.apply(pd)) - d).norm());
    transition = std::max(transition,
                          std::abs(transition_probability(d, omega) - transition_probability(pd, pulled.dominating)));
    entropy = std::max(entropy, entropy_difference(d, omega, pd, pulled.dominating));
    for (std::size_t k = 0; k < opts.t_grid.size(); ++k) {
      const double t = opts.t_grid[k];
      const Matrix un = imaginary_power(pd, t) * pulled_neg[k];
      const Matrix um = imaginary_power(d, t) * omega_neg[k];
      intertwining = std::max(intertwining, (sigma.apply(un) - um).norm());
    }
  }

  const MatrixStarAlgebra domain = multiplicative_domain(sigma);
  std::vector<Matrix> images;
  for (Index k = 0; k < domain.dimension(); ++k) images.push_back(sigma.apply(domain.element(k)));
  const MatrixStarAlgebra image = generate_algebra(images, exp.dim());
  const double domain_residual = petz_residual(image, exp);

  ConditionResult fixed{"fixed_point_sufficiency", 0.0};
  const FixedPointResult fp = fixed_point_algebra(recovery, &sigma);
  if (fp.spectral_gap > 1e-6) {
    fixed.residual = petz_residual(fp.algebra, exp);
  } else {
    fixed.evaluated = false;
    v.warnings.push_back("fixed-point algebra skipped: unit eigenspace not separated");
  }

  v.conditions = {
      {"petz_invariance", petz},
      {"transition_probability", transition},
      {"relative_entropy", entropy},
      {"cocycle_intertwining", intertwining},
      {"multiplicative_domain_sufficiency", domain_residual},
      fixed,
  };
  finish(v, opts.tol);
  return v;
}

// ---------------------------------------------------------------------------
// Minimal sufficient subalgebra

namespace {

std::vector<Matrix> cocycles(const Experiment& exp, const std::vector<double>& grid) {
  std::vector<Matrix> out;
  for (double t : grid) {
    const Matrix w = imaginary_power(exp.dominating, -t);
    for (const Matrix& d : exp.states) out.push_back(imaginary_power(d, t) * w);
  }
  return out;
}

// Generates from `gens`, then adds modular flows at grid points until the
// span stops growing.
MatrixStarAlgebra close_under_flow(std::vector<Matrix> gens, const Matrix& omega, const std::vector<double>& grid) {
  const Index d = omega.rows();
  MatrixStarAlgebra alg = generate_algebra(gens, d);
  std::vector<Matrix> unitaries;
  for (double t : grid) unitaries.push_back(imaginary_power(omega, t));
  for (;;) {
    std::vector<Matrix> missing;
    for (const Matrix& u : unitaries) {
      for (Index k = 0; k < alg.dimension(); ++k) {
        const Matrix x = u * alg.element(k) * u.adjoint();
        if (!alg.contains(x, 1e-8)) missing.push_back(x);
      }
    }
    if (missing.empty()) return alg;
    gens = alg.elements();
    gens.insert(gens.end(), missing.begin(), missing.end());
    const Index before = alg.dimension();
    alg = generate_algebra(gens, d);
    if (alg.dimension() == before) return alg;
  }
}

std::vector<double> refine(const std::vector<double>& grid) {
  std::set<double> pts(grid.begin(), grid.end());
  pts.insert(0.0);
  std::vector<double> sorted(pts.begin(), pts.end());
  std::vector<double> mids;
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    const double m = 0.5 * (sorted[k - 1] + sorted[k]);
    if (m != 0.0) mids.push_back(m);
  }
  return mids;
}

}  // namespace

MinimalAlgebraResult minimal_sufficient_algebra(const Experiment& exp, const SufficiencyOptions& opts) {
  if (!is_faithful(exp.dominating)) {
    throw PreconditionError("minimal_sufficient_algebra: reference state is not faithful; compress to its support first");
  }
  std::vector<double> grid = opts.t_grid;
  if (grid.empty()) throw DomainError("minimal_sufficient_algebra: empty t-grid");
  std::vector<Matrix> gens = cocycles(exp, grid);
  MatrixStarAlgebra alg = close_under_flow(gens, exp.dominating, grid);
  std::vector<std::string> log;

  for (int refinement = 0; refinement <= 3; ++refinement) {
    const std::vector<double> extra = refine(grid);
    const std::vector<Matrix> fresh = cocycles(exp, extra);
    double worst = 0.0;
    for (const Matrix& u : fresh) worst = std::max(worst, alg.residual(u) / std::max(1.0, u.norm()));
    for (double t : extra) {
      const Matrix u = imaginary_power(exp.dominating, t);
      for (Index k = 0; k < alg.dimension(); ++k) worst = std::max(worst, alg.residual(u * alg.element(k) * u.adjoint()));
    }
    std::ostringstream msg;
    msg << "grid of " << grid.size() << " points: dimension " << alg.dimension() << ", refinement residual " << worst;
    log.push_back(msg.str());
    if (worst <= 1e-8) return {std::move(alg), std::move(grid), refinement, std::move(log)};
    if (refinement == 3) break;
    grid.insert(grid.end(), extra.begin(), extra.end());
    std::sort(grid.begin(), grid.end());
    gens.insert(gens.end(), fresh.begin(), fresh.end());
    alg = close_under_flow(gens, exp.dominating, grid);
  }
  std::ostringstream msg;
  msg << "minimal_sufficient_algebra: span did not stabilize after 3 refinements";
  for (const std::string& line : log) msg << "; " << line;
  throw NonStabilizingError(msg.str());
}

// ---------------------------------------------------------------------------
// S-decomposition

namespace {

Matrix reduce(const Matrix& x, Index d, Index m, Index keep) {
  const std::array<Index, 2> dims{d, m};
  const std::array<Index, 1> k{keep};
  return hermitian_part(partial_trace(x, dims, k));
}

}  // namespace

SDecomposition s_decomposition(const Experiment& exp, const SufficiencyOptions& opts) {
  MinimalAlgebraResult minimal = minimal_sufficient_algebra(exp, opts);
  BlockStructure bs = structure_decomposition(minimal.algebra, {opts.seed, 5});
  SDecomposition out{std::move(minimal.algebra), std::move(bs), {}, 0.0, 0.0, 0.0};
  const BlockStructure& st = out.structure;

  for (std::size_t n = 0; n < st.blocks.size(); ++n) {
    const Block& b = st.blocks[n];
    SBlock blk;
    blk.d = b.d;
    blk.m = b.m;
    const Matrix xo = st.block_of(n, exp.dominating);
    const double so = xo.trace().real();
    blk.right = reduce(xo, b.d, b.m, 1) / so;
    blk.central = static_cast<double>(b.d * b.m) / so;
    for (const Matrix& dt : exp.states) {
      const Matrix x = st.block_of(n, dt);
      const double s = std::max(0.0, x.trace().real());
      blk.weights.push_back(s);
      const double direct = (dt * st.block_projections[n]).trace().real();
      out.weight_residual = std::max(out.weight_residual, std::abs(s - direct));
      if (s > 1e-12) {
        blk.left.push_back(reduce(x, b.d, b.m, 0) / s);
        out.right_factor_spread = std::max(out.right_factor_spread, (reduce(x, b.d, b.m, 1) / s - blk.right).norm());
      } else {
        blk.left.push_back(Matrix::Zero(b.d, b.d));
      }
    }
    out.blocks.push_back(std::move(blk));
  }
  for (std::size_t k = 0; k < exp.size(); ++k) {
    out.reconstruction_residual = std::max(out.reconstruction_residual, (reconstruct_state(out, k) - exp.states[k]).norm());
  }
  if (out.reconstruction_residual > 1e-8) {
    std::ostringstream msg;
    msg << "s_decomposition: reconstruction residual " << out.reconstruction_residual << " exceeds 1e-8";
    throw NumericalFailure(msg.str());
  }
  return out;
}

Matrix reconstruct_state(const SDecomposition& s, std::size_t k) {
  const Index dim = s.structure.ambient_dim();
  Matrix out = Matrix::Zero(dim, dim);
  for (std::size_t n = 0; n < s.blocks.size(); ++n) {
    const SBlock& b = s.blocks[n];
    const Matrix w = s.structure.isometry(n);
    out += b.weights.at(k) * w * kron(b.left.at(k), b.right) * w.adjoint();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Factorization

FactorizationResult factorization_check(const Experiment& exp, const MatrixStarAlgebra& a,
                                        const SufficiencyOptions& opts) {
  if (!is_faithful(exp.dominating)) throw PreconditionError("factorization_check: reference state is not faithful");
  const ModularInvariance inv = modular_invariance_check(a, exp.dominating, opts.t_grid);
  if (!inv.invariant) {
    std::ostringstream msg;
    msg << "factorization_check: subalgebra is not invariant under the modular group of the reference state"
        << " (deviation " << inv.max_deviation << ")";
    throw PreconditionError(msg.str());
  }
  const Matrix& omega = exp.dominating;
  const MatrixStarAlgebra comm = commutant(a, opts.seed);
  const MatrixStarAlgebra z = center(a, opts.seed);

  FactorizationResult out;
  const Matrix omega0 = hermitian_part(a.project(omega));
  out.commutant_factor = hermitian_part(comm.project(omega));
  out.central_factor =
      hermitian_part(z.project(pinv_on_support(omega0) * pinv_on_support(out.commutant_factor) * omega));
  const Matrix& d1 = out.commutant_factor;
  const Matrix& zc = out.central_factor;
  for (const Matrix& d : exp.states) {
    Matrix d0 = hermitian_part(a.project(d));
    out.product_residual = std::max(out.product_residual, (d - d0 * d1 * zc).norm());
    out.commutation_residual = std::max(
        {out.commutation_residual, (d0 * d1 - d1 * d0).norm(), (d0 * zc - zc * d0).norm(), (d1 * zc - zc * d1).norm()});
    out.theta_factors.push_back(std::move(d0));
  }
  out.verdict = subalgebra_sufficiency(exp, a, opts);
  return out;
}

LFactorReport decompose_L_factors(const Experiment& exp, const std::vector<Matrix>& l_factors, const Matrix& r,
                                  const SufficiencyOptions& opts) {
  const Index d = exp.dim();
  if (l_factors.size() != exp.size()) throw DomainError("decompose_L_factors: one factor per state is required");
  if (r.rows() != d || r.cols() != d) throw DomainError("decompose_L_factors: R has the wrong shape");
  require_psd(r, "decompose_L_factors: R");
  if (support_rank(r) != d) throw DomainError("decompose_L_factors: supp R is not the identity");
  for (std::size_t k = 0; k < exp.size(); ++k) {
    const Matrix& l = l_factors[k];
    if (l.rows() != d || l.cols() != d) throw DomainError("decompose_L_factors: factor has the wrong shape");
    const double scale = std::max(1.0, l.norm() * r.norm());
    if ((l * r - r * l).norm() > 1e-9 * scale) throw DomainError("decompose_L_factors: L_θ and R do not commute");
    if ((exp.states[k] - l * r).norm() > 1e-9 * scale) throw DomainError("decompose_L_factors: D_θ ≠ L_θ R");
  }
  if (!is_faithful(exp.dominating)) throw PreconditionError("decompose_L_factors: reference state is not faithful");

  LFactorReport out{generate_algebra(l_factors, d), Matrix(), 0.0, 0.0, 0.0, 0.0, 0.0, {}};
  out.verdict = subalgebra_sufficiency(exp, out.generated, opts);
  out.invariance_deviation = modular_invariance_check(out.generated, exp.dominating, opts.t_grid).max_deviation;
  const MinimalAlgebraResult minimal = minimal_sufficient_algebra(exp, opts);
  out.containment_residual = containment_residual(minimal.algebra, out.generated);

  const Matrix l_omega = exp.dominating * pinv_on_support(r);
  const Matrix s_omega = hermitian_part(minimal.algebra.project(exp.dominating));
  out.r0 = pinv_on_support(s_omega) * l_omega;
  out.membership_residual = out.generated.residual(out.r0) / std::max(1.0, out.r0.norm());
  for (std::size_t k = 0; k < exp.size(); ++k) {
    const Matrix s_theta = hermitian_part(minimal.algebra.project(exp.states[k]));
    out.factor_residual = std::max(out.factor_residual, (l_factors[k] - s_theta * out.r0).norm());
    out.commutation_residual = std::max(out.commutation_residual, (out.r0 * s_theta - s_theta * out.r0).norm());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kraus structure

ChannelStructure channel_structure(const Experiment& exp, const Channel& alpha, const SufficiencyOptions& opts) {
  if (!is_faithful(exp.dominating)) throw PreconditionError("channel_structure: reference state is not faithful");
  if (!is_faithful(pullback_density(alpha, exp.dominating))) {
    throw PreconditionError("channel_structure: pulled-back reference state is not faithful");
  }
  ChannelStructure out;
  out.verdict = channel_sufficiency(exp, alpha, opts);
  if (out.verdict.verdict == Verdict::kInsufficient) {
    std::ostringstream msg;
    msg << "channel_structure: coarse-graining is not sufficient (recovery residual "
        << out.verdict.residual("petz_invariance") << ")";
    throw InsufficientError(msg.str());
  }
  if (out.verdict.verdict == Verdict::kBorderline) {
    throw NumericalFailure("channel_structure: sufficiency verdict is borderline");
  }

  const MinimalAlgebraResult ms = minimal_sufficient_algebra(exp, opts);
  out.output_structure = structure_decomposition(ms.algebra, {opts.seed, 5});
  const Experiment pulled = pulled_back(exp, alpha);
  const MinimalAlgebraResult ns = minimal_sufficient_algebra(pulled, opts);
  out.input_structure = structure_decomposition(ns.algebra, {opts.seed, 5});
  const BlockStructure& hs = out.output_structure;
  const BlockStructure& ks = out.input_structure;
  if (hs.blocks.size() != ks.blocks.size()) {
    throw NumericalFailure("channel_structure: input and output block counts differ");
  }

  std::vector<Matrix> rebuilt(alpha.kraus().size(), Matrix::Zero(alpha.out_dim(), alpha.in_dim()));
  for (std::size_t k = 0; k < ks.blocks.size(); ++k) {
    const Matrix image = alpha.apply(ks.block_projections[k]);
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < hs.blocks.size(); ++n) {
      const double dist = (image - hs.block_projections[n]).norm();
      if (dist < best_dist) {
        best_dist = dist;
        best = n;
      }
    }
    out.projection_residual = std::max(out.projection_residual, best_dist);
    const Block& hb = hs.blocks[best];
    const Block& kb = ks.blocks[k];
    if (hb.d != kb.d) throw NumericalFailure("channel_structure: matched blocks have different factor sizes");

    ChannelBlock cb;
    cb.output_block = best;
    cb.input_block = k;
    cb.d = hb.d;
    cb.m_out = hb.m;
    cb.m_in = kb.m;
    const Matrix w = hs.isometry(best);
    const Matrix x = ks.isometry(k);

    std::vector<Matrix> y;
    for (Index i = 0; i < kb.d; ++i) {
      Matrix e = Matrix::Zero(kb.d, kb.d);
      e(i, 0) = 1.0;
      const Matrix unit = x * kron(e, Matrix::Identity(kb.m, kb.m)) * x.adjoint();
      const std::array<Index, 2> dims{hb.d, hb.m};
      const std::array<Index, 1> keep{0};
      y.push_back(partial_trace(w.adjoint() * alpha.apply(unit) * w, dims, keep) / static_cast<double>(hb.m));
    }
    const SpectralData top = spectral(hermitian_part(y[0]));
    const Vector u1 = top.eigenvectors.col(0) * std::sqrt(std::max(top.eigenvalues(0), 0.0));
    const double n1 = u1.squaredNorm();
    if (!(n1 > 0.5)) throw NumericalFailure("channel_structure: matrix unit image vanished");
    cb.unitary = Matrix(hb.d, hb.d);
    cb.unitary.col(0) = u1;
    for (Index i = 1; i < hb.d; ++i) cb.unitary.col(i) = y[static_cast<std::size_t>(i)] * u1 / n1;

    const Matrix lift = kron(cb.unitary.adjoint(), Matrix::Identity(hb.m, hb.m));
    Matrix sum = Matrix::Zero(hb.m, hb.m);
    for (std::size_t i = 0; i < alpha.kraus().size(); ++i) {
      const Matrix c = lift * w.adjoint() * alpha.kraus()[i] * x;
      Matrix l = Matrix::Zero(hb.m, kb.m);
      for (Index j = 0; j < hb.d; ++j) l += c.block(j * hb.m, j * kb.m, hb.m, kb.m);
      l /= static_cast<double>(hb.d);
      sum += l * l.adjoint();
      rebuilt[i] += w * kron(cb.unitary, l) * x.adjoint();
      cb.kraus.push_back(std::move(l));
    }
    cb.unitality_residual = (sum - Matrix::Identity(hb.m, hb.m)).norm();
    out.blocks.push_back(std::move(cb));
  }
  out.choi_distance = (choi_matrix(Channel(rebuilt)) - choi_matrix(alpha)).norm();
  if (out.choi_distance > 1e-8) {
    std::ostringstream msg;
    msg << "channel_structure: reassembled channel differs from the input (Choi distance " << out.choi_distance << ")";
    throw NumericalFailure(msg.str());
  }
  return out;
}

StatePreservingStructure state_preserving_structure(const Experiment& exp, const Channel& alpha,
                                                    const SufficiencyOptions& opts) {
  if (alpha.in_dim() != exp.dim() || alpha.out_dim() != exp.dim()) {
    throw DomainError("state_preserving_structure: channel must act on the state space");
  }
  StatePreservingStructure out;
  for (const Matrix& d : exp.states) {
    out.preservation_residual = std::max(out.preservation_residual, (pullback_density(alpha, d) - d).norm());
  }
  if (out.preservation_residual > 1e-9) {
    std::ostringstream msg;
    msg << "state_preserving_structure: channel does not fix the states (residual " << out.preservation_residual << ")";
    throw PreconditionError(msg.str());
  }
  out.decomposition = s_decomposition(exp, opts);
  const BlockStructure& st = out.decomposition.structure;
  std::vector<Matrix> rebuilt(alpha.kraus().size(), Matrix::Zero(exp.dim(), exp.dim()));
  double worst = out.decomposition.reconstruction_residual;
  for (std::size_t n = 0; n < st.blocks.size(); ++n) {
    const Block& b = st.blocks[n];
    const Matrix w = st.isometry(n);
    const Matrix& dr = out.decomposition.blocks[n].right;
    StatePreservingBlock blk;
    Matrix sum = Matrix::Zero(b.m, b.m);
    for (std::size_t i = 0; i < alpha.kraus().size(); ++i) {
      const Matrix c = w.adjoint() * alpha.kraus()[i] * w;
      const std::array<Index, 2> dims{b.d, b.m};
      const std::array<Index, 1> keep{1};
      Matrix l = partial_trace(c, dims, keep) / static_cast<double>(b.d);
      const Matrix form = kron(Matrix::Identity(b.d, b.d), l);
      blk.form_residual = std::max(blk.form_residual, (c - form).norm());
      blk.commutation_residual = std::max(blk.commutation_residual, (l * dr - dr * l).norm());
      sum += l * l.adjoint();
      rebuilt[i] += w * form * w.adjoint();
      blk.kraus.push_back(std::move(l));
    }
    blk.unitality_residual = (sum - Matrix::Identity(b.m, b.m)).norm();
    worst = std::max({worst, blk.form_residual, blk.commutation_residual, blk.unitality_residual});
    out.blocks.push_back(std::move(blk));
  }
  for (std::size_t i = 0; i < alpha.kraus().size(); ++i) {
    out.off_block_residual = std::max(out.off_block_residual, (alpha.kraus()[i] - rebuilt[i]).norm());
  }
  out.structured = std::max(worst, out.off_block_residual) <= 1e-8;
  return out;
}

}  // namespace qsuff

#include "qsuff/ssa.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qsuff/errors.hpp"
#include "qsuff/states.hpp"

namespace qsuff {

namespace {

constexpr double kPureTol = 1e-10;

Matrix marginal(const Matrix& rho, std::span<const Index> dims, std::initializer_list<Index> keep) {
  std::vector<Index> k(keep);
  return partial_trace(rho, dims, k);
}

// I_A ⊗ E ⊗ I_C where E: H^L ⊗ H^R → H_B is the block isometry.
Matrix lift(const Matrix& e, Index d_a, Index d_c) {
  return kron({Matrix::Identity(d_a, d_a), e, Matrix::Identity(d_c, d_c)});
}

}  // namespace

void require_tripartite(const Matrix& rho, const TripartiteDims& dims) {
  for (Index d : dims) {
    if (d < 1) throw DomainError("tripartite state: subsystem dimensions must be positive");
  }
  const Index total = dims[0] * dims[1] * dims[2];
  if (rho.rows() != total || rho.cols() != total) {
    std::ostringstream os;
    os << "tripartite state: expected " << total << "x" << total << ", got " << rho.rows() << "x" << rho.cols();
    throw DomainError(os.str());
  }
  require_density(rho, "tripartite state");
}

SsaGap ssa_gap(const Matrix& rho, const TripartiteDims& dims) {
  require_tripartite(rho, dims);
  const Matrix ab = marginal(rho, dims, {0, 1});
  const Matrix bc = marginal(rho, dims, {1, 2});
  const Matrix a = marginal(rho, dims, {0});
  const Matrix b = marginal(rho, dims, {1});

  SsaGap g;
  g.entropy_form = von_neumann_entropy(ab) + von_neumann_entropy(bc) - von_neumann_entropy(rho) -
                   von_neumann_entropy(b);
  g.relative_entropy_form = relative_entropy(rho, kron(a, bc)) - relative_entropy(ab, kron(a, b));
  g.discrepancy = std::abs(g.entropy_form - g.relative_entropy_form);
  return g;
}

Matrix build_ssa_equality_state(const std::vector<SsaComponent>& components, Index d_a, Index d_c) {
  if (components.empty()) throw DomainError("build_ssa_equality_state: no components");
  Index d_b = 0;
  double total = 0.0;
  for (const SsaComponent& c : components) {
    if (c.d_left < 1 || c.d_right < 1) throw DomainError("build_ssa_equality_state: block dimensions must be positive");
    if (c.left.rows() != d_a * c.d_left || c.right.rows() != c.d_right * d_c) {
      throw DomainError("build_ssa_equality_state: factor shape does not match its dimensions");
    }
    if (!(c.weight >= 0.0)) throw DomainError("build_ssa_equality_state: negative weight");
    require_density(c.left, "build_ssa_equality_state: left factor");
    require_density(c.right, "build_ssa_equality_state: right factor");
    d_b += c.d_left * c.d_right;
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-10) throw DomainError("build_ssa_equality_state: weights must sum to 1");

  const Index n = d_a * d_b * d_c;
  Matrix rho = Matrix::Zero(n, n);
  Index offset = 0;
  for (const SsaComponent& c : components) {
    const Index dim = c.d_left * c.d_right;
    Matrix e = Matrix::Zero(d_b, dim);
    e.block(offset, 0, dim, dim).setIdentity();
    const Matrix j = lift(e, d_a, d_c);
    rho += c.weight * j * kron(c.left, c.right) * j.adjoint();
    offset += dim;
  }
  return hermitian_part(rho);
}

Matrix reconstruct_ssa_state(const SsaStructure& s, const TripartiteDims& dims) {
  const Index n = dims[0] * dims[1] * dims[2];
  Matrix rho = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < s.components.size(); ++k) {
    const SsaComponent& c = s.components[k];
    const Matrix j = lift(s.b_structure.isometry(k), dims[0], dims[2]);
    rho += c.weight * j * kron(c.left, c.right) * j.adjoint();
  }
  return rho;
}

namespace {

// Schmidt route for pure states: ψ = Σ √(λᵢμⱼ) |aᵢ⟩|b_ij⟩|cⱼ⟩.
SsaStructure pure_structure(const Matrix& rho, const TripartiteDims& dims, double tol) {
  const Index da = dims[0], db = dims[1], dc = dims[2];
  const SpectralData full = spectral(rho);
  const Vector psi = full.eigenvectors.col(0);

  const SpectralData sa = spectral(marginal(rho, dims, {0}));
  const SpectralData sc = spectral(marginal(rho, dims, {2}));
  const Index ra = support_rank(marginal(rho, dims, {0}));
  const Index rc = support_rank(marginal(rho, dims, {2}));
  if (ra * rc > db) throw InsufficientError("ssa: not an equality case (Schmidt vectors do not fit in H_B)");

  // b_ij = (⟨aᵢ| ⊗ 1 ⊗ ⟨cⱼ|) ψ / √(λᵢ μⱼ), column index i·rc + j.
  Matrix bvecs(db, ra * rc);
  for (Index i = 0; i < ra; ++i) {
    for (Index j = 0; j < rc; ++j) {
      const double norm = std::sqrt(sa.eigenvalues(i) * sc.eigenvalues(j));
      Vector b = Vector::Zero(db);
      for (Index x = 0; x < da; ++x) {
        for (Index y = 0; y < db; ++y) {
          for (Index z = 0; z < dc; ++z) {
            b(y) += std::conj(sa.eigenvectors(x, i)) * std::conj(sc.eigenvectors(z, j)) * psi((x * db + y) * dc + z);
          }
        }
      }
      bvecs.col(i * rc + j) = b / norm;
    }
  }
  const double ortho = (bvecs.adjoint() * bvecs - Matrix::Identity(ra * rc, ra * rc)).norm();
  if (ortho > std::sqrt(tol)) {
    std::ostringstream os;
    os << "ssa: not an equality case (Schmidt vectors deviate from orthonormal by " << ortho << ")";
    throw InsufficientError(os.str());
  }

  // Unitary: the orthonormalized b_ij block, then its complement.
  Eigen::HouseholderQR<Matrix> qr(bvecs);
  Matrix q = qr.householderQ() * Matrix::Identity(db, db);
  Matrix u(db, db);
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(bvecs.adjoint() * bvecs);
    const Matrix inv_sqrt = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                            es.eigenvectors().adjoint();
    u.leftCols(ra * rc) = bvecs * inv_sqrt;
    u.rightCols(db - ra * rc) = q.rightCols(db - ra * rc);
  }

  SsaStructure s;
  s.pure_state_path = true;
  s.b_structure.unitary = u;
  s.b_structure.blocks = {Block{ra, rc, 0}};
  s.b_structure.block_projections = {u.leftCols(ra * rc) * u.leftCols(ra * rc).adjoint()};

  Vector left = Vector::Zero(da * ra);
  for (Index i = 0; i < ra; ++i) left += std::sqrt(sa.eigenvalues(i)) * kron(sa.eigenvectors.col(i), Matrix(Vector::Unit(ra, i)));
  Vector right = Vector::Zero(rc * dc);
  for (Index j = 0; j < rc; ++j) right += std::sqrt(sc.eigenvalues(j)) * kron(Matrix(Vector::Unit(rc, j)), sc.eigenvectors.col(j));

  SsaComponent c;
  c.weight = 1.0;
  c.d_left = ra;
  c.d_right = rc;
  c.left = left * left.adjoint();
  c.right = right * right.adjoint();
  s.components.push_back(std::move(c));
  return s;
}

// N_B = {b : D_BC^{it}(b⊗1)D_BC^{-it} = (D_B^{it} b D_B^{-it})⊗1 on the grid}.
MatrixStarAlgebra flow_compatible_algebra(const Matrix& bc, const Matrix& b, Index dc,
                                          const std::vector<double>& grid) {
  const Index db = b.rows();
  NullSpaceSolver solver(db * db);
  const Matrix ic = Matrix::Identity(dc, dc);
  for (double t : grid) {
    const Matrix ubc = imaginary_power(bc, t);
    const Matrix ub = imaginary_power(b, t);
    Matrix rows(db * db * dc * dc, db * db);
    for (Index col = 0; col < db; ++col) {
      for (Index row = 0; row < db; ++row) {
        Matrix e = Matrix::Zero(db, db);
        e(row, col) = 1.0;
        const Matrix lhs = ubc * kron(e, ic) * ubc.adjoint();
        const Matrix rhs = kron(ub * e * ub.adjoint(), ic);
        rows.col(col * db + row) = vec(lhs - rhs);
      }
    }
    solver.add(rows);
  }
  const Matrix basis = solver.solve(1e-8);
  if (basis.cols() == 0) throw NumericalFailure("ssa: compatible algebra on H_B is empty");
  return MatrixStarAlgebra(db, basis);
}

}  // namespace

SsaStructure ssa_equality_structure(const Matrix& rho, const TripartiteDims& dims, const SsaOptions& opts) {
  const SsaGap g = ssa_gap(rho, dims);
  if (g.entropy_form > opts.equality_tol) {
    std::ostringstream os;
    os << "ssa: not an equality case (gap " << g.entropy_form << ")";
    throw InsufficientError(os.str());
  }
  const Index da = dims[0], db = dims[1], dc = dims[2];
  const Index rank = support_rank(rho);
  const bool pure = rank == 1 && std::abs(spectral(rho).eigenvalues(0) - 1.0) < kPureTol;

  SsaStructure s;
  if (pure) {
    s = pure_structure(rho, dims, opts.equality_tol);
  } else {
    if (rank != rho.rows()) throw PreconditionError("ssa: state is not faithful; compress it to its support first (pure states are handled directly)");

    const MatrixStarAlgebra nb =
        flow_compatible_algebra(marginal(rho, dims, {1, 2}), marginal(rho, dims, {1}), dc, opts.t_grid);
    if (nb.closure_defect() > 1e-7) {
      std::ostringstream os;
      os << "ssa: compatible subspace on H_B is not an algebra (defect " << nb.closure_defect() << ")";
      throw NumericalFailure(os.str());
    }
    s.b_structure = structure_decomposition(nb, DecompositionOptions{opts.seed, 5});

    const std::array<Index, 4> split_dims{da, 0, 0, dc};
    for (std::size_t n = 0; n < s.b_structure.blocks.size(); ++n) {
      const Block& blk = s.b_structure.blocks[n];
      const Matrix j = lift(s.b_structure.isometry(n), da, dc);
      const Matrix x = j.adjoint() * rho * j;
      const double w = x.trace().real();
      const std::array<Index, 4> d4{split_dims[0], blk.d, blk.m, split_dims[3]};
      SsaComponent c;
      c.weight = w;
      c.d_left = blk.d;
      c.d_right = blk.m;
      if (w > 0.0) {
        c.left = hermitian_part(partial_trace(x, d4, std::array<Index, 2>{0, 1})) / w;
        c.right = hermitian_part(partial_trace(x, d4, std::array<Index, 2>{2, 3})) / w;
      } else {
        c.left = Matrix::Zero(da * blk.d, da * blk.d);
        c.right = Matrix::Zero(blk.m * dc, blk.m * dc);
      }
      s.components.push_back(std::move(c));
    }
  }

  s.gap = g.entropy_form;
  s.reconstruction_residual = (reconstruct_ssa_state(s, dims) - rho).norm();
  const Matrix rho_b = marginal(rho, dims, {1});
  for (std::size_t n = 0; n < s.components.size(); ++n) {
    const double pb = (s.b_structure.block_projections[n] * rho_b).trace().real();
    s.weight_residual = std::max(s.weight_residual, std::abs(pb - s.components[n].weight));
  }
  if (s.reconstruction_residual > opts.reconstruction_tol) {
    std::ostringstream os;
    os << "ssa: components reconstruct the state only to " << s.reconstruction_residual;
    throw NumericalFailure(os.str());
  }

  if (opts.cross_check) {
    const Matrix product = kron(marginal(rho, dims, {0}), marginal(rho, dims, {1, 2}));
    const Experiment exp = build_dominating_state({rho, product}, std::nullopt, {"omega_ABC", "omega_A x omega_BC"});
    SufficiencyOptions so;
    so.t_grid = opts.t_grid;
    so.seed = opts.seed;
    s.cross_check = subalgebra_sufficiency(exp, MatrixStarAlgebra::left_tensor_factor(da * db, dc), so);
  }
  return s;
}

}  // namespace qsuff

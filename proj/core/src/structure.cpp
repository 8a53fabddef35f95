#include "qsuff/algebra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

#include "qsuff/errors.hpp"

namespace qsuff {

Matrix BlockStructure::isometry(std::size_t n) const {
  const Block& b = blocks.at(n);
  return unitary.middleCols(b.offset, b.d * b.m);
}

Matrix BlockStructure::block_of(std::size_t n, const Matrix& x) const {
  const Matrix v = isometry(n);
  return v.adjoint() * x * v;
}

Index BlockStructure::algebra_dimension() const {
  Index s = 0;
  for (const Block& b : blocks) s += b.d * b.d;
  return s;
}

namespace {

// Groups a descending eigenvalue list into runs whose consecutive gaps are
// at most `tol`.
std::vector<std::vector<Index>> cluster_eigenvalues(const RealVector& evals, double tol) {
  std::vector<std::vector<Index>> clusters;
  for (Index k = 0; k < evals.size(); ++k) {
    if (clusters.empty() || evals(k - 1) - evals(k) > tol) clusters.emplace_back();
    clusters.back().push_back(k);
  }
  return clusters;
}

Matrix columns_of(const Matrix& vecs, const std::vector<Index>& idx) {
  Matrix out(vecs.rows(), static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Index>(j)) = vecs.col(idx[j]);
  return out;
}

struct FactorBlock {
  Block shape;
  Matrix columns;  // ambient coordinates, d*m of them
  double position = 0.0;
};

// Aligns p A p ≅ M_d ⊗ 1_m inside the range of the isometry `p`.
std::optional<FactorBlock> align_factor(const MatrixStarAlgebra& a, const Matrix& p, Rng& rng,
                                        std::string& why) {
  const Index r = p.cols();
  SpanBuilder span(r * r);
  std::vector<Matrix> compressed;
  for (Index k = 0; k < a.dimension(); ++k) {
    const Matrix c = p.adjoint() * a.element(k) * p;
    if (c.norm() < 1e-8) continue;
    if (span.add(vec(c), 1e-7, 1.0)) compressed.push_back(unvec(span.column(span.size() - 1), r));
  }
  const Index dim_block = span.size();
  const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(dim_block))));
  if (d * d != dim_block || r % d != 0) {
    why = "block algebra dimension is not a perfect square dividing the block rank";
    return std::nullopt;
  }
  const Index m = r / d;

  Matrix h = Matrix::Zero(r, r);
  Matrix x = Matrix::Zero(r, r);
  for (const Matrix& c : compressed) {
    h += rng.normal() * 0.5 * (c + c.adjoint()) + rng.normal() * 0.5 * Complex(0, 1) * (c - c.adjoint());
    x += rng.complex_normal() * c;
  }
  h = hermitian_part(h);
  const SpectralData sd = spectral(h);
  const double scale = std::max(1.0, sd.eigenvalues.cwiseAbs().maxCoeff());
  const auto clusters = cluster_eigenvalues(sd.eigenvalues, 1e-7 * scale);
  if (static_cast<Index>(clusters.size()) != d) {
    why = "generic block element has a degenerate spectrum";
    return std::nullopt;
  }
  for (const auto& c : clusters) {
    if (static_cast<Index>(c.size()) != m) {
      why = "eigenvalue multiplicities inside a block are unequal";
      return std::nullopt;
    }
  }

  std::vector<Matrix> f;
  for (const auto& c : clusters) f.push_back(columns_of(sd.eigenvectors, c));
  const Matrix e1 = f[0] * f[0].adjoint();
  FactorBlock out;
  out.shape = Block{d, m, 0};
  out.columns = Matrix(p.rows(), r);
  for (Index i = 0; i < d; ++i) {
    Matrix ei1;
    if (i == 0) {
      ei1 = e1;
    } else {
      const Matrix y = f[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(i)].adjoint() * x * e1;
      const double c2 = (y.adjoint() * y).trace().real() / static_cast<double>(m);
      if (!(c2 > 1e-16 * x.squaredNorm())) {
        why = "off-diagonal matrix unit vanished for the sampled element";
        return std::nullopt;
      }
      ei1 = y / std::sqrt(c2);
    }
    const Matrix cols = ei1 * f[0];
    out.columns.middleCols(i * m, m) = p * cols;
  }
  // Deterministic ordering key: centre of mass of the block over ambient indices.
  const RealVector weights = (out.columns.cwiseAbs2()).rowwise().sum();
  double pos = 0.0;
  for (Index k = 0; k < weights.size(); ++k) pos += static_cast<double>(k) * weights(k);
  out.position = pos / static_cast<double>(r);
  return out;
}

}  // namespace

BlockStructure structure_decomposition(const MatrixStarAlgebra& a, const DecompositionOptions& opts) {
  const Index dim = a.ambient_dim();
  const MatrixStarAlgebra z = center(a, opts.seed);
  std::ostringstream log;
  for (int attempt = 0; attempt < opts.attempts; ++attempt) {
    Rng rng(opts.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(attempt + 1));
    const Matrix zc = z.generic_self_adjoint(rng);
    const SpectralData sd = spectral(zc);
    const double scale = std::max(1.0, sd.eigenvalues.cwiseAbs().maxCoeff());
    auto clusters = cluster_eigenvalues(sd.eigenvalues, 1e-7 * scale);

    // The algebra's unit may be a proper projection; its complement shows up
    // as the cluster on which every central element vanishes.
    const Matrix unit = a.project(Matrix::Identity(dim, dim));
    std::vector<Matrix> supports;
    Matrix complement(dim, 0);
    for (const auto& c : clusters) {
      const Matrix cols = columns_of(sd.eigenvectors, c);
      const double inside = (cols.adjoint() * unit * cols).trace().real() / static_cast<double>(cols.cols());
      if (inside < 0.5) {
        complement = cols;
      } else {
        supports.push_back(cols);
      }
    }
    if (static_cast<Index>(supports.size()) != z.dimension()) {
      log << "attempt " << attempt << ": " << supports.size() << " central clusters for a center of dimension "
          << z.dimension() << "; ";
      continue;
    }

    std::vector<FactorBlock> factors;
    bool ok = true;
    for (const Matrix& p : supports) {
      std::string why;
      auto fb = align_factor(a, p, rng, why);
      if (!fb) {
        log << "attempt " << attempt << ": " << why << "; ";
        ok = false;
        break;
      }
      factors.push_back(std::move(*fb));
    }
    if (!ok) continue;
    std::stable_sort(factors.begin(), factors.end(), [](const FactorBlock& x, const FactorBlock& y) {
      if (x.shape.d != y.shape.d) return x.shape.d > y.shape.d;
      if (x.shape.m != y.shape.m) return x.shape.m > y.shape.m;
      return x.position < y.position;
    });

    BlockStructure bs;
    bs.unitary = Matrix(dim, dim);
    Index offset = 0;
    for (FactorBlock& f : factors) {
      f.shape.offset = offset;
      bs.unitary.middleCols(offset, f.columns.cols()) = f.columns;
      bs.block_projections.push_back(f.columns * f.columns.adjoint());
      bs.blocks.push_back(f.shape);
      offset += f.columns.cols();
    }
    if (offset + complement.cols() != dim) {
      log << "attempt " << attempt << ": block ranks do not add up; ";
      continue;
    }
    bs.unitary.rightCols(complement.cols()) = complement;

    const double unitarity = (bs.unitary.adjoint() * bs.unitary - Matrix::Identity(dim, dim)).norm();
    const double pattern = block_pattern_residual(a, bs);
    if (bs.algebra_dimension() != a.dimension() || unitarity > 1e-8 || pattern > 1e-8) {
      log << "attempt " << attempt << ": validation failed (Σd²=" << bs.algebra_dimension()
          << " vs " << a.dimension() << ", unitarity " << unitarity << ", pattern " << pattern << "); ";
      continue;
    }
    return bs;
  }
  throw NumericalFailure("structure_decomposition: " + log.str());
}

double block_pattern_residual(const MatrixStarAlgebra& a, const BlockStructure& bs) {
  double worst = 0.0;
  for (Index k = 0; k < a.dimension(); ++k) {
    const Matrix m = bs.unitary.adjoint() * a.element(k) * bs.unitary;
    Matrix expected = Matrix::Zero(m.rows(), m.cols());
    for (const Block& b : bs.blocks) {
      const Matrix sub = m.block(b.offset, b.offset, b.d * b.m, b.d * b.m);
      const std::array<Index, 2> dims{b.d, b.m};
      const std::array<Index, 1> keep{0};
      const Matrix x = partial_trace(sub, dims, keep) / static_cast<double>(b.m);
      expected.block(b.offset, b.offset, b.d * b.m, b.d * b.m) = kron(x, Matrix::Identity(b.m, b.m));
    }
    worst = std::max(worst, (m - expected).norm());
  }
  return worst;
}

MatrixStarAlgebra algebra_from_blocks(const BlockStructure& bs) {
  const Index dim = bs.ambient_dim();
  Matrix basis(dim * dim, bs.algebra_dimension());
  Index col = 0;
  for (std::size_t n = 0; n < bs.blocks.size(); ++n) {
    const Block& b = bs.blocks[n];
    const Matrix v = bs.isometry(n);
    const Matrix id = Matrix::Identity(b.m, b.m) / std::sqrt(static_cast<double>(b.m));
    for (Index j = 0; j < b.d; ++j) {
      for (Index i = 0; i < b.d; ++i) {
        Matrix e = Matrix::Zero(b.d, b.d);
        e(i, j) = 1.0;
        basis.col(col++) = vec(v * kron(e, id) * v.adjoint());
      }
    }
  }
  return MatrixStarAlgebra(dim, std::move(basis));
}

Channel embedding_channel(const BlockStructure& bs) {
  Index total = 0;
  for (const Block& b : bs.blocks) total += b.d;
  std::vector<Matrix> kraus;
  Index in_offset = 0;
  for (std::size_t n = 0; n < bs.blocks.size(); ++n) {
    const Block& b = bs.blocks[n];
    const Matrix v = bs.isometry(n);
    for (Index k = 0; k < b.m; ++k) {
      // V_n (I_d ⊗ |k⟩) composed with the selector of the n-th input block.
      Matrix sel = Matrix::Zero(b.d * b.m, total);
      for (Index i = 0; i < b.d; ++i) sel(i * b.m + k, in_offset + i) = 1.0;
      kraus.push_back(v * sel);
    }
    in_offset += b.d;
  }
  return Channel(std::move(kraus));
}

}  // namespace qsuff

#include "qsuff/random.hpp"

namespace qsuff {

Matrix random_ginibre(Index rows, Index cols, Rng& rng) {
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.complex_normal() / std::sqrt(2.0);
  }
  return g;
}

Matrix random_hermitian(Index d, Rng& rng) {
  const Matrix g = random_ginibre(d, d, rng);
  return 0.5 * (g + g.adjoint());
}

Matrix random_unitary(Index d, Rng& rng) {
  const Matrix g = random_ginibre(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < d; ++k) {
    const Complex rk = r(k, k);
    const double mag = std::abs(rk);
    if (mag > 0.0) q.col(k) *= rk / mag;
  }
  return q;
}

Matrix random_density(Index d, Rng& rng, Index rank) {
  if (rank < 0) rank = d;
  const Matrix g = random_ginibre(d, rank, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitian_part(rho);
}

RealVector random_probability(Index n, Rng& rng) {
  RealVector p(n);
  for (Index k = 0; k < n; ++k) p(k) = -std::log(1.0 - rng.uniform());
  return p / p.sum();
}

std::vector<Matrix> random_trace_preserving_kraus(Index in_dim, Index out_dim, Index count, Rng& rng) {
  // Isometry W: in -> out ⊗ count, split into blocks.
  const Matrix g = random_ginibre(out_dim * count, in_dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix w = qr.householderQ() * Matrix::Identity(out_dim * count, in_dim);
  std::vector<Matrix> kraus;
  kraus.reserve(static_cast<std::size_t>(count));
  for (Index k = 0; k < count; ++k) kraus.push_back(w.middleRows(k * out_dim, out_dim));
  return kraus;
}

}  // namespace qsuff

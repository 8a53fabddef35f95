#include "qsuff/channel.hpp"

#include <sstream>

#include "qsuff/errors.hpp"

namespace qsuff {

Channel::Channel(std::vector<Matrix> kraus) : kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw DomainError("Channel: empty Kraus list");
  out_dim_ = kraus_.front().rows();
  in_dim_ = kraus_.front().cols();
  if (out_dim_ == 0 || in_dim_ == 0) throw DomainError("Channel: zero-sized Kraus operator");
  for (const Matrix& v : kraus_) {
    if (v.rows() != out_dim_ || v.cols() != in_dim_) {
      throw DomainError("Channel: Kraus operators have inconsistent shapes");
    }
    if (!v.allFinite()) throw DomainError("Channel: non-finite Kraus entry");
  }
}

Channel Channel::identity(Index d) { return Channel({Matrix::Identity(d, d)}); }

Channel Channel::unitary(const Matrix& u) { return Channel({u}); }

Channel Channel::completely_depolarizing(Index d) {
  std::vector<Matrix> kraus;
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      Matrix k = Matrix::Zero(d, d);
      k(i, j) = s;
      kraus.push_back(std::move(k));
    }
  }
  return Channel(std::move(kraus));
}

Matrix Channel::apply(const Matrix& a) const {
  if (a.rows() != in_dim_ || a.cols() != in_dim_) {
    std::ostringstream msg;
    msg << "Channel::apply: expected " << in_dim_ << "x" << in_dim_ << " input, got " << a.rows()
        << "x" << a.cols();
    throw DomainError(msg.str());
  }
  Matrix out = Matrix::Zero(out_dim_, out_dim_);
  for (const Matrix& v : kraus_) out.noalias() += v * a * v.adjoint();
  return out;
}

Channel Channel::dual() const {
  std::vector<Matrix> k;
  k.reserve(kraus_.size());
  for (const Matrix& v : kraus_) k.push_back(v.adjoint());
  return Channel(std::move(k));
}

Matrix Channel::superoperator() const {
  Matrix s = Matrix::Zero(out_dim_ * out_dim_, in_dim_ * in_dim_);
  for (const Matrix& v : kraus_) s += kron(v.conjugate(), v);
  return s;
}

bool Channel::is_unital(double tol) const {
  Matrix s = Matrix::Zero(out_dim_, out_dim_);
  for (const Matrix& v : kraus_) s += v * v.adjoint();
  return (s - Matrix::Identity(out_dim_, out_dim_)).norm() <= tol;
}

bool Channel::is_trace_preserving(double tol) const {
  Matrix s = Matrix::Zero(in_dim_, in_dim_);
  for (const Matrix& v : kraus_) s += v.adjoint() * v;
  return (s - Matrix::Identity(in_dim_, in_dim_)).norm() <= tol;
}

Channel Channel::compose(const Channel& inner) const {
  if (inner.out_dim() != in_dim_) throw DomainError("Channel::compose: dimension mismatch");
  std::vector<Matrix> k;
  k.reserve(kraus_.size() * inner.kraus().size());
  for (const Matrix& a : kraus_) {
    for (const Matrix& b : inner.kraus()) k.push_back(a * b);
  }
  return Channel(std::move(k));
}

Matrix choi_of_map(const std::function<Matrix(const Matrix&)>& f, Index in_dim) {
  Matrix choi;
  for (Index i = 0; i < in_dim; ++i) {
    for (Index j = 0; j < in_dim; ++j) {
      Matrix e = Matrix::Zero(in_dim, in_dim);
      e(i, j) = 1.0;
      const Matrix fe = f(e);
      if (choi.size() == 0) choi = Matrix::Zero(in_dim * fe.rows(), in_dim * fe.cols());
      choi.block(i * fe.rows(), j * fe.cols(), fe.rows(), fe.cols()) = fe;
    }
  }
  return choi;
}

Matrix choi_matrix(const Channel& ch) {
  return choi_of_map([&](const Matrix& e) { return ch.apply(e); }, ch.in_dim());
}

Matrix schwarz_defect(const Channel& ch, const Matrix& a) {
  if (!ch.is_unital(1e-9)) throw PreconditionError("schwarz_defect: channel is not unital");
  const Matrix sa = ch.apply(a);
  return ch.apply(a.adjoint() * a) - sa.adjoint() * sa;
}

Channel compress_channel(const Channel& ch, const Matrix& out_isometry, const Matrix& in_isometry) {
  if (out_isometry.rows() != ch.out_dim() || in_isometry.rows() != ch.in_dim()) {
    throw DomainError("compress_channel: isometry dimensions do not match the channel");
  }
  std::vector<Matrix> k;
  k.reserve(ch.kraus().size());
  for (const Matrix& v : ch.kraus()) {
    Matrix c = out_isometry.adjoint() * v * in_isometry;
    if (c.norm() > 0.0) k.push_back(std::move(c));
  }
  if (k.empty()) k.push_back(Matrix::Zero(out_isometry.cols(), in_isometry.cols()));
  return Channel(std::move(k));
}

}  // namespace qsuff

#include "semigp/sigma_ops.hpp"

#include <cmath>

namespace semigp {

SigmaOps::SigmaOps(Allocation alloc) : alloc_(std::move(alloc)) {
  alloc_.validate();
  const int k = alloc_.k();
  d_inv_.resize(k);
  c_sqrt_.resize(k);
  for (int j = 0; j < k; ++j) {
    const double nj = static_cast<double>(alloc_.sizes[j]);
    d_inv_[j] = 1.0 / (1.0 + nj);
    c_sqrt_[j] = (1.0 - 1.0 / std::sqrt(1.0 + nj)) / nj;
  }
}

Eigen::VectorXd SigmaOps::inv_apply(const Eigen::VectorXd& v) const {
  if (v.size() != n()) throw SemigpError("sigma: vector length mismatch");
  Eigen::VectorXd csum = Eigen::VectorXd::Zero(k());
  for (int i = 0; i < n(); ++i) csum[alloc_.labels[i]] += v[i];
  Eigen::VectorXd out(v.size());
  for (int i = 0; i < n(); ++i) {
    const int j = alloc_.labels[i];
    out[i] = v[i] - d_inv_[j] * csum[j];
  }
  return out;
}

Eigen::VectorXd SigmaOps::inv_sqrt_apply(const Eigen::VectorXd& v) const {
  if (v.size() != n()) throw SemigpError("sigma: vector length mismatch");
  Eigen::VectorXd csum = Eigen::VectorXd::Zero(k());
  for (int i = 0; i < n(); ++i) csum[alloc_.labels[i]] += v[i];
  Eigen::VectorXd out(v.size());
  for (int i = 0; i < n(); ++i) {
    const int j = alloc_.labels[i];
    out[i] = v[i] - c_sqrt_[j] * csum[j];
  }
  return out;
}

Eigen::MatrixXd SigmaOps::inv_quadform(const Eigen::MatrixXd& X) const {
  if (X.rows() != n()) throw SemigpError("sigma: matrix row count mismatch");
  const int q = static_cast<int>(X.cols());
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(q, q);
  Eigen::MatrixXd csum = Eigen::MatrixXd::Zero(k(), q);
  for (int i = 0; i < n(); ++i) {
    const int j = alloc_.labels[i];
    for (int a = 0; a < q; ++a) {
      const double xa = X(i, a);
      csum(j, a) += xa;
      for (int b = 0; b <= a; ++b) gram(a, b) += xa * X(i, b);
    }
  }
  Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(q, q);
  for (int j = 0; j < k(); ++j)
    for (int a = 0; a < q; ++a)
      for (int b = 0; b <= a; ++b) corr(a, b) += d_inv_[j] * csum(j, a) * csum(j, b);
  Eigen::MatrixXd out = gram - corr;
  out.triangularView<Eigen::StrictlyUpper>() = out.transpose();
  return out;
}

Eigen::VectorXd SigmaOps::inv_cross(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) const {
  if (X.rows() != n() || y.size() != n())
    throw SemigpError("sigma: shape mismatch");
  const int q = static_cast<int>(X.cols());
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd ysum = Eigen::VectorXd::Zero(k());
  Eigen::MatrixXd xsum = Eigen::MatrixXd::Zero(k(), q);
  for (int i = 0; i < n(); ++i) {
    const int j = alloc_.labels[i];
    ysum[j] += y[i];
    for (int a = 0; a < q; ++a) {
      xsum(j, a) += X(i, a);
      xty[a] += X(i, a) * y[i];
    }
  }
  for (int j = 0; j < k(); ++j)
    for (int a = 0; a < q; ++a) xty[a] -= d_inv_[j] * xsum(j, a) * ysum[j];
  return xty;
}

double SigmaOps::inv_quad(const Eigen::VectorXd& v) const {
  if (v.size() != n()) throw SemigpError("sigma: vector length mismatch");
  double total = 0.0;
  Eigen::VectorXd csum = Eigen::VectorXd::Zero(k());
  for (int i = 0; i < n(); ++i) {
    csum[alloc_.labels[i]] += v[i];
    total += v[i] * v[i];
  }
  for (int j = 0; j < k(); ++j) total -= d_inv_[j] * csum[j] * csum[j];
  return total;
}

double SigmaOps::log_det() const {
  double s = 0.0;
  for (int sz : alloc_.sizes) s += std::log1p(static_cast<double>(sz));
  return s;
}

Eigen::MatrixXd SigmaOps::gram(const Eigen::MatrixXd& X) {
  const int q = static_cast<int>(X.cols());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(q, q);
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (int a = 0; a < q; ++a)
      for (int b = 0; b <= a; ++b) g(a, b) += X(i, a) * X(i, b);
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

}  // namespace semigp

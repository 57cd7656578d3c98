#ifndef SEMIGP_SIGMA_OPS_HPP
#define SEMIGP_SIGMA_OPS_HPP

#include <Eigen/Dense>

#include "semigp/types.hpp"

namespace semigp {

// Exact operations with Sigma_A = I + AA' for an allocation matrix A, using
// A'A = diag(n_j) and the block structure of AA'. Nothing here materializes
// an n x n matrix:
//
//   Sigma^-1      v = v - A diag(1/(1+n_j)) A' v
//   Sigma^-1/2    v = v - A diag(c_j) A' v,   c_j = (1 - (1+n_j)^-1/2) / n_j
//   log det Sigma   = sum_j log(1 + n_j)
//
// Applies cost O(n q) time and O(n + k) extra space.
class SigmaOps {
 public:
  explicit SigmaOps(Allocation alloc);

  const Allocation& alloc() const { return alloc_; }
  int n() const { return alloc_.n(); }
  int k() const { return alloc_.k(); }

  Eigen::VectorXd inv_apply(const Eigen::VectorXd& v) const;
  Eigen::VectorXd inv_sqrt_apply(const Eigen::VectorXd& v) const;

  // X' Sigma^-1 X, symmetric PSD, dominated by X'X in the PSD order.
  Eigen::MatrixXd inv_quadform(const Eigen::MatrixXd& X) const;
  // X' Sigma^-1 y
  Eigen::VectorXd inv_cross(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) const;
  // v' Sigma^-1 v
  double inv_quad(const Eigen::VectorXd& v) const;

  double log_det() const;

  // Plain X'X accumulated in the same index order as inv_quadform, so that
  // identities such as inv_quadform == 0.5 * gram hold exactly for the
  // identity allocation.
  static Eigen::MatrixXd gram(const Eigen::MatrixXd& X);

  const std::vector<double>& d_inv() const { return d_inv_; }
  const std::vector<double>& c_sqrt() const { return c_sqrt_; }

 private:
  Allocation alloc_;
  std::vector<double> d_inv_;   // 1/(1+n_j)
  std::vector<double> c_sqrt_;  // (1-(1+n_j)^-1/2)/n_j
};

}  // namespace semigp

#endif

#pragma once

#include <Eigen/Dense>

namespace immp {

/// Symmetric tridiagonal matrix: main diagonal and the (equal) off-diagonals.
struct Tridiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXd off;  // size n-1

  Eigen::Index size() const { return diag.size(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd to_dense() const;
};

/// Thomas algorithm for a general tridiagonal system.
/// sub[i] couples row i+1 to column i, sup[i] couples row i to column i+1.
Eigen::VectorXd thomas_solve(const Eigen::VectorXd& sub, const Eigen::VectorXd& diag,
                             const Eigen::VectorXd& sup, const Eigen::VectorXd& rhs);

/// LDL^T factorization of a symmetric tridiagonal matrix (no pivoting).
class TridiagonalLdlt {
 public:
  TridiagonalLdlt() = default;
  explicit TridiagonalLdlt(const Tridiagonal& t) { compute(t); }

  /// Returns false if a non-positive pivot shows up.
  bool compute(const Tridiagonal& t);
  bool positive() const { return positive_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  double log_det() const;

 private:
  Eigen::VectorXd d_;
  Eigen::VectorXd l_;
  bool positive_ = false;
};

}  // namespace immp

#pragma once

#include <Eigen/Dense>

#include "immp/tridiagonal.hpp"

namespace immp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Symmetric matrix with a diagonal fast path. Used for masses and dissipation.
class SymMatrix {
 public:
  SymMatrix() = default;
  static SymMatrix identity(Index n) { return diagonal(Vec::Ones(n)); }
  static SymMatrix scalar(Index n, double s) { return diagonal(Vec::Constant(n, s)); }
  static SymMatrix zero(Index n) { return diagonal(Vec::Zero(n)); }
  static SymMatrix diagonal(Vec d);
  static SymMatrix dense(Mat a);

  Index size() const { return diagonal_ ? diag_.size() : dense_.rows(); }
  bool is_diagonal() const { return diagonal_; }
  bool is_zero() const;
  const Vec& diagonal_values() const { return diag_; }

  Vec apply(const Vec& x) const;
  Mat apply(const Mat& x) const;
  /// Requires positive definiteness.
  Vec solve(const Vec& b) const;
  Mat to_dense() const;
  SymMatrix inverse() const;
  /// Symmetric positive semi-definite square root.
  SymMatrix sqrt() const;
  /// Lower Cholesky factor applied to x (L x with L L^T = A).
  Vec cholesky_apply(const Vec& x) const;
  double log_det() const;
  SymMatrix scaled(double s) const;
  SymMatrix plus(const SymMatrix& other, double s = 1.0) const;  // this + s*other
  /// Largest generalized eigenvalue of (other, this): max_x x^T other x / x^T this x.
  double max_generalized_eigenvalue(const SymMatrix& other) const;

 private:
  bool diagonal_ = true;
  Vec diag_;
  Mat dense_;
};

/// Constraint Jacobian (d x n, columns are the gradients of the constraints).
/// The first-difference form encodes xi_i(q) = q_{i+1} - q_i without storage.
class ConstraintJacobian {
 public:
  ConstraintJacobian() = default;
  static ConstraintJacobian dense(Mat j);
  static ConstraintJacobian first_difference(Index d);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  bool is_first_difference() const { return first_difference_; }
  const Mat& dense_values() const { return dense_; }

  Vec apply(const Vec& x) const;            // J x
  Vec apply_transpose(const Vec& v) const;  // J^T v
  Mat to_dense() const;

 private:
  bool first_difference_ = false;
  Index rows_ = 0;
  Index cols_ = 0;
  Mat dense_;
};

/// Factored symmetric positive definite n x n system, tridiagonal or dense.
class SpdSystem {
 public:
  SpdSystem() = default;
  /// J^T A J + c*C (C may be null). Tridiagonal when J is a first difference
  /// and A, C are diagonal.
  static SpdSystem jt_a_j(const ConstraintJacobian& j, const SymMatrix& a, const SymMatrix* c,
                          double c_scale, bool factor = true);
  static SpdSystem from_dense(Mat a, bool factor = true);
  static SpdSystem from_tridiagonal(Tridiagonal t, bool factor = true);

  Index size() const { return tri_ ? t_.size() : dense_.rows(); }
  bool is_tridiagonal() const { return tri_; }
  bool factored() const { return factored_; }
  bool positive() const { return positive_; }
  Vec apply(const Vec& x) const;
  Vec solve(const Vec& b) const;
  Mat solve(const Mat& b) const;
  double log_det() const;
  double condition_estimate() const;
  Mat to_dense() const;
  const Tridiagonal& tridiagonal() const { return t_; }

 private:
  void factor();
  bool tri_ = false;
  bool factored_ = false;
  bool positive_ = false;
  Tridiagonal t_;
  TridiagonalLdlt tf_;
  Mat dense_;
  Eigen::LLT<Mat> llt_;
};

}  // namespace immp

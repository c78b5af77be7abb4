#include "immp/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace immp {

SymMatrix SymMatrix::diagonal(Vec d) {
  SymMatrix m;
  m.diagonal_ = true;
  m.diag_ = std::move(d);
  return m;
}

SymMatrix SymMatrix::dense(Mat a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("SymMatrix: not square");
  SymMatrix m;
  m.diagonal_ = false;
  m.dense_ = 0.5 * (a + a.transpose());
  return m;
}

bool SymMatrix::is_zero() const {
  return diagonal_ ? (diag_.array() == 0.0).all() : (dense_.array() == 0.0).all();
}

Vec SymMatrix::apply(const Vec& x) const {
  return diagonal_ ? Vec(diag_.cwiseProduct(x)) : Vec(dense_ * x);
}

Mat SymMatrix::apply(const Mat& x) const {
  return diagonal_ ? Mat(diag_.asDiagonal() * x) : Mat(dense_ * x);
}

Vec SymMatrix::solve(const Vec& b) const {
  if (diagonal_) return b.cwiseQuotient(diag_);
  Eigen::LLT<Mat> llt(dense_);
  if (llt.info() != Eigen::Success) throw std::runtime_error("SymMatrix::solve: not positive definite");
  return llt.solve(b);
}

Mat SymMatrix::to_dense() const { return diagonal_ ? Mat(diag_.asDiagonal()) : dense_; }

SymMatrix SymMatrix::inverse() const {
  if (diagonal_) return diagonal(diag_.cwiseInverse());
  Eigen::LLT<Mat> llt(dense_);
  if (llt.info() != Eigen::Success) throw std::runtime_error("SymMatrix::inverse: not positive definite");
  return dense(llt.solve(Mat::Identity(dense_.rows(), dense_.cols())));
}

SymMatrix SymMatrix::sqrt() const {
  if (diagonal_) {
    if ((diag_.array() < 0.0).any()) throw std::invalid_argument("SymMatrix::sqrt: negative entry");
    return diagonal(diag_.cwiseSqrt());
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(dense_);
  Vec ev = es.eigenvalues();
  const double tol = 1e-14 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -tol) throw std::invalid_argument("SymMatrix::sqrt: not positive semi-definite");
    ev[i] = std::sqrt(std::max(ev[i], 0.0));
  }
  return dense(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
}

Vec SymMatrix::cholesky_apply(const Vec& x) const {
  if (diagonal_) return diag_.cwiseSqrt().cwiseProduct(x);
  Eigen::LLT<Mat> llt(dense_);
  if (llt.info() != Eigen::Success) throw std::runtime_error("SymMatrix: not positive definite");
  return llt.matrixL() * x;
}

double SymMatrix::log_det() const {
  if (diagonal_) return diag_.array().log().sum();
  Eigen::LLT<Mat> llt(dense_);
  if (llt.info() != Eigen::Success) throw std::runtime_error("SymMatrix: not positive definite");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

SymMatrix SymMatrix::scaled(double s) const {
  return diagonal_ ? diagonal(s * diag_) : dense(s * dense_);
}

SymMatrix SymMatrix::plus(const SymMatrix& other, double s) const {
  if (size() != other.size()) throw std::invalid_argument("SymMatrix::plus: size mismatch");
  if (diagonal_ && other.diagonal_) return diagonal(diag_ + s * other.diag_);
  return dense(to_dense() + s * other.to_dense());
}

double SymMatrix::max_generalized_eigenvalue(const SymMatrix& other) const {
  if (size() == 0) return 0.0;
  if (diagonal_ && other.diagonal_) return other.diag_.cwiseQuotient(diag_).maxCoeff();
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(other.to_dense(), to_dense(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

ConstraintJacobian ConstraintJacobian::dense(Mat j) {
  ConstraintJacobian c;
  c.rows_ = j.rows();
  c.cols_ = j.cols();
  c.dense_ = std::move(j);
  return c;
}

ConstraintJacobian ConstraintJacobian::first_difference(Index d) {
  ConstraintJacobian c;
  c.first_difference_ = true;
  c.rows_ = d;
  c.cols_ = d > 0 ? d - 1 : 0;
  return c;
}

Vec ConstraintJacobian::apply(const Vec& x) const {
  if (!first_difference_) return dense_ * x;
  Vec y = Vec::Zero(rows_);
  for (Index i = 0; i < cols_; ++i) {
    y[i] -= x[i];
    y[i + 1] += x[i];
  }
  return y;
}

Vec ConstraintJacobian::apply_transpose(const Vec& v) const {
  if (!first_difference_) return dense_.transpose() * v;
  Vec y(cols_);
  for (Index i = 0; i < cols_; ++i) y[i] = v[i + 1] - v[i];
  return y;
}

Mat ConstraintJacobian::to_dense() const {
  if (!first_difference_) return dense_;
  Mat j = Mat::Zero(rows_, cols_);
  for (Index i = 0; i < cols_; ++i) {
    j(i, i) = -1.0;
    j(i + 1, i) = 1.0;
  }
  return j;
}

SpdSystem SpdSystem::jt_a_j(const ConstraintJacobian& j, const SymMatrix& a, const SymMatrix* c,
                            double c_scale, bool factor) {
  const Index n = j.cols();
  const bool use_c = c != nullptr && c_scale != 0.0;
  if (j.is_first_difference() && a.is_diagonal() && (!use_c || c->is_diagonal())) {
    const Vec& w = a.diagonal_values();
    Tridiagonal t;
    t.diag.resize(n);
    t.off.resize(n > 0 ? n - 1 : 0);
    for (Index i = 0; i < n; ++i) t.diag[i] = w[i] + w[i + 1];
    for (Index i = 0; i + 1 < n; ++i) t.off[i] = -w[i + 1];
    if (use_c) t.diag += c_scale * c->diagonal_values();
    return from_tridiagonal(std::move(t), factor);
  }
  const Mat jd = j.to_dense();
  Mat g = jd.transpose() * a.apply(jd);
  if (use_c) g += c_scale * c->to_dense();
  return from_dense(std::move(g), factor);
}

SpdSystem SpdSystem::from_dense(Mat a, bool factor) {
  SpdSystem s;
  s.tri_ = false;
  s.dense_ = 0.5 * (a + a.transpose());
  if (factor) s.factor();
  return s;
}

SpdSystem SpdSystem::from_tridiagonal(Tridiagonal t, bool factor) {
  SpdSystem s;
  s.tri_ = true;
  s.t_ = std::move(t);
  if (factor) s.factor();
  return s;
}

void SpdSystem::factor() {
  factored_ = true;
  if (tri_) {
    positive_ = tf_.compute(t_);
  } else {
    llt_.compute(dense_);
    positive_ = llt_.info() == Eigen::Success && dense_.allFinite();
  }
}

Vec SpdSystem::apply(const Vec& x) const { return tri_ ? t_.apply(x) : Vec(dense_ * x); }

Vec SpdSystem::solve(const Vec& b) const {
  if (!factored_ || !positive_) throw std::runtime_error("SpdSystem::solve: no valid factorization");
  return tri_ ? tf_.solve(b) : Vec(llt_.solve(b));
}

Mat SpdSystem::solve(const Mat& b) const {
  if (!factored_ || !positive_) throw std::runtime_error("SpdSystem::solve: no valid factorization");
  if (!tri_) return llt_.solve(b);
  Mat x(b.rows(), b.cols());
  for (Index k = 0; k < b.cols(); ++k) x.col(k) = tf_.solve(b.col(k));
  return x;
}

double SpdSystem::log_det() const {
  if (!factored_ || !positive_) throw std::runtime_error("SpdSystem::log_det: no valid factorization");
  if (size() == 0) return 0.0;
  return tri_ ? tf_.log_det() : 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

double SpdSystem::condition_estimate() const {
  const Index n = size();
  if (n == 0) return 1.0;
  if (!tri_) {
    Eigen::SelfAdjointEigenSolver<Mat> es(dense_, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  }
  if (!positive_) return std::numeric_limits<double>::infinity();
  // Gershgorin bound for the top, a few inverse iterations for the bottom.
  double hi = 0.0;
  for (Index i = 0; i < n; ++i) {
    double r = std::abs(t_.diag[i]);
    if (i > 0) r += std::abs(t_.off[i - 1]);
    if (i + 1 < n) r += std::abs(t_.off[i]);
    hi = std::max(hi, r);
  }
  Vec x = Vec::Ones(n);
  for (Index i = 0; i < n; i += 2) x[i] = 0.5;
  x.normalize();
  double rq = 0.0;
  for (int it = 0; it < 3; ++it) {
    x = tf_.solve(x);
    x.normalize();
    rq = x.dot(t_.apply(x));
  }
  return rq > 0.0 ? hi / rq : std::numeric_limits<double>::infinity();
}

Mat SpdSystem::to_dense() const { return tri_ ? t_.to_dense() : dense_; }

}  // namespace immp

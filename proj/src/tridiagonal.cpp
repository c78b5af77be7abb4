#include "immp/tridiagonal.hpp"

#include <cmath>
#include <stdexcept>

namespace immp {

Eigen::VectorXd Tridiagonal::apply(const Eigen::VectorXd& x) const {
  const Eigen::Index n = diag.size();
  Eigen::VectorXd y = diag.cwiseProduct(x);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    y[i] += off[i] * x[i + 1];
    y[i + 1] += off[i] * x[i];
  }
  return y;
}

Eigen::MatrixXd Tridiagonal::to_dense() const {
  const Eigen::Index n = diag.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) a(i, i) = diag[i];
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    a(i, i + 1) = off[i];
    a(i + 1, i) = off[i];
  }
  return a;
}

Eigen::VectorXd thomas_solve(const Eigen::VectorXd& sub, const Eigen::VectorXd& diag,
                             const Eigen::VectorXd& sup, const Eigen::VectorXd& rhs) {
  const Eigen::Index n = diag.size();
  if (rhs.size() != n || (n > 0 && (sub.size() != n - 1 || sup.size() != n - 1)))
    throw std::invalid_argument("thomas_solve: size mismatch");
  if (n == 0) return {};
  Eigen::VectorXd c(n), x(n);
  double b = diag[0];
  x[0] = rhs[0] / b;
  for (Eigen::Index i = 1; i < n; ++i) {
    c[i - 1] = sup[i - 1] / b;
    b = diag[i] - sub[i - 1] * c[i - 1];
    x[i] = (rhs[i] - sub[i - 1] * x[i - 1]) / b;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) x[i] -= c[i] * x[i + 1];
  return x;
}

bool TridiagonalLdlt::compute(const Tridiagonal& t) {
  const Eigen::Index n = t.size();
  d_.resize(n);
  l_.resize(n > 0 ? n - 1 : 0);
  positive_ = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    double di = t.diag[i];
    if (i > 0) {
      l_[i - 1] = t.off[i - 1] / d_[i - 1];
      di -= l_[i - 1] * t.off[i - 1];
    }
    d_[i] = di;
    if (!(di > 0.0) || !std::isfinite(di)) positive_ = false;
  }
  return positive_;
}

Eigen::VectorXd TridiagonalLdlt::solve(const Eigen::VectorXd& b) const {
  const Eigen::Index n = d_.size();
  Eigen::VectorXd x = b;
  for (Eigen::Index i = 1; i < n; ++i) x[i] -= l_[i - 1] * x[i - 1];
  for (Eigen::Index i = 0; i < n; ++i) x[i] /= d_[i];
  for (Eigen::Index i = n - 2; i >= 0; --i) x[i] -= l_[i] * x[i + 1];
  return x;
}

double TridiagonalLdlt::log_det() const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < d_.size(); ++i) s += std::log(d_[i]);
  return s;
}

}  // namespace immp

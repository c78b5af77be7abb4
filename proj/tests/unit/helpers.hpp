#pragma once

#include <functional>
#include <random>

#include "immp/model.hpp"

namespace immp::testing {

inline Mat random_spd(Index n, std::mt19937_64& g, double shift = 0.5) {
  std::normal_distribution<double> nd;
  Mat a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = nd(g);
  return a * a.transpose() + shift * Mat::Identity(n, n);
}

inline Mat random_matrix(Index r, Index c, std::mt19937_64& g) {
  std::normal_distribution<double> nd;
  Mat a(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) a(i, j) = nd(g);
  return a;
}

inline Vec random_vec(Index n, std::mt19937_64& g) {
  std::normal_distribution<double> nd;
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = nd(g);
  return v;
}

/// xi(q) = A q with jac columns = rows of A; zero potential unless given.
inline SystemModel linear_model(const Mat& A, SymMatrix M, SymMatrix Mz,
                                std::function<double(const Vec&)> V = nullptr,
                                std::function<Vec(const Vec&)> gradV = nullptr) {
  SystemModel m;
  m.name = "linear";
  m.dim = A.cols();
  m.n_constraints = A.rows();
  const Index d = A.cols();
  m.potential = V ? V : [](const Vec&) { return 0.0; };
  m.grad_potential = gradV ? gradV : [d](const Vec&) { return Vec(Vec::Zero(d)); };
  m.xi = [A](const Vec& q) { return Vec(A * q); };
  m.jac_xi = [A](const Vec&) { return ConstraintJacobian::dense(A.transpose()); };
  m.hess_xi_contract = [d](const Vec&, const Mat&) { return Vec(Vec::Zero(d)); };
  m.linear_constraints = true;
  m.mass = std::move(M);
  m.mass_z = std::move(Mz);
  return m;
}

/// Smooth nonlinear constraints xi_k(q) = a_k.q + 1/2 q^T B_k q + 0.3 sin(c_k.q).
struct SmoothConstraints {
  Mat A;                 // n x d
  std::vector<Mat> B;    // n of d x d symmetric
  Mat C;                 // n x d

  SmoothConstraints(Index d, Index n, std::mt19937_64& g) : A(random_matrix(n, d, g)), C(random_matrix(n, d, g)) {
    for (Index k = 0; k < n; ++k) {
      Mat b = 0.2 * random_matrix(d, d, g);
      B.push_back(b + b.transpose());
    }
    C *= 0.5;
  }
  Vec xi(const Vec& q) const {
    Vec x(A.rows());
    for (Index k = 0; k < A.rows(); ++k)
      x[k] = A.row(k).dot(q) + 0.5 * q.dot(B[k] * q) + 0.3 * std::sin(C.row(k).dot(q));
    return x;
  }
  Mat jac(const Vec& q) const {
    Mat j(A.cols(), A.rows());
    for (Index k = 0; k < A.rows(); ++k)
      j.col(k) = A.row(k).transpose() + B[k] * q + 0.3 * std::cos(C.row(k).dot(q)) * C.row(k).transpose();
    return j;
  }
  Vec hess_contract(const Vec& q, const Mat& w) const {
    Vec out = Vec::Zero(A.cols());
    for (Index k = 0; k < A.rows(); ++k) {
      const Vec c = C.row(k).transpose();
      out += B[k] * w.col(k) - 0.3 * std::sin(c.dot(q)) * c * c.dot(w.col(k));
    }
    return out;
  }
};

inline SystemModel smooth_model(const SmoothConstraints& sc, SymMatrix M, SymMatrix Mz) {
  SystemModel m;
  m.name = "smooth";
  m.dim = sc.A.cols();
  m.n_constraints = sc.A.rows();
  const Index d = m.dim;
  m.potential = [](const Vec& q) { return 0.5 * q.squaredNorm(); };
  m.grad_potential = [](const Vec& q) { return q; };
  m.xi = [sc](const Vec& q) { return sc.xi(q); };
  m.jac_xi = [sc](const Vec& q) { return ConstraintJacobian::dense(sc.jac(q)); };
  m.hess_xi_contract = [sc](const Vec& q, const Mat& w) { return sc.hess_contract(q, w); };
  (void)d;
  m.mass = std::move(M);
  m.mass_z = std::move(Mz);
  return m;
}

inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& q, double h = 1e-5) {
  Vec g(q.size());
  for (Index i = 0; i < q.size(); ++i) {
    Vec a = q, b = q;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

}  // namespace immp::testing

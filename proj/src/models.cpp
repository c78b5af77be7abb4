#include "immp/models.hpp"

#include <cmath>

namespace immp {

double double_well_potential(double q) {
  const double u = q * q - 1.0;
  return u * u;
}

SystemModel double_well_model() {
  SystemModel m;
  m.name = "double_well";
  m.dim = 1;
  m.n_constraints = 1;
  m.potential = [](const Vec& q) { return double_well_potential(q[0]); };
  m.grad_potential = [](const Vec& q) { return Vec::Constant(1, 4.0 * q[0] * (q[0] * q[0] - 1.0)); };
  m.xi = [](const Vec& q) { return q; };
  m.jac_xi = [](const Vec&) { return ConstraintJacobian::dense(Mat::Identity(1, 1)); };
  m.hess_xi_contract = [](const Vec&, const Mat&) { return Vec(Vec::Zero(1)); };
  m.linear_constraints = true;
  m.mass = SymMatrix::identity(1);
  m.mass_z = SymMatrix::identity(1);
  return m;
}

double SlowPotential::value(double theta) const { return a1 * std::cos(theta) + a2 * std::cos(2.0 * theta); }

double SlowPotential::derivative(double theta) const {
  return -a1 * std::sin(theta) - 2.0 * a2 * std::sin(2.0 * theta);
}

double polar_angle(const Vec& q) { return std::atan2(q[1], q[0]); }

SystemModel circle_model(const SlowPotential& slow, double kappa) {
  SystemModel m;
  m.name = "circle";
  m.dim = 2;
  m.n_constraints = 1;
  auto xi = [](const Vec& q) { return q.squaredNorm() - 1.0; };
  m.potential = [=](const Vec& q) {
    const double x = xi(q);
    return slow.value(polar_angle(q)) + 0.5 * kappa * x * x;
  };
  m.grad_potential = [=](const Vec& q) {
    const double r2 = q.squaredNorm();
    Vec dtheta(2);
    dtheta << -q[1] / r2, q[0] / r2;
    return Vec(slow.derivative(polar_angle(q)) * dtheta + kappa * xi(q) * 2.0 * q);
  };
  m.xi = [=](const Vec& q) { return Vec::Constant(1, xi(q)); };
  m.jac_xi = [](const Vec& q) { return ConstraintJacobian::dense(Mat(2.0 * q)); };
  m.hess_xi_contract = [](const Vec&, const Mat& w) { return Vec(2.0 * w.col(0)); };
  m.mass = SymMatrix::identity(2);
  m.mass_z = SymMatrix::identity(1);
  return m;
}

}  // namespace immp

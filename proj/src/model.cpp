#include "immp/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "immp/errors.hpp"
#include "immp/geometry.hpp"

namespace immp {

void SystemModel::validate() const {
  if (dim <= 0) throw std::invalid_argument("SystemModel: dim must be positive");
  if (n_constraints < 0 || n_constraints > dim) throw std::invalid_argument("SystemModel: need 0 <= n <= d");
  if (!potential || !grad_potential) throw std::invalid_argument("SystemModel: potential callables missing");
  if (n_constraints > 0 && (!xi || !jac_xi)) throw std::invalid_argument("SystemModel: constraint callables missing");
  if (mass.size() != dim) throw std::invalid_argument("SystemModel: mass has wrong size");
  if (mass_z.size() != n_constraints) throw std::invalid_argument("SystemModel: mass_z has wrong size");
  if (coupling && (!coupling->value || !coupling->grad_q || !coupling->grad_z))
    throw std::invalid_argument("SystemModel: incomplete coupling potential");
}

PenaltyConfig PenaltyConfig::fixed(double nu) {
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw std::invalid_argument("PenaltyConfig: nu must be finite and >= 0");
  PenaltyConfig p;
  p.rule_ = Rule::fixed;
  p.nu_ = nu;
  return p;
}

PenaltyConfig PenaltyConfig::timestep_scaled(double nubar, double dt, double k) {
  if (!(k > 0.0) || !(dt > 0.0)) throw std::invalid_argument("PenaltyConfig: need k > 0 and dt > 0");
  PenaltyConfig p = fixed(nubar * std::pow(dt, k));
  p.rule_ = Rule::timestep_scaled;
  return p;
}

PenaltyConfig PenaltyConfig::stiffness_scaled(double nubar, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("PenaltyConfig: eps must be positive");
  PenaltyConfig p = fixed(nubar / eps);
  p.rule_ = Rule::stiffness_scaled;
  return p;
}

PenaltyConfig PenaltyConfig::infinite() {
  PenaltyConfig p;
  p.rule_ = Rule::infinite;
  p.nu_ = std::numeric_limits<double>::infinity();
  return p;
}

double PenaltyConfig::nu() const {
  if (is_infinite()) throw std::logic_error("PenaltyConfig: nu is infinite");
  return nu_;
}

double PenaltyConfig::inverse() const {
  if (is_infinite()) return 0.0;
  return nu_ > 0.0 ? 1.0 / nu_ : std::numeric_limits<double>::infinity();
}

ThermostatConfig::ThermostatConfig(double beta, SymMatrix gamma, SymMatrix gamma_z)
    : beta_(beta), gamma_(std::move(gamma)), gamma_z_(std::move(gamma_z)) {
  if (!(beta > 0.0)) throw std::invalid_argument("ThermostatConfig: beta must be positive");
}

Vec penalized_mass_apply(const SystemModel& model, const PenaltyConfig& pen, const Vec& q, const Vec& v) {
  const double nu = pen.nu();
  if (nu == 0.0 || model.n_constraints == 0) return model.mass.apply(v);
  const ConstraintJacobian j = model.jac_xi(q);
  return model.mass.apply(v) + nu * nu * j.apply(model.mass_z.apply(j.apply_transpose(v)));
}

Mat penalized_mass_dense(const SystemModel& model, const PenaltyConfig& pen, const Vec& q) {
  const double nu = pen.nu();
  Mat a = model.mass.to_dense();
  if (nu == 0.0 || model.n_constraints == 0) return a;
  const Mat j = model.jac_xi(q).to_dense();
  a += nu * nu * j * model.mass_z.to_dense() * j.transpose();
  return 0.5 * (a + a.transpose());
}

namespace {

double operator_norm_bound(const SystemModel& model, double nu, const ConstraintJacobian& j) {
  auto sym_norm = [](const SymMatrix& m) {
    return m.is_diagonal() ? m.diagonal_values().cwiseAbs().maxCoeff() : m.to_dense().norm();
  };
  double jn2 = j.is_first_difference() ? 4.0 : j.dense_values().squaredNorm();
  double zn = model.n_constraints > 0 ? sym_norm(model.mass_z) : 0.0;
  return sym_norm(model.mass) + nu * nu * jn2 * zn;
}

}  // namespace

Vec penalized_mass_solve(const SystemModel& model, const PenaltyConfig& pen, const Vec& q, const Vec& w) {
  const double nu = pen.nu();
  if (nu == 0.0 || model.n_constraints == 0) return model.mass.solve(w);
  Vec x;
  if (model.penalized_mass_backend) {
    x = model.penalized_mass_backend->solve(nu, q, w);
  } else {
    const Mat a = penalized_mass_dense(model, pen, q);
    Eigen::LLT<Mat> llt(a);
    if (llt.info() != Eigen::Success) throw SolverFailure("penalized mass is not positive definite");
    x = llt.solve(w);
    x += llt.solve(Vec(w - a * x));
  }
  const Vec r = w - penalized_mass_apply(model, pen, q, x);
  const double denom = operator_norm_bound(model, nu, model.jac_xi(q)) * x.norm() + w.norm();
  const double err = denom > 0.0 ? r.norm() / denom : r.norm();
  if (!(err <= 1e-12)) throw SolverFailure("penalized mass solve: backward error " + std::to_string(err));
  return x;
}

double total_potential(const SystemModel& model, const PhaseState& s) {
  double v = model.potential(s.q);
  if (model.coupling) v += model.coupling->value(s.q, s.z);
  return v;
}

double immp_hamiltonian(const SystemModel& model, const PenaltyConfig& pen, const ThermostatConfig& thermo,
                        const PhaseState& s) {
  double kin = 0.5 * s.p.dot(model.mass.solve(s.p));
  if (model.n_constraints > 0) kin += 0.5 * s.pz.dot(model.mass_z.solve(s.pz));
  return kin + total_potential(model, s) + fixman_potential(model, pen, thermo, s.q);
}

double penalized_hamiltonian(const SystemModel& model, const PenaltyConfig& pen, const ThermostatConfig& thermo,
                             const Vec& q, const Vec& p_nu) {
  const Vec x = penalized_mass_solve(model, pen, q, p_nu);
  return 0.5 * p_nu.dot(x) + model.potential(q) + fixman_potential(model, pen, thermo, q);
}

Vec penalized_momentum(const SystemModel& model, const PenaltyConfig& pen, const PhaseState& s) {
  if (model.n_constraints == 0) return s.p;
  return s.p + pen.nu() * model.jac_xi(s.q).apply(s.pz);
}

}  // namespace immp

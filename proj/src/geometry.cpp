#include "immp/geometry.hpp"

#include <cmath>
#include <sstream>

#include "immp/errors.hpp"

namespace immp {

SpdSystem GramWorkspace::G() const { return SpdSystem::jt_a_j(jac, mass_inv, nullptr, 0.0, false); }

namespace {

GramWorkspace make_gram(const SystemModel& model, const Vec& q, double inv_nu) {
  GramWorkspace ws;
  ws.jac = model.jac_xi(q);
  ws.mass_inv = model.mass.inverse();
  ws.inv_nu = inv_nu;
  const SymMatrix mz_inv = model.mass_z.inverse();
  ws.G_reg = SpdSystem::jt_a_j(ws.jac, ws.mass_inv, &mz_inv, inv_nu * inv_nu);
  if (!ws.G_reg.positive()) throw GramSingular("Gram matrix is not positive definite");
  ws.condition = ws.G_reg.condition_estimate();
  if (!(ws.condition <= model.gram_condition_limit)) {
    std::ostringstream os;
    os << "Gram matrix condition estimate " << ws.condition << " exceeds " << model.gram_condition_limit;
    throw GramSingular(os.str());
  }
  return ws;
}

}  // namespace

GramWorkspace gram(const SystemModel& model, const PenaltyConfig& pen, const Vec& q) {
  const double inv = pen.inverse();
  if (!std::isfinite(inv)) throw std::logic_error("gram: nu = 0 has no regularized Gram matrix");
  return make_gram(model, q, inv);
}

GramWorkspace gram(const SystemModel& model, const Vec& q) { return make_gram(model, q, 0.0); }

double fixman_potential(const SystemModel& model, const PenaltyConfig& pen, const ThermostatConfig& thermo,
                        const Vec& q) {
  if (model.n_constraints == 0) return 0.0;
  if (!pen.is_infinite() && pen.nu() == 0.0) return 0.0;
  return gram(model, pen, q).G_reg.log_det() / (2.0 * thermo.beta());
}

Vec fixman_gradient(const SystemModel& model, const PenaltyConfig& pen, const ThermostatConfig& thermo,
                    const Vec& q) {
  const Index d = model.dim;
  if (model.n_constraints == 0 || model.linear_constraints) return Vec::Zero(d);
  if (!pen.is_infinite() && pen.nu() == 0.0) return Vec::Zero(d);
  if (model.hess_xi_contract) {
    // grad = (1/beta) sum_k Hess(xi_k) B[:,k], B = M^-1 J G_reg^-1
    const GramWorkspace ws = gram(model, pen, q);
    const Mat jd = ws.jac.to_dense();
    const Mat b = ws.mass_inv.apply(Mat(ws.G_reg.solve(Mat(jd.transpose())).transpose()));
    return model.hess_xi_contract(q, b) / thermo.beta();
  }
  if (!model.fixman_fd_fallback)
    throw MissingSecondDerivatives("fixman_gradient: model has no second derivatives of xi");
  Vec g(d);
  for (Index i = 0; i < d; ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(q[i]));
    Vec qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    g[i] = (fixman_potential(model, pen, thermo, qp) - fixman_potential(model, pen, thermo, qm)) / (2.0 * h);
  }
  return g;
}

MomentumProjection project_momentum(const SystemModel& model, const PenaltyConfig&, const GramWorkspace& ws,
                                    const Vec& p, const Vec& pz) {
  MomentumProjection out;
  if (model.n_constraints == 0) {
    out.p = p;
    out.pz = pz;
    out.lambda = Vec::Zero(0);
    return out;
  }
  const double inv = ws.inv_nu;
  Vec rhs = ws.jac.apply_transpose(ws.mass_inv.apply(p));
  if (inv != 0.0) rhs -= inv * model.mass_z.solve(pz);
  out.lambda = ws.G_reg.solve(rhs);
  out.p = p - ws.jac.apply(out.lambda);
  out.pz = pz + inv * out.lambda;
  return out;
}

MomentumProjection project_momentum(const SystemModel& model, const PenaltyConfig& pen, const Vec& q,
                                    const Vec& p, const Vec& pz) {
  if (model.n_constraints == 0) return project_momentum(model, pen, GramWorkspace{}, p, pz);
  return project_momentum(model, pen, gram(model, pen, q), p, pz);
}

double position_residual(const SystemModel& model, const PenaltyConfig& pen, const PhaseState& s) {
  if (model.n_constraints == 0) return 0.0;
  return (model.xi(s.q) - pen.inverse() * s.z).cwiseAbs().maxCoeff();
}

double momentum_residual(const SystemModel& model, const PenaltyConfig& pen, const PhaseState& s) {
  if (model.n_constraints == 0) return 0.0;
  const ConstraintJacobian j = model.jac_xi(s.q);
  Vec r = j.apply_transpose(model.mass.solve(s.p));
  const double inv = pen.inverse();
  if (inv != 0.0) r -= inv * model.mass_z.solve(s.pz);
  return r.cwiseAbs().maxCoeff();
}

}  // namespace immp

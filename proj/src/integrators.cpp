#include "immp/integrators.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "immp/errors.hpp"

namespace immp {

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("IntegratorConfig: dt must be positive");
  if (!(newton_tol < tol_c)) throw std::invalid_argument("IntegratorConfig: newton_tol must be below tol_c");
  if (newton_max_iter < 1) throw std::invalid_argument("IntegratorConfig: newton_max_iter must be >= 1");
  if (ou_substeps < 1) throw std::invalid_argument("IntegratorConfig: ou_substeps must be >= 1");
}

Forces immp_forces(const SystemModel& model, const PenaltyConfig& pen, const ThermostatConfig& thermo,
                   const IntegratorConfig& cfg, const Vec& q, const Vec& z) {
  Forces f;
  f.q = -model.grad_potential(q);
  if (cfg.fixman_in_forces && model.n_constraints > 0 && !model.linear_constraints)
    f.q -= fixman_gradient(model, pen, thermo, q);
  if (model.coupling) {
    f.q -= model.coupling->grad_q(q, z);
    f.z = -model.coupling->grad_z(q, z);
  } else {
    f.z = Vec::Zero(model.n_constraints);
  }
  return f;
}

namespace {

bool all_finite(const PhaseState& s) {
  return s.q.allFinite() && s.p.allFinite() && s.z.allFinite() && s.pz.allFinite();
}

}  // namespace

std::pair<PhaseState, StepReport> rattle_step(const SystemModel& model, const PenaltyConfig& pen,
                                              const ThermostatConfig& thermo, const IntegratorConfig& cfg,
                                              const PhaseState& s) {
  const Index n = model.n_constraints;
  const double dt = cfg.dt;
  const double inv = n > 0 ? pen.inverse() : 0.0;
  if (!std::isfinite(inv)) throw std::invalid_argument("rattle_step: nu = 0 requires the baseline integrator");

  StepReport rep;
  const Forces f0 = immp_forces(model, pen, thermo, cfg, s.q, s.z);
  const Vec pt = s.p + 0.5 * dt * f0.q;
  const Vec pzt = s.pz + 0.5 * dt * f0.z;

  PhaseState out;
  Vec lambda = Vec::Zero(n);
  if (n == 0) {
    out.q = s.q + dt * model.mass.solve(pt);
    out.z = s.z;
    out.p = pt;
    out.pz = pzt;
  } else {
    const GramWorkspace ws0 = gram(model, pen, s.q);
    const ConstraintJacobian& j0 = ws0.jac;
    const SymMatrix& minv = ws0.mass_inv;
    const SymMatrix mz_inv = model.mass_z.inverse();
    const Vec q_free = s.q + dt * minv.apply(pt);
    const Vec z_free = s.z + dt * mz_inv.apply(pzt);

    auto positions = [&](const Vec& lam, Vec& q1, Vec& z1) {
      q1 = q_free - dt * minv.apply(j0.apply(lam));
      z1 = z_free + (dt * inv) * mz_inv.apply(lam);
    };
    auto residual = [&](const Vec& q1, const Vec& z1) { return Vec(model.xi(q1) - inv * z1); };

    Vec q1, z1;
    positions(lambda, q1, z1);
    Vec r = residual(q1, z1);
    double rn = r.cwiseAbs().maxCoeff();
    double prev = rn;
    int growth = 0;
    int it = 0;
    const bool symmetric_jacobian = model.linear_constraints || cfg.frozen_jacobian;
    Mat j0d;
    if (!symmetric_jacobian) j0d = j0.to_dense();
    while (rn > cfg.newton_tol) {
      if (!std::isfinite(rn)) throw NewtonDiverged("rattle_step: non-finite constraint residual");
      if (it >= cfg.newton_max_iter) throw NewtonDiverged("rattle_step: Newton iteration limit reached");
      Vec delta;
      if (symmetric_jacobian) {
        // dr/dlambda = -dt G_reg(q_n)
        delta = ws0.G_reg.solve(r) / dt;
      } else {
        const Mat j1 = model.jac_xi(q1).to_dense();
        Mat k = j1.transpose() * minv.apply(j0d);
        k += (inv * inv) * mz_inv.to_dense();
        Eigen::PartialPivLU<Mat> lu(k);
        delta = lu.solve(r) / dt;
      }
      lambda += delta;
      positions(lambda, q1, z1);
      r = residual(q1, z1);
      rn = r.cwiseAbs().maxCoeff();
      ++it;
      growth = rn > prev ? growth + 1 : 0;
      if (growth >= 3) throw NewtonDiverged("rattle_step: residual grew for three iterations");
      prev = rn;
    }
    rep.newton_iters = it;
    rep.lambda_half = lambda;
    out.q = std::move(q1);
    out.z = std::move(z1);
    out.p = pt - j0.apply(lambda);
    out.pz = pzt + inv * lambda;
  }

  const Forces f1 = immp_forces(model, pen, thermo, cfg, out.q, out.z);
  out.p += 0.5 * dt * f1.q;
  out.pz += 0.5 * dt * f1.z;
  if (n > 0) {
    const MomentumProjection pr = project_momentum(model, pen, out.q, out.p, out.pz);
    out.p = pr.p;
    out.pz = pr.pz;
    rep.lambda_one = pr.lambda;
  } else {
    rep.lambda_half = Vec::Zero(0);
    rep.lambda_one = Vec::Zero(0);
  }
  if (!all_finite(out)) throw NewtonDiverged("rattle_step: non-finite state");
#ifndef NDEBUG
  if (n > 0 && (position_residual(model, pen, out) > cfg.tol_c || momentum_residual(model, pen, out) > cfg.tol_c))
    throw std::logic_error("rattle_step: constraint residual above tol_c");
#endif
  return {std::move(out), std::move(rep)};
}

bool ou_stability_ok(const SystemModel& model, const ThermostatConfig& thermo, double h) {
  double lam = model.mass.max_generalized_eigenvalue(thermo.gamma());
  if (model.n_constraints > 0 && thermo.gamma_z().size() == model.n_constraints)
    lam = std::max(lam, model.mass_z.max_generalized_eigenvalue(thermo.gamma_z()));
  return 0.5 * h * lam <= 1.0;
}

namespace {

std::atomic<bool> ou_warned{false};

// Constrained midpoint OU over total time `span`. With use_constraints=false
// only the position momenta are updated (baseline integrator).
PhaseState ou_advance(const SystemModel& model, const PenaltyConfig& pen, const ThermostatConfig& thermo,
                      double span, int substeps, bool use_constraints, const PhaseState& s, NoiseStreams& rng,
                      int* substeps_used) {
  const Index d = model.dim;
  const Index n = use_constraints ? model.n_constraints : 0;
  const bool have_z = n > 0 && thermo.gamma_z().size() == n;
  double h = span / substeps;
  while (!ou_stability_ok(model, thermo, h)) {
    substeps *= 2;
    h = span / substeps;
    if (!ou_warned.exchange(true))
      std::clog << "warning: OU step refined to " << substeps << " substeps for stability\n";
  }
  if (substeps_used) *substeps_used = substeps;
  const bool gz_zero = !have_z || thermo.gamma_z().is_zero();
  if (thermo.gamma().is_zero() && gz_zero) return s;

  const double inv = n > 0 ? pen.inverse() : 0.0;
  const SymMatrix& m = model.mass;
  const SymMatrix wq = m.plus(thermo.gamma(), 0.5 * h).inverse();
  const SymMatrix sigma = thermo.sigma();
  const SymMatrix minv = m.inverse();

  PhaseState out = s;
  if (n == 0) {
    for (int k = 0; k < substeps; ++k) {
      const Vec u = rng.momentum.gaussian(d);
      const Vec b = out.p - 0.5 * h * thermo.gamma().apply(minv.apply(out.p)) + std::sqrt(h) * sigma.apply(u);
      out.p = m.apply(wq.apply(b));
    }
    return out;
  }

  const SymMatrix& mz = model.mass_z;
  const SymMatrix gz = have_z ? thermo.gamma_z() : SymMatrix::zero(n);
  const SymMatrix wz = mz.plus(gz, 0.5 * h).inverse();
  const SymMatrix sigma_z = gz.scaled(2.0 / thermo.beta()).sqrt();
  const SymMatrix mz_inv = mz.inverse();
  const ConstraintJacobian j = model.jac_xi(s.q);
  const SpdSystem sys = SpdSystem::jt_a_j(j, wq, &wz, inv * inv);
  if (!sys.positive()) throw GramSingular("ou_midpoint_step: projected system not positive definite");
  for (int k = 0; k < substeps; ++k) {
    const Vec uq = rng.momentum.gaussian(d);
    const Vec uz = rng.auxiliary.gaussian(n);
    const Vec bq = out.p - 0.5 * h * thermo.gamma().apply(minv.apply(out.p)) + std::sqrt(h) * sigma.apply(uq);
    const Vec bz = out.pz - 0.5 * h * gz.apply(mz_inv.apply(out.pz)) + std::sqrt(h) * sigma_z.apply(uz);
    Vec rhs = j.apply_transpose(wq.apply(bq));
    if (inv != 0.0) rhs -= inv * wz.apply(bz);
    const Vec lambda = sys.solve(rhs);
    out.p = m.apply(wq.apply(Vec(bq - j.apply(lambda))));
    out.pz = mz.apply(wz.apply(Vec(bz + inv * lambda)));
  }
  return out;
}

}  // namespace

PhaseState ou_midpoint_step(const SystemModel& model, const PenaltyConfig& pen, const ThermostatConfig& thermo,
                            const IntegratorConfig& cfg, const PhaseState& s, NoiseStreams& rng,
                            int* substeps_used) {
  return ou_advance(model, pen, thermo, cfg.dt, cfg.ou_substeps, true, s, rng, substeps_used);
}

double metropolis_probability(double beta, double delta_H) {
  if (std::isnan(delta_H)) return 0.0;
  if (delta_H <= 0.0) return 1.0;
  return std::exp(-beta * delta_H);
}

namespace {

template <class Propose, class Energy, class Ou>
std::pair<PhaseState, StepReport> split_step(const IntegratorConfig& cfg, double beta, const PhaseState& s,
                                             NoiseStreams& rng, Propose propose, Energy energy, Ou ou) {
  PhaseState cur = s;
  int subs = 0, subs2 = 0;
  const bool strang = cfg.splitting == Splitting::strang;
  if (strang) cur = ou(0.5 * cfg.dt, cur, &subs);

  StepReport rep;
  bool diverged = false;
  std::pair<PhaseState, StepReport> prop;
  const double h0 = cfg.metropolis ? energy(cur) : 0.0;
  try {
    prop = propose(cur);
  } catch (const NewtonDiverged&) {
    if (!cfg.metropolis) throw;
    diverged = true;
  } catch (const UnstableIntegration&) {
    if (!cfg.metropolis) throw;
    diverged = true;
  }
  const double u = rng.metropolis.uniform();
  if (!cfg.metropolis) {
    rep = std::move(prop.second);
    cur = std::move(prop.first);
    rep.accepted = true;
  } else if (diverged) {
    rep.accepted = false;
    rep.delta_H = std::numeric_limits<double>::infinity();
    cur.p = -cur.p;
    cur.pz = -cur.pz;
  } else {
    rep = std::move(prop.second);
    rep.delta_H = energy(prop.first) - h0;
    rep.accepted = u < metropolis_probability(beta, rep.delta_H);
    if (rep.accepted) {
      cur = std::move(prop.first);
    } else {
      cur.p = -cur.p;
      cur.pz = -cur.pz;
    }
  }
  cur = ou(strang ? 0.5 * cfg.dt : cfg.dt, cur, &subs2);
  rep.ou_substeps = subs + subs2;
  return {std::move(cur), std::move(rep)};
}

}  // namespace

std::pair<PhaseState, StepReport> langevin_immp_step(const SystemModel& model, const PenaltyConfig& pen,
                                                     const ThermostatConfig& thermo, const IntegratorConfig& cfg,
                                                     const PhaseState& s, NoiseStreams& rng) {
  return split_step(
      cfg, thermo.beta(), s, rng, [&](const PhaseState& x) { return rattle_step(model, pen, thermo, cfg, x); },
      [&](const PhaseState& x) { return immp_hamiltonian(model, pen, thermo, x); },
      [&](double span, const PhaseState& x, int* used) {
        return ou_advance(model, pen, thermo, span, cfg.ou_substeps, true, x, rng, used);
      });
}

std::pair<PhaseState, StepReport> hmc_step(const SystemModel& model, const PenaltyConfig& pen,
                                           const ThermostatConfig& thermo, const IntegratorConfig& cfg,
                                           const PhaseState& s, NoiseStreams& rng) {
  IntegratorConfig c = cfg;
  c.metropolis = true;
  return langevin_immp_step(model, pen, thermo, c, s, rng);
}

double baseline_hamiltonian(const SystemModel& model, const PhaseState& s) {
  return 0.5 * s.p.dot(model.mass.solve(s.p)) + model.potential(s.q);
}

std::pair<PhaseState, StepReport> verlet_baseline_step(const SystemModel& model, const ThermostatConfig& thermo,
                                                       const IntegratorConfig& cfg, const PhaseState& s,
                                                       NoiseStreams& rng) {
  auto propose = [&](const PhaseState& x) {
    PhaseState y = x;
    const double dt = cfg.dt;
    y.p = x.p - 0.5 * dt * model.grad_potential(x.q);
    y.q = x.q + dt * model.mass.solve(y.p);
    y.p -= 0.5 * dt * model.grad_potential(y.q);
    if (!y.q.allFinite() || !y.p.allFinite()) throw UnstableIntegration("verlet_baseline_step: non-finite state");
    StepReport r;
    r.lambda_half = Vec::Zero(0);
    r.lambda_one = Vec::Zero(0);
    return std::pair<PhaseState, StepReport>{std::move(y), std::move(r)};
  };
  auto energy = [&](const PhaseState& x) { return baseline_hamiltonian(model, x); };
  const PenaltyConfig none = PenaltyConfig::fixed(0.0);
  auto ou = [&](double span, const PhaseState& x, int* used) {
    return ou_advance(model, none, thermo, span, cfg.ou_substeps, false, x, rng, used);
  };
  return split_step(cfg, thermo.beta(), s, rng, propose, energy, ou);
}

double consistent_penalty(double dt, double nubar, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("consistent_penalty: k must be positive");
  return nubar * std::pow(dt, k);
}

PhaseState sample_constrained_momenta(const SystemModel& model, const PenaltyConfig& pen,
                                      const ThermostatConfig& thermo, const Vec& q, const Vec& z,
                                      RandomStream& rng_q, RandomStream& rng_z) {
  PhaseState s;
  s.q = q;
  s.z = z;
  const double sb = 1.0 / std::sqrt(thermo.beta());
  s.p = model.mass.cholesky_apply(rng_q.gaussian(model.dim)) * sb;
  const Index n = model.n_constraints;
  s.pz = n > 0 ? Vec(model.mass_z.cholesky_apply(rng_z.gaussian(n)) * sb) : Vec::Zero(0);
  if (n > 0 && (pen.is_infinite() || pen.nu() > 0.0)) {
    const MomentumProjection pr = project_momentum(model, pen, q, s.p, s.pz);
    s.p = pr.p;
    s.pz = pr.pz;
  }
  return s;
}

TuneResult tune_penalty(const SystemModel& model, const ThermostatConfig& thermo, const IntegratorConfig& base,
                        const PhaseState& initial, const TuneOptions& opt) {
  if (!(opt.target > 0.0 && opt.target < 1.0)) throw std::invalid_argument("tune_penalty: target must be in (0,1)");
  if (opt.nu_grid.empty() || opt.dt_grid.empty()) throw std::invalid_argument("tune_penalty: empty grid");
  TuneResult res;
  res.acceptance.assign(opt.nu_grid.size() * opt.dt_grid.size(), 0.0);
  bool found = false;
  for (std::size_t a = 0; a < opt.nu_grid.size(); ++a) {
    const double nu = opt.nu_grid[a];
    for (std::size_t b = 0; b < opt.dt_grid.size(); ++b) {
      const double dt = opt.dt_grid[b];
      IntegratorConfig cfg = base;
      cfg.dt = dt;
      cfg.metropolis = true;
      NoiseStreams rng = NoiseStreams::make(opt.seed, a * opt.dt_grid.size() + b);
      RandomStream init = rng_stream(opt.seed, a * opt.dt_grid.size() + b, "initial");
      RandomStream init_z = rng_stream(opt.seed, a * opt.dt_grid.size() + b, "initial_z");
      const bool baseline = nu == 0.0 || model.n_constraints == 0;
      const PenaltyConfig pen = PenaltyConfig::fixed(nu);
      Vec z = baseline ? initial.z : Vec(nu * model.xi(initial.q));
      PhaseState st = sample_constrained_momenta(model, baseline ? PenaltyConfig::fixed(0.0) : pen, thermo,
                                                 initial.q, z, init, init_z);
      long acc = 0;
      for (long k = 0; k < opt.burn_in + opt.steps; ++k) {
        std::pair<PhaseState, StepReport> r;
        try {
          r = baseline ? verlet_baseline_step(model, thermo, cfg, st, rng) : hmc_step(model, pen, thermo, cfg, st, rng);
        } catch (const Error&) {
          acc = 0;
          break;
        }
        st = std::move(r.first);
        if (k >= opt.burn_in && r.second.accepted) ++acc;
      }
      const double ratio = static_cast<double>(acc) / static_cast<double>(opt.steps);
      res.acceptance[a * opt.dt_grid.size() + b] = ratio;
      if (ratio >= opt.target && (!found || dt > res.dt_max || (dt == res.dt_max && nu > res.nu_max))) {
        found = true;
        res.dt_max = dt;
        res.nu_max = nu;
      }
    }
  }
  if (!found) throw TargetUnreachable("tune_penalty: no grid point reaches the target acceptance");
  res.slope = res.nu_max / res.dt_max;
  return res;
}

}  // namespace immp

#include "immp/stiff.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>

#include "immp/errors.hpp"
#include "immp/parallel.hpp"
#include "immp/stat_tests.hpp"

namespace immp {

double stiff_energy(const StiffModel& m, const Vec& q, double z) { return m.slow.value(polar_angle(q)) + 0.5 * z * z; }

SystemModel stiff_physical_system(const StiffModel& m) {
  SystemModel s = circle_model(m.slow, 1.0 / (m.epsilon * m.epsilon));
  s.name = "stiff_physical";
  return s;
}

SystemModel stiff_immp_system(const StiffModel& m) {
  const SlowPotential slow = m.slow;
  const double nb = m.nubar;
  SystemModel s = circle_model(slow, 0.0);
  s.name = "stiff";
  s.potential = [](const Vec&) { return 0.0; };
  s.grad_potential = [](const Vec&) { return Vec(Vec::Zero(2)); };
  CouplingPotential w;
  w.value = [=](const Vec& q, const Vec& z) {
    const double x = z[0] / nb;
    return slow.value(polar_angle(q)) + 0.5 * x * x;
  };
  w.grad_q = [=](const Vec& q, const Vec&) {
    const double r2 = q.squaredNorm();
    Vec g(2);
    g << -q[1] / r2, q[0] / r2;
    return Vec(slow.derivative(polar_angle(q)) * g);
  };
  w.grad_z = [=](const Vec&, const Vec& z) { return Vec(z / (nb * nb)); };
  s.coupling = w;
  return s;
}

PenaltyConfig stiff_penalty(const StiffModel& m) { return PenaltyConfig::stiffness_scaled(m.nubar, m.epsilon); }

namespace {

struct Window {
  double center;
  double shift;  // beta * U at the center
  double half;
};

Window locate(const std::function<double(double)>& u, double beta) {
  double w = 1.0;
  for (int grow = 0; grow < 60; ++grow, w *= 2.0) {
    const int n = 400;
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    std::vector<double> vals(n + 1);
    for (int i = 0; i <= n; ++i) {
      const double z = -w + 2.0 * w * i / n;
      vals[i] = beta * u(z);
      if (!std::isnan(vals[i]) && vals[i] < best) {
        best = vals[i];
        arg = i;
      }
    }
    if (!std::isfinite(best)) continue;
    if (arg == 0 || arg == n || vals[0] - best < 50.0 || vals[n] - best < 50.0) continue;
    const double h = 2.0 * w / n;
    const double z0 = -w + h * arg;
    auto bu = [&](double z) { return beta * u(z); };
    const auto r = boost::math::tools::brent_find_minima(bu, z0 - h, z0 + h, 52);
    const double c = r.second <= best ? r.first : z0;
    return {c, std::min(r.second, best), w};
  }
  throw QuadratureDivergent("effective_potential: integrand is not confining");
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-13);
}

// Integrates g(z) exp(-beta U + shift) over a window whose tail mass is
// below 1e-10 of the total; returns the window used for the weight.
double window_integral(const std::function<double(double)>& weight, Window& win) {
  for (int grow = 0; grow < 40; ++grow) {
    const double c = win.center, w = win.half;
    const double inner = integrate(weight, c - w, c + w);
    const double tail = integrate(weight, c + w, c + 2.0 * w) + integrate(weight, c - 2.0 * w, c - w);
    if (!std::isfinite(inner) || !(inner > 0.0)) throw QuadratureDivergent("effective_potential: invalid integral");
    if (tail <= 1e-10 * inner) return inner + tail;
    win.half *= 2.0;
  }
  throw QuadratureDivergent("effective_potential: tail bound not reached");
}

}  // namespace

double effective_potential(const std::function<double(double)>& u_of_z, double beta) {
  Window win = locate(u_of_z, beta);
  const double shift = win.shift;
  auto weight = [&](double z) { return std::exp(-(beta * u_of_z(z) - shift)); };
  const double i = window_integral(weight, win);
  return (shift - std::log(i)) / beta;
}

double effective_potential(const std::function<double(const Vec&, double)>& U, const Vec& q, double beta) {
  return effective_potential([&](double z) { return U(q, z); }, beta);
}

Vec effective_potential_gradient(const std::function<double(const Vec&, double)>& U,
                                 const std::function<Vec(const Vec&, double)>& grad_q_U, const Vec& q, double beta) {
  auto u = [&](double z) { return U(q, z); };
  Window win = locate(u, beta);
  const double shift = win.shift;
  auto weight = [&](double z) { return std::exp(-(beta * u(z) - shift)); };
  const double norm = window_integral(weight, win);
  const double c = win.center, w = 2.0 * win.half;
  Vec g(q.size());
  for (Index i = 0; i < q.size(); ++i) {
    auto f = [&](double z) { return grad_q_U(q, z)[i] * weight(z); };
    g[i] = integrate(f, c - w, c + w) / norm;
  }
  return g;
}

std::pair<PhaseState, StepReport> effective_constrained_step(const SystemModel& model, const ThermostatConfig& thermo,
                                                             const IntegratorConfig& cfg, const PhaseState& s,
                                                             NoiseStreams& rng) {
  return langevin_immp_step(model, PenaltyConfig::infinite(), thermo, cfg, s, rng);
}

namespace {

struct ChainRun {
  std::vector<double> angles;
  double acceptance = 0.0;
  double mean_abs_xi = 0.0;
};

ChainRun run_sampler(const SystemModel& model, const PenaltyConfig& pen, const ThermostatConfig& thermo,
                     const IntegratorConfig& cfg, const SweepOptions& opt, std::uint64_t replica) {
  NoiseStreams rng = NoiseStreams::make(opt.seed, replica);
  RandomStream init = rng_stream(opt.seed, replica, "initial");
  RandomStream init_z = rng_stream(opt.seed, replica, "initial_z");
  Vec q0(2);
  q0 << -1.0, 0.0;
  PhaseState s = sample_constrained_momenta(model, pen, thermo, q0, Vec::Zero(1), init, init_z);
  ChainRun r;
  long accepted = 0;
  double xi_sum = 0.0;
  for (long k = 0; k < opt.burn_in + opt.steps; ++k) {
    auto step = langevin_immp_step(model, pen, thermo, cfg, s, rng);
    s = std::move(step.first);
    if (k < opt.burn_in) continue;
    if (step.second.accepted) ++accepted;
    xi_sum += std::abs(model.xi(s.q)[0]);
    if ((k - opt.burn_in) % opt.thin == 0) r.angles.push_back(polar_angle(s.q));
  }
  r.acceptance = static_cast<double>(accepted) / static_cast<double>(opt.steps);
  r.mean_abs_xi = xi_sum / static_cast<double>(opt.steps);
  return r;
}

}  // namespace

SweepResult epsilon_sweep(const StiffModel& base, const SweepOptions& opt) {
  IntegratorConfig cfg;
  cfg.dt = opt.dt;
  cfg.metropolis = opt.metropolis;
  const ThermostatConfig thermo(opt.beta, SymMatrix::scalar(2, opt.gamma), SymMatrix::scalar(1, opt.gamma_z));
  const std::size_t ne = opt.epsilons.size();

  // task 0: infinite-penalty reference, tasks 1..ne: penalized runs
  auto runs = parallel_map(ne + 1, opt.threads, [&](std::size_t t) {
    StiffModel m = base;
    if (t == 0) return run_sampler(stiff_immp_system(m), PenaltyConfig::infinite(), thermo, cfg, opt, 1000);
    m.epsilon = opt.epsilons[t - 1];
    return run_sampler(stiff_immp_system(m), stiff_penalty(m), thermo, cfg, opt, t);
  });

  SweepResult res;
  res.reference_acceptance = runs[0].acceptance;
  res.reference_angles = runs[0].angles;
  for (std::size_t i = 0; i < ne; ++i) {
    SweepRow row;
    row.epsilon = opt.epsilons[i];
    const ChainRun& r = runs[i + 1];
    row.acceptance = r.acceptance;
    row.mean_abs_xi = r.mean_abs_xi;
    double c = 0.0;
    for (double a : r.angles) c += std::cos(a);
    row.observable_mean = c / static_cast<double>(r.angles.size());
    const TestResult ks = ks_two_sample(r.angles, runs[0].angles);
    row.ks_distance = ks.statistic;
    row.ks_p = ks.p_value;

    StiffModel m = base;
    m.epsilon = row.epsilon;
    const SystemModel phys = stiff_physical_system(m);
    IntegratorConfig vcfg = cfg;
    vcfg.metropolis = false;
    NoiseStreams rng = NoiseStreams::make(opt.seed, 2000 + i);
    RandomStream init = rng_stream(opt.seed, 2000 + i, "initial");
    RandomStream init_z = rng_stream(opt.seed, 2000 + i, "initial_z");
    Vec q0(2);
    q0 << -1.0, 0.0;
    const ThermostatConfig vthermo(opt.beta, SymMatrix::scalar(2, opt.gamma), SymMatrix::zero(0));
    PhaseState s = sample_constrained_momenta(phys, PenaltyConfig::fixed(0.0), vthermo, q0, Vec::Zero(1), init, init_z);
    const double h0 = baseline_hamiltonian(phys, s);
    const double limit = 1e3 * std::max(1.0, std::abs(h0));
    long k = 0;
    try {
      for (; k < opt.verlet_steps; ++k) {
        s = verlet_baseline_step(phys, vthermo, vcfg, s, rng).first;
        if (!(baseline_hamiltonian(phys, s) <= limit)) {
          row.verlet_unstable = true;
          break;
        }
      }
    } catch (const UnstableIntegration&) {
      row.verlet_unstable = true;
    }
    row.verlet_steps_completed = k;
    res.rows.push_back(row);
  }
  return res;
}

}  // namespace immp

#include <cmath>

#include "immp/chain.hpp"
#include "immp/parallel.hpp"
#include "immp/stat_tests.hpp"
#include "immp/stats.hpp"

namespace immp {

namespace {

Vec run_chain(const ChainModel& chain, const CouplingOptions& opt, std::uint64_t replica) {
  const SystemModel model = build_chain_system(chain);
  const PenaltyConfig pen = chain_penalty(chain);
  const ThermostatConfig thermo = chain_thermostat(chain);
  IntegratorConfig cfg;
  cfg.dt = opt.dt;
  RandomStream init = rng_stream(opt.seed, replica, "initial");
  RandomStream init_z = rng_stream(opt.seed, replica, "initial_z");
  PhaseState s = chain_initial_state(chain, Vec::Constant(chain.N, 0.5), init, init_z);
  NoiseStreams rng = NoiseStreams::make(opt.seed, replica);
  const long steps = std::lround(opt.T / opt.dt);
  for (long k = 0; k < steps; ++k) {
    s = chain.nubar > 0.0 ? langevin_immp_step(model, pen, thermo, cfg, s, rng).first
                          : verlet_baseline_step(model, thermo, cfg, s, rng).first;
  }
  return s.q;
}

}  // namespace

std::vector<CouplingRow> same_noise_coupling_distance(const std::vector<double>& nubars, const CouplingOptions& opt) {
  ChainModel base;
  base.N = opt.N;
  base.beta = opt.beta;
  base.gamma = opt.gamma;
  base.interaction = ChainInteraction::harmonic;
  base.external = opt.external;
  const std::size_t nv = nubars.size();
  const std::size_t nr = static_cast<std::size_t>(opt.replicas);
  // per replica: reference run followed by one run per nubar
  auto dist = parallel_map(nr, opt.threads, [&](std::size_t r) {
    ChainModel ref = base;
    ref.nubar = 0.0;
    const Vec q0 = run_chain(ref, opt, r);
    std::vector<double> d(nv);
    for (std::size_t i = 0; i < nv; ++i) {
      ChainModel c = base;
      c.nubar = nubars[i];
      const double n = norm_l2(run_chain(c, opt, r) - q0);
      d[i] = n * n;
    }
    return d;
  });
  std::vector<CouplingRow> rows;
  for (std::size_t i = 0; i < nv; ++i) {
    std::vector<double> v(nr);
    for (std::size_t r = 0; r < nr; ++r) v[r] = dist[r][i];
    rows.push_back({nubars[i], mean(v), std::sqrt(variance(v) / static_cast<double>(nr))});
  }
  return rows;
}

}  // namespace immp

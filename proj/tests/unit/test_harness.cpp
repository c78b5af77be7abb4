#include <doctest.h>

#include "immp/errors.hpp"
#include "immp/harness/config.hpp"
#include "immp/harness/experiments.hpp"
#include "immp/harness/output.hpp"
#include "immp/rng.hpp"

using namespace immp;

TEST_CASE("random streams are determined by seed, replica and tag") {
  RandomStream a = rng_stream(7, 2, "momentum"), b = rng_stream(7, 2, "momentum");
  for (int i = 0; i < 100; ++i) CHECK(a.gaussian() == b.gaussian());
  RandomStream c = rng_stream(7, 3, "momentum"), d = rng_stream(7, 2, "momentum");
  RandomStream e = rng_stream(7, 2, "auxiliary"), f = rng_stream(8, 2, "momentum");
  const double x = d.gaussian();
  CHECK(c.gaussian() != x);
  CHECK(e.gaussian() != x);
  CHECK(f.gaussian() != x);
  CHECK(stream_tag_hash("momentum") == stream_tag_hash("momentum"));
  CHECK(stream_tag_hash("momentum") != stream_tag_hash("auxiliary"));
}

TEST_CASE("replica streams are uncorrelated") {
  RandomStream a = rng_stream(11, 0, "x"), b = rng_stream(11, 1, "x");
  const int n = 100000;
  double sab = 0.0;
  for (int i = 0; i < n; ++i) sab += a.gaussian() * b.gaussian();
  CHECK(std::abs(sab / n) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("position noise does not depend on the auxiliary stream") {
  NoiseStreams s1 = NoiseStreams::make(5, 1), s2 = NoiseStreams::make(5, 1);
  // consuming auxiliary noise in one copy leaves its momentum noise unchanged
  for (int i = 0; i < 17; ++i) s1.auxiliary.gaussian();
  for (int i = 0; i < 50; ++i) CHECK(s1.momentum.gaussian() == s2.momentum.gaussian());
  CHECK(s1.metropolis.uniform() == s2.metropolis.uniform());
}

TEST_CASE("config parsing") {
  const RunConfig c = RunConfig::parse(
      "# comment\n[run]\nexperiment = exactness\nseed = 42\nreplicas = 3\n\n[experiment]\nnu_list = 0.1, 1, 10\n");
  CHECK(c.experiment() == "exactness");
  CHECK(c.seed() == 42);
  CHECK(c.replicas() == 3);
  const auto nus = c.get_list("experiment", "nu_list", {});
  REQUIRE(nus.size() == 3);
  CHECK(nus[2] == 10.0);
  CHECK(RunConfig::parse("[run]\nexperiment = x\n").seed() == 1);
  CHECK_THROWS_AS(RunConfig::parse("[run]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[nowhere]\nseed = 1\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[run]\nseed = -3\n").seed(), ConfigError);
  CHECK(RunConfig::parse(c.echo()).echo() == c.echo());
}

TEST_CASE("double-well reference law") {
  const DoubleWellReference ref(1.0);
  CHECK(ref.cdf(-10.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ref.cdf(10.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(ref.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(ref.probability(-1.0, 1.0) == doctest::Approx(1.0 - 2.0 * ref.cdf(-1.0)).epsilon(1e-10));
  const double fd = (ref.cdf(0.7 + 1e-5) - ref.cdf(0.7 - 1e-5)) / 2e-5;
  CHECK(fd == doctest::Approx(ref.density(0.7)).epsilon(1e-5));
  RandomStream r = rng_stream(3, 0, "dw");
  int inside = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) inside += std::abs(ref.sample(r)) < 1.0;
  const double p = ref.probability(-1.0, 1.0);
  CHECK(std::abs(inside / static_cast<double>(n) - p) < 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("CSV output is deterministic for a fixed seed") {
  const RunConfig cfg = RunConfig::parse(
      "[run]\nexperiment = stiff-demo\nseed = 9\nsteps = 300\nburn_in = 10\n[experiment]\neps_list = 0.1\n"
      "verlet_steps = 50\n");
  const ExperimentResult a = run_experiment("stiff-demo", cfg);
  const ExperimentResult b = run_experiment("stiff-demo", cfg);
  const std::string ca = format_csv(a, cfg);
  CHECK(ca == format_csv(b, cfg));
  CHECK(ca.rfind("#", 0) == 0);
  CHECK(ca.find("experiment,group,x,y,yerr") != std::string::npos);
  CHECK(ca.find("seed") != std::string::npos);
}

TEST_CASE("unknown experiment") {
  CHECK_THROWS(run_experiment("no-such-thing", RunConfig()));
  const auto& names = experiment_names();
  for (const char* n : {"exactness", "test1-macro", "test2-stability", "spectral-verify", "stiff-demo"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
}

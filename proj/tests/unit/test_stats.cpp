#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "helpers.hpp"
#include "immp/chain.hpp"
#include "immp/errors.hpp"
#include "immp/rng.hpp"
#include "immp/stat_tests.hpp"
#include "immp/stats.hpp"

using namespace immp;
using namespace immp::testing;

TEST_CASE("chain observables") {
  CHECK(chain_length(Vec::Constant(10, 0.3)) == 0.0);
  Vec q(10);
  for (Index i = 0; i < 10; ++i) q[i] = static_cast<double>(i + 1) / 10.0;
  CHECK(chain_length(q) == doctest::Approx(0.9));
  CHECK(center_of_mass(Vec::Constant(10, 0.5)) == 0.5);
  CHECK(center_of_mass(q) == doctest::Approx(0.5));  // q_{N/2} = q_5 = 5/10
}

TEST_CASE("autocorrelation") {
  RandomStream r = rng_stream(1, 0, "acf");
  const std::size_t n = 200000;
  std::vector<double> white(n), ar(n);
  double x = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    white[i] = r.gaussian();
    x = 0.9 * x + r.gaussian();
    ar[i] = x;
  }
  const auto rw = autocorrelation(white, 20);
  CHECK(rw[0] == 1.0);
  for (std::size_t k = 1; k <= 20; ++k) CHECK(std::abs(rw[k]) < 3.0 / std::sqrt(static_cast<double>(n)));
  const auto ra = autocorrelation(ar, 30);
  CHECK(ra[0] == 1.0);
  for (std::size_t k = 1; k <= 30; ++k) CHECK(std::abs(ra[k] - std::pow(0.9, k)) < 0.05);
}

TEST_CASE("Gaussian kernel density estimate") {
  RandomStream r = rng_stream(2, 0, "kde");
  std::vector<double> s(100000);
  for (double& v : s) v = r.gaussian();
  CHECK(silverman_bandwidth(s) == doctest::Approx(1.06 * std::pow(1e5, -0.2)).epsilon(0.02));
  const Kde k = kde_density(s);
  REQUIRE(k.grid.size() == 512);
  const double dx = k.grid[1] - k.grid[0];
  double mass = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < k.grid.size(); ++i) {
    mass += k.density[i] * dx;
    worst = std::max(worst, std::abs(k.density[i] - std::exp(-0.5 * k.grid[i] * k.grid[i]) / std::sqrt(2.0 * M_PI)));
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(worst < 0.02);

  // single point: a kernel bump centered there
  const auto grid = uniform_grid(-1.0, 3.0, 401);
  const Kde one = kde_density({1.0}, grid, 0.2);
  const auto peak = std::max_element(one.density.begin(), one.density.end()) - one.density.begin();
  CHECK(grid[static_cast<std::size_t>(peak)] == doctest::Approx(1.0));
  CHECK(one.density[150] == doctest::Approx(one.density[250]).epsilon(1e-12));

  // symmetric data, symmetric estimate
  const Kde sym = kde_density({-2.0, -1.0, 1.0, 2.0}, uniform_grid(-4.0, 4.0, 81), 0.5);
  for (std::size_t i = 0; i < 81; ++i) CHECK(sym.density[i] == doctest::Approx(sym.density[80 - i]).epsilon(1e-12));
}

TEST_CASE("relative entropy") {
  const auto grid = uniform_grid(-8.0, 8.0, 2001);
  std::vector<double> p(grid.size()), q(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    p[i] = std::exp(-0.5 * grid[i] * grid[i]) / std::sqrt(2.0 * M_PI);
    q[i] = std::exp(-0.5 * (grid[i] - 0.5) * (grid[i] - 0.5)) / std::sqrt(2.0 * M_PI);
  }
  CHECK(std::abs(relative_entropy(p, p, grid)) < 1e-10);
  CHECK(relative_entropy(p, q, grid) == doctest::Approx(0.125).epsilon(1e-6));

  RandomStream r = rng_stream(3, 0, "kl");
  std::vector<double> a(100000), b(100000);
  for (double& v : a) v = r.gaussian();
  for (double& v : b) v = 0.5 + r.gaussian();
  const auto g2 = uniform_grid(-6.0, 6.5, 512);
  const Kde ka = kde_density(a, g2), kb = kde_density(b, g2);
  const double kl = relative_entropy(ka.density, kb.density, g2);
  CHECK(kl == doctest::Approx(0.125).epsilon(0.16));
  CHECK(relative_entropy(ka.density, ka.density, g2) >= -1e-6);
}

TEST_CASE("transition times on a ramp") {
  TimeSeries ts;
  ts.dt_between_samples = 0.5;
  // 0.3 -> 0.7 linearly between t = 1 and t = 3, crossing 0.4 at 1.5 and 0.6 at 2.5
  for (int i = 0; i <= 10; ++i) {
    const double t = 0.5 * i;
    ts.values.push_back(t <= 1.0 ? 0.3 : (t >= 3.0 ? 0.7 : 0.3 + 0.2 * (t - 1.0)));
  }
  const auto d = transition_durations(ts, 0.4, 0.6);
  REQUIRE(d.size() == 1);
  CHECK(d[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(mean_transition_time(ts, 0.4, 0.6, 10), InsufficientCrossings);
  CHECK(mean_transition_time(ts, 0.4, 0.6, 1).mean == doctest::Approx(1.0));
}

TEST_CASE("transition times: excursions back below a restart the clock") {
  TimeSeries ts;
  ts.dt_between_samples = 1.0;
  ts.values = {0.3, 0.5, 0.3, 0.45, 0.55, 0.65, 0.5, 0.35};
  const auto d = transition_durations(ts, 0.4, 0.6);
  REQUIRE(d.size() == 2);
  // upward: last exit above 0.4 between t=2 and 3 (at 2 + 2/3), hit 0.6 at 4.5
  CHECK(d[0] == doctest::Approx(4.5 - (2.0 + 2.0 / 3.0)));
  // downward: leave 0.6 at 5 + 1/3, hit 0.4 at 6 + 2/3
  CHECK(d[1] == doctest::Approx((6.0 + 2.0 / 3.0) - (5.0 + 1.0 / 3.0)));
}

TEST_CASE("transition path time of an overdamped OU process") {
  // dx = -k (x - 0.5) dt + sqrt(2 D) dW; mean transition path time between a
  // and b from the committor formula
  const double k = 40.0, D = 1.0, a = 0.4, b = 0.6;
  auto U = [&](double x) { return 0.5 * k * (x - 0.5) * (x - 0.5) / D; };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double zf = GK::integrate([&](double x) { return std::exp(U(x)); }, a, b);
  auto phi = [&](double x) { return GK::integrate([&](double y) { return std::exp(U(y)); }, a, x) / zf; };
  const double inner = GK::integrate([&](double y) { return std::exp(-U(y)) * phi(y) * (1.0 - phi(y)); }, a, b);
  const double expect = zf * inner / D;

  RandomStream r = rng_stream(4, 0, "ou");
  const double dt = 2e-6;
  TimeSeries ts;
  ts.dt_between_samples = dt;
  double x = 0.5;
  const long steps = 15000000;
  ts.values.reserve(static_cast<std::size_t>(steps));
  const double s = std::sqrt(2.0 * D * dt);
  for (long i = 0; i < steps; ++i) {
    x += -k * (x - 0.5) * dt + s * r.gaussian();
    ts.values.push_back(x);
  }
  const TransitionTimes tt = mean_transition_time(ts, a, b, 100);
  CHECK(tt.mean == doctest::Approx(expect).epsilon(0.05));
  CHECK(tt.std_error < 0.03 * tt.mean);
}

TEST_CASE("chain norms") {
  CHECK(norm_l2(Vec::Constant(7, -1.5)) == doctest::Approx(1.5));
  CHECK(norm_hminus1(Vec::Constant(7, -1.5)) == doctest::Approx(1.5));
  std::mt19937_64 g(73);
  const Vec p = random_vec(16, g);
  CHECK(neumann_spectral_transform(p).squaredNorm() == doctest::Approx(p.squaredNorm()).epsilon(1e-12));
  // h-1 norm of a single mode: |c| / sqrt(N delta_k)
  const Mat P = neumann_basis(16);
  const Vec mode = 2.0 * P.row(3).transpose();
  CHECK(norm_hminus1(mode) == doctest::Approx(2.0 / std::sqrt(16.0 * delta_k(16, 3))).epsilon(1e-12));
}

TEST_CASE("statistical tests") {
  RandomStream r = rng_stream(5, 0, "tests");
  std::vector<double> u(5000), v(5000);
  for (double& x : u) x = r.uniform();
  for (double& x : v) x = r.uniform();
  CHECK(ks_one_sample(u, [](double x) { return std::clamp(x, 0.0, 1.0); }).p_value > 0.01);
  CHECK(ks_one_sample(u, [](double x) { return std::clamp(x * x, 0.0, 1.0); }).p_value < 1e-6);
  CHECK(ks_two_sample(u, v).p_value > 0.01);
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(1.36) == doctest::Approx(0.049).epsilon(0.02));

  std::vector<double> counts{100, 100, 100, 100}, probs{0.25, 0.25, 0.25, 0.25};
  const TestResult c = chi_square_test(counts, probs);
  CHECK(c.statistic == doctest::Approx(0.0));
  CHECK(c.dof == 3.0);
  CHECK(c.p_value == doctest::Approx(1.0));
  CHECK(chi_square_test({150, 50, 100, 100}, probs).p_value < 1e-6);
  CHECK(chi_square_two_sample({100, 100, 100}, {100, 100, 100}).p_value == doctest::Approx(1.0));

  std::vector<double> n(2000), e(2000);
  for (double& x : n) x = r.gaussian();
  for (double& x : e) x = -std::log(r.uniform());
  CHECK(anderson_darling_normal(n).p_value > 0.01);
  CHECK(anderson_darling_normal(e).p_value < 1e-3);

  std::vector<double> xs{1, 2, 3, 4}, ys{3, 5, 7, 9};
  const LinearFit f = linear_regression(xs, ys);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope_se == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mean({1.0, 2.0, 3.0}) == doctest::Approx(2.0));
  CHECK(variance({1.0, 2.0, 3.0}) == doctest::Approx(1.0));
  const BatchMeans bm = batch_means(n, 20);
  CHECK(bm.batches == 20);
  CHECK(std::abs(bm.mean) < 4.0 * bm.std_error);
}

TEST_CASE("same-noise coupling: identical penalties give zero distance") {
  CouplingOptions o;
  o.N = 16;
  o.T = 0.1;
  o.dt = 1e-3;
  o.replicas = 3;
  const auto rows = same_noise_coupling_distance({0.0, 0.3}, o);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].mean_sq_distance == 0.0);
  CHECK(rows[1].mean_sq_distance > 0.0);
}

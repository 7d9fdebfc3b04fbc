#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "mckean/errors.hpp"
#include "mckean/grid.hpp"
#include "mckean/meanfield.hpp"
#include "mckean/particle.hpp"
#include "mckean/stats.hpp"

using namespace mckean;
using doctest::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::shared_ptr<const PotentialSpec> make(Domain d, Confinement v, Interaction w, double beta) {
  return std::make_shared<const PotentialSpec>(d, std::move(v), std::move(w), beta);
}

std::vector<double> uniform_points(std::size_t n, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> x(n);
  for (auto& v : x) v = u(gen);
  return x;
}

}  // namespace

TEST_CASE("Euler-Maruyama at zero temperature") {
  SUBCASE("confinement only") {
    ParticleEnsemble ens(make(Domain::line(), QuadraticConfinement{}, ZeroInteraction{}, kInf),
                         {1.0}, 1);
    step_euler_maruyama(ens, 0.1);
    CHECK(ens.positions()[0] == Approx(0.9));
    CHECK(ens.time() == Approx(0.1));
  }
  SUBCASE("pair attraction") {
    ParticleEnsemble ens(make(Domain::line(), ZeroConfinement{}, QuadraticInteraction{}, kInf),
                         {0.0, 1.0}, 1);
    step_euler_maruyama(ens, 0.1);
    CHECK(ens.positions()[0] == Approx(0.05));
    CHECK(ens.positions()[1] == Approx(0.95));
  }
}

TEST_CASE("Euler-Maruyama is deterministic per seed") {
  auto model = make(Domain::torus(), ZeroConfinement{}, CosineSumInteraction{{1.0}}, 2.0);
  auto run = [&](std::uint64_t seed) {
    ParticleEnsemble ens(model, uniform_points(64, 3, 0.0, 1.0), seed);
    for (int i = 0; i < 50; ++i) step_euler_maruyama(ens, 1e-3);
    return std::vector<double>(ens.positions().begin(), ens.positions().end());
  };
  const auto a = run(9), b = run(9), c = run(10);
  CHECK(a == b);
  CHECK(a != c);
  for (double x : a) CHECK((x >= 0.0 && x < 1.0));
}

TEST_CASE("non-finite drift names the particle") {
  ParticleEnsemble ens(make(Domain::line(), QuadraticConfinement{1e308}, ZeroInteraction{}, 1.0),
                       {0.0, 10.0, 0.0}, 1);
  try {
    step_euler_maruyama(ens, 0.1);
    FAIL("expected a blow-up");
  } catch (const NumericalBlowupError& e) {
    CHECK(e.particle() == 1);
  }
}

TEST_CASE("fast interaction drift matches the pairwise sum") {
  const auto x = uniform_points(200, 5, 0.0, 1.0);
  std::vector<double> fast(x.size()), slow(x.size());
  for (auto w : {Interaction{CosineSumInteraction{{1.0}}},
                 Interaction{CosineSumInteraction{{0.3, -1.2, 0.7}}}}) {
    const PotentialSpec spec{Domain::torus(), ZeroConfinement{}, w, 1.0};
    interaction_drift(spec, x, fast);
    pairwise_interaction_drift(spec, x, slow);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(fast[i] == Approx(slow[i]).epsilon(1e-10));
    CHECK(hamiltonian(spec, x) == Approx(pairwise_hamiltonian(spec, x)).epsilon(1e-10));
  }
  const auto y = uniform_points(200, 6, -3.0, 3.0);
  const PotentialSpec quad{Domain::line(), DoubleWellConfinement{}, QuadraticInteraction{}, 1.0};
  interaction_drift(quad, y, fast);
  pairwise_interaction_drift(quad, y, slow);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(fast[i] == Approx(slow[i]).epsilon(1e-10));
  CHECK(hamiltonian(quad, y) == Approx(pairwise_hamiltonian(quad, y)).epsilon(1e-10));
}

TEST_CASE("drift is exchangeable") {
  const PotentialSpec spec{Domain::torus(), ZeroConfinement{}, CosineSumInteraction{{1.0, 0.5}},
                           1.0};
  auto x = uniform_points(17, 8, 0.0, 1.0);
  std::vector<std::size_t> perm(x.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(1));
  std::vector<double> px(x.size()), d(x.size()), pd(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) px[i] = x[perm[i]];
  particle_drift(spec, x, d);
  particle_drift(spec, px, pd);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(pd[i] == Approx(d[perm[i]]).epsilon(1e-12));
}

TEST_CASE("Hamiltonian") {
  const PotentialSpec dw{Domain::line(), DoubleWellConfinement{}, QuadraticInteraction{}, 1.0};
  const std::vector<double> single{0.3};
  CHECK(hamiltonian(dw, single) == Approx(dw.V(0.3)));

  // W = |x - y|^2 / 2 here, so the pair contributes (1/4)(1/2 + 1/2)
  const PotentialSpec quad{Domain::line(), ZeroConfinement{}, QuadraticInteraction{}, 1.0};
  const std::vector<double> pair{0.0, 1.0};
  CHECK(hamiltonian(quad, pair) == Approx(0.25));

  const std::vector<double> together(5, 0.4);
  CHECK(hamiltonian(quad, together) == Approx(0.0));
}

TEST_CASE("empirical measure") {
  auto model = make(Domain::line(), QuadraticConfinement{}, ZeroInteraction{}, 1.0);
  const auto one = empirical_measure(ParticleEnsemble(model, {2.5}, 0));
  CHECK(one.size() == 1);
  CHECK(one.weight() == 1.0);
  CHECK(one.points[0] == 2.5);
  const auto two = empirical_measure(ParticleEnsemble(model, {0.0, 1.0}, 0));
  CHECK(two.weight() == 0.5);
  CHECK(two.mean()[0] == Approx(0.5));
}

TEST_CASE("MALA samples a standard Gaussian") {
  auto model = make(Domain::line(), QuadraticConfinement{}, ZeroInteraction{}, 1.0);
  GibbsOptions opt;
  opt.step = 0.5;
  opt.thin = 5;
  opt.burn_in = 100;
  opt.n_samples = 200000;
  const auto res = sample_gibbs(model, 1, opt, 42);
  std::vector<double> x;
  for (const auto& s : res.samples) x.push_back(s.positions()[0]);
  const auto m = mean_and_stderr(x);
  double var = 0.0;
  for (double v : x) var += (v - m.mean) * (v - m.mean);
  var /= static_cast<double>(x.size() - 1);
  CHECK(std::abs(m.mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.02);
  CHECK(res.acceptance_rate > 0.5);
}

TEST_CASE("without interaction the Gibbs chain factorises") {
  auto model = make(Domain::line(), DoubleWellConfinement{}, ZeroInteraction{}, 1.0);
  GibbsOptions opt;
  opt.step = 0.05;
  opt.thin = 20;
  opt.burn_in = 500;
  opt.n_samples = 100000;
  const auto single = sample_gibbs(model, 1, opt, 1);
  const auto pair = sample_gibbs(model, 2, opt, 2);
  std::vector<double> a, b;
  for (const auto& s : single.samples) a.push_back(s.positions()[0]);
  for (const auto& s : pair.samples) b.push_back(s.positions()[1]);
  CHECK(ks_statistic(a, b) < 0.01);
}

TEST_CASE("cold double well visits both wells") {
  auto model = make(Domain::line(), DoubleWellConfinement{}, ZeroInteraction{}, 4.0);
  GibbsOptions opt;
  opt.step = 0.02;
  opt.thin = 50;
  opt.burn_in = 1000;
  opt.n_samples = 4000;
  const auto res = sample_gibbs(model, 1, opt, 3);
  std::size_t left = 0, near = 0;
  for (const auto& s : res.samples) {
    const double x = s.positions()[0];
    left += x < 0.0;
    near += std::abs(std::abs(x) - 1.0) < 0.5;
  }
  CHECK(left > 0);
  CHECK(left < res.samples.size());
  CHECK(near > 0.8 * static_cast<double>(res.samples.size()));
}

TEST_CASE("synchronous coupling") {
  auto model = make(Domain::line(), QuadraticConfinement{}, ZeroInteraction{}, 1.0);
  const auto grid = make_grid(*model, 256);
  const auto init = GridDensity::from_function(grid, [](double x) { return std::exp(-x * x); });
  const double dt = 0.005;
  const auto flow = solve_mean_field(*model, init, dt, 0.2, 1);
  const auto trace = synchronous_coupling_run(model, 32, dt, 0.2, flow, 4, 0, 5);
  REQUIRE_FALSE(trace.distance.empty());
  CHECK(trace.times.front() == 0.0);
  CHECK(trace.times.back() == Approx(0.2));
  for (double d : trace.distance) CHECK(d == 0.0);

  const auto sparse = solve_mean_field(*model, init, dt, 0.2, 2);
  CHECK_THROWS_AS(synchronous_coupling_run(model, 32, dt, 0.2, sparse, 4), ConfigError);
}

#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "mckean/errors.hpp"
#include "mckean/fluctuations.hpp"
#include "mckean/meanfield.hpp"
#include "mckean/metrics.hpp"

using namespace mckean;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

PotentialSpec kuramoto(double beta) {
  return {Domain::torus(), ZeroConfinement{}, CosineSumInteraction{{1.0}}, beta};
}

std::vector<double> evenly_spaced(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = (i + 0.5) / static_cast<double>(n);
  return x;
}

}  // namespace

TEST_CASE("fluctuation field") {
  const auto flat = GridDensity::flat(torus_grid(256));
  const double x0 = 0.3;
  const std::vector<double> one{x0};
  const auto h = compute_fluctuation_field(one, flat, 5);
  for (int k = 1; k <= 5; ++k) {
    const auto expected = std::polar(1.0, -2 * kPi * k * x0);
    CHECK(std::abs(h(k) - expected) < 1e-12);
    CHECK(std::abs(h(-k) - std::conj(expected)) < 1e-12);
  }
  CHECK(h.coefficients.count(0) == 0);

  // particles at the quantiles of the flat density reproduce its low modes
  const auto q = compute_fluctuation_field(evenly_spaced(64), flat, 16);
  for (const auto& [k, c] : q.coefficients) CHECK(std::abs(c) < 1e-12);
}

TEST_CASE("stationary covariance") {
  const PotentialSpec free{Domain::torus(), ZeroConfinement{}, ZeroInteraction{}, 2.5};
  for (const auto& [k, c] : stationary_covariance_theory(free, 6)) {
    CHECK(c == Approx(2.5 / (8 * kPi * kPi)));
  }
  CHECK(stationary_covariance_theory(kuramoto(1.0), 3).at(1) == Approx(1 / (4 * kPi * kPi)));
  CHECK_THROWS_AS(stationary_covariance_theory(kuramoto(2.0), 3), CoercivityError);
  CHECK_THROWS_AS(stationary_covariance_theory(kuramoto(3.0), 3), CoercivityError);
}

TEST_CASE("SPDE without noise decays exactly") {
  const auto spec = kuramoto(1.0);
  FluctuationField init;
  init.coefficients = {{1, {1.0, 0.5}}, {-1, {1.0, -0.5}}, {2, {0.0, 0.0}}, {-2, {0.0, 0.0}}};
  SpdeOptions opt;
  opt.dt = 0.01;
  opt.t_end = 0.5;
  opt.noise = false;
  opt.initial = init;
  const auto run = simulate_spde(spec, 2, opt, 1);
  const double lambda = linearized_spectrum_flat(spec, 2).at(1);
  for (const auto& f : run) {
    const auto expected = std::complex<double>(1.0, 0.5) * std::exp(lambda * f.time);
    CHECK(std::abs(f(1) - expected) < 1e-10);
    CHECK(std::abs(f(-1) - std::conj(expected)) < 1e-10);
  }
  CHECK(run.back().time == Approx(0.5));
}

TEST_CASE("SPDE stationary variance") {
  const auto spec = kuramoto(1.0);
  for (int k : {1, 2, 3}) {
    // noise intensity 2 pi k sqrt(2/beta), OU variance intensity^2 / (2 |lambda|)
    const double lambda = 4 * kPi * kPi * k * k * (1.0 + (k == 1 ? -0.5 : 0.0));
    const double oracle = 4 * kPi * kPi * k * k * 2.0 / (2 * lambda);
    CHECK(spde_stationary_variance(spec, k) == Approx(oracle));
  }
  SpdeOptions opt;
  opt.dt = 2e-3;
  opt.t_end = 200.0;
  opt.record_every = 5;
  const auto run = simulate_spde(spec, 3, opt, 11);
  const auto stats = empirical_mode_covariance(run, 3);
  for (const auto& m : stats) {
    CHECK(std::abs(m.variance - spde_stationary_variance(spec, m.k)) <= 3 * m.stderr);
    CHECK(std::abs(m.mean) <= 3 * m.stderr + 0.05);
  }
  opt.t_end = 0.1;
  CHECK_THROWS_AS(empirical_mode_covariance(simulate_spde(spec, 3, opt, 1), 3),
                  InsufficientDataError);
}

TEST_CASE("law of large numbers helpers") {
  const auto flat = GridDensity::flat(torus_grid(256));
  CHECK(hminus_s_distance_squared(evenly_spaced(64), flat, 2.0, 16) < 1e-24);

  double sum = 0.0;
  for (int k = 1; k <= 16; ++k) sum += 2.0 * std::pow(1 + 4 * kPi * kPi * k * k, -2.0);
  CHECK(lln_iid_uniform_expectation(10, 2.0, 16) == Approx(sum / 10));

  // the distance is |h|^2_{H^-s} / N for the field of the same points
  const std::vector<double> x{0.1, 0.15, 0.7, 0.93};
  const auto h = compute_fluctuation_field(x, flat, 8);
  const double norm = hminus_s_norm(h.coefficients, 2.0);
  CHECK(hminus_s_distance_squared(x, flat, 2.0, 8) == Approx(norm * norm / 4));
}

TEST_CASE("LLN control with i.i.d. uniform particles") {
  auto model = std::make_shared<const PotentialSpec>(Domain::torus(), ZeroConfinement{},
                                                     ZeroInteraction{}, 1.0);
  const auto flat = GridDensity::flat(torus_grid(256));
  LlnOptions opt;
  opt.replicas = 4;
  opt.samples_per_replica = 50;
  opt.gibbs.step = 2e-3;
  opt.gibbs.burn_in = 200;
  opt.gibbs.thin = 20;
  const auto res = lln_decay_experiment(model, flat, {16, 64}, opt, 5);
  REQUIRE(res.rows.size() == 2);
  for (const auto& row : res.rows) {
    const double exact = lln_iid_uniform_expectation(row.n, opt.s, opt.k_max);
    CHECK(std::abs(row.mean - exact) <= 3 * row.stderr);
  }
}

TEST_CASE("Fourier density estimate") {
  const auto g = torus_grid(128);
  const auto est = fourier_density_estimate(evenly_spaced(256), g, 8);
  CHECK(est.mass() == Approx(1.0));
  for (double v : est.values) CHECK(v == Approx(1.0).epsilon(1e-10));
}

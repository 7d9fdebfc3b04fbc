#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "mckean/errors.hpp"
#include "mckean/grid.hpp"
#include "mckean/meanfield.hpp"
#include "mckean/metrics.hpp"

using namespace mckean;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

PotentialSpec kuramoto(double beta, std::vector<double> c = {1.0}) {
  return {Domain::torus(), ZeroConfinement{}, CosineSumInteraction{std::move(c)}, beta};
}

PotentialSpec ou(double beta = 1.0) {
  return {Domain::line(), QuadraticConfinement{}, ZeroInteraction{}, beta};
}

GridDensity gaussian(const Grid& g, double mean, double var) {
  return GridDensity::from_function(
      g, [=](double x) { return std::exp(-(x - mean) * (x - mean) / (2 * var)); });
}

GridDensity von_mises(const Grid& g, double kappa) {
  return GridDensity::from_function(g, [=](double x) { return std::exp(kappa * std::cos(2 * kPi * x)); });
}

// Root of r = I1(beta r) / I0(beta r) with r > 0, by bisection.
double bessel_order_parameter(double beta) {
  auto f = [&](double r) {
    return std::cyl_bessel_i(1.0, beta * r) / std::cyl_bessel_i(0.0, beta * r) - r;
  };
  double lo = 1e-3, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("free energy examples") {
  const auto kur = kuramoto(1.0);
  const auto flat = GridDensity::flat(torus_grid(256));
  CHECK(std::abs(free_energy(flat, kur)) < 1e-12);

  const auto spec = ou();
  const auto g = make_grid(spec, 2048);
  const double expected = 0.5 - 0.5 * std::log(2 * kPi * std::numbers::e);
  CHECK(free_energy(gaussian(g, 0.0, 1.0), spec) == Approx(expected).epsilon(1e-6));
}

TEST_CASE("energy of product states") {
  const auto kur = kuramoto(2.5);
  const auto flat = GridDensity::flat(torus_grid(128));
  for (std::size_t n : {1, 2, 10, 1000}) CHECK(std::abs(energy_per_particle_product(flat, kur, n)) < 1e-12);

  const PotentialSpec dw{Domain::line(), DoubleWellConfinement{}, QuadraticInteraction{}, 1.5};
  const auto g = make_grid(dw, 512);
  const auto rho = gaussian(g, 0.3, 0.5);
  const PotentialSpec no_w{Domain::line(), DoubleWellConfinement{}, ZeroInteraction{}, 1.5};
  CHECK(energy_per_particle_product(rho, dw, 1) == Approx(free_energy(rho, no_w)).epsilon(1e-12));
  CHECK(energy_per_particle_product(rho, dw, 100000000) ==
        Approx(free_energy(rho, dw)).epsilon(1e-7));
}

TEST_CASE("dissipation examples") {
  const auto flat = GridDensity::flat(torus_grid(256));
  CHECK(dissipation(flat, kuramoto(1.0)) < 1e-20);

  // rho = N(0, 2), V = x^2/2: integrand |-x/2 + x|^2 rho, so D = Var / 4
  const auto spec = ou();
  const auto g = make_grid(spec, 4096);
  const auto rho = gaussian(g, 0.0, 2.0);
  double oracle = 0.0;
  for (std::size_t i = 0; i < g.size; ++i) {
    const double x = g.x(i);
    oracle += 0.25 * x * x * rho.values[i] * g.dx;
  }
  CHECK(oracle == Approx(0.5).epsilon(1e-6));
  CHECK(dissipation(rho, spec) == Approx(oracle).epsilon(1e-6));
}

TEST_CASE("self-consistency map") {
  const auto kur = kuramoto(3.0);
  const auto flat = GridDensity::flat(torus_grid(256));
  for (double v : self_consistency_map(flat, kur).values) CHECK(std::abs(v) < 1e-12);

  // W = 0: T(rho) = rho - exp(-beta V)/Z
  const auto spec = ou(2.0);
  const auto g = make_grid(spec, 512);
  const auto rho = gaussian(g, 1.0, 0.3);
  const auto target = gaussian(g, 0.0, 0.5);
  const auto t = self_consistency_map(rho, spec);
  for (std::size_t i = 0; i < g.size; ++i) {
    CHECK(t.values[i] == Approx(rho.values[i] - target.values[i]).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("McKean-Vlasov step") {
  SUBCASE("flat state is a fixed point") {
    const auto flat = GridDensity::flat(torus_grid(256));
    const auto next = mckean_vlasov_step(flat, kuramoto(5.0, {1.0, -0.5, 2.0}), 1e-3);
    CHECK(sup_distance(next, flat) < 1e-12);
  }
  SUBCASE("mass is conserved") {
    const auto spec = kuramoto(3.0);
    auto rho = von_mises(torus_grid(256), 0.7);
    McKeanVlasovSolver solver(spec, rho.grid);
    for (int i = 0; i < 400; ++i) solver.step(rho, 5e-4);
    CHECK(rho.mass() == Approx(1.0).epsilon(1e-12));
    for (double v : rho.values) CHECK(v > 0.0);
  }
  SUBCASE("OU relaxes to its Gaussian") {
    const auto spec = ou();
    const auto g = make_grid(spec, 512);
    const auto flow = solve_mean_field(spec, gaussian(g, 1.5, 0.3), 0.002, 20.0, 1000);
    CHECK(flow.times.back() == Approx(20.0));
    CHECK(l1_distance(flow.states.back(), gaussian(g, 0.0, 1.0)) < 1e-4);
  }
  SUBCASE("too large a step is rejected") {
    const PotentialSpec steep{Domain::line(), QuadraticConfinement{1000.0}, ZeroInteraction{}, 1.0};
    const auto g = make_grid(steep, 256);
    CHECK_THROWS_AS(mckean_vlasov_step(gaussian(g, 0.0, 0.01), steep, 0.1), StepSizeError);
  }
}

TEST_CASE("free energy decreases along the flow") {
  const auto spec = kuramoto(3.0);
  const auto flow = solve_mean_field(spec, von_mises(torus_grid(256), 0.2), 5e-4, 1.0, 20);
  for (std::size_t i = 1; i < flow.states.size(); ++i) {
    CHECK(free_energy(flow.states[i], spec) <= free_energy(flow.states[i - 1], spec) + 1e-12);
  }
}

TEST_CASE("steady states") {
  const auto g = torus_grid(256);
  SUBCASE("flat start") {
    const auto res = find_steady_state(kuramoto(3.0), GridDensity::flat(g));
    CHECK(res.converged);
    CHECK(res.iterations <= 1);
    CHECK(order_parameter(res.density) < 1e-12);
  }
  SUBCASE("clustered Kuramoto state solves the Bessel equation") {
    const auto spec = kuramoto(4.0);
    const auto res = find_steady_state(spec, von_mises(g, 0.5));
    REQUIRE(res.converged);
    CHECK(self_consistency_residual(res.density, spec) < 1e-8);
    CHECK(dissipation(res.density, spec) < 1e-8);
    CHECK(order_parameter(res.density) == Approx(bessel_order_parameter(4.0)).epsilon(1e-6));
  }
  SUBCASE("below the transition perturbations die out") {
    const auto res = find_steady_state(kuramoto(1.0), von_mises(g, 0.5));
    REQUIRE(res.converged);
    CHECK(order_parameter(res.density) < 1e-8);
  }
  SUBCASE("non-convergence is a result") {
    SteadyStateOptions opt;
    opt.max_iter = 3;
    const auto res = find_steady_state(kuramoto(4.0), von_mises(g, 0.5), opt);
    CHECK_FALSE(res.converged);
    CHECK(res.iterations == 3);
    CHECK(res.residual_history.size() >= 3);
  }
}

TEST_CASE("linearised spectrum of the flat state") {
  CHECK(linearized_spectrum_flat(kuramoto(1.0), 4).at(1) == Approx(-2 * kPi * kPi));
  CHECK(std::abs(linearized_spectrum_flat(kuramoto(2.0), 4).at(1)) < 1e-12);
  const PotentialSpec free{Domain::torus(), ZeroConfinement{}, ZeroInteraction{}, 0.7};
  const auto heat = linearized_spectrum_flat(free, 6);
  for (int k = 1; k <= 6; ++k) CHECK(heat.at(k) == Approx(-4 * kPi * kPi * k * k / 0.7));

  // finite-difference eigen-solve agrees within 1%
  const auto grid = grid_spectrum_flat(kuramoto(1.0), 256);
  CHECK(grid.front() == Approx(-2 * kPi * kPi).epsilon(0.01));
  CHECK(linearized_gap(kuramoto(1.0)) == Approx(2 * kPi * kPi));
  CHECK(linearized_lsi_constant(kuramoto(1.0)) == Approx(4 * kPi * kPi));
  CHECK_THROWS_AS(linearized_spectrum_flat(ou()), UnsupportedModelError);
}

TEST_CASE("properties A, B and C") {
  SUBCASE("H-stable") {
    for (double beta : {0.5, 3.0, 20.0}) {
      const auto rep = check_properties(kuramoto(beta, {-1.0}), 16, 128);
      CHECK(rep.a);
      CHECK(rep.b);
      CHECK_FALSE(rep.c_witness.has_value());
    }
  }
  SUBCASE("Kuramoto below the transition") {
    const auto rep = check_properties(kuramoto(1.0), 16, 128);
    CHECK(rep.a);
    CHECK(rep.b);
  }
  SUBCASE("Kuramoto above the transition") {
    const auto rep = check_properties(kuramoto(3.0), 16, 128);
    CHECK_FALSE(rep.a);
    CHECK_FALSE(rep.b);
    REQUIRE(rep.c_witness.has_value());
    CHECK(order_parameter(*rep.c_witness) < 1e-8);
  }
}

TEST_CASE("phase scans") {
  std::vector<double> betas;
  for (int i = 0; i <= 20; ++i) betas.push_back(1.0 + 0.1 * i);
  SUBCASE("Kuramoto") {
    const auto scan = scan_phase_transition(kuramoto(1.0), betas, 0.1, {}, 128);
    REQUIRE(scan.beta_c.has_value());
    CHECK(*scan.beta_c >= 1.9);
    CHECK(*scan.beta_c <= 2.1);
  }
  SUBCASE("H-stable") {
    const auto scan = scan_phase_transition(kuramoto(1.0, {-1.0}), betas, 0.1, {}, 128);
    for (const auto& row : scan.rows) CHECK(row.r < 1e-8);
    CHECK_FALSE(scan.beta_c.has_value());
  }
  SUBCASE("bichromatic: a better clustered state below beta_sharp") {
    const auto spec = kuramoto(1.9, {1.0, 1.0});
    CHECK(beta_sharp(spec) == Approx(2.0));
    const auto res = find_steady_state(spec, von_mises(torus_grid(256), 3.0));
    REQUIRE(res.converged);
    CHECK(order_parameter(res.density) > 0.1);
    const auto flat = GridDensity::flat(torus_grid(256));
    CHECK(free_energy(res.density, spec) < free_energy(flat, spec));
  }
}

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "mckean/errors.hpp"
#include "mckean/grid.hpp"
#include "mckean/meanfield.hpp"
#include "mckean/metrics.hpp"
#include "mckean/particle.hpp"

using namespace mckean;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

PotentialSpec kuramoto(double beta) {
  return {Domain::torus(), ZeroConfinement{}, CosineSumInteraction{{1.0}}, beta};
}

PotentialSpec free_torus(double beta = 1.0) {
  return {Domain::torus(), ZeroConfinement{}, ZeroInteraction{}, beta};
}

EmpiricalMeasure atoms(std::vector<double> x) { return {1, std::move(x)}; }

GridDensity von_mises(const Grid& g, double kappa, double centre = 0.0) {
  return GridDensity::from_function(
      g, [=](double x) { return std::exp(kappa * std::cos(2 * kPi * (x - centre))); });
}

GridDensity clustered(double beta) {
  return find_steady_state(kuramoto(beta), von_mises(torus_grid(256), 1.0)).density;
}

}  // namespace

TEST_CASE("W2 between empirical measures") {
  const Domain line = Domain::line();
  CHECK(wasserstein2_1d(atoms({0.0}), atoms({1.0}), line) == Approx(1.0));
  CHECK(wasserstein2_1d(atoms({0.3, -2.0, 5.0}), atoms({5.0, 0.3, -2.0}), line) == 0.0);

  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> a(20000), b(20000);
  const double c = 0.37;
  for (auto& x : a) x = u(gen);
  for (auto& x : b) x = u(gen) + c;
  // the quantile mismatch of two independent samples of size n is O(n^-1/2)
  CHECK(wasserstein2_1d(atoms(a), atoms(b), line) == Approx(c).epsilon(0.03));

  // on the circle 0.1 and 0.9 are 0.2 apart
  CHECK(wasserstein2_1d(atoms({0.1}), atoms({0.9}), Domain::torus()) == Approx(0.2).epsilon(1e-6));
}

TEST_CASE("W2 between grid densities") {
  const Grid g = interval_grid(1024, -8.0, 8.0);
  auto gauss = [&](double m) {
    return GridDensity::from_function(g, [=](double x) { return std::exp(-(x - m) * (x - m) / 2); });
  };
  CHECK(wasserstein2_1d(gauss(0.0), gauss(0.0)) < 1e-12);
  CHECK(wasserstein2_1d(gauss(0.0), gauss(0.5)) == Approx(0.5).epsilon(1e-3));

  // a narrow bump moved by 0.25 has no mass near the antipode, so the
  // circle plan is the line plan; broad bumps can be moved more cheaply
  const Grid t = torus_grid(1024);
  CHECK(wasserstein2_1d(von_mises(t, 50.0), von_mises(t, 50.0, 0.25)) == Approx(0.25).epsilon(1e-3));
  CHECK(wasserstein2_1d(von_mises(t, 2.0), von_mises(t, 2.0, 0.25)) < 0.25);
}

TEST_CASE("scaled Wasserstein over replicas") {
  auto model = std::make_shared<const PotentialSpec>(Domain::line(), QuadraticConfinement{},
                                                     ZeroInteraction{}, 1.0);
  std::vector<ParticleEnsemble> a, b;
  for (std::uint64_t r = 0; r < 4; ++r) {
    std::vector<double> x{0.1 * r, -1.0, 2.0 + r};
    a.emplace_back(model, x, 1, r);
    for (auto& v : x) v += 0.75;
    b.emplace_back(model, x, 1, r);
  }
  CHECK(scaled_wasserstein(a, a, true).value == 0.0);
  CHECK(scaled_wasserstein(a, a, false).value == 0.0);
  CHECK(scaled_wasserstein(a, b, true).value == Approx(0.75));
  const auto proxy = scaled_wasserstein(a, b, false);
  CHECK(proxy.proxy);
  CHECK(proxy.value == Approx(0.75));
  const std::vector<ParticleEnsemble> one(a.begin(), a.begin() + 1);
  CHECK_THROWS_AS(scaled_wasserstein(one, one, true), InsufficientDataError);
}

TEST_CASE("relative entropy of chaotic states") {
  const auto flat = GridDensity::flat(torus_grid(256));
  CHECK(std::abs(relative_entropy_chaotic(flat, kuramoto(1.0), 1000, {flat}).value) < 1e-12);

  const auto spec = kuramoto(3.0);
  const auto cl = clustered(3.0);
  REQUIRE(order_parameter(cl) > 0.1);
  const double gap = free_energy(flat, spec) - free_energy(cl, spec);
  CHECK(gap > 0.0);
  CHECK(relative_entropy_chaotic(flat, spec, 64, {flat, cl}).value == Approx(gap).epsilon(1e-10));
  CHECK_THROWS_AS(relative_entropy_chaotic(flat, spec, 64, {}), DependencyError);
}

TEST_CASE("exact Gibbs energy of two particles") {
  // H_2 = -cos(2 pi (x - y)) / 2, so Z_2 = I0(beta / 2)
  for (double beta : {0.5, 2.0, 6.0}) {
    const double expected = -std::log(std::cyl_bessel_i(0.0, beta / 2)) / (2 * beta);
    CHECK(gibbs_energy_exact(kuramoto(beta), torus_grid(256), 2) == Approx(expected).epsilon(1e-10));
  }
  CHECK(std::abs(gibbs_energy_exact(free_torus(), torus_grid(64), 1)) < 1e-14);
  CHECK_THROWS_AS(gibbs_energy_exact(kuramoto(1.0), torus_grid(16), 4), PreconditionError);
}

TEST_CASE("chaotic Fisher information") {
  const auto flat = GridDensity::flat(torus_grid(256));
  CHECK(fisher_info_chaotic_exact(flat, free_torus(), 5) == 0.0);
  CHECK(fisher_info_chaotic_mc(flat, free_torus(), 5, 10000, 1).mean == 0.0);

  const auto spec = kuramoto(1.0);
  const double pi2 = kPi * kPi;
  CHECK(fisher_info_chaotic_exact(flat, spec, 2) == Approx(pi2).epsilon(1e-10));
  CHECK(fisher_info_chaotic_exact(flat, spec, 100000000) == Approx(2 * pi2).epsilon(1e-7));

  const auto mc = fisher_info_chaotic_mc(flat, spec, 2, 1000000, 7);
  CHECK(std::abs(mc.mean - pi2 / 2) <= 3 * mc.stderr);
  const auto half = fisher_info_chaotic_mc(flat, spec, 2, 500000, 8);
  CHECK(half.stderr / mc.stderr == Approx(std::sqrt(2.0)).epsilon(0.2));

  CHECK_THROWS_AS(fisher_info_chaotic_exact(von_mises(torus_grid(256), 0.5), kuramoto(3.0), 2),
                  PreconditionError);
}

TEST_CASE("witness ratio") {
  const auto flat = GridDensity::flat(torus_grid(256));
  CHECK_THROWS_AS(lsi_witness_ratio(kuramoto(1.0), 8, flat, {flat}), WitnessIsMinimiserError);
  CHECK_THROWS_AS(lsi_witness_ratio(free_torus(), 8, flat, {flat}), WitnessIsMinimiserError);

  const auto spec = kuramoto(3.0);
  const auto cl = clustered(3.0);
  const auto a = lsi_witness_ratio(spec, 8, flat, {flat, cl});
  const auto b = lsi_witness_ratio(spec, 16, flat, {flat, cl});
  CHECK(a.witness_ratio > 0.0);
  CHECK(b.witness_ratio / a.witness_ratio == Approx(0.5).epsilon(0.1));
}

TEST_CASE("two-scale LSI bound") {
  const double lambda = 8 * kPi * kPi;
  for (std::size_t n : {2, 16, 128}) {
    const auto free = two_scale_lsi_lower_bound(free_torus(3.0), n, lambda);
    CHECK(free.per_n == Approx(lambda));
    CHECK(free.uniform == Approx(lambda));
    CHECK(free.guaranteed);
  }
  CHECK(two_scale_lsi_lower_bound(kuramoto(1e-9), 4, lambda).uniform == Approx(lambda).epsilon(1e-6));
  const auto cold = two_scale_lsi_lower_bound(kuramoto(20.0), 4, lambda);
  CHECK(cold.uniform < 0.0);
  CHECK_FALSE(cold.guaranteed);

  const PotentialSpec line{Domain::line(), QuadraticConfinement{}, QuadraticInteraction{}, 1.0};
  CHECK_THROWS_AS(two_scale_lsi_lower_bound(line, 4, 1.0), UnsupportedModelError);
  CHECK(std::isfinite(two_scale_lsi_lower_bound(line, 4, 1.0, true, 0.01).uniform));
}

TEST_CASE("Talagrand margins") {
  const auto spec = kuramoto(1.0);
  const auto flat = GridDensity::flat(torus_grid(256));
  const auto vm = von_mises(torus_grid(256), 0.4);
  CHECK(std::abs(talagrand_check(spec, {flat}, {flat}, 2 * kPi * kPi)[0]) < 1e-12);
  const auto zero = talagrand_check(spec, {vm}, {flat}, 0.0);
  CHECK(zero[0] == Approx(free_energy(vm, spec) - free_energy(flat, spec)));
  CHECK(zero[0] >= 0.0);
  CHECK_THROWS_AS(talagrand_check(spec, {vm}, {}, 1.0), DependencyError);
}

TEST_CASE("Gronwall bound") {
  CHECK(gronwall_bound(2.0, 0.0, 3.0, 16) == 0.0);
  CHECK(gronwall_bound(0.0, 1.5, 3.0, 16) == Approx(0.75 * 3.0 / 4.0));
  CHECK(gronwall_bound(1e-9, 1.5, 3.0, 16) == Approx(gronwall_bound(0.0, 1.5, 3.0, 16)).epsilon(1e-8));
  CHECK(gronwall_bound(2.0, 1.0, 1.0, 1) == Approx((1 - std::exp(-1.0)) / 2.0));

  // flat state: |W'|^2 * flat = 2 pi^2
  MeanFieldFlow flow{{0.0}, {GridDensity::flat(torus_grid(256))}};
  CHECK(gronwall_source_constant(flow, kuramoto(1.0)) == Approx(kPi * std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("negative Sobolev norm") {
  CHECK(hminus_s_norm({}, 2.0) == 0.0);
  CHECK(hminus_s_norm({{1, {1.0, 0.0}}}, 2.0) == Approx(std::pow(1 + 4 * kPi * kPi, -1.0)));
  CHECK(hminus_s_norm({{1, {0.0, 1.0}}}, 3.0) == Approx(std::pow(1 + 4 * kPi * kPi, -1.5)));
  CHECK_THROWS_AS(hminus_s_norm({{0, {0.1, 0.0}}}, 2.0), PreconditionError);
}

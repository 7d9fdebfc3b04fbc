#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "mckean/errors.hpp"
#include "mckean/model.hpp"

using namespace mckean;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

PotentialSpec torus_cos(std::vector<double> c, double beta = 1.0) {
  return {Domain::torus(), ZeroConfinement{}, CosineSumInteraction{std::move(c)}, beta};
}

PotentialSpec line_model(Confinement v, Interaction w, double beta = 1.0) {
  return {Domain::line(), std::move(v), std::move(w), beta};
}

}  // namespace

TEST_CASE("confining gradients") {
  const auto quad = line_model(QuadraticConfinement{1.0}, ZeroInteraction{});
  const auto dw = line_model(DoubleWellConfinement{}, ZeroInteraction{});
  const std::vector<double> zero{0.0}, one{1.0}, half{0.5};
  CHECK(grad_confining(quad, zero)[0] == 0.0);
  CHECK(grad_confining(dw, one)[0] == Approx(0.0));
  CHECK(grad_confining(dw, half)[0] == Approx(-1.5));

  // box: V = (1 - |x|^2)^2, grad = -4 x (1 - |x|^2)
  const PotentialSpec box{Domain::box(2, -2.0, 2.0), DoubleWellConfinement{}, ZeroInteraction{}, 1.0};
  const std::vector<double> p{0.5, 0.5};
  const auto g = grad_confining(box, p);
  CHECK(g[0] == Approx(-4.0 * 0.5 * 0.5));
  CHECK(g[1] == Approx(-1.0));
  const std::vector<double> outside{3.0, 0.0};
  CHECK_THROWS_AS(grad_confining(box, outside), DomainError);
}

TEST_CASE("interaction gradients") {
  const auto quad = line_model(QuadraticConfinement{}, QuadraticInteraction{});
  const std::vector<double> x{1.0}, y{0.0};
  CHECK(grad1_interaction(quad, x, x)[0] == 0.0);
  CHECK(grad1_interaction(quad, x, y)[0] == Approx(1.0));

  const auto kur = torus_cos({1.0});
  const std::vector<double> q{0.25};
  CHECK(grad1_interaction(kur, q, y)[0] == Approx(2.0 * kPi));
  const std::vector<double> bad{1.25};
  CHECK_THROWS_AS(grad1_interaction(kur, bad, y), DomainError);
}

TEST_CASE("gradients agree with finite differences") {
  const auto kur = torus_cos({1.0, -0.4, 0.25});
  const auto dw = line_model(DoubleWellConfinement{}, QuadraticInteraction{});
  const double h = 1e-6;
  for (double x : {0.1, 0.37, 0.8}) {
    const double fd = (kur.W(x + h, 0.2) - kur.W(x - h, 0.2)) / (2 * h);
    CHECK(kur.grad1_W(x, 0.2) == Approx(fd).epsilon(1e-6));
  }
  for (double x : {-1.3, 0.2, 0.9}) {
    const double fd = (dw.V(x + h) - dw.V(x - h)) / (2 * h);
    CHECK(dw.grad_V(x) == Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("interaction is symmetric") {
  const auto kur = torus_cos({1.0, 0.5});
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(gen), y = u(gen);
    REQUIRE(kur.W(x, y) == Approx(kur.W(y, x)).epsilon(1e-14));
  }
}

TEST_CASE("Fourier coefficients") {
  const PotentialSpec free{Domain::torus(), ZeroConfinement{}, ZeroInteraction{}, 1.0};
  const auto none = fourier_coefficients(free, 8);
  for (double c : none.nonnegative_modes()) CHECK(c == 0.0);

  const auto one = fourier_coefficients(torus_cos({1.0}), 8);
  CHECK(one(1) == Approx(-0.5));
  CHECK(one(-1) == Approx(-0.5));
  for (int k = 2; k <= 8; ++k) CHECK(std::abs(one(k)) < 1e-12);

  const auto two = fourier_coefficients(torus_cos({1.0, 1.0}), 8);
  CHECK(two(1) == Approx(-0.5));
  CHECK(two(2) == Approx(-0.5));
  CHECK(std::abs(two(3)) < 1e-12);

  CHECK_THROWS_AS(fourier_coefficients(line_model(QuadraticConfinement{}, QuadraticInteraction{})),
                  UnsupportedModelError);
}

TEST_CASE("Fourier round trip of a cosine sum") {
  const auto spec = torus_cos({0.7, -0.3, 0.2});
  const auto c = fourier_coefficients(spec, 16);
  for (double x = 0.0; x < 1.0; x += 0.0625) {
    double sum = c(0);
    for (int k = 1; k <= 16; ++k) sum += 2.0 * c(k) * std::cos(2 * kPi * k * x);
    CHECK(std::abs(sum - spec.W(x, 0.0)) < 1e-8);
  }
}

TEST_CASE("tabulated interaction matches its analytic Fourier data") {
  std::vector<double> xs, ys;
  for (int i = 0; i < 256; ++i) {
    xs.push_back(i / 256.0);
    ys.push_back(1.0 - std::cos(2 * kPi * xs.back()));  // w(0) = 0
  }
  const PotentialSpec spec{Domain::torus(), ZeroConfinement{},
                           TabulatedInteraction{TabulatedFunction(xs, ys, TableBoundary::kPeriodic)},
                           1.0};
  const auto c = fourier_coefficients(spec, 4);
  CHECK(c(0) == Approx(1.0).epsilon(1e-6));
  CHECK(c(1) == Approx(-0.5).epsilon(1e-6));
  CHECK(std::abs(c(2)) < 1e-6);
  CHECK(beta_sharp(spec, 4) == Approx(2.0).epsilon(1e-5));
}

TEST_CASE("beta_sharp") {
  CHECK(beta_sharp(torus_cos({1.0})) == Approx(2.0));
  CHECK(beta_sharp(torus_cos({1.0, 1.0})) == Approx(2.0));
  CHECK(beta_sharp(torus_cos({-1.0})) == std::numeric_limits<double>::infinity());
  CHECK(beta_sharp(torus_cos({0.5, 2.0})) == Approx(1.0));

  // making the most negative mode deeper can only lower beta_sharp
  double prev = beta_sharp(torus_cos({0.2}));
  for (double c = 0.4; c < 3.0; c += 0.2) {
    const double b = beta_sharp(torus_cos({c}));
    CHECK(b <= prev);
    prev = b;
  }
}

TEST_CASE("H-stability") {
  const PotentialSpec free{Domain::torus(), ZeroConfinement{}, ZeroInteraction{}, 1.0};
  CHECK(is_h_stable(free));
  CHECK(is_h_stable(torus_cos({-1.0})));
  CHECK_FALSE(is_h_stable(torus_cos({1.0})));
  CHECK_FALSE(is_h_stable(torus_cos({-1.0, 0.1})));
}

TEST_CASE("model construction rejects inconsistent inputs") {
  CHECK_THROWS_AS(torus_cos({1.0}, 0.0), ConfigError);
  CHECK_THROWS_AS(torus_cos({1.0}, -1.0), ConfigError);
  CHECK_THROWS_AS(line_model(QuadraticConfinement{}, CosineSumInteraction{{1.0}}), ConfigError);
  CHECK_THROWS_AS((PotentialSpec{Domain::torus(), QuadraticConfinement{}, ZeroInteraction{}, 1.0}),
                  ConfigError);
  CHECK_NOTHROW(torus_cos({1.0}, std::numeric_limits<double>::infinity()));
}

TEST_CASE("model checks") {
  auto errors = [](const std::vector<ModelDiagnostic>& d) {
    int n = 0;
    for (const auto& x : d) n += x.severity == Severity::kError;
    return n;
  };
  CHECK(check_model(line_model(QuadraticConfinement{}, QuadraticInteraction{})).empty());

  // -cos has W(x, x) = -1: a constant offset, reported but not fatal
  const auto kur = check_model(torus_cos({1.0}));
  CHECK(errors(kur) == 0);
  CHECK_FALSE(kur.empty());

  // declared K_V = 1 for the double well contradicts V''(0) = -4
  const PotentialSpec wrong{Domain::line(), DoubleWellConfinement{}, ZeroInteraction{}, 1.0, 1.0};
  const auto d = check_model(wrong);
  CHECK(errors(d) == 0);
  bool convexity = false;
  for (const auto& x : d) convexity |= x.message.find("below K_V") != std::string::npos;
  CHECK(convexity);
}

#include "mckean/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "mckean/errors.hpp"

namespace mckean {

namespace {

void require_power_of_two(std::size_t size) {
  if (size < 4 || !std::has_single_bit(size)) {
    throw PreconditionError("grid size must be a power of two >= 4, got " +
                            std::to_string(size));
  }
}

void require_same_grid(const GridDensity& a, const GridDensity& b) {
  if (a.grid.size != b.grid.size || a.grid.kind != b.grid.kind ||
      a.grid.lower != b.grid.lower || a.grid.dx != b.grid.dx) {
    throw PreconditionError("densities live on different grids");
  }
}

}  // namespace

std::vector<double> Grid::nodes() const {
  std::vector<double> out(size);
  for (std::size_t i = 0; i < size; ++i) out[i] = x(i);
  return out;
}

Grid torus_grid(std::size_t size) {
  require_power_of_two(size);
  return {GridKind::kTorus, size, 0.0, 1.0 / static_cast<double>(size)};
}

Grid interval_grid(std::size_t size, double lower, double upper) {
  require_power_of_two(size);
  if (!(upper > lower)) throw PreconditionError("interval grid needs lower < upper");
  return {GridKind::kInterval, size, lower, (upper - lower) / static_cast<double>(size)};
}

Grid make_grid(const PotentialSpec& spec, std::size_t size) {
  const auto& dom = spec.domain();
  if (dom.is_torus()) return torus_grid(size);
  if (dom.is_line()) {
    const double L = line_half_width(spec);
    return interval_grid(size, -L, L);
  }
  if (dom.dim != 1) throw UnsupportedModelError("density grids are one-dimensional");
  return interval_grid(size, dom.lower, dom.upper);
}

double GridDensity::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.dx;
}

void GridDensity::normalize() {
  const double m = mass();
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw PositivityError("density has no positive finite mass");
  }
  for (double& v : values) v /= m;
}

void GridDensity::validate(double tol) const {
  if (values.size() != grid.size) throw PreconditionError("density size does not match its grid");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw PositivityError("density value at node " + std::to_string(i) +
                            " is negative or not finite");
    }
  }
  if (std::abs(mass() - 1.0) > tol) {
    throw PreconditionError("density mass " + std::to_string(mass()) + " differs from 1");
  }
}

GridDensity GridDensity::flat(const Grid& grid) {
  const double h = 1.0 / (grid.dx * static_cast<double>(grid.size));
  return {grid, std::vector<double>(grid.size, h)};
}

GridDensity GridDensity::from_function(const Grid& grid,
                                       const std::function<double(double)>& f) {
  GridDensity rho{grid, std::vector<double>(grid.size)};
  for (std::size_t i = 0; i < grid.size; ++i) rho.values[i] = f(grid.x(i));
  rho.normalize();
  return rho;
}

std::complex<double> fourier_mode(const GridDensity& rho, int k) {
  if (!rho.grid.is_torus()) throw UnsupportedModelError("Fourier modes need a torus grid");
  // exact accumulation of the phase by index keeps this accurate for large M
  const double w = 2.0 * std::numbers::pi * k / static_cast<double>(rho.grid.size);
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < rho.grid.size; ++i) {
    const double a = w * static_cast<double>(i);
    re += rho.values[i] * std::cos(a);
    im -= rho.values[i] * std::sin(a);
  }
  return {re * rho.grid.dx, im * rho.grid.dx};
}

double order_parameter(const GridDensity& rho) {
  if (rho.grid.is_torus()) return std::abs(fourier_mode(rho, 1));
  double m = 0.0;
  for (std::size_t i = 0; i < rho.grid.size; ++i) m += rho.grid.x(i) * rho.values[i];
  return std::abs(m * rho.grid.dx);
}

double l1_distance(const GridDensity& a, const GridDensity& b) {
  require_same_grid(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += std::abs(a.values[i] - b.values[i]);
  return s * a.grid.dx;
}

double sup_distance(const GridDensity& a, const GridDensity& b) {
  require_same_grid(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    s = std::max(s, std::abs(a.values[i] - b.values[i]));
  }
  return s;
}

double interpolate(const Grid& grid, const std::vector<double>& values, double x) {
  const std::size_t M = grid.size;
  if (grid.is_torus()) {
    double s = (x - grid.lower) / grid.dx;
    s -= std::floor(s / static_cast<double>(M)) * static_cast<double>(M);
    auto i = static_cast<std::size_t>(s);
    if (i >= M) i = M - 1;
    const double t = s - static_cast<double>(i);
    return (1.0 - t) * values[i] + t * values[(i + 1) % M];
  }
  const double s = (x - grid.lower) / grid.dx - 0.5;
  std::size_t i = 0;
  if (s >= static_cast<double>(M - 1)) {
    i = M - 2;
  } else if (s > 0.0) {
    i = static_cast<std::size_t>(s);
  }
  const double t = s - static_cast<double>(i);
  return (1.0 - t) * values[i] + t * values[i + 1];
}

}  // namespace mckean

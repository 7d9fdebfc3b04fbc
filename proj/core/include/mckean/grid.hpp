#ifndef MCKEAN_GRID_HPP
#define MCKEAN_GRID_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "mckean/model.hpp"

namespace mckean {

enum class GridKind {
  kTorus,    // x_i = i dx on [0, 1), periodic
  kInterval  // cell centres of [lower, upper], no-flux walls
};

struct Grid {
  GridKind kind = GridKind::kTorus;
  std::size_t size = 0;
  double lower = 0.0;
  double dx = 0.0;

  bool is_torus() const noexcept { return kind == GridKind::kTorus; }
  double upper() const noexcept { return lower + dx * static_cast<double>(size); }
  double x(std::size_t i) const noexcept {
    const double offset = is_torus() ? 0.0 : 0.5;
    return lower + (static_cast<double>(i) + offset) * dx;
  }
  std::vector<double> nodes() const;
};

// Throws PreconditionError unless size is a power of two (>= 4).
Grid torus_grid(std::size_t size);
Grid interval_grid(std::size_t size, double lower, double upper);

// Grid of the PDE for this model: the torus, [-L, L] with L from
// line_half_width for the line, or [lower, upper] for a 1-D box.
Grid make_grid(const PotentialSpec& spec, std::size_t size = 256);

/// Nodal values of a probability density with quadrature weights dx.
struct GridDensity {
  Grid grid;
  std::vector<double> values;

  double mass() const;
  void normalize();
  // Throws PositivityError on negative or non-finite values and
  // PreconditionError if the mass differs from 1 by more than tol.
  void validate(double tol = 1e-10) const;

  static GridDensity flat(const Grid& grid);
  // Samples f at the nodes and normalises.
  static GridDensity from_function(const Grid& grid,
                                   const std::function<double(double)>& f);
};

// Time series of densities, e.g. a solved mean-field trajectory.
struct MeanFieldFlow {
  std::vector<double> times;
  std::vector<GridDensity> states;
};

// rho^(k) = sum_i rho_i exp(-2 pi i k x_i) dx  (torus grids).
std::complex<double> fourier_mode(const GridDensity& rho, int k);

// Torus: |int rho(x) exp(2 pi i x) dx|. Interval: |int x rho(x) dx|.
double order_parameter(const GridDensity& rho);

double l1_distance(const GridDensity& a, const GridDensity& b);
double sup_distance(const GridDensity& a, const GridDensity& b);

// Linear interpolation of nodal data: periodic on the torus, extrapolated
// from the end cells on an interval.
double interpolate(const Grid& grid, const std::vector<double>& values, double x);

}  // namespace mckean

#endif  // MCKEAN_GRID_HPP

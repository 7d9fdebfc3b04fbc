#include "mckean/meanfield.hpp"

#include <algorithm>
#include <cmath>

#include "mckean/errors.hpp"

namespace mckean {

namespace {

// Bernoulli function z / (e^z - 1).
double bernoulli(double z) {
  if (std::abs(z) < 1e-8) return 1.0 - 0.5 * z;
  return z / std::expm1(z);
}

// Thomas algorithm; lower[0] and upper[n-1] are ignored.
void solve_tridiagonal(const std::vector<double>& lower, std::vector<double> diag,
                       const std::vector<double>& upper, std::vector<double>& x) {
  const std::size_t n = diag.size();
  std::vector<double> c(n);
  c[0] = upper[0] / diag[0];
  x[0] /= diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double m = diag[i] - lower[i] * c[i - 1];
    c[i] = i + 1 < n ? upper[i] / m : 0.0;
    x[i] = (x[i] - lower[i] * x[i - 1]) / m;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
}

// Cyclic system with corners A[0][n-1] = lower[0], A[n-1][0] = upper[n-1],
// by Sherman-Morrison.
void solve_cyclic_tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag,
                              const std::vector<double>& upper, std::vector<double>& x) {
  const std::size_t n = diag.size();
  const double corner_top = lower[0];
  const double corner_bottom = upper[n - 1];
  const double gamma = -diag[0];
  std::vector<double> bb = diag;
  bb[0] -= gamma;
  bb[n - 1] -= corner_bottom * corner_top / gamma;
  solve_tridiagonal(lower, bb, upper, x);
  std::vector<double> z(n, 0.0);
  z[0] = gamma;
  z[n - 1] = corner_bottom;
  solve_tridiagonal(lower, bb, upper, z);
  const double fact = (x[0] + corner_top * x[n - 1] / gamma) /
                      (1.0 + z[0] + corner_top * z[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
}

double entropy_term(const GridDensity& rho) {
  double s = 0.0;
  for (double v : rho.values) {
    if (v > 0.0) s += v * std::log(v);
  }
  return s * rho.grid.dx;
}

}  // namespace

McKeanVlasovSolver::McKeanVlasovSolver(const PotentialSpec& spec, const Grid& grid)
    : spec_(spec), grid_(grid), v_nodes_(grid.size, 0.0) {
  if (spec.dim() != 1) throw UnsupportedModelError("the PDE solver is one-dimensional");
  if (spec.domain().is_torus() != grid.is_torus()) {
    throw PreconditionError("grid kind does not match the model domain");
  }
  if (spec.has_confinement()) {
    for (std::size_t i = 0; i < grid.size; ++i) v_nodes_[i] = spec.V(grid.x(i));
  }
  if (spec.has_interaction()) {
    conv_w_.emplace(grid, [&](double z) { return spec_.interaction_profile(z); });
    conv_dw_.emplace(grid, [&](double z) { return spec_.interaction_profile_derivative(z); });
  }
}

std::vector<double> McKeanVlasovSolver::interaction_field(const GridDensity& rho) {
  if (!conv_w_) return std::vector<double>(grid_.size, 0.0);
  return conv_w_->apply(rho.values);
}

std::vector<double> McKeanVlasovSolver::interaction_gradient(const GridDensity& rho) {
  if (!conv_dw_) return std::vector<double>(grid_.size, 0.0);
  return conv_dw_->apply(rho.values);
}

std::vector<double> McKeanVlasovSolver::potential(const GridDensity& rho) {
  auto phi = interaction_field(rho);
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] += v_nodes_[i];
  return phi;
}

void McKeanVlasovSolver::step(GridDensity& rho, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("dt must be positive");
  if (!std::isfinite(spec_.beta())) throw PreconditionError("the PDE needs a finite beta");
  const std::size_t M = grid_.size;
  const double dx = grid_.dx;
  const bool torus = grid_.is_torus();
  const auto phi = potential(rho);
  const double temp = spec_.temperature();
  const double beta = spec_.beta();

  // face f sits between node f and node f+1 (mod M on the torus)
  const std::size_t faces = torus ? M : M - 1;
  std::vector<double> a(faces), b(faces);
  double max_drift = 0.0;
  for (std::size_t f = 0; f < faces; ++f) {
    const double dphi = phi[(f + 1) % M] - phi[f];
    max_drift = std::max(max_drift, std::abs(dphi) / dx);
    const double delta = beta * dphi;
    a[f] = temp * bernoulli(delta) / dx;
    b[f] = temp * bernoulli(-delta) / dx;
  }
  if (max_drift * dt / dx > 1.0) {
    throw StepSizeError("CFL violation: max drift * dt / dx = " +
                        std::to_string(max_drift * dt / dx));
  }

  const double r = dt / dx;
  std::vector<double> lower(M, 0.0), diag(M, 1.0), upper(M, 0.0);
  for (std::size_t i = 0; i < M; ++i) {
    const bool has_right = torus || i + 1 < M;
    const bool has_left = torus || i > 0;
    if (has_right) {
      diag[i] += r * a[i];
      upper[i] = -r * b[i];
    }
    if (has_left) {
      const std::size_t fl = (i + M - 1) % M;
      diag[i] += r * b[fl];
      lower[i] = -r * a[fl];
    }
  }
  std::vector<double> x = rho.values;
  if (torus) {
    solve_cyclic_tridiagonal(lower, diag, upper, x);
  } else {
    solve_tridiagonal(lower, diag, upper, x);
  }
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, v);
  for (std::size_t i = 0; i < M; ++i) {
    if (!std::isfinite(x[i]) || x[i] < -1e-12 * std::max(1.0, peak)) {
      throw PositivityError("density became negative at node " + std::to_string(i));
    }
    x[i] = std::max(x[i], 0.0);
  }
  rho.values = std::move(x);
  rho.normalize();
}

GridDensity mckean_vlasov_step(const GridDensity& rho, const PotentialSpec& spec, double dt) {
  McKeanVlasovSolver solver(spec, rho.grid);
  GridDensity out = rho;
  solver.step(out, dt);
  return out;
}

MeanFieldFlow solve_mean_field(const PotentialSpec& spec, GridDensity init, double dt,
                               double t_end, std::size_t record_every) {
  if (record_every == 0) record_every = 1;
  McKeanVlasovSolver solver(spec, init.grid);
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  MeanFieldFlow flow;
  flow.times.push_back(0.0);
  flow.states.push_back(init);
  for (std::size_t n = 1; n <= steps; ++n) {
    solver.step(init, dt);
    if (n % record_every == 0 || n == steps) {
      flow.times.push_back(static_cast<double>(n) * dt);
      flow.states.push_back(init);
    }
  }
  return flow;
}

double energy_per_particle_product(const GridDensity& rho, const PotentialSpec& spec,
                                   std::size_t n) {
  if (n == 0) throw PreconditionError("N must be >= 1");
  const double factor = 1.0 - 1.0 / static_cast<double>(n);
  McKeanVlasovSolver solver(spec, rho.grid);
  const auto conv = solver.interaction_field(rho);
  double v = 0.0, w = 0.0;
  for (std::size_t i = 0; i < rho.grid.size; ++i) {
    if (spec.has_confinement()) v += spec.V(rho.grid.x(i)) * rho.values[i];
    w += conv[i] * rho.values[i];
  }
  const double temp = std::isfinite(spec.beta()) ? spec.temperature() : 0.0;
  return temp * entropy_term(rho) + v * rho.grid.dx + 0.5 * factor * w * rho.grid.dx;
}

double free_energy(const GridDensity& rho, const PotentialSpec& spec) {
  McKeanVlasovSolver solver(spec, rho.grid);
  const auto conv = solver.interaction_field(rho);
  double v = 0.0, w = 0.0;
  for (std::size_t i = 0; i < rho.grid.size; ++i) {
    if (spec.has_confinement()) v += spec.V(rho.grid.x(i)) * rho.values[i];
    w += conv[i] * rho.values[i];
  }
  return spec.temperature() * entropy_term(rho) + v * rho.grid.dx + 0.5 * w * rho.grid.dx;
}

double dissipation(const GridDensity& rho, const PotentialSpec& spec) {
  const Grid& g = rho.grid;
  const std::size_t M = g.size;
  McKeanVlasovSolver solver(spec, g);
  auto phi = solver.potential(rho);
  std::vector<double> mu(M);
  for (std::size_t i = 0; i < M; ++i) {
    if (!(rho.values[i] > 0.0)) {
      if (g.is_torus()) {
        throw PositivityError("dissipation needs a strictly positive density on the torus");
      }
      mu[i] = 0.0;
      continue;
    }
    mu[i] = spec.temperature() * std::log(rho.values[i]) + phi[i];
  }
  std::vector<double> dmu(M, 0.0);
  if (g.is_torus()) {
    dmu = spectral_derivative(g, mu);
  } else {
    const double h = g.dx;
    for (std::size_t i = 0; i < M; ++i) {
      if (i >= 2 && i + 2 < M) {
        dmu[i] = (mu[i - 2] - 8.0 * mu[i - 1] + 8.0 * mu[i + 1] - mu[i + 2]) / (12.0 * h);
      } else if (i == 0) {
        dmu[i] = (-3.0 * mu[0] + 4.0 * mu[1] - mu[2]) / (2.0 * h);
      } else if (i + 1 == M) {
        dmu[i] = (3.0 * mu[i] - 4.0 * mu[i - 1] + mu[i - 2]) / (2.0 * h);
      } else {
        dmu[i] = (mu[i + 1] - mu[i - 1]) / (2.0 * h);
      }
    }
  }
  double d = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    if (rho.values[i] > 0.0) d += dmu[i] * dmu[i] * rho.values[i];
  }
  return d * g.dx;
}

}  // namespace mckean

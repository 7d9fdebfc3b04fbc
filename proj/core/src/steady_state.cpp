#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mckean/errors.hpp"
#include "mckean/meanfield.hpp"
#include "mckean/parallel.hpp"
#include "mckean/rng.hpp"

namespace mckean {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

GridDensity gibbs_map_with(McKeanVlasovSolver& solver, const GridDensity& rho) {
  const auto phi = solver.potential(rho);
  const double beta = solver.model().beta();
  // shift by the minimum so every exponent is <= 0
  const double lowest = *std::min_element(phi.begin(), phi.end());
  GridDensity out{rho.grid, std::vector<double>(phi.size())};
  for (std::size_t i = 0; i < phi.size(); ++i) {
    out.values[i] = std::exp(-beta * (phi[i] - lowest));
  }
  out.normalize();
  return out;
}

}  // namespace

GridDensity gibbs_map(const GridDensity& rho, const PotentialSpec& spec) {
  McKeanVlasovSolver solver(spec, rho.grid);
  return gibbs_map_with(solver, rho);
}

GridDensity self_consistency_map(const GridDensity& rho, const PotentialSpec& spec) {
  GridDensity t = gibbs_map(rho, spec);
  for (std::size_t i = 0; i < t.values.size(); ++i) t.values[i] = rho.values[i] - t.values[i];
  return t;
}

double self_consistency_residual(const GridDensity& rho, const PotentialSpec& spec) {
  const auto t = self_consistency_map(rho, spec);
  double r = 0.0;
  for (double v : t.values) r = std::max(r, std::abs(v));
  return r;
}

SteadyStateResult find_steady_state(const PotentialSpec& spec, const GridDensity& init,
                                    const SteadyStateOptions& options) {
  if (!(options.damping > 0.0) || options.damping > 1.0) {
    throw PreconditionError("damping must lie in (0, 1]");
  }
  init.validate(1e-8);
  McKeanVlasovSolver solver(spec, init.grid);
  SteadyStateResult result{init, 0, false, {}};
  GridDensity& rho = result.density;
  // The damped map diverges by oscillation when beta |W^(k)| is large for a
  // repulsive mode; halve the damping whenever successive updates point in
  // opposite directions and the residual grew. Growth along a fixed direction
  // (escape from an unstable state) leaves the damping alone.
  double theta = options.damping;
  std::vector<double> diff(rho.values.size()), prev_diff;
  double prev_residual = 0.0;
  while (result.iterations < options.max_iter) {
    const GridDensity next = gibbs_map_with(solver, rho);
    ++result.iterations;
    double residual = 0.0;
    for (std::size_t i = 0; i < next.values.size(); ++i) {
      diff[i] = next.values[i] - rho.values[i];
      residual = std::max(residual, std::abs(diff[i]));
    }
    result.residual_history.push_back(residual);
    if (!std::isfinite(residual)) break;
    if (residual < options.tol) {
      result.converged = true;
      break;
    }
    if (!prev_diff.empty() && residual > prev_residual) {
      double dot = 0.0;
      for (std::size_t i = 0; i < diff.size(); ++i) dot += diff[i] * prev_diff[i];
      if (dot < 0.0) theta = std::max(0.5 * theta, 1e-4);
    }
    for (std::size_t i = 0; i < next.values.size(); ++i) rho.values[i] += theta * diff[i];
    prev_diff = diff;
    prev_residual = residual;
  }
  return result;
}

std::vector<SteadyStateResult> multistart_steady_states(const PotentialSpec& spec,
                                                        std::size_t grid_size,
                                                        std::uint64_t seed,
                                                        const SteadyStateOptions& options) {
  const Grid grid = make_grid(spec, grid_size);
  std::vector<GridDensity> starts;
  if (grid.is_torus()) {
    starts.push_back(GridDensity::flat(grid));
    for (double sign : {1.0, -1.0}) {
      starts.push_back(GridDensity::from_function(
          grid, [&](double x) { return 1.0 + sign * 0.1 * std::cos(kTwoPi * x); }));
    }
    for (std::uint64_t s = 0; s < 4; ++s) {
      CounterRng rng(stream_key(seed, StreamTag::kPerturbation, s));
      const double p1 = kTwoPi * rng.uniform(), p2 = kTwoPi * rng.uniform();
      starts.push_back(GridDensity::from_function(grid, [&](double x) {
        return 1.0 + 0.5 * std::cos(kTwoPi * x + p1) + 0.3 * std::cos(2.0 * kTwoPi * x + p2);
      }));
    }
  } else {
    const double width = grid.upper() - grid.lower;
    const double centre = 0.5 * (grid.upper() + grid.lower);
    const double beta = spec.beta();
    starts.push_back(GridDensity::from_function(grid, [&](double x) {
      return std::exp(-beta * (spec.has_confinement() ? spec.V(x) - spec.V(centre) : 0.0));
    }));
    // tilted starts break the x -> -x symmetry both ways
    for (double tilt : {0.1, -0.1, 0.3, -0.3}) {
      starts.push_back(GridDensity::from_function(grid, [&](double x) {
        const double v = spec.has_confinement() ? spec.V(x) - spec.V(centre) : 0.0;
        return std::exp(-beta * (v - tilt * (x - centre) / width * 10.0));
      }));
    }
  }
  std::vector<SteadyStateResult> results(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    results[i] = find_steady_state(spec, starts[i], options);
  });
  std::vector<SteadyStateResult> converged;
  for (auto& r : results) {
    if (r.converged) converged.push_back(std::move(r));
  }
  return converged;
}

PropertyReport check_properties(const PotentialSpec& spec, int k_max, std::size_t grid_size,
                                std::uint64_t seed) {
  if (!spec.domain().is_torus() || spec.has_confinement()) {
    throw UnsupportedModelError("property check needs the flat torus case (V = 0)");
  }
  PropertyReport report;
  report.beta_sharp = beta_sharp(spec, k_max);
  report.a = spec.beta() < report.beta_sharp;
  report.b = report.a;
  report.states = multistart_steady_states(spec, grid_size, seed);
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& s : report.states) {
    report.energies.push_back(free_energy(s.density, spec));
    lowest = std::min(lowest, report.energies.back());
  }
  // the critical point with the highest energy above the minimum
  double best = lowest + 1e-6;
  for (std::size_t i = 0; i < report.states.size(); ++i) {
    if (report.energies[i] > best && dissipation(report.states[i].density, spec) < 1e-8) {
      best = report.energies[i];
      report.c_witness = report.states[i].density;
    }
  }
  return report;
}

PhaseScan scan_phase_transition(const PotentialSpec& spec, const std::vector<double>& betas,
                                double amplitude, const SteadyStateOptions& options,
                                std::size_t grid_size, int k_max) {
  if (!spec.domain().is_torus() || spec.has_confinement()) {
    throw UnsupportedModelError("phase scans need the flat torus case (V = 0)");
  }
  const Grid grid = torus_grid(grid_size);
  const GridDensity flat = GridDensity::flat(grid);
  const GridDensity start = GridDensity::from_function(
      grid, [&](double x) { return 1.0 + amplitude * std::cos(kTwoPi * x); });
  PhaseScan scan;
  scan.rows.resize(betas.size());
  parallel_for(betas.size(), [&](std::size_t i) {
    const PotentialSpec model = spec.with_beta(betas[i]);
    const auto result = find_steady_state(model, start, options);
    ScanRow& row = scan.rows[i];
    row.beta = betas[i];
    row.r = order_parameter(result.density);
    row.energy_gap = free_energy(flat, model) - free_energy(result.density, model);
    row.lambda1 = leading_eigenvalue_flat(model, k_max);
    row.converged = result.converged;
    row.iterations = result.iterations;
  });
  for (const auto& row : scan.rows) {
    if (row.r > 10.0 * options.tol) {
      scan.beta_c = row.beta;
      break;
    }
  }
  return scan;
}

}  // namespace mckean

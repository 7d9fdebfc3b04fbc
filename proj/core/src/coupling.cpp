#include <cmath>

#include "mckean/errors.hpp"
#include "mckean/fft.hpp"
#include "mckean/particle.hpp"

namespace mckean {

CouplingTrace synchronous_coupling_run(std::shared_ptr<const PotentialSpec> model,
                                       std::size_t n_particles, double dt, double t_end,
                                       const MeanFieldFlow& flow, std::uint64_t seed,
                                       std::uint64_t replica, std::size_t log_every) {
  const PotentialSpec& spec = *model;
  if (spec.dim() != 1) throw UnsupportedModelError("coupling runs are one-dimensional");
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw PreconditionError("need dt > 0 and t_end >= 0");
  if (flow.states.empty() || flow.states.size() != flow.times.size()) {
    throw ConfigError("mean-field flow is empty or malformed");
  }
  if (log_every == 0) log_every = 1;
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  if (std::abs(static_cast<double>(steps) * dt - t_end) > 1e-9 * std::max(1.0, t_end)) {
    throw ConfigError("t_end is not a whole number of particle steps");
  }

  // flow index of each step time
  std::vector<std::size_t> index(steps);
  std::size_t cursor = 0;
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * dt;
    const double tol = 1e-9 * std::max(1.0, t);
    while (cursor < flow.times.size() && flow.times[cursor] < t - tol) ++cursor;
    if (cursor == flow.times.size() || std::abs(flow.times[cursor] - t) > tol) {
      throw ConfigError("mean-field flow has no state at particle time " + std::to_string(t));
    }
    index[n] = cursor;
  }

  ParticleEnsemble xs = iid_ensemble(model, flow.states.front(), n_particles, seed, replica);
  std::vector<double> y(xs.positions().begin(), xs.positions().end());
  auto& x = xs.mutable_positions();
  const auto& dom = spec.domain();
  const Grid& grid = flow.states.front().grid;

  std::optional<Convolver> conv;
  if (spec.has_interaction()) {
    conv.emplace(grid, [&](double z) { return spec.interaction_profile_derivative(z); });
  }

  CouplingTrace trace;
  auto record = [&](double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < n_particles; ++i) {
      const double e = displacement(dom, x[i], y[i]);
      s += e * e;
    }
    trace.times.push_back(t);
    trace.distance.push_back(std::sqrt(s / static_cast<double>(n_particles)));
  };
  record(0.0);

  const double sigma = std::sqrt(2.0 * spec.temperature() * dt);
  std::vector<double> bx(n_particles), field(grid.size, 0.0);
  for (std::size_t n = 0; n < steps; ++n) {
    particle_drift(spec, x, bx);
    if (conv) conv->apply(flow.states[index[n]].values, field);
    for (std::size_t i = 0; i < n_particles; ++i) {
      if (!std::isfinite(bx[i])) throw NumericalBlowupError("non-finite drift", i);
      double by = spec.has_confinement() ? -spec.grad_V(y[i]) : 0.0;
      if (conv) by -= interpolate(grid, field, y[i]);
      const double g = sigma * xs.stream(i).normal();
      x[i] += bx[i] * dt + g;
      y[i] += by * dt + g;
      apply_boundary(dom, std::span<double>(&x[i], 1));
      apply_boundary(dom, std::span<double>(&y[i], 1));
      if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
        throw NumericalBlowupError("non-finite position in coupled run", i);
      }
    }
    xs.advance_time(dt);
    if ((n + 1) % log_every == 0 || n + 1 == steps) {
      record(static_cast<double>(n + 1) * dt);
    }
  }
  return trace;
}

}  // namespace mckean

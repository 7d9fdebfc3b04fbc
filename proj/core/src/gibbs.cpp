#include <cmath>
#include <sstream>

#include "mckean/errors.hpp"
#include "mckean/particle.hpp"

namespace mckean {

namespace {

std::vector<double> default_start(const PotentialSpec& spec, std::size_t n, CounterRng& rng) {
  const auto& dom = spec.domain();
  const auto d = static_cast<std::size_t>(dom.dim);
  std::vector<double> x(n * d);
  for (double& v : x) {
    if (dom.is_torus()) {
      v = rng.uniform();
    } else if (dom.is_box()) {
      v = dom.lower + (dom.upper - dom.lower) * rng.uniform();
    } else {
      v = rng.normal();
    }
  }
  return x;
}

}  // namespace

GibbsResult sample_gibbs(std::shared_ptr<const PotentialSpec> model, std::size_t n_particles,
                         const GibbsOptions& options, std::uint64_t seed,
                         std::optional<std::vector<double>> initial, std::uint64_t replica) {
  if (!(options.step > 0.0)) throw PreconditionError("Gibbs step must be positive");
  if (n_particles == 0) throw PreconditionError("Gibbs sampling needs N >= 1");
  if (options.thin == 0) throw PreconditionError("thinning interval must be >= 1");
  const PotentialSpec& spec = *model;
  const auto& dom = spec.domain();
  const auto d = static_cast<std::size_t>(spec.dim());
  CounterRng rng(stream_key(seed, StreamTag::kGibbs, replica));

  std::vector<double> x = initial ? std::move(*initial) : default_start(spec, n_particles, rng);
  if (x.size() != n_particles * d) throw PreconditionError("initial state has the wrong size");

  const double h = options.step;
  const double temp = spec.temperature();
  const double sigma = std::sqrt(2.0 * temp * h);
  const bool mala = options.scheme == GibbsScheme::kMala;

  std::vector<double> bx(x.size()), by(x.size()), y(x.size()), noise(x.size());
  particle_drift(spec, x, bx);
  double hx = hamiltonian(spec, x);

  std::size_t accepted = 0, proposed = 0;
  GibbsResult result;
  const std::size_t total = options.burn_in + options.n_samples * options.thin;
  for (std::size_t it = 0; it < total; ++it) {
    for (double& z : noise) z = rng.normal();
    bool inside = true;
    for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k] + h * bx[k] + sigma * noise[k];
    if (dom.is_box()) {
      if (mala) {
        for (double v : y) inside = inside && v >= dom.lower && v <= dom.upper;
      } else {
        apply_boundary(dom, y);
      }
    } else {
      apply_boundary(dom, y);
    }

    bool accept = !mala;
    double hy = 0.0;
    if (mala && inside) {
      particle_drift(spec, y, by);
      hy = hamiltonian(spec, y);
      // Gaussian proposal densities; forward residual is sigma * noise exactly
      double fwd = 0.0, bwd = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        fwd += noise[k] * noise[k] * sigma * sigma;
        const double r = displacement(dom, x[k], y[k]) - h * by[k];
        bwd += r * r;
      }
      const double log_alpha = -spec.beta() * (hy - hx) - (bwd - fwd) / (4.0 * temp * h);
      accept = std::isfinite(log_alpha) && std::log(rng.uniform()) < log_alpha;
    }
    if (!mala) {
      particle_drift(spec, y, by);
      for (std::size_t k = 0; k < y.size(); ++k) {
        if (!std::isfinite(y[k]) || !std::isfinite(by[k])) {
          throw NumericalBlowupError("non-finite state in Langevin chain", k / d);
        }
      }
    }
    if (it >= options.burn_in) ++proposed;
    if (accept) {
      x.swap(y);
      bx.swap(by);
      hx = mala ? hy : 0.0;
      if (it >= options.burn_in) ++accepted;
    }
    if (it >= options.burn_in && (it - options.burn_in + 1) % options.thin == 0) {
      result.samples.emplace_back(model, x, seed, replica * 1000003ULL + result.samples.size());
    }
  }
  result.acceptance_rate =
      proposed > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed) : 1.0;
  if (mala && result.acceptance_rate < 0.01) {
    std::ostringstream msg;
    msg << "mixing failure: MALA acceptance rate " << result.acceptance_rate
        << " after burn-in is below 1%";
    result.warnings.push_back(msg.str());
  }
  return result;
}

}  // namespace mckean

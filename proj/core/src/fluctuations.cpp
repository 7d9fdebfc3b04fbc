#include "mckean/fluctuations.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mckean/errors.hpp"
#include "mckean/meanfield.hpp"
#include "mckean/parallel.hpp"

namespace mckean {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_coercive(const PotentialSpec& spec) {
  if (!spec.domain().is_torus() || spec.has_confinement()) {
    throw UnsupportedModelError("fluctuation theory is implemented for the flat torus case");
  }
  const double sharp = beta_sharp(spec);
  if (spec.beta() >= sharp) {
    throw CoercivityError("beta = " + std::to_string(spec.beta()) +
                          " is not below beta_sharp = " + std::to_string(sharp) +
                          "; 1/beta + W^(k) > 0 fails");
  }
}

// (1/N) sum_j exp(-2 pi i k x_j) for k = 1..k_max.
std::vector<std::complex<double>> empirical_modes(std::span<const double> x, int k_max) {
  std::vector<std::complex<double>> out(static_cast<std::size_t>(k_max) + 1, 0.0);
  for (double xj : x) {
    const std::complex<double> step = std::polar(1.0, -kTwoPi * xj);
    std::complex<double> z = 1.0;
    for (int k = 1; k <= k_max; ++k) {
      // renormalise the recurrence every few modes to avoid drift
      z = (k % 8 == 0) ? std::polar(1.0, -kTwoPi * k * xj) : z * step;
      out[k] += z;
    }
  }
  for (auto& c : out) c /= static_cast<double>(x.size());
  return out;
}

}  // namespace

FluctuationField compute_fluctuation_field(std::span<const double> positions,
                                           const GridDensity& rho_beta, int k_max, double time) {
  if (!rho_beta.grid.is_torus()) throw UnsupportedModelError("fluctuation fields need the torus");
  if (k_max < 1) throw PreconditionError("k_max must be >= 1");
  const auto modes = empirical_modes(positions, k_max);
  FluctuationField f;
  f.n = positions.size();
  f.time = time;
  const double root_n = std::sqrt(static_cast<double>(f.n));
  for (int k = 1; k <= k_max; ++k) {
    const std::complex<double> h = root_n * (modes[k] - fourier_mode(rho_beta, k));
    f.coefficients[k] = h;
    f.coefficients[-k] = std::conj(h);
  }
  return f;
}

FluctuationField compute_fluctuation_field(const ParticleEnsemble& ens,
                                           const GridDensity& rho_beta, int k_max) {
  if (!ens.model().domain().is_torus()) {
    throw UnsupportedModelError("fluctuation fields need the torus");
  }
  return compute_fluctuation_field(ens.positions(), rho_beta, k_max, ens.time());
}

std::map<int, double> stationary_covariance_theory(const PotentialSpec& spec, int k_max) {
  require_coercive(spec);
  const auto w_hat = fourier_coefficients(spec, std::max(k_max, 1));
  std::map<int, double> c;
  for (int k = 1; k <= k_max; ++k) {
    c[k] = 1.0 / (8.0 * std::numbers::pi * std::numbers::pi * (spec.temperature() + w_hat(k)));
  }
  return c;
}

std::vector<ModeStatistics> empirical_mode_covariance(const std::vector<FluctuationField>& run,
                                                      int k_max) {
  if (run.size() < 4) throw InsufficientDataError("fluctuation record is too short");
  std::vector<ModeStatistics> out;
  for (int k = 1; k <= k_max; ++k) {
    std::vector<double> power(run.size());
    std::complex<double> mean = 0.0;
    for (std::size_t t = 0; t < run.size(); ++t) {
      const auto h = run[t](k);
      power[t] = std::norm(h);
      mean += h;
    }
    mean /= static_cast<double>(run.size());
    const double tau = std::max(1.0, integrated_autocorrelation_time(power));
    if (static_cast<double>(run.size()) < 20.0 * tau) {
      throw InsufficientDataError("mode " + std::to_string(k) + ": record of " +
                                  std::to_string(run.size()) + " samples is shorter than 20 tau = " +
                                  std::to_string(20.0 * tau));
    }
    const auto batch = static_cast<std::size_t>(std::ceil(10.0 * tau));
    const Estimate e = batch_means(power, batch);
    ModeStatistics s;
    s.k = k;
    s.mean = mean;
    s.variance = e.mean - std::norm(mean);
    s.stderr = e.stderr;
    s.tau = tau;
    out.push_back(s);
  }
  return out;
}

double spde_stationary_variance(const PotentialSpec& spec, int k) {
  require_coercive(spec);
  const auto spectrum = linearized_spectrum_flat(spec, k);
  const double q = kTwoPi * kTwoPi * k * k * 2.0 * spec.temperature();
  return q / (2.0 * std::abs(spectrum.at(k)));
}

std::vector<FluctuationField> simulate_spde(const PotentialSpec& spec, int k_max,
                                            const SpdeOptions& options, std::uint64_t seed) {
  require_coercive(spec);
  if (!(options.dt > 0.0)) throw PreconditionError("dt must be positive");
  const auto spectrum = linearized_spectrum_flat(spec, k_max);
  const auto steps = static_cast<std::size_t>(std::llround(options.t_end / options.dt));
  const std::size_t every = std::max<std::size_t>(1, options.record_every);

  std::vector<std::complex<double>> h(static_cast<std::size_t>(k_max) + 1, 0.0);
  if (options.initial) {
    for (int k = 1; k <= k_max; ++k) {
      auto it = options.initial->coefficients.find(k);
      if (it != options.initial->coefficients.end()) h[k] = it->second;
    }
  }
  std::vector<double> decay(h.size()), spread(h.size());
  std::vector<CounterRng> streams;
  streams.reserve(h.size());
  for (int k = 0; k <= k_max; ++k) {
    streams.emplace_back(stream_key(seed, StreamTag::kMode, static_cast<std::uint64_t>(k)));
    if (k == 0) continue;
    const double lambda = spectrum.at(k);
    decay[k] = std::exp(lambda * options.dt);
    const double q = kTwoPi * kTwoPi * k * k * 2.0 * spec.temperature();
    // complex variance of the exact transition, split over two real parts
    spread[k] = std::sqrt(0.5 * q * -std::expm1(2.0 * lambda * options.dt) / (2.0 * -lambda));
  }

  std::vector<FluctuationField> out;
  auto record = [&](double t) {
    FluctuationField f;
    f.time = t;
    for (int k = 1; k <= k_max; ++k) {
      f.coefficients[k] = h[k];
      f.coefficients[-k] = std::conj(h[k]);
    }
    out.push_back(std::move(f));
  };
  record(0.0);
  for (std::size_t n = 1; n <= steps; ++n) {
    for (int k = 1; k <= k_max; ++k) {
      h[k] *= decay[k];
      if (options.noise) {
        const double re = streams[k].normal();
        const double im = streams[k].normal();
        h[k] += spread[k] * std::complex<double>(re, im);
      }
    }
    if (n % every == 0) record(static_cast<double>(n) * options.dt);
  }
  return out;
}

double hminus_s_distance_squared(std::span<const double> positions, const GridDensity& rho,
                                 double s, int k_max) {
  const auto modes = empirical_modes(positions, k_max);
  double total = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    const double w = std::pow(1.0 + kTwoPi * kTwoPi * k * k, -s);
    total += 2.0 * w * std::norm(modes[k] - fourier_mode(rho, k));
  }
  return total;
}

double lln_iid_uniform_expectation(std::size_t n, double s, int k_max) {
  double total = 0.0;
  for (int k = 1; k <= k_max; ++k) total += 2.0 * std::pow(1.0 + kTwoPi * kTwoPi * k * k, -s);
  return total / static_cast<double>(n);
}

LlnResult lln_decay_experiment(std::shared_ptr<const PotentialSpec> model,
                               const GridDensity& rho_beta, const std::vector<std::size_t>& ns,
                               const LlnOptions& options, std::uint64_t seed) {
  if (!model->domain().is_torus()) throw UnsupportedModelError("the H^-s experiment needs the torus");
  if (!(options.s > 1.5)) throw PreconditionError("need s > d/2 + 1 = 1.5");
  if (ns.size() < 2) throw PreconditionError("need at least two particle numbers");
  if (options.replicas == 0 || options.samples_per_replica == 0) {
    throw PreconditionError("need at least one replica and one sample");
  }
  LlnResult result;
  for (std::size_t idx = 0; idx < ns.size(); ++idx) {
    const std::size_t n = ns[idx];
    GibbsOptions gibbs = options.gibbs;
    gibbs.n_samples = options.samples_per_replica;
    std::vector<std::vector<double>> values(options.replicas);
    std::vector<double> acceptance(options.replicas);
    std::vector<std::vector<std::string>> warnings(options.replicas);
    parallel_for(options.replicas, [&](std::size_t r) {
      const auto g = sample_gibbs(model, n, gibbs, seed, std::nullopt,
                                  idx * 100003ULL + r);
      acceptance[r] = g.acceptance_rate;
      warnings[r] = g.warnings;
      for (const auto& ens : g.samples) {
        values[r].push_back(hminus_s_distance_squared(ens.positions(), rho_beta, options.s,
                                                      options.k_max));
      }
    });
    // pooled mean; error from per-chain variances inflated by the
    // integrated autocorrelation time
    double sum = 0.0, count = 0.0, var_sum = 0.0;
    for (const auto& v : values) {
      for (double x : v) sum += x;
      count += static_cast<double>(v.size());
    }
    const double mean = sum / count;
    for (const auto& v : values) {
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      const double var = v.size() > 1 ? ss / static_cast<double>(v.size() - 1) : 0.0;
      const double tau = v.size() > 4 ? std::max(1.0, integrated_autocorrelation_time(v)) : 1.0;
      var_sum += var * tau * static_cast<double>(v.size());
    }
    LlnRow row;
    row.n = n;
    row.mean = mean;
    row.stderr = std::sqrt(var_sum) / count;
    double acc = 0.0;
    for (double a : acceptance) acc += a;
    row.acceptance = acc / static_cast<double>(options.replicas);
    result.rows.push_back(row);
    for (const auto& w : warnings) {
      for (const auto& msg : w) result.warnings.push_back("N=" + std::to_string(n) + ": " + msg);
    }
  }
  std::vector<double> xs, ys;
  for (const auto& row : result.rows) {
    xs.push_back(static_cast<double>(row.n));
    ys.push_back(row.mean);
  }
  result.fit = fit_loglog(xs, ys);
  return result;
}

GridDensity fourier_density_estimate(std::span<const double> positions, const Grid& grid,
                                     int k_max) {
  if (!grid.is_torus()) throw UnsupportedModelError("Fourier density estimates need the torus");
  const auto modes = empirical_modes(positions, k_max);
  GridDensity rho{grid, std::vector<double>(grid.size)};
  for (std::size_t i = 0; i < grid.size; ++i) {
    double v = 1.0;
    for (int k = 1; k <= k_max; ++k) {
      v += 2.0 * std::real(modes[k] * std::polar(1.0, kTwoPi * k * grid.x(i)));
    }
    rho.values[i] = std::max(v, 1e-12);
  }
  rho.normalize();
  return rho;
}

}  // namespace mckean

#include "mckean/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mckean/errors.hpp"
#include "mckean/fft.hpp"
#include "mckean/meanfield.hpp"
#include "mckean/parallel.hpp"

namespace mckean {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// w'' of the interaction profile.
double profile_second_derivative(const PotentialSpec& spec, double z) {
  const auto& w = spec.interaction();
  if (std::holds_alternative<ZeroInteraction>(w)) return 0.0;
  if (std::holds_alternative<QuadraticInteraction>(w)) return 1.0;
  if (const auto* cs = std::get_if<CosineSumInteraction>(&w)) {
    double v = 0.0;
    for (std::size_t m = 1; m <= cs->coefficients.size(); ++m) {
      const double f = kTwoPi * static_cast<double>(m);
      v += cs->coefficients[m - 1] * f * f * std::cos(f * z);
    }
    return v;
  }
  constexpr double h = 1e-5;
  return (spec.interaction_profile_derivative(z + h) -
          spec.interaction_profile_derivative(z - h)) / (2.0 * h);
}

}  // namespace

RelativeEntropy relative_entropy_chaotic(const GridDensity& rho, const PotentialSpec& spec,
                                         std::size_t n,
                                         const std::vector<GridDensity>& steady_states) {
  if (steady_states.empty()) {
    throw DependencyError("relative entropy needs at least one converged steady state");
  }
  RelativeEntropy out;
  out.reference_energy = std::numeric_limits<double>::infinity();
  for (const auto& s : steady_states) {
    out.reference_energy = std::min(out.reference_energy, free_energy(s, spec));
  }
  out.value = energy_per_particle_product(rho, spec, n) - out.reference_energy;
  out.asymptotic_surrogate = true;
  return out;
}

double gibbs_energy_exact(const PotentialSpec& spec, const Grid& grid, std::size_t n) {
  if (n == 0 || n > 3) throw PreconditionError("exact partition functions are limited to N <= 3");
  if (spec.dim() != 1) throw UnsupportedModelError("exact partition functions are one-dimensional");
  const std::size_t M = grid.size;
  const auto nodes = grid.nodes();
  std::size_t total = 1;
  for (std::size_t k = 0; k < n; ++k) total *= M;
  std::vector<double> h(total);
  std::vector<double> x(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = nodes[rest % M];
      rest /= M;
    }
    h[idx] = pairwise_hamiltonian(spec, x);
  }
  const double lowest = *std::min_element(h.begin(), h.end());
  double z = 0.0;
  for (double v : h) z += std::exp(-spec.beta() * (v - lowest));
  const double log_z = std::log(z) + static_cast<double>(n) * std::log(grid.dx) -
                       spec.beta() * lowest;
  return -log_z / (spec.beta() * static_cast<double>(n));
}

double fisher_info_chaotic_exact(const GridDensity& rho_star, const PotentialSpec& spec,
                                 std::size_t n) {
  if (n == 0) throw PreconditionError("N must be >= 1");
  const double residual = self_consistency_residual(rho_star, spec);
  if (!(residual < 1e-6)) {
    throw PreconditionError("input is not a critical point: self-consistency residual " +
                            std::to_string(residual) + " >= 1e-6");
  }
  if (!spec.has_interaction()) return 0.0;
  const Grid& g = rho_star.grid;
  Convolver first(g, [&](double z) { return spec.interaction_profile_derivative(z); });
  Convolver square(g, [&](double z) {
    const double d = spec.interaction_profile_derivative(z);
    return d * d;
  });
  const auto m = first.apply(rho_star.values);
  const auto q = square.apply(rho_star.values);
  double var = 0.0, mean_sq = 0.0;
  for (std::size_t i = 0; i < g.size; ++i) {
    var += (q[i] - m[i] * m[i]) * rho_star.values[i];
    mean_sq += m[i] * m[i] * rho_star.values[i];
  }
  var *= g.dx;
  mean_sq *= g.dx;
  const double inv_n = 1.0 / static_cast<double>(n);
  const double beta = spec.beta();
  return beta * beta * ((1.0 - inv_n) * var + inv_n * mean_sq);
}

Estimate fisher_info_chaotic_mc(const GridDensity& rho_star, const PotentialSpec& spec,
                                std::size_t n, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 10000) throw PreconditionError("Fisher Monte Carlo needs >= 1e4 samples");
  if (n == 0) throw PreconditionError("N must be >= 1");
  if (!spec.has_interaction()) return {0.0, 0.0};
  const Grid& g = rho_star.grid;
  Convolver first(g, [&](double z) { return spec.interaction_profile_derivative(z); });
  const auto m = first.apply(rho_star.values);

  constexpr std::size_t kChunks = 64;
  std::vector<double> sums(kChunks, 0.0), squares(kChunks, 0.0);
  const double beta = spec.beta();
  const double scale = beta * beta / static_cast<double>(n);
  parallel_for(kChunks, [&](std::size_t c) {
    const std::size_t begin = n_samples * c / kChunks;
    const std::size_t end = n_samples * (c + 1) / kChunks;
    CounterRng rng(stream_key(seed, StreamTag::kSampling, c));
    std::vector<double> x(n), mean_field(n), drift(n);
    std::vector<double> cdf(g.size);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size; ++i) {
      acc += std::max(rho_star.values[i], 0.0);
      cdf[i] = acc;
    }
    for (std::size_t s = begin; s < end; ++s) {
      for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform() * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        const auto node = static_cast<std::size_t>(it - cdf.begin());
        x[i] = g.x(node);
        mean_field[i] = m[node];
      }
      interaction_drift(spec, x, drift);
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = drift[i] - mean_field[i];
        v += r * r;
      }
      v *= scale;
      sums[c] += v;
      squares[c] += v * v;
    }
  });
  double s = 0.0, s2 = 0.0;
  for (std::size_t c = 0; c < kChunks; ++c) {
    s += sums[c];
    s2 += squares[c];
  }
  const double count = static_cast<double>(n_samples);
  const double mean = s / count;
  const double var = std::max(0.0, (s2 - count * mean * mean) / (count - 1.0));
  return {mean, std::sqrt(var / count)};
}

std::string to_string(LsiRegime regime) {
  switch (regime) {
    case LsiRegime::kConvexFarField:
      return "convex-far-field";
    case LsiRegime::kHighTemperature:
      return "high-temperature";
    case LsiRegime::kDegenerateWitness:
      return "degenerate-witness";
  }
  return "unknown";
}

TwoScaleBound two_scale_lsi_lower_bound(const PotentialSpec& spec, std::size_t n,
                                        double lambda_single, bool weak_interaction, double eps) {
  if (n == 0) throw PreconditionError("N must be >= 1");
  const auto& dom = spec.domain();
  if (dom.dim != 1) throw UnsupportedModelError("two-scale bound is implemented in 1-D");
  const bool compact = !dom.is_line();
  if (!compact && !weak_interaction) {
    throw UnsupportedModelError(
        "unbounded domain: the two-scale bound needs the weak-interaction variant");
  }
  double lo = 0.0, hi = 1.0;
  if (dom.is_box()) {
    lo = dom.lower;
    hi = dom.upper;
  } else if (dom.is_line()) {
    const double L = line_half_width(spec);
    lo = -L;
    hi = L;
  }
  // grid maxima over x, y and z = x - y
  constexpr int kNodes = 4096;
  const double span = hi - lo;
  double w_sup = 0.0, v_sup = 0.0, d2_sup = 0.0;
  for (int i = 0; i <= kNodes; ++i) {
    const double t = static_cast<double>(i) / kNodes;
    const double z = dom.is_torus() ? t : -span + 2.0 * span * t;
    w_sup = std::max(w_sup, std::abs(spec.interaction_profile(z)));
    d2_sup = std::max(d2_sup, std::abs(profile_second_derivative(spec, z)));
    if (spec.has_confinement() && (!dom.is_torus() || i < kNodes)) {
      v_sup = std::max(v_sup, std::abs(spec.V(lo + span * t)));
    }
  }
  const double beta = spec.beta();
  const double frac = (static_cast<double>(n) - 1.0) / static_cast<double>(n);
  TwoScaleBound out;
  if (weak_interaction) {
    const double base = std::exp(-2.0 * eps * beta * w_sup) * lambda_single;
    out.per_n = base - eps * beta * frac * d2_sup;
    out.uniform = base - eps * beta * d2_sup;
  } else {
    const double base = std::exp(-2.0 * beta * (w_sup + v_sup)) * lambda_single;
    out.per_n = base - beta * frac * d2_sup;
    out.uniform = base - beta * d2_sup;
  }
  out.guaranteed = out.uniform > 0.0;
  return out;
}

LsiReport lsi_witness_ratio(const PotentialSpec& spec, std::size_t n, const GridDensity& witness,
                            const std::vector<GridDensity>& steady_states) {
  const auto entropy = relative_entropy_chaotic(witness, spec, n, steady_states);
  if (entropy.value < 1e-10) {
    throw WitnessIsMinimiserError("witness has scaled relative entropy " +
                                  std::to_string(entropy.value) +
                                  " < 1e-10; it is (numerically) a minimiser");
  }
  const double fisher = fisher_info_chaotic_exact(witness, spec, n) / static_cast<double>(n);
  LsiReport report;
  report.n = n;
  report.witness_ratio = spec.temperature() * fisher / entropy.value;
  report.lower_bound = std::numeric_limits<double>::quiet_NaN();
  report.regime = LsiRegime::kDegenerateWitness;
  return report;
}

double gronwall_source_constant(const MeanFieldFlow& flow, const PotentialSpec& spec) {
  if (flow.states.empty()) throw DependencyError("empty mean-field flow");
  if (!spec.has_interaction()) return 0.0;
  const Grid& grid = flow.states.front().grid;
  Convolver conv(grid, [&](double z) {
    const double d = spec.interaction_profile_derivative(z);
    return d * d;
  });
  std::vector<double> field(grid.size);
  double best = 0.0;
  for (const auto& rho : flow.states) {
    conv.apply(rho.values, field);
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size; ++i) s += field[i] * rho.values[i];
    best = std::max(best, s * grid.dx);
  }
  return std::sqrt(best);
}

std::vector<double> talagrand_check(const PotentialSpec& spec,
                                    const std::vector<GridDensity>& samples,
                                    const std::vector<GridDensity>& minimisers, double lambda) {
  if (minimisers.empty()) throw DependencyError("Talagrand check needs the set of minimisers");
  double e_min = std::numeric_limits<double>::infinity();
  for (const auto& m : minimisers) e_min = std::min(e_min, free_energy(m, spec));
  std::vector<double> margins(samples.size());
  parallel_for(samples.size(), [&](std::size_t s) {
    double d2 = std::numeric_limits<double>::infinity();
    for (const auto& m : minimisers) {
      const double d = wasserstein2_1d(samples[s], m);
      d2 = std::min(d2, d * d);
    }
    margins[s] = free_energy(samples[s], spec) - e_min - 0.5 * lambda * d2;
  });
  return margins;
}

double gronwall_bound(double k, double t, double s, std::size_t n) {
  if (n == 0) throw PreconditionError("N must be >= 1");
  const double scale = s / std::sqrt(static_cast<double>(n));
  if (k == 0.0) return 0.5 * t * scale;
  return -std::expm1(-0.5 * k * t) / k * scale;
}

double hminus_s_norm(const std::map<int, std::complex<double>>& coefficients, double s) {
  if (!(s > 0.0)) throw PreconditionError("Sobolev index s must be positive");
  double total = 0.0;
  for (const auto& [k, c] : coefficients) {
    if (k == 0) {
      if (std::abs(c) != 0.0) {
        throw PreconditionError("H^-s norm needs a mean-zero field (nonzero k = 0 mode)");
      }
      continue;
    }
    const double w = std::pow(1.0 + kTwoPi * kTwoPi * k * k, -s);
    total += w * std::norm(c);
  }
  return std::sqrt(total);
}

}  // namespace mckean

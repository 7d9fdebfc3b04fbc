#include "mckean/particle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mckean/errors.hpp"

namespace mckean {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Fourier moments C_m = (1/N) sum_j cos(2 pi m x_j), S_m likewise.
void cosine_moments(const CosineSumInteraction& cs, std::span<const double> x,
                    std::vector<double>& c, std::vector<double>& s) {
  const std::size_t modes = cs.coefficients.size();
  c.assign(modes, 0.0);
  s.assign(modes, 0.0);
  for (double xi : x) {
    for (std::size_t m = 1; m <= modes; ++m) {
      const double a = kTwoPi * static_cast<double>(m) * xi;
      c[m - 1] += std::cos(a);
      s[m - 1] += std::sin(a);
    }
  }
  const double inv = 1.0 / static_cast<double>(x.size());
  for (std::size_t m = 0; m < modes; ++m) {
    c[m] *= inv;
    s[m] *= inv;
  }
}

}  // namespace

ParticleEnsemble::ParticleEnsemble(std::shared_ptr<const PotentialSpec> model,
                                   std::vector<double> positions, std::uint64_t seed,
                                   std::uint64_t replica, double time)
    : model_(std::move(model)),
      dim_(static_cast<std::size_t>(model_->dim())),
      positions_(std::move(positions)),
      seed_(seed),
      replica_(replica),
      time_(time) {
  if (positions_.empty() || positions_.size() % dim_ != 0) {
    throw PreconditionError("ensemble needs N >= 1 particles of dimension d");
  }
  if (!(time >= 0.0)) throw PreconditionError("ensemble time must be nonnegative");
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!model_->domain().contains(position(i))) {
      throw DomainError("particle " + std::to_string(i) + " lies outside the " +
                        model_->domain().name());
    }
  }
  streams_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    streams_.emplace_back(stream_key(seed, StreamTag::kParticle, replica, i));
  }
}

void ParticleEnsemble::advance_time(double dt) { time_ += dt; }

void apply_boundary(const Domain& domain, std::span<double> x) {
  switch (domain.kind) {
    case DomainKind::kTorus1D:
      for (double& v : x) {
        v -= std::floor(v);
        if (v >= 1.0) v = 0.0;
      }
      break;
    case DomainKind::kBox: {
      const double width = domain.upper - domain.lower;
      const double period = 2.0 * width;
      for (double& v : x) {
        double y = std::fmod(v - domain.lower, period);
        if (y < 0.0) y += period;
        if (y > width) y = period - y;
        v = domain.lower + y;
      }
      break;
    }
    case DomainKind::kLine1D:
      break;
  }
}

double displacement(const Domain& domain, double x, double y) {
  double d = x - y;
  if (domain.is_torus()) d -= std::nearbyint(d);
  return d;
}

void pairwise_interaction_drift(const PotentialSpec& spec,
                                std::span<const double> positions, std::span<double> out) {
  const auto d = static_cast<std::size_t>(spec.dim());
  const std::size_t n = positions.size() / d;
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> g(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = positions.subspan(i * d, d);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      spec.grad1_W(xi, positions.subspan(j * d, d), g);
      for (std::size_t a = 0; a < d; ++a) out[i * d + a] += g[a];
    }
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= inv;
}

void interaction_drift(const PotentialSpec& spec, std::span<const double> positions,
                       std::span<double> out) {
  const auto d = static_cast<std::size_t>(spec.dim());
  const std::size_t n = positions.size() / d;
  const auto& w = spec.interaction();
  if (std::holds_alternative<ZeroInteraction>(w)) {
    std::fill(out.begin(), out.end(), 0.0);
  } else if (std::holds_alternative<QuadraticInteraction>(w)) {
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t a = 0; a < d; ++a) mean[a] += positions[i * d + a];
    }
    for (double& m : mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t a = 0; a < d; ++a) out[i * d + a] = positions[i * d + a] - mean[a];
    }
  } else if (const auto* cs = std::get_if<CosineSumInteraction>(&w)) {
    std::vector<double> c, s;
    cosine_moments(*cs, positions, c, s);
    for (std::size_t i = 0; i < n; ++i) {
      double g = 0.0;
      for (std::size_t m = 1; m <= c.size(); ++m) {
        const double f = kTwoPi * static_cast<double>(m);
        const double a = f * positions[i];
        g += cs->coefficients[m - 1] * f * (std::sin(a) * c[m - 1] - std::cos(a) * s[m - 1]);
      }
      out[i] = g;
    }
  } else {
    pairwise_interaction_drift(spec, positions, out);
  }
}

void particle_drift(const PotentialSpec& spec, std::span<const double> positions,
                    std::span<double> out) {
  const auto d = static_cast<std::size_t>(spec.dim());
  const std::size_t n = positions.size() / d;
  interaction_drift(spec, positions, out);
  if (!spec.has_confinement()) {
    for (double& v : out) v = -v;
    return;
  }
  std::vector<double> g(d);
  for (std::size_t i = 0; i < n; ++i) {
    spec.grad_V(positions.subspan(i * d, d), g);
    for (std::size_t a = 0; a < d; ++a) out[i * d + a] = -out[i * d + a] - g[a];
  }
}

void step_euler_maruyama(ParticleEnsemble& ens, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("dt must be positive");
  const auto& spec = ens.model();
  const std::size_t d = ens.dim();
  const std::size_t n = ens.size();
  auto& x = ens.mutable_positions();
  std::vector<double> b(x.size());
  particle_drift(spec, x, b);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < d; ++a) {
      if (!std::isfinite(b[i * d + a])) {
        throw NumericalBlowupError("non-finite drift", i);
      }
    }
  }
  const double sigma = std::sqrt(2.0 * spec.temperature() * dt);
  for (std::size_t i = 0; i < n; ++i) {
    auto& rng = ens.stream(i);
    for (std::size_t a = 0; a < d; ++a) {
      x[i * d + a] += b[i * d + a] * dt + sigma * rng.normal();
    }
    std::span<double> xi(x.data() + i * d, d);
    apply_boundary(spec.domain(), xi);
    for (double v : xi) {
      if (!std::isfinite(v)) throw NumericalBlowupError("non-finite position", i);
    }
  }
  ens.advance_time(dt);
}

double pairwise_hamiltonian(const PotentialSpec& spec, std::span<const double> positions) {
  const auto d = static_cast<std::size_t>(spec.dim());
  const std::size_t n = positions.size() / d;
  double v = 0.0, w = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = positions.subspan(i * d, d);
    v += spec.V(xi);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) w += spec.W(xi, positions.subspan(j * d, d));
    }
  }
  return v + w / (2.0 * static_cast<double>(n));
}

double hamiltonian(const PotentialSpec& spec, std::span<const double> positions) {
  const auto d = static_cast<std::size_t>(spec.dim());
  const std::size_t n = positions.size() / d;
  const auto& w = spec.interaction();
  double v = 0.0;
  if (spec.has_confinement()) {
    for (std::size_t i = 0; i < n; ++i) v += spec.V(positions.subspan(i * d, d));
  }
  if (std::holds_alternative<ZeroInteraction>(w)) return v;
  if (std::holds_alternative<QuadraticInteraction>(w)) {
    // (1/2N) sum_ij |x_i - x_j|^2 / 2 = (1/2) sum_i |x_i - mean|^2
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t a = 0; a < d; ++a) mean[a] += positions[i * d + a];
    }
    for (double& m : mean) m /= static_cast<double>(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t a = 0; a < d; ++a) {
        const double z = positions[i * d + a] - mean[a];
        s += z * z;
      }
    }
    return v + 0.5 * s;
  }
  if (const auto* cs = std::get_if<CosineSumInteraction>(&w)) {
    std::vector<double> c, s;
    cosine_moments(*cs, positions, c, s);
    // the diagonal terms -c_m cos(0) are excluded from the pair sum
    double e = 0.0;
    for (std::size_t m = 0; m < c.size(); ++m) {
      const double nn = static_cast<double>(n);
      e -= cs->coefficients[m] * (nn * nn * (c[m] * c[m] + s[m] * s[m]) - nn);
    }
    return v + e / (2.0 * static_cast<double>(n));
  }
  return pairwise_hamiltonian(spec, positions);
}

double hamiltonian(const ParticleEnsemble& ens) {
  return hamiltonian(ens.model(), ens.positions());
}

std::vector<double> EmpiricalMeasure::mean() const {
  std::vector<double> m(dim, 0.0);
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < dim; ++a) m[a] += points[i * dim + a];
  }
  for (double& v : m) v /= static_cast<double>(n);
  return m;
}

EmpiricalMeasure empirical_measure(const ParticleEnsemble& ens) {
  return {ens.dim(), std::vector<double>(ens.positions().begin(), ens.positions().end())};
}

std::vector<double> sample_iid(const GridDensity& rho, std::size_t n, CounterRng& rng,
                               GridSampling mode) {
  const Grid& g = rho.grid;
  std::vector<double> cdf(g.size);
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size; ++i) {
    acc += std::max(rho.values[i], 0.0) * g.dx;
    cdf[i] = acc;
  }
  if (!(acc > 0.0)) throw PositivityError("cannot sample from a density without mass");
  std::vector<double> out(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    const auto i = static_cast<std::size_t>(it - cdf.begin());
    double x = g.x(i);
    if (mode == GridSampling::kCells) {
      const double below = i == 0 ? 0.0 : cdf[i - 1];
      const double cell = cdf[i] - below;
      const double t = cell > 0.0 ? (u - below) / cell : 0.5;
      x += (std::clamp(t, 0.0, 1.0) - 0.5) * g.dx;
      if (g.is_torus()) {
        x -= std::floor(x);
        if (x >= 1.0) x = 0.0;
      }
    }
    out[s] = x;
  }
  return out;
}

ParticleEnsemble iid_ensemble(std::shared_ptr<const PotentialSpec> model,
                              const GridDensity& rho, std::size_t n, std::uint64_t seed,
                              std::uint64_t replica) {
  if (model->dim() != 1) throw UnsupportedModelError("grid densities are one-dimensional");
  CounterRng rng(stream_key(seed, StreamTag::kInitial, replica));
  auto x = sample_iid(rho, n, rng, GridSampling::kCells);
  return ParticleEnsemble(std::move(model), std::move(x), seed, replica);
}

}  // namespace mckean

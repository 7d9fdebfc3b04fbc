#include <algorithm>
#include <cmath>

#include "mckean/errors.hpp"
#include "mckean/metrics.hpp"

namespace mckean {

namespace {

using Piece = QuantileFunction::Piece;

double at(const Piece& p, double u) {
  if (p.u1 <= p.u0) return p.q0;
  return p.q0 + (p.q1 - p.q0) * (u - p.u0) / (p.u1 - p.u0);
}

double merged_distance(const std::vector<Piece>& a, const std::vector<Piece>& b) {
  std::size_t i = 0, j = 0;
  double u = 0.0, total = 0.0;
  while (i < a.size() && j < b.size()) {
    const double next = std::min(a[i].u1, b[j].u1);
    if (next > u) {
      const double d0 = at(a[i], u) - at(b[j], u);
      const double d1 = at(a[i], next) - at(b[j], next);
      total += (d0 * d0 + d0 * d1 + d1 * d1) / 3.0 * (next - u);
      u = next;
    }
    if (a[i].u1 <= next) ++i;
    if (j < b.size() && b[j].u1 <= next) ++j;
  }
  return total;
}

// Pieces of v -> Qb(v - floor v) + floor v on [theta, theta + 1], moved to [0, 1].
std::vector<Piece> shifted(const std::vector<Piece>& b, double theta) {
  std::vector<Piece> out;
  const double base = std::floor(theta);
  for (int copy = 0; copy < 2; ++copy) {
    const double n = base + copy;
    for (const Piece& p : b) {
      const double lo = std::max(p.u0 + n, theta);
      const double hi = std::min(p.u1 + n, theta + 1.0);
      if (hi <= lo) continue;
      out.push_back({lo - theta, hi - theta, at(p, lo - n) + n, at(p, hi - n) + n});
    }
  }
  if (!out.empty()) {
    out.front().u0 = 0.0;
    out.back().u1 = 1.0;
  }
  return out;
}

}  // namespace

QuantileFunction QuantileFunction::from_samples(std::vector<double> points) {
  if (points.empty()) throw PreconditionError("empirical measure without points");
  std::sort(points.begin(), points.end());
  QuantileFunction q;
  const double n = static_cast<double>(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    q.pieces_.push_back({static_cast<double>(i) / n, static_cast<double>(i + 1) / n,
                         points[i], points[i]});
  }
  q.pieces_.back().u1 = 1.0;
  return q;
}

QuantileFunction QuantileFunction::from_grid(const GridDensity& rho) {
  const Grid& g = rho.grid;
  double total = 0.0;
  for (double v : rho.values) total += std::max(v, 0.0);
  if (!(total > 0.0)) throw PositivityError("density without mass");
  QuantileFunction q;
  double c = 0.0;
  for (std::size_t i = 0; i < g.size; ++i) {
    const double m = std::max(rho.values[i], 0.0) / total;
    if (m <= 0.0) continue;
    q.pieces_.push_back({c, c + m, g.x(i) - 0.5 * g.dx, g.x(i) + 0.5 * g.dx});
    c += m;
  }
  q.pieces_.back().u1 = 1.0;
  return q;
}

double QuantileFunction::operator()(double u) const {
  auto it = std::lower_bound(pieces_.begin(), pieces_.end(), u,
                             [](const Piece& p, double v) { return p.u1 < v; });
  if (it == pieces_.end()) --it;
  return at(*it, u);
}

double quantile_distance_squared(const QuantileFunction& a, const QuantileFunction& b) {
  return merged_distance(a.pieces(), b.pieces());
}

double circle_distance_squared(const QuantileFunction& a, const QuantileFunction& b) {
  auto cost = [&](double theta) { return merged_distance(a.pieces(), shifted(b.pieces(), theta)); };
  // the cost is convex in theta; coarse scan then golden-section search
  constexpr int kScan = 256;
  double best_theta = -1.0, best = cost(-1.0);
  for (int s = 1; s <= kScan; ++s) {
    const double theta = -1.0 + 2.0 * s / kScan;
    const double c = cost(theta);
    if (c < best) {
      best = c;
      best_theta = theta;
    }
  }
  const double step = 2.0 / kScan;
  double lo = best_theta - step, hi = best_theta + step;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = cost(x1), f2 = cost(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-14; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = cost(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = cost(x2);
    }
  }
  return std::min({best, f1, f2});
}

double wasserstein2_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b, const Domain& domain) {
  if (a.dim != 1 || b.dim != 1) {
    throw UnsupportedModelError("Wasserstein distances are implemented in one dimension only");
  }
  const auto qa = QuantileFunction::from_samples(a.points);
  const auto qb = QuantileFunction::from_samples(b.points);
  const double d2 = domain.is_torus() ? circle_distance_squared(qa, qb)
                                      : quantile_distance_squared(qa, qb);
  return std::sqrt(std::max(d2, 0.0));
}

double wasserstein2_1d(const GridDensity& a, const GridDensity& b) {
  if (a.grid.kind != b.grid.kind) throw PreconditionError("densities on different domains");
  const auto qa = QuantileFunction::from_grid(a);
  const auto qb = QuantileFunction::from_grid(b);
  const double d2 = a.grid.is_torus() ? circle_distance_squared(qa, qb)
                                      : quantile_distance_squared(qa, qb);
  return std::sqrt(std::max(d2, 0.0));
}

ScaledWasserstein scaled_wasserstein(const std::vector<ParticleEnsemble>& a,
                                     const std::vector<ParticleEnsemble>& b, bool coupled) {
  if (a.size() != b.size()) throw PreconditionError("replica sets differ in size");
  if (a.size() < 2) throw InsufficientDataError("scaled Wasserstein estimate needs >= 2 replicas");
  const std::size_t n = a.front().size();
  std::vector<double> per_replica;
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (a[r].size() != n || b[r].size() != n) {
      throw PreconditionError("replicas must share the particle number");
    }
    const Domain& dom = a[r].model().domain();
    if (coupled) {
      double s = 0.0;
      const auto xa = a[r].positions();
      const auto xb = b[r].positions();
      for (std::size_t k = 0; k < xa.size(); ++k) {
        const double e = displacement(dom, xa[k], xb[k]);
        s += e * e;
      }
      per_replica.push_back(s / static_cast<double>(n));
    } else {
      const double w = wasserstein2_1d(empirical_measure(a[r]), empirical_measure(b[r]), dom);
      per_replica.push_back(w);
    }
  }
  const Estimate e = mean_and_stderr(per_replica);
  ScaledWasserstein out;
  out.replicas = a.size();
  out.proxy = !coupled;
  if (coupled) {
    out.value = std::sqrt(e.mean);
    out.stderr = out.value > 0.0 ? e.stderr / (2.0 * out.value) : 0.0;
  } else {
    out.value = e.mean;
    out.stderr = e.stderr;
  }
  return out;
}

}  // namespace mckean

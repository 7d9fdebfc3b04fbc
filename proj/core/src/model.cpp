#include "mckean/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mckean/errors.hpp"
#include "mckean/rng.hpp"

namespace mckean {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double second_difference(auto&& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

double analytic_k_v(const Confinement& c) {
  return std::visit(
      Overloaded{
          [](const ZeroConfinement&) { return 0.0; },
          [](const QuadraticConfinement& q) { return q.a; },
          [](const DoubleWellConfinement&) { return -4.0; },
          [](const TabulatedConfinement& t) {
            const auto& xs = t.table.nodes();
            const double lo = xs.front(), hi = xs.back();
            const double h = (hi - lo) / (8.0 * static_cast<double>(xs.size()));
            double k = std::numeric_limits<double>::infinity();
            for (double x = lo + h; x < hi - h; x += h) {
              k = std::min(k, second_difference(
                                  [&](double s) { return t.table.value(s); }, x, h));
            }
            return k;
          },
      },
      c);
}

double analytic_k_w(const Interaction& w) {
  return std::visit(
      Overloaded{
          [](const ZeroInteraction&) { return 0.0; },
          [](const QuadraticInteraction&) { return 1.0; },
          [](const CosineSumInteraction& cs) {
            // w''(z) = sum_m c_m (2 pi m)^2 cos(2 pi m z)
            double k = std::numeric_limits<double>::infinity();
            constexpr int kSamples = 4096;
            for (int i = 0; i < kSamples; ++i) {
              const double z = static_cast<double>(i) / kSamples;
              double v = 0.0;
              for (std::size_t m = 1; m <= cs.coefficients.size(); ++m) {
                const double f = kTwoPi * static_cast<double>(m);
                v += cs.coefficients[m - 1] * f * f * std::cos(f * z);
              }
              k = std::min(k, v);
            }
            return k;
          },
          [](const TabulatedInteraction& t) {
            const auto& xs = t.profile.nodes();
            const double lo = xs.front(), hi = xs.back();
            const double h = (hi - lo) / (8.0 * static_cast<double>(xs.size()));
            double k = std::numeric_limits<double>::infinity();
            for (double x = lo + h; x < hi - h; x += h) {
              k = std::min(k, second_difference(
                                  [&](double s) { return t.profile.value(s); }, x, h));
            }
            return k;
          },
      },
      w);
}

}  // namespace

Domain Domain::box(int dim, double lower, double upper) {
  if (dim < 1 || dim > 3) throw ConfigError("box dimension must be 1, 2 or 3");
  if (!(upper > lower)) throw ConfigError("box bounds must satisfy lower < upper");
  return {DomainKind::kBox, dim, lower, upper};
}

bool Domain::contains(std::span<const double> x) const noexcept {
  if (static_cast<int>(x.size()) != dim) return false;
  for (double v : x) {
    if (!std::isfinite(v)) return false;
    switch (kind) {
      case DomainKind::kTorus1D:
        if (v < 0.0 || v >= 1.0) return false;
        break;
      case DomainKind::kLine1D:
        break;
      case DomainKind::kBox:
        if (v < lower || v > upper) return false;
        break;
    }
  }
  return true;
}

std::string Domain::name() const {
  switch (kind) {
    case DomainKind::kTorus1D:
      return "torus";
    case DomainKind::kLine1D:
      return "line";
    case DomainKind::kBox:
      return "box";
  }
  return "unknown";
}

PotentialSpec::PotentialSpec(Domain domain, Confinement confinement,
                             Interaction interaction, double beta,
                             std::optional<double> k_v, std::optional<double> k_w)
    : domain_(domain),
      confinement_(std::move(confinement)),
      interaction_(std::move(interaction)),
      beta_(beta) {
  // beta = +inf is the zero-temperature gradient flow
  if (!(beta > 0.0)) throw ConfigError("beta must be strictly positive");
  if (domain_.is_torus()) {
    if (std::holds_alternative<QuadraticConfinement>(confinement_) ||
        std::holds_alternative<DoubleWellConfinement>(confinement_)) {
      throw ConfigError("torus domain needs a periodic confinement (zero or periodic table)");
    }
    if (std::holds_alternative<QuadraticInteraction>(interaction_)) {
      throw ConfigError("quadratic interaction is not periodic; use cosine_sum on the torus");
    }
  } else if (std::holds_alternative<CosineSumInteraction>(interaction_)) {
    throw ConfigError("cosine_sum interaction requires the torus domain");
  }
  const bool tabulated = std::holds_alternative<TabulatedConfinement>(confinement_) ||
                         std::holds_alternative<TabulatedInteraction>(interaction_);
  if (tabulated && domain_.dim != 1) {
    throw ConfigError("tabulated potentials are one-dimensional");
  }
  if (const auto* t = std::get_if<TabulatedConfinement>(&confinement_)) {
    const bool periodic = t->table.boundary() == TableBoundary::kPeriodic;
    if (periodic != domain_.is_torus()) {
      throw ConfigError("tabulated confinement boundary does not match the domain");
    }
  }
  if (const auto* t = std::get_if<TabulatedInteraction>(&interaction_)) {
    const bool periodic = t->profile.boundary() == TableBoundary::kPeriodic;
    if (periodic != domain_.is_torus()) {
      throw ConfigError("tabulated interaction boundary does not match the domain");
    }
  }
  if (const auto* cs = std::get_if<CosineSumInteraction>(&interaction_)) {
    for (double c : cs->coefficients) {
      if (!std::isfinite(c)) throw ConfigError("cosine_sum coefficients must be finite");
    }
  }
  k_v_ = k_v ? *k_v : analytic_k_v(confinement_);
  k_w_ = k_w ? *k_w : analytic_k_w(interaction_);
}

PotentialSpec PotentialSpec::with_beta(double beta) const {
  return PotentialSpec(domain_, confinement_, interaction_, beta, k_v_, k_w_);
}

bool PotentialSpec::has_interaction() const noexcept {
  if (std::holds_alternative<ZeroInteraction>(interaction_)) return false;
  if (const auto* cs = std::get_if<CosineSumInteraction>(&interaction_)) {
    return std::any_of(cs->coefficients.begin(), cs->coefficients.end(),
                       [](double c) { return c != 0.0; });
  }
  return true;
}

bool PotentialSpec::has_confinement() const noexcept {
  return !std::holds_alternative<ZeroConfinement>(confinement_);
}

double PotentialSpec::V(std::span<const double> x) const {
  return std::visit(
      Overloaded{
          [](const ZeroConfinement&) { return 0.0; },
          [&](const QuadraticConfinement& q) { return 0.5 * q.a * squared_norm(x); },
          [&](const DoubleWellConfinement&) {
            const double s = 1.0 - squared_norm(x);
            return s * s;
          },
          [&](const TabulatedConfinement& t) { return t.table.value(x[0]); },
      },
      confinement_);
}

void PotentialSpec::grad_V(std::span<const double> x, std::span<double> out) const {
  std::visit(
      Overloaded{
          [&](const ZeroConfinement&) { std::fill(out.begin(), out.end(), 0.0); },
          [&](const QuadraticConfinement& q) {
            for (std::size_t a = 0; a < x.size(); ++a) out[a] = q.a * x[a];
          },
          [&](const DoubleWellConfinement&) {
            const double f = -4.0 * (1.0 - squared_norm(x));
            for (std::size_t a = 0; a < x.size(); ++a) out[a] = f * x[a];
          },
          [&](const TabulatedConfinement& t) { out[0] = t.table.derivative(x[0]); },
      },
      confinement_);
}

double PotentialSpec::W(std::span<const double> x, std::span<const double> y) const {
  if (domain_.dim == 1) return interaction_profile(x[0] - y[0]);
  return std::visit(
      Overloaded{
          [](const ZeroInteraction&) { return 0.0; },
          [&](const QuadraticInteraction&) {
            double s = 0.0;
            for (std::size_t a = 0; a < x.size(); ++a) s += (x[a] - y[a]) * (x[a] - y[a]);
            return 0.5 * s;
          },
          [](const auto&) -> double {
            throw UnsupportedModelError("interaction family is one-dimensional");
          },
      },
      interaction_);
}

void PotentialSpec::grad1_W(std::span<const double> x, std::span<const double> y,
                            std::span<double> out) const {
  if (domain_.dim == 1) {
    out[0] = interaction_profile_derivative(x[0] - y[0]);
    return;
  }
  std::visit(
      Overloaded{
          [&](const ZeroInteraction&) { std::fill(out.begin(), out.end(), 0.0); },
          [&](const QuadraticInteraction&) {
            for (std::size_t a = 0; a < x.size(); ++a) out[a] = x[a] - y[a];
          },
          [](const auto&) {
            throw UnsupportedModelError("interaction family is one-dimensional");
          },
      },
      interaction_);
}

double PotentialSpec::V(double x) const { return V(std::span<const double>(&x, 1)); }

double PotentialSpec::grad_V(double x) const {
  double g = 0.0;
  grad_V(std::span<const double>(&x, 1), std::span<double>(&g, 1));
  return g;
}

double PotentialSpec::W(double x, double y) const { return interaction_profile(x - y); }

double PotentialSpec::grad1_W(double x, double y) const {
  return interaction_profile_derivative(x - y);
}

double PotentialSpec::interaction_profile(double z) const {
  return std::visit(
      Overloaded{
          [](const ZeroInteraction&) { return 0.0; },
          [&](const QuadraticInteraction&) { return 0.5 * z * z; },
          [&](const CosineSumInteraction& cs) {
            double v = 0.0;
            for (std::size_t m = 1; m <= cs.coefficients.size(); ++m) {
              v -= cs.coefficients[m - 1] * std::cos(kTwoPi * static_cast<double>(m) * z);
            }
            return v;
          },
          [&](const TabulatedInteraction& t) { return t.profile.value(z); },
      },
      interaction_);
}

double PotentialSpec::interaction_profile_derivative(double z) const {
  return std::visit(
      Overloaded{
          [](const ZeroInteraction&) { return 0.0; },
          [&](const QuadraticInteraction&) { return z; },
          [&](const CosineSumInteraction& cs) {
            double g = 0.0;
            for (std::size_t m = 1; m <= cs.coefficients.size(); ++m) {
              const double f = kTwoPi * static_cast<double>(m);
              g += cs.coefficients[m - 1] * f * std::sin(f * z);
            }
            return g;
          },
          [&](const TabulatedInteraction& t) { return t.profile.derivative(z); },
      },
      interaction_);
}

std::vector<double> grad_confining(const PotentialSpec& spec,
                                   std::span<const double> x) {
  if (!spec.domain().contains(x)) {
    throw DomainError("grad_confining: point outside the " + spec.domain().name());
  }
  std::vector<double> g(x.size());
  spec.grad_V(x, g);
  return g;
}

std::vector<double> grad1_interaction(const PotentialSpec& spec,
                                      std::span<const double> x,
                                      std::span<const double> y) {
  if (!spec.domain().contains(x) || !spec.domain().contains(y)) {
    throw DomainError("grad1_interaction: point outside the " + spec.domain().name());
  }
  std::vector<double> g(x.size());
  spec.grad1_W(x, y, g);
  return g;
}

FourierCoefficients fourier_coefficients(const PotentialSpec& spec, int k_max) {
  if (k_max < 1) throw PreconditionError("k_max must be a positive integer");
  if (!spec.domain().is_torus()) {
    throw UnsupportedModelError("Fourier coefficients need a translation-invariant W on the torus");
  }
  std::vector<double> modes(static_cast<std::size_t>(k_max) + 1, 0.0);
  const auto& w = spec.interaction();
  if (const auto* cs = std::get_if<CosineSumInteraction>(&w)) {
    // -c cos(2 pi m x) contributes -c/2 at k = +-m
    for (std::size_t m = 1; m <= cs->coefficients.size(); ++m) {
      if (m <= static_cast<std::size_t>(k_max)) modes[m] = -0.5 * cs->coefficients[m - 1];
    }
  } else if (std::holds_alternative<TabulatedInteraction>(w)) {
    const int nodes = std::max(1024, 8 * k_max);
    std::vector<double> samples(nodes);
    for (int j = 0; j < nodes; ++j) {
      samples[j] = spec.interaction_profile(static_cast<double>(j) / nodes);
    }
    for (int k = 0; k <= k_max; ++k) {
      double acc = 0.0;
      for (int j = 0; j < nodes; ++j) {
        acc += samples[j] * std::cos(kTwoPi * k * static_cast<double>(j) / nodes);
      }
      modes[k] = acc / nodes;
    }
  }
  return FourierCoefficients(std::move(modes));
}

double beta_sharp(const PotentialSpec& spec, int k_max) {
  const auto w_hat = fourier_coefficients(spec, k_max);
  double lowest = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= k_max; ++k) lowest = std::min(lowest, w_hat(k));
  if (lowest < 0.0) return 1.0 / (-lowest);
  return std::numeric_limits<double>::infinity();
}

bool is_h_stable(const PotentialSpec& spec, int k_max) {
  const auto w_hat = fourier_coefficients(spec, k_max);
  for (int k = 1; k <= k_max; ++k) {
    if (w_hat(k) < -1e-12) return false;
  }
  return true;
}

double line_half_width(const PotentialSpec& spec) {
  if (!spec.domain().is_line()) {
    throw UnsupportedModelError("line_half_width: model is not on the line");
  }
  if (!spec.has_confinement()) {
    throw UnsupportedModelError("line domain needs a confining potential to be truncated");
  }
  const double threshold = -std::log(1e-14);
  double v_min = std::numeric_limits<double>::infinity();
  for (double x = -50.0; x <= 50.0; x += 0.01) v_min = std::min(v_min, spec.V(x));
  for (double L = 0.5; L < 1e4; L += 0.01) {
    const double lo = spec.beta() * (spec.V(-L) - v_min);
    const double hi = spec.beta() * (spec.V(L) - v_min);
    if (lo > threshold && hi > threshold) return L;
  }
  throw UnsupportedModelError("confining potential grows too slowly to truncate the line");
}

std::vector<ModelDiagnostic> check_model(const PotentialSpec& spec,
                                         std::size_t samples, std::uint64_t seed) {
  std::vector<ModelDiagnostic> out;
  const auto& dom = spec.domain();
  const int d = dom.dim;
  double lo = 0.0, hi = 1.0;
  if (dom.is_line()) {
    double L = 5.0;
    if (spec.has_confinement()) {
      try {
        L = line_half_width(spec);
      } catch (const UnsupportedModelError&) {
      }
    }
    lo = -L;
    hi = L;
  } else if (dom.is_box()) {
    lo = dom.lower;
    hi = dom.upper;
  }
  CounterRng rng(stream_key(seed, StreamTag::kSampling, 0x6368656b));
  auto draw = [&](std::vector<double>& p) {
    for (int a = 0; a < d; ++a) {
      p[a] = lo + (hi - lo) * rng.uniform();
      if (dom.is_torus()) p[a] = std::min(p[a], std::nextafter(1.0, 0.0));
    }
  };
  std::vector<double> x(d), y(d), g(d);
  double worst_sym = 0.0, worst_diag = 0.0, v_min = std::numeric_limits<double>::infinity();
  double growth = 0.0;
  bool finite = true;
  for (std::size_t s = 0; s < samples; ++s) {
    draw(x);
    draw(y);
    const double wxy = spec.W(x, y), wyx = spec.W(y, x);
    worst_sym = std::max(worst_sym, std::abs(wxy - wyx));
    worst_diag = std::max(worst_diag, std::abs(spec.W(x, x)));
    const double vx = spec.V(x), vy = spec.V(y);
    finite = finite && std::isfinite(vx) && std::isfinite(wxy);
    v_min = std::min(v_min, vx);
    spec.grad1_W(x, y, g);
    double gn = 0.0;
    for (double v : g) gn += v * v;
    growth = std::max(growth, std::sqrt(gn) / (1.0 + std::abs(wxy) + std::max(0.0, vx) +
                                               std::max(0.0, vy)));
  }
  auto report = [&](Severity sev, const std::string& msg) { out.push_back({sev, msg}); };
  std::ostringstream msg;
  if (worst_sym >= 1e-12) {
    msg << "interaction is not symmetric: max |W(x,y)-W(y,x)| = " << worst_sym;
    report(Severity::kError, msg.str());
    msg.str("");
  }
  if (worst_diag >= 1e-12) {
    // A translation-invariant W only shifts by the constant w(0) on the
    // diagonal, which changes neither the dynamics nor the Gibbs measure.
    const bool constant_offset = d == 1;
    msg << "interaction does not vanish on the diagonal: max |W(x,x)| = " << worst_diag;
    if (constant_offset) msg << " (constant offset w(0); forces unaffected)";
    report(constant_offset ? Severity::kWarning : Severity::kError, msg.str());
    msg.str("");
  }
  if (!finite || !std::isfinite(v_min)) {
    report(Severity::kError, "potentials are not finite on the sampled domain");
  }
  if (!std::isfinite(growth) || growth > 1e6) {
    msg << "gradient growth bound |grad_1 W| <= C(1+|W|+V+V) fails on samples (C ~ " << growth << ")";
    report(Severity::kWarning, msg.str());
    msg.str("");
  }
  if (d == 1) {
    const double h = 1e-4 * (hi - lo);
    const double tol_v = 1e-3 * std::max(1.0, std::abs(spec.k_v()));
    const double tol_w = 1e-3 * std::max(1.0, std::abs(spec.k_w()));
    double worst_v = std::numeric_limits<double>::infinity();
    double worst_w = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < samples; ++s) {
      const double t = lo + 2 * h + (hi - lo - 4 * h) * rng.uniform();
      worst_v = std::min(worst_v, second_difference([&](double u) { return spec.V(u); }, t, h));
      const double z = (dom.is_torus() ? 0.0 : -0.5 * (hi - lo)) + (hi - lo) * rng.uniform();
      worst_w = std::min(worst_w, second_difference(
                                      [&](double u) { return spec.interaction_profile(u); }, z, h));
    }
    if (worst_v < spec.k_v() - tol_v) {
      msg << "finite-difference V'' = " << worst_v << " falls below K_V = " << spec.k_v();
      report(Severity::kWarning, msg.str());
      msg.str("");
    }
    if (worst_w < spec.k_w() - tol_w) {
      msg << "finite-difference W'' = " << worst_w << " falls below K_W = " << spec.k_w();
      report(Severity::kWarning, msg.str());
      msg.str("");
    }
  }
  return out;
}

}  // namespace mckean

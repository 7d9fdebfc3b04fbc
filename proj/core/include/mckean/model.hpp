#ifndef MCKEAN_MODEL_HPP
#define MCKEAN_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mckean/tabulated.hpp"

namespace mckean {

enum class DomainKind { kTorus1D, kLine1D, kBox };

/// State space of a single particle: the unit torus [0, 1), the real line, or
/// an axis-aligned box [lower, upper]^dim with reflecting walls.
struct Domain {
  DomainKind kind = DomainKind::kTorus1D;
  int dim = 1;
  double lower = 0.0;
  double upper = 1.0;

  static Domain torus() { return {}; }
  static Domain line() { return {DomainKind::kLine1D, 1, 0.0, 0.0}; }
  static Domain box(int dim, double lower, double upper);

  bool is_torus() const noexcept { return kind == DomainKind::kTorus1D; }
  bool is_line() const noexcept { return kind == DomainKind::kLine1D; }
  bool is_box() const noexcept { return kind == DomainKind::kBox; }
  bool contains(std::span<const double> x) const noexcept;
  std::string name() const;
};

// Confining potentials V.
struct ZeroConfinement {};
struct QuadraticConfinement {  // V(x) = a|x|^2 / 2
  double a = 1.0;
};
struct DoubleWellConfinement {};  // V(x) = (1 - |x|^2)^2
struct TabulatedConfinement {
  TabulatedFunction table;
};
using Confinement = std::variant<ZeroConfinement, QuadraticConfinement,
                                 DoubleWellConfinement, TabulatedConfinement>;

// Interaction potentials W(x, y); all of them depend on x - y only.
struct ZeroInteraction {};
struct QuadraticInteraction {};  // W(x, y) = |x - y|^2 / 2
// W(x, y) = sum_m c_m * (-cos(2 pi m (x - y))), m = 1, 2, ...
struct CosineSumInteraction {
  std::vector<double> coefficients;
};
// W(x, y) = w(x - y) with w even and w(0) = 0.
struct TabulatedInteraction {
  TabulatedFunction profile;
};
using Interaction = std::variant<ZeroInteraction, QuadraticInteraction,
                                 CosineSumInteraction, TabulatedInteraction>;

/// Potentials, temperature and convexity constants of one model. Immutable
/// once constructed; every member function is a pure function and safe to
/// call from several threads.
class PotentialSpec {
 public:
  // K_V and K_W default to analytic values for the built-in families and to
  // a finite-difference scan for tabulated ones.
  PotentialSpec(Domain domain, Confinement confinement, Interaction interaction,
                double beta, std::optional<double> k_v = std::nullopt,
                std::optional<double> k_w = std::nullopt);

  const Domain& domain() const noexcept { return domain_; }
  const Confinement& confinement() const noexcept { return confinement_; }
  const Interaction& interaction() const noexcept { return interaction_; }
  int dim() const noexcept { return domain_.dim; }
  double beta() const noexcept { return beta_; }
  double temperature() const noexcept { return 1.0 / beta_; }
  double k_v() const noexcept { return k_v_; }
  double k_w() const noexcept { return k_w_; }

  PotentialSpec with_beta(double beta) const;

  bool has_interaction() const noexcept;
  bool has_confinement() const noexcept;

  double V(std::span<const double> x) const;
  void grad_V(std::span<const double> x, std::span<double> out) const;
  double W(std::span<const double> x, std::span<const double> y) const;
  void grad1_W(std::span<const double> x, std::span<const double> y,
               std::span<double> out) const;

  // One-dimensional shorthands.
  double V(double x) const;
  double grad_V(double x) const;
  double W(double x, double y) const;
  double grad1_W(double x, double y) const;

  // Profile w(z) = W(z, 0) and its derivative, one-dimensional models only.
  double interaction_profile(double z) const;
  double interaction_profile_derivative(double z) const;

 private:
  Domain domain_;
  Confinement confinement_;
  Interaction interaction_;
  double beta_;
  double k_v_;
  double k_w_;
};

// Operations on models. All throw DomainError for points outside the domain.
std::vector<double> grad_confining(const PotentialSpec& spec,
                                   std::span<const double> x);
std::vector<double> grad1_interaction(const PotentialSpec& spec,
                                      std::span<const double> x,
                                      std::span<const double> y);

inline constexpr int kDefaultKMax = 64;

/// Fourier coefficients W^(k) = int_0^1 w(x) exp(-2 pi i k x) dx, |k| <= k_max.
/// Real and even in k because w is real and even.
class FourierCoefficients {
 public:
  explicit FourierCoefficients(std::vector<double> nonnegative_modes)
      : modes_(std::move(nonnegative_modes)) {}
  int k_max() const noexcept { return static_cast<int>(modes_.size()) - 1; }
  double operator()(int k) const { return modes_.at(k < 0 ? -k : k); }
  const std::vector<double>& nonnegative_modes() const noexcept { return modes_; }

 private:
  std::vector<double> modes_;
};

// Throws UnsupportedModelError unless the domain is the torus.
FourierCoefficients fourier_coefficients(const PotentialSpec& spec,
                                         int k_max = kDefaultKMax);

// 1 / (-min_{0<k<=k_max} W^(k)) if that minimum is negative, +inf otherwise.
double beta_sharp(const PotentialSpec& spec, int k_max = kDefaultKMax);

bool is_h_stable(const PotentialSpec& spec, int k_max = kDefaultKMax);

// Half-width L of the truncated line [-L, L]: exp(-beta (V(+-L) - min V)) < 1e-14.
double line_half_width(const PotentialSpec& spec);

enum class Severity { kWarning, kError };

struct ModelDiagnostic {
  Severity severity;
  std::string message;
};

/// Sampled checks of the standing assumptions on V and W: symmetry, vanishing
/// diagonal, K-convexity against a finite-difference Hessian, boundedness from
/// below and the gradient growth bound |grad_1 W| <= C (1 + |W| + V + V).
std::vector<ModelDiagnostic> check_model(const PotentialSpec& spec,
                                         std::size_t samples = 1000,
                                         std::uint64_t seed = 0);

}  // namespace mckean

#endif  // MCKEAN_MODEL_HPP

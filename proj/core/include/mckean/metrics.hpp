#ifndef MCKEAN_METRICS_HPP
#define MCKEAN_METRICS_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mckean/grid.hpp"
#include "mckean/model.hpp"
#include "mckean/particle.hpp"
#include "mckean/stats.hpp"

namespace mckean {

// ---- Wasserstein distances -----------------------------------------------

/// Quantile function of a one-dimensional probability measure, piecewise
/// linear in u (atoms give flat pieces, cell-wise constant densities give
/// sloped ones).
class QuantileFunction {
 public:
  struct Piece {
    double u0, u1;  // probability interval
    double q0, q1;  // quantile values at its ends
  };

  static QuantileFunction from_samples(std::vector<double> points);
  // Density constant on the cell [x_i - dx/2, x_i + dx/2] around each node.
  static QuantileFunction from_grid(const GridDensity& rho);

  const std::vector<Piece>& pieces() const noexcept { return pieces_; }
  double operator()(double u) const;

 private:
  std::vector<Piece> pieces_;
};

// int_0^1 |Qa(u) - Qb(u)|^2 du, exact for piecewise-linear quantiles.
double quantile_distance_squared(const QuantileFunction& a, const QuantileFunction& b);
// Circle version: inf over theta of int_0^1 |Qa(u) - Qb~(u + theta)|^2 du where
// Qb~(v + 1) = Qb~(v) + 1. Grid of shifts followed by golden-section refinement.
double circle_distance_squared(const QuantileFunction& a, const QuantileFunction& b);

// Unscaled W2 between one-dimensional measures.
double wasserstein2_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b, const Domain& domain);
double wasserstein2_1d(const GridDensity& a, const GridDensity& b);

struct ScaledWasserstein {
  double value = 0.0;
  double stderr = 0.0;
  bool proxy = false;  // pooled single-particle W2, biased; not a bound on d2-bar
  std::size_t replicas = 0;
};

// d2-bar between two N-particle laws from replicas matched by index. With
// coupled = true, replica r of a and b are assumed to be a coupling and the
// estimate is sqrt(mean_r (1/N) sum_i |a_ri - b_ri|^2), an upper bound on
// d2-bar. Otherwise the per-replica W2 between the empirical measures is
// averaged and flagged as a proxy. Throws InsufficientDataError if R < 2.
ScaledWasserstein scaled_wasserstein(const std::vector<ParticleEnsemble>& a,
                                     const std::vector<ParticleEnsemble>& b, bool coupled);

// ---- entropy and Fisher information of chaotic states --------------------

struct RelativeEntropy {
  double value = 0.0;
  double reference_energy = 0.0;
  // E^N[M_N] replaced by its N -> infinity limit min E^MF
  bool asymptotic_surrogate = true;
};

// E^N[rho^{(x)N}] - min_{steady states} E^MF. Throws DependencyError if
// steady_states is empty.
RelativeEntropy relative_entropy_chaotic(const GridDensity& rho, const PotentialSpec& spec,
                                         std::size_t n,
                                         const std::vector<GridDensity>& steady_states);

// E^N[M_N] = -(1/(beta N)) log Z_N by tensor quadrature on the grid of rho,
// for N <= 3 only.
double gibbs_energy_exact(const PotentialSpec& spec, const Grid& grid, std::size_t n);

// Unscaled chaotic Fisher information
//   beta^2 [ (1-1/N) int (|W'|^2 * rho - |W' * rho|^2) rho + (1/N) int |W' * rho|^2 rho ].
// The beta^2 prefactor follows the expansion of the N-body integrand.
// Throws PreconditionError unless the self-consistency residual is < 1e-6.
double fisher_info_chaotic_exact(const GridDensity& rho_star, const PotentialSpec& spec,
                                 std::size_t n);

// Monte Carlo estimate of the scaled information (exact / N) with X_i drawn
// i.i.d. from the atoms of rho_star; n_samples >= 1e4 configurations.
Estimate fisher_info_chaotic_mc(const GridDensity& rho_star, const PotentialSpec& spec,
                                std::size_t n, std::size_t n_samples, std::uint64_t seed);

// ---- log Sobolev constants ------------------------------------------------

enum class LsiRegime { kConvexFarField, kHighTemperature, kDegenerateWitness };
std::string to_string(LsiRegime regime);

struct LsiReport {
  std::size_t n = 0;
  double witness_ratio = 0.0;  // beta^-1 I-bar / E-bar along the witness
  double lower_bound = 0.0;    // two-scale bound; nan if unavailable
  LsiRegime regime = LsiRegime::kDegenerateWitness;
};

// beta^-1 I-bar / E-bar for the product state witness^{(x)N}, an upper bound
// on the N-particle LSI constant. Throws WitnessIsMinimiserError when
// E-bar < 1e-10.
LsiReport lsi_witness_ratio(const PotentialSpec& spec, std::size_t n, const GridDensity& witness,
                            const std::vector<GridDensity>& steady_states);

struct TwoScaleBound {
  // e^{-2 beta (|W| + |V|)} lambda - beta (N-1)/N |D2_xy W| at this N
  double per_n = 0.0;
  // the same with (N-1)/N -> 1: the N-independent constant c
  double uniform = 0.0;
  bool guaranteed = false;  // uniform > 0
};

// Sup norms are grid maxima. Unbounded (line) models need weak_interaction,
// in which case eps scales both W terms and V is dropped from the
// exponential (lambda_single then refers to exp(-V)).
TwoScaleBound two_scale_lsi_lower_bound(const PotentialSpec& spec, std::size_t n,
                                        double lambda_single, bool weak_interaction = false,
                                        double eps = 1.0);

// ---- inequality checks ----------------------------------------------------

// E^MF(rho) - min E^MF - (lambda/2) min_{mu in K} d2(rho, mu)^2 per sample.
// Throws DependencyError if minimisers is empty.
std::vector<double> talagrand_check(const PotentialSpec& spec,
                                    const std::vector<GridDensity>& samples,
                                    const std::vector<GridDensity>& minimisers, double lambda);

// (1 - e^{-K t / 2}) / K * S / sqrt(N), or (t / 2) S / sqrt(N) when K = 0.
double gronwall_bound(double k, double t, double s, std::size_t n);

// S = sup_t ( int (|grad_1 W|^2 * rho_t) rho_t )^{1/2} over the recorded
// states of a one-dimensional mean-field flow.
double gronwall_source_constant(const MeanFieldFlow& flow, const PotentialSpec& spec);

// (sum_k (1 + 4 pi^2 k^2)^{-s} |h(k)|^2)^{1/2} over the given modes. Throws
// PreconditionError for a nonzero k = 0 entry.
double hminus_s_norm(const std::map<int, std::complex<double>>& coefficients, double s);

}  // namespace mckean

#endif  // MCKEAN_METRICS_HPP

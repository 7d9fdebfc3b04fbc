#ifndef MCKEAN_FLUCTUATIONS_HPP
#define MCKEAN_FLUCTUATIONS_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mckean/grid.hpp"
#include "mckean/model.hpp"
#include "mckean/particle.hpp"
#include "mckean/stats.hpp"

namespace mckean {

/// Fourier modes h(k), 1 <= |k| <= k_max, of a fluctuation field on the
/// torus; h(-k) = conj(h(k)) and there is no k = 0 entry.
struct FluctuationField {
  std::map<int, std::complex<double>> coefficients;
  std::size_t n = 0;
  double time = 0.0;

  int k_max() const { return coefficients.empty() ? 0 : coefficients.rbegin()->first; }
  std::complex<double> operator()(int k) const { return coefficients.at(k); }
};

// h(k) = sqrt(N) [ (1/N) sum_j exp(-2 pi i k X_j) - rho^(k) ].
FluctuationField compute_fluctuation_field(std::span<const double> positions,
                                           const GridDensity& rho_beta, int k_max,
                                           double time = 0.0);
FluctuationField compute_fluctuation_field(const ParticleEnsemble& ens,
                                           const GridDensity& rho_beta, int k_max);

// How c(k) is tied to observable variances. For the empirical field of N
// particles, E|h(k)|^2 = 8 pi^2 beta^-1 c(k) at stationarity (equal to 1 for
// i.i.d. uniform particles); the SPDE below has the same normalisation.
// Only ratios across k are asserted.
inline constexpr const char* kCovarianceConvention =
    "c(k) = 1/(8 pi^2 (1/beta + W^(k))); E|h(k)|^2 = 8 pi^2 c(k) / beta; "
    "pairing Q(phi, psi) = sum_k conj(phi^(k)) psi^(k) c(k)";

// c(k) for 1 <= k <= k_max. Throws CoercivityError when beta >= beta_sharp.
std::map<int, double> stationary_covariance_theory(const PotentialSpec& spec, int k_max);

struct ModeStatistics {
  int k = 0;
  std::complex<double> mean;
  double variance = 0.0;  // E|h(k) - E h(k)|^2
  double stderr = 0.0;
  double tau = 0.0;       // integrated autocorrelation time of |h(k)|^2, in records
};

// Time averages over a stationary record. Batch length is at least 10 tau;
// throws InsufficientDataError if the record is shorter than 20 tau.
std::vector<ModeStatistics> empirical_mode_covariance(const std::vector<FluctuationField>& run,
                                                      int k_max);

struct SpdeOptions {
  double dt = 1e-3;
  double t_end = 1.0;
  std::size_t record_every = 1;
  bool noise = true;
  // starting field; zero if absent
  std::optional<FluctuationField> initial;
};

// Exact Ornstein-Uhlenbeck transition per mode:
//   dh(k) = lambda_k h(k) dt + 2 pi |k| sqrt(2/beta) dxi_k,  E|dxi_k|^2 = dt.
// Flat torus case only; throws CoercivityError when beta >= beta_sharp.
std::vector<FluctuationField> simulate_spde(const PotentialSpec& spec, int k_max,
                                            const SpdeOptions& options, std::uint64_t seed);

// Stationary E|h(k)|^2 of the recursion above: (2 pi k)^2 (2/beta) / (2 |lambda_k|).
double spde_stationary_variance(const PotentialSpec& spec, int k);

// ---- law of large numbers ------------------------------------------------

struct LlnOptions {
  double s = 2.0;
  int k_max = 16;
  std::size_t replicas = 8;
  std::size_t samples_per_replica = 50;
  GibbsOptions gibbs;  // n_samples is taken from samples_per_replica
};

struct LlnRow {
  std::size_t n = 0;
  double mean = 0.0;  // E |mu^N - rho_beta|^2_{H^-s}
  double stderr = 0.0;
  double acceptance = 1.0;
};

struct LlnResult {
  std::vector<LlnRow> rows;
  LineFit fit;  // log-log slope of mean against N
  std::vector<std::string> warnings;
};

// |mu^N - rho|^2_{H^-s} using the modes 0 < |k| <= k_max.
double hminus_s_distance_squared(std::span<const double> positions, const GridDensity& rho,
                                 double s, int k_max);

LlnResult lln_decay_experiment(std::shared_ptr<const PotentialSpec> model,
                               const GridDensity& rho_beta, const std::vector<std::size_t>& ns,
                               const LlnOptions& options, std::uint64_t seed);

// (1/N) sum_{0<|k|<=k_max} (1 + 4 pi^2 k^2)^{-s}: the i.i.d. uniform value.
double lln_iid_uniform_expectation(std::size_t n, double s, int k_max);

// Density on the grid from the empirical Fourier modes |k| <= k_max of the
// pooled samples, floored at a small positive value and renormalised.
GridDensity fourier_density_estimate(std::span<const double> positions, const Grid& grid,
                                     int k_max);

}  // namespace mckean

#endif  // MCKEAN_FLUCTUATIONS_HPP

#ifndef MCKEAN_PARTICLE_HPP
#define MCKEAN_PARTICLE_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mckean/grid.hpp"
#include "mckean/model.hpp"
#include "mckean/rng.hpp"

namespace mckean {

/// N particles in d dimensions, stored row-major (particle i occupies
/// positions[i*d .. i*d + d)). Each particle owns a counter-based stream keyed
/// by (seed, replica, i), so results do not depend on thread scheduling.
class ParticleEnsemble {
 public:
  ParticleEnsemble(std::shared_ptr<const PotentialSpec> model,
                   std::vector<double> positions, std::uint64_t seed,
                   std::uint64_t replica = 0, double time = 0.0);

  const PotentialSpec& model() const noexcept { return *model_; }
  const std::shared_ptr<const PotentialSpec>& model_ptr() const noexcept { return model_; }
  std::size_t size() const noexcept { return positions_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  double time() const noexcept { return time_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t replica() const noexcept { return replica_; }

  std::span<const double> positions() const noexcept { return positions_; }
  std::span<const double> position(std::size_t i) const noexcept {
    return {positions_.data() + i * dim_, dim_};
  }
  CounterRng& stream(std::size_t i) noexcept { return streams_[i]; }

  // Low-level access for integrators; callers keep the domain invariant.
  std::vector<double>& mutable_positions() noexcept { return positions_; }
  void advance_time(double dt);

 private:
  std::shared_ptr<const PotentialSpec> model_;
  std::size_t dim_;
  std::vector<double> positions_;
  std::vector<CounterRng> streams_;
  std::uint64_t seed_;
  std::uint64_t replica_;
  double time_;
};

// Maps a coordinate back into the domain: reduction mod 1 on the torus,
// folding at the walls of a box, identity on the line.
void apply_boundary(const Domain& domain, std::span<double> x);

// Signed displacement x - y; the minimal image on the torus.
double displacement(const Domain& domain, double x, double y);

// out_i = (1/N) sum_j grad_1 W(x_i, x_j). Uses Fourier moments for cosine
// sums and the centre of mass for the quadratic interaction, and the direct
// pairwise sum otherwise.
void interaction_drift(const PotentialSpec& spec, std::span<const double> positions,
                       std::span<double> out);
// Direct O(N^2) pairwise sum, kept as a reference for the fast paths.
void pairwise_interaction_drift(const PotentialSpec& spec,
                                std::span<const double> positions, std::span<double> out);

// Full drift -grad V(x_i) - (1/N) sum_j grad_1 W(x_i, x_j).
void particle_drift(const PotentialSpec& spec, std::span<const double> positions,
                    std::span<double> out);

// One Euler-Maruyama step in place. Throws NumericalBlowupError naming the
// first particle with a non-finite drift or position.
void step_euler_maruyama(ParticleEnsemble& ens, double dt);

// H_N = sum_i V(x_i) + (1/2N) sum_{i,j} W(x_i, x_j).
double hamiltonian(const PotentialSpec& spec, std::span<const double> positions);
double hamiltonian(const ParticleEnsemble& ens);
double pairwise_hamiltonian(const PotentialSpec& spec, std::span<const double> positions);

struct EmpiricalMeasure {
  std::size_t dim = 1;
  std::vector<double> points;

  std::size_t size() const noexcept { return points.size() / dim; }
  double weight() const noexcept { return 1.0 / static_cast<double>(size()); }
  std::vector<double> mean() const;
};

EmpiricalMeasure empirical_measure(const ParticleEnsemble& ens);

enum class GridSampling {
  kNodes,  // atoms at the grid nodes with weights rho_i dx
  kCells   // uniform within the cell around each node
};

// n i.i.d. draws from a grid density by inverse-CDF lookup.
std::vector<double> sample_iid(const GridDensity& rho, std::size_t n, CounterRng& rng,
                               GridSampling mode = GridSampling::kCells);

// Ensemble of N i.i.d. particles from rho, particle streams from (seed, replica).
ParticleEnsemble iid_ensemble(std::shared_ptr<const PotentialSpec> model,
                              const GridDensity& rho, std::size_t n, std::uint64_t seed,
                              std::uint64_t replica = 0);

// ---- Gibbs sampling ------------------------------------------------------

enum class GibbsScheme { kUla, kMala };

struct GibbsOptions {
  GibbsScheme scheme = GibbsScheme::kMala;
  double step = 1e-3;
  std::size_t burn_in = 1000;
  std::size_t thin = 10;
  std::size_t n_samples = 100;
};

struct GibbsResult {
  std::vector<ParticleEnsemble> samples;
  double acceptance_rate = 1.0;  // post burn-in; 1 for ULA
  std::vector<std::string> warnings;
};

// Markov chain targeting exp(-beta H_N) / Z_N. If no initial positions are
// given the chain starts from i.i.d. uniform points (torus, box) or standard
// normals (line).
GibbsResult sample_gibbs(std::shared_ptr<const PotentialSpec> model, std::size_t n_particles,
                         const GibbsOptions& options, std::uint64_t seed,
                         std::optional<std::vector<double>> initial = std::nullopt,
                         std::uint64_t replica = 0);

// ---- synchronous coupling -------------------------------------------------

struct CouplingTrace {
  std::vector<double> times;
  std::vector<double> distance;  // (1/N sum_i |X_i - Y_i|^2)^{1/2}
};

// X follows the interacting system, Y the mean-field drift
// -grad V - grad W * rho(t), both driven by the same Brownian increments and
// started from the same i.i.d. sample of flow.states[0]. The flow must hold a
// state at every step time n*dt up to t_end (ConfigError otherwise). The
// distance is recorded every log_every steps and at t_end.
CouplingTrace synchronous_coupling_run(std::shared_ptr<const PotentialSpec> model,
                                       std::size_t n_particles, double dt, double t_end,
                                       const MeanFieldFlow& flow, std::uint64_t seed,
                                       std::uint64_t replica = 0, std::size_t log_every = 1);

}  // namespace mckean

#endif  // MCKEAN_PARTICLE_HPP

#ifndef MCKEAN_MEANFIELD_HPP
#define MCKEAN_MEANFIELD_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "mckean/fft.hpp"
#include "mckean/grid.hpp"
#include "mckean/model.hpp"

namespace mckean {

/// Solver for d/dt rho = beta^-1 rho'' + (rho (V + W * rho)')' on a grid.
///
/// The flux through each cell face uses Scharfetter-Gummel exponential
/// fitting with the potential V + W * rho frozen at the start of the step,
/// and the density is advanced implicitly (one tridiagonal, or cyclic
/// tridiagonal, solve per step). The scheme conserves mass exactly, keeps
/// the density positive for any dt, and has rho ~ exp(-beta Phi) as its
/// discrete steady states. Not thread-safe; use one solver per thread.
class McKeanVlasovSolver {
 public:
  McKeanVlasovSolver(const PotentialSpec& spec, const Grid& grid);

  const PotentialSpec& model() const noexcept { return spec_; }
  const Grid& grid() const noexcept { return grid_; }

  // Throws StepSizeError if max |Phi'| dt / dx > 1 and PositivityError if
  // the result has values below -1e-12.
  void step(GridDensity& rho, double dt);

  std::vector<double> interaction_field(const GridDensity& rho);     // W * rho
  std::vector<double> interaction_gradient(const GridDensity& rho);  // W' * rho
  std::vector<double> potential(const GridDensity& rho);             // V + W * rho

 private:
  PotentialSpec spec_;
  Grid grid_;
  std::vector<double> v_nodes_;
  std::optional<Convolver> conv_w_;
  std::optional<Convolver> conv_dw_;
};

GridDensity mckean_vlasov_step(const GridDensity& rho, const PotentialSpec& spec, double dt);

// States at t = 0, record_every*dt, ..., t_end (the final state is always kept).
MeanFieldFlow solve_mean_field(const PotentialSpec& spec, GridDensity init, double dt,
                               double t_end, std::size_t record_every = 1);

// beta^-1 int rho log rho + int V rho + 1/2 int int W rho rho.
double free_energy(const GridDensity& rho, const PotentialSpec& spec);
// Same with the interaction scaled by (1 - 1/N).
double energy_per_particle_product(const GridDensity& rho, const PotentialSpec& spec,
                                   std::size_t n);
// int |beta^-1 (log rho)' + (W * rho)' + V'|^2 rho.
double dissipation(const GridDensity& rho, const PotentialSpec& spec);

// exp(-beta (W * rho + V)) / Z on the grid.
GridDensity gibbs_map(const GridDensity& rho, const PotentialSpec& spec);
// T(rho) = rho - gibbs_map(rho); returned as raw nodal values (mass 0).
GridDensity self_consistency_map(const GridDensity& rho, const PotentialSpec& spec);
double self_consistency_residual(const GridDensity& rho, const PotentialSpec& spec);

struct SteadyStateOptions {
  double damping = 0.5;  // initial value, halved when the iteration oscillates
  double tol = 1e-10;
  std::size_t max_iter = 20000;
};

struct SteadyStateResult {
  GridDensity density;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;  // sup-norm of T before each update

  double residual() const { return residual_history.empty() ? 0.0 : residual_history.back(); }
};

SteadyStateResult find_steady_state(const PotentialSpec& spec, const GridDensity& init,
                                    const SteadyStateOptions& options = {});

// Converged fixed points from the standard starts: flat, flat +- 0.1 cos,
// and four random-phase two-harmonic perturbations (torus); the Gibbs
// density of V and shifted copies of it (line and box).
std::vector<SteadyStateResult> multistart_steady_states(const PotentialSpec& spec,
                                                        std::size_t grid_size = 256,
                                                        std::uint64_t seed = 0,
                                                        const SteadyStateOptions& options = {});

// ---- spectra of the flat state -------------------------------------------

// lambda_k = -4 pi^2 k^2 (beta^-1 + W^(k)), 1 <= k <= k_max.
std::map<int, double> linearized_spectrum_flat(const PotentialSpec& spec,
                                               int k_max = kDefaultKMax);
// max_k lambda_k.
double leading_eigenvalue_flat(const PotentialSpec& spec, int k_max = kDefaultKMax);
// -max_k lambda_k = min_k 4 pi^2 k^2 (beta^-1 + W^(k)).
double linearized_gap(const PotentialSpec& spec, int k_max = kDefaultKMax);
// inf D / (E - E_min) for infinitesimal perturbations of the flat state:
// min_k 8 pi^2 k^2 (beta^-1 + W^(k)) = 2 * linearized_gap.
double linearized_lsi_constant(const PotentialSpec& spec, int k_max = kDefaultKMax);

// Eigenvalues (descending, constant mode removed) of the discretised
// linearisation beta^-1 D2 + D2 C about the flat state on M torus nodes.
std::vector<double> grid_spectrum_flat(const PotentialSpec& spec, std::size_t grid_size = 256);
// Bisection in beta for the zero crossing of the leading grid eigenvalue.
double grid_critical_beta(const PotentialSpec& spec, double lo, double hi,
                          std::size_t grid_size = 256, double tol = 1e-10);

// ---- properties and phase transitions -------------------------------------

struct PropertyReport {
  bool a = false;  // spectral gap in the interaction-weighted product
  bool b = false;  // trivial kernel of the linearisation
  double beta_sharp = 0.0;
  std::optional<GridDensity> c_witness;  // non-minimising critical point
  std::vector<SteadyStateResult> states;
  std::vector<double> energies;
};

PropertyReport check_properties(const PotentialSpec& spec, int k_max = kDefaultKMax,
                                std::size_t grid_size = 256, std::uint64_t seed = 0);

struct ScanRow {
  double beta = 0.0;
  double r = 0.0;
  double energy_gap = 0.0;
  double lambda1 = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

struct PhaseScan {
  std::vector<ScanRow> rows;
  std::optional<double> beta_c;  // first beta with r > 10 tol
};

PhaseScan scan_phase_transition(const PotentialSpec& spec, const std::vector<double>& betas,
                                double amplitude = 0.1, const SteadyStateOptions& options = {},
                                std::size_t grid_size = 256, int k_max = kDefaultKMax);

}  // namespace mckean

#endif  // MCKEAN_MEANFIELD_HPP

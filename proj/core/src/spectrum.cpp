#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mckean/errors.hpp"
#include "mckean/meanfield.hpp"

namespace mckean {

namespace {

constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

void require_flat_torus(const PotentialSpec& spec) {
  if (!spec.domain().is_torus() || spec.has_confinement()) {
    throw UnsupportedModelError("flat-state spectra need the torus with V = 0");
  }
}

}  // namespace

std::map<int, double> linearized_spectrum_flat(const PotentialSpec& spec, int k_max) {
  require_flat_torus(spec);
  const auto w_hat = fourier_coefficients(spec, k_max);
  std::map<int, double> out;
  for (int k = 1; k <= k_max; ++k) {
    out[k] = -kFourPiSq * k * k * (spec.temperature() + w_hat(k));
  }
  return out;
}

double leading_eigenvalue_flat(const PotentialSpec& spec, int k_max) {
  double lead = -std::numeric_limits<double>::infinity();
  for (const auto& [k, lambda] : linearized_spectrum_flat(spec, k_max)) {
    lead = std::max(lead, lambda);
  }
  return lead;
}

double linearized_gap(const PotentialSpec& spec, int k_max) {
  return -leading_eigenvalue_flat(spec, k_max);
}

double linearized_lsi_constant(const PotentialSpec& spec, int k_max) {
  return 2.0 * linearized_gap(spec, k_max);
}

std::vector<double> grid_spectrum_flat(const PotentialSpec& spec, std::size_t grid_size) {
  require_flat_torus(spec);
  const Grid grid = torus_grid(grid_size);
  const auto M = static_cast<Eigen::Index>(grid_size);
  const double dx = grid.dx;
  Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(M, M);
  Eigen::MatrixXd c(M, M);
  for (Eigen::Index i = 0; i < M; ++i) {
    d2(i, i) = -2.0 / (dx * dx);
    d2(i, (i + 1) % M) += 1.0 / (dx * dx);
    d2(i, (i + M - 1) % M) += 1.0 / (dx * dx);
    for (Eigen::Index j = 0; j < M; ++j) {
      c(i, j) = spec.interaction_profile(static_cast<double>(i - j) * dx) * dx;
    }
  }
  Eigen::MatrixXd a = spec.temperature() * d2 + d2 * c;
  a = 0.5 * (a + a.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  // drop the eigenvector with the largest overlap with the constants
  Eigen::Index constant = 0;
  double overlap = -1.0;
  for (Eigen::Index j = 0; j < M; ++j) {
    const double o = std::abs(vectors.col(j).sum());
    if (o > overlap) {
      overlap = o;
      constant = j;
    }
  }
  std::vector<double> out;
  for (Eigen::Index j = 0; j < M; ++j) {
    if (j != constant) out.push_back(values(j));
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double grid_critical_beta(const PotentialSpec& spec, double lo, double hi,
                          std::size_t grid_size, double tol) {
  auto lead = [&](double beta) { return grid_spectrum_flat(spec.with_beta(beta), grid_size).front(); };
  double f_lo = lead(lo), f_hi = lead(hi);
  if (f_lo * f_hi > 0.0) {
    throw PreconditionError("leading grid eigenvalue does not change sign on the bracket");
  }
  while (hi - lo > tol * std::max(1.0, std::abs(lo))) {
    const double mid = 0.5 * (lo + hi);
    const double f = lead(mid);
    if ((f < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace mckean

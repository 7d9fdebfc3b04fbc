#ifndef MCKEAN_TABULATED_HPP
#define MCKEAN_TABULATED_HPP

#include <filesystem>
#include <memory>
#include <vector>

namespace mckean {

enum class TableBoundary {
  kPeriodic,  // period 1, the first node is repeated one period later
  kClamped,   // linear extrapolation with the endpoint slope
};

/// Cubic-spline interpolant of a one-dimensional table. Gradients come from a
/// second spline fitted to centred differences of the table, so that the
/// gradient never depends on the spline's own boundary conditions.
/// Immutable and cheap to copy; safe to evaluate concurrently.
class TabulatedFunction {
 public:
  TabulatedFunction(std::vector<double> x, std::vector<double> y,
                    TableBoundary boundary);

  // Two-column CSV (x, value); an optional non-numeric header line is skipped.
  static TabulatedFunction from_csv(const std::filesystem::path& path,
                                    TableBoundary boundary);

  double value(double x) const;
  double derivative(double x) const;

  TableBoundary boundary() const noexcept;
  const std::vector<double>& nodes() const noexcept;
  const std::vector<double>& values() const noexcept;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace mckean

#endif  // MCKEAN_TABULATED_HPP

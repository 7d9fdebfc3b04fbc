#ifndef MCKEAN_STATS_HPP
#define MCKEAN_STATS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace mckean {

struct Estimate {
  double mean = 0.0;
  double stderr = 0.0;
};

// Sample mean with the i.i.d. standard error.
Estimate mean_and_stderr(std::span<const double> values);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Least-squares slope of log(y) against log(x).
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

// Integrated autocorrelation time tau = 1 + 2 sum_t rho(t), in units of the
// sampling interval, with Sokal's automatic window (smallest W >= c tau(W)).
double integrated_autocorrelation_time(std::span<const double> series,
                                       double window_factor = 5.0);

// Batch-means estimate of the mean and its standard error. Trailing samples
// that do not fill a batch are dropped.
Estimate batch_means(std::span<const double> series, std::size_t batch_length);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

}  // namespace mckean

#endif  // MCKEAN_STATS_HPP

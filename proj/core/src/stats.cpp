#include "mckean/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mckean/errors.hpp"

namespace mckean {

Estimate mean_and_stderr(std::span<const double> values) {
  Estimate e;
  const auto n = values.size();
  if (n == 0) return e;
  e.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (n < 2) return e;
  double ss = 0.0;
  for (double v : values) ss += (v - e.mean) * (v - e.mean);
  e.stderr = std::sqrt(ss / (n - 1) / n);
  return e;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw PreconditionError("fit_line: need at least two (x, y) pairs");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_stderr = std::sqrt(rss / (n - 2) / sxx);
  }
  return fit;
}

LineFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  std::transform(x.begin(), x.end(), lx.begin(), [](double v) { return std::log(v); });
  std::transform(y.begin(), y.end(), ly.begin(), [](double v) { return std::log(v); });
  return fit_line(lx, ly);
}

double integrated_autocorrelation_time(std::span<const double> series,
                                       double window_factor) {
  const std::size_t n = series.size();
  if (n < 4) throw InsufficientDataError("autocorrelation: series too short");
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  double c0 = 0.0;
  for (double v : series) c0 += (v - mean) * (v - mean);
  c0 /= n;
  if (c0 <= 0.0) return 1.0;
  double tau = 1.0;
  for (std::size_t lag = 1; lag < n / 2; ++lag) {
    double c = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) {
      c += (series[i] - mean) * (series[i + lag] - mean);
    }
    c /= n;
    tau += 2.0 * c / c0;
    if (static_cast<double>(lag) >= window_factor * tau) break;
  }
  return std::max(tau, 1.0);
}

Estimate batch_means(std::span<const double> series, std::size_t batch_length) {
  if (batch_length == 0) batch_length = 1;
  const std::size_t batches = series.size() / batch_length;
  if (batches < 2) {
    throw InsufficientDataError("batch_means: fewer than two batches");
  }
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    const auto first = series.begin() + b * batch_length;
    means[b] = std::accumulate(first, first + batch_length, 0.0) / batch_length;
  }
  return mean_and_stderr(means);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) return 0.0;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

}  // namespace mckean

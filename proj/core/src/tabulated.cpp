#include "mckean/tabulated.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_spline.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "mckean/errors.hpp"

namespace mckean {

namespace {

struct SplineDeleter {
  void operator()(gsl_spline* s) const noexcept { gsl_spline_free(s); }
};
using SplinePtr = std::unique_ptr<gsl_spline, SplineDeleter>;

SplinePtr make_spline(const std::vector<double>& x, const std::vector<double>& y,
                      bool periodic) {
  const gsl_interp_type* type =
      periodic ? gsl_interp_cspline_periodic : gsl_interp_cspline;
  if (x.size() < gsl_interp_type_min_size(type)) {
    throw ConfigError("tabulated potential: too few nodes for a cubic spline");
  }
  SplinePtr s(gsl_spline_alloc(type, x.size()));
  if (gsl_spline_init(s.get(), x.data(), y.data(), x.size()) != GSL_SUCCESS) {
    throw ConfigError("tabulated potential: spline construction failed");
  }
  return s;
}

}  // namespace

struct TabulatedFunction::Impl {
  TableBoundary boundary;
  std::vector<double> x, y, dy;
  SplinePtr value_spline, slope_spline;

  double wrap(double t) const {
    const double x0 = x.front();
    return t - std::floor(t - x0) * 1.0;  // period 1
  }
};

TabulatedFunction::TabulatedFunction(std::vector<double> x, std::vector<double> y,
                                     TableBoundary boundary) {
  if (x.size() != y.size()) {
    throw ConfigError("tabulated potential: x and value columns differ in length");
  }
  if (!std::is_sorted(x.begin(), x.end()) ||
      std::adjacent_find(x.begin(), x.end()) != x.end()) {
    throw ConfigError("tabulated potential: nodes must be strictly increasing");
  }
  gsl_set_error_handler_off();
  auto impl = std::make_shared<Impl>();
  impl->boundary = boundary;
  if (boundary == TableBoundary::kPeriodic) {
    if (x.back() - x.front() > 1.0 + 1e-12) {
      throw ConfigError("periodic table must fit in one period of length 1");
    }
    if (std::abs(x.back() - x.front() - 1.0) > 1e-12) {
      x.push_back(x.front() + 1.0);
      y.push_back(y.front());
    } else {
      y.back() = y.front();
    }
  }
  const std::size_t n = x.size();
  std::vector<double> dy(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (boundary == TableBoundary::kPeriodic) {
      // nodes 0 and n-1 coincide modulo the period
      const std::size_t prev = (i == 0) ? n - 2 : i - 1;
      const std::size_t next = (i == n - 1) ? 1 : i + 1;
      const double xp = (i == 0) ? x[prev] - 1.0 : x[prev];
      const double xn = (i == n - 1) ? x[next] + 1.0 : x[next];
      dy[i] = (y[next] - y[prev]) / (xn - xp);
    } else if (i == 0) {
      dy[i] = (y[1] - y[0]) / (x[1] - x[0]);
    } else if (i == n - 1) {
      dy[i] = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
    } else {
      dy[i] = (y[i + 1] - y[i - 1]) / (x[i + 1] - x[i - 1]);
    }
  }
  const bool periodic = boundary == TableBoundary::kPeriodic;
  impl->value_spline = make_spline(x, y, periodic);
  impl->slope_spline = make_spline(x, dy, periodic);
  impl->x = std::move(x);
  impl->y = std::move(y);
  impl->dy = std::move(dy);
  impl_ = std::move(impl);
}

TabulatedFunction TabulatedFunction::from_csv(const std::filesystem::path& path,
                                              TableBoundary boundary) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open table '" + path.string() + "'");
  std::vector<double> xs, ys;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a = 0.0, b = 0.0;
    if (!(row >> a >> b)) {
      if (first) {
        first = false;
        continue;
      }
      throw ConfigError("malformed row in '" + path.string() + "': " + line);
    }
    first = false;
    xs.push_back(a);
    ys.push_back(b);
  }
  return TabulatedFunction(std::move(xs), std::move(ys), boundary);
}

double TabulatedFunction::value(double t) const {
  const Impl& p = *impl_;
  if (p.boundary == TableBoundary::kPeriodic) {
    return gsl_spline_eval(p.value_spline.get(), p.wrap(t), nullptr);
  }
  if (t < p.x.front()) return p.y.front() + p.dy.front() * (t - p.x.front());
  if (t > p.x.back()) return p.y.back() + p.dy.back() * (t - p.x.back());
  return gsl_spline_eval(p.value_spline.get(), t, nullptr);
}

double TabulatedFunction::derivative(double t) const {
  const Impl& p = *impl_;
  if (p.boundary == TableBoundary::kPeriodic) {
    return gsl_spline_eval(p.slope_spline.get(), p.wrap(t), nullptr);
  }
  if (t < p.x.front()) return p.dy.front();
  if (t > p.x.back()) return p.dy.back();
  return gsl_spline_eval(p.slope_spline.get(), t, nullptr);
}

TableBoundary TabulatedFunction::boundary() const noexcept { return impl_->boundary; }
const std::vector<double>& TabulatedFunction::nodes() const noexcept { return impl_->x; }
const std::vector<double>& TabulatedFunction::values() const noexcept { return impl_->y; }

}  // namespace mckean

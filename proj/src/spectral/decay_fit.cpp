#include "vpb/spectral/decay.hpp"

#include <cmath>

namespace vpb::spectral {

void DecaySeries::validate() const {
  if (times.size() != values.size()) throw PreconditionError("decay series: times and values differ in length");
  for (std::size_t n = 1; n < times.size(); ++n)
    if (!(times[n] > times[n - 1])) throw PreconditionError("decay series: times must be strictly increasing");
  for (double v : values)
    if (!std::isfinite(v) || v < 0.0) throw PreconditionError("decay series: values must be finite and nonnegative");
}

DecaySeries DecaySeries::sqrt() const {
  DecaySeries out{label, times, values};
  for (double& v : out.values) v = std::sqrt(v);
  return out;
}

RateFit fit_decay_exponent(const DecaySeries& series, std::pair<double, double> window) {
  series.validate();
  if (series.times.empty() || window.first < series.times.front() || window.second > series.times.back() ||
      !(window.first < window.second))
    throw PreconditionError("decay fit: window outside the series range");
  std::vector<double> x, y;
  for (std::size_t n = 0; n < series.times.size(); ++n) {
    const double t = series.times[n];
    if (t < window.first || t > window.second) continue;
    if (!(series.values[n] > 0.0)) throw PreconditionError("decay fit: non-positive value inside the window");
    x.push_back(std::log1p(t));
    y.push_back(std::log(series.values[n]));
  }
  if (x.size() < 8) throw PreconditionError("decay fit: fewer than 8 samples in the window");
  const double m = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    sx += x[n];
    sy += y[n];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    sxx += (x[n] - mx) * (x[n] - mx);
    sxy += (x[n] - mx) * (y[n] - my);
  }
  RateFit fit;
  fit.window = window;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double ss = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double r = y[n] - fit.exponent * x[n] - fit.intercept;
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / m);
  return fit;
}

}  // namespace vpb::spectral

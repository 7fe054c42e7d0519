#pragma once

#include "vpb/common.hpp"

#include <string>
#include <utility>
#include <vector>

namespace vpb::spectral {

struct DecaySeries {
  std::string label;
  std::vector<double> times;
  std::vector<double> values;  // squared norms

  void validate() const;
  DecaySeries sqrt() const;  // norm series
};

struct RateFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the log residuals
  std::pair<double, double> window{0.0, 0.0};
};

// Least squares of log y against log(1 + t) over samples with t in [lo, hi].
RateFit fit_decay_exponent(const DecaySeries& series, std::pair<double, double> window);

}  // namespace vpb::spectral

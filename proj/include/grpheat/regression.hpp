#pragma once

#include "grpheat/core.hpp"

#include <span>
#include <vector>

namespace grpheat {

struct LineFit {
  Scalar slope = 0;
  Scalar intercept = 0;
  Scalar r_squared = 0;
};

/// Ordinary least squares y ~ intercept + slope*x. Needs at least two distinct x.
LineFit least_squares_line(std::span<const Scalar> x, std::span<const Scalar> y);

/// 1, 2, 4, ... up to and including max_lag.
std::vector<int> dyadic_lags(int max_lag);

/// Log-log regression of the max oscillation statistic against lag.
struct OscillationFit {
  Scalar slope = 1;
  Scalar r_squared = 0;
  bool degenerate = false;  ///< some lag showed zero oscillation
};

/// Fits log(osc[l]) against log(lag[l] * spacing). Any zero oscillation makes the fit
/// degenerate with slope 1 by convention.
OscillationFit fit_oscillations(std::span<const int> lags, std::span<const Scalar> oscillations,
                                Scalar spacing);

/// max_i |f[i+lag] - f[i]|.
Scalar max_oscillation(std::span<const Scalar> f, int lag);

}  // namespace grpheat

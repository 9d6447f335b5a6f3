#include "grpheat/regression.hpp"

#include <cmath>

namespace grpheat {

LineFit least_squares_line(std::span<const Scalar> x, std::span<const Scalar> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ParameterError("line fit needs at least two (x, y) pairs of equal length");
  const auto n = static_cast<Scalar>(x.size());
  Scalar mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  Scalar sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Scalar dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0)) throw ParameterError("line fit needs at least two distinct abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

std::vector<int> dyadic_lags(int max_lag) {
  std::vector<int> lags;
  for (int l = 1; l <= max_lag; l *= 2) lags.push_back(l);
  return lags;
}

Scalar max_oscillation(std::span<const Scalar> f, int lag) {
  Scalar best = 0;
  for (std::size_t i = 0; i + lag < f.size(); ++i) best = std::max(best, std::abs(f[i + lag] - f[i]));
  return best;
}

OscillationFit fit_oscillations(std::span<const int> lags, std::span<const Scalar> oscillations,
                                Scalar spacing) {
  OscillationFit out;
  std::vector<Scalar> lx, ly;
  for (std::size_t k = 0; k < lags.size(); ++k) {
    if (!(oscillations[k] > 0)) {
      out.degenerate = true;
      return out;
    }
    lx.push_back(std::log(lags[k] * spacing));
    ly.push_back(std::log(oscillations[k]));
  }
  const LineFit fit = least_squares_line(lx, ly);
  out.slope = fit.slope;
  out.r_squared = fit.r_squared;
  return out;
}

}  // namespace grpheat

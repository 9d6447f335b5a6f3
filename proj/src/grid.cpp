#include "grpheat/grid.hpp"

#include <cmath>

namespace grpheat {

SpaceGrid::SpaceGrid(int n) : n_(n) {
  if (n < 2) throw ParameterError("space grid needs n >= 2 intervals, got " + std::to_string(n));
}

Vector SpaceGrid::nodes() const {
  return sample([](Scalar x) { return x; });
}

TimeGrid::TimeGrid(int m, Scalar horizon) : m_(m), horizon_(horizon) {
  if (m < 1) throw ParameterError("time grid needs m >= 1 steps, got " + std::to_string(m));
  if (!(horizon > 0) || !std::isfinite(horizon))
    throw ParameterError("time horizon must be a positive finite number");
}

Vector trapezoid_weights(const SpaceGrid& grid) {
  Vector w = Vector::Constant(grid.size(), grid.h());
  w[0] *= 0.5;
  w[grid.n()] *= 0.5;
  return w;
}

Scalar trapezoid(const SpaceGrid& grid, const Vector& values) {
  const int n = grid.n();
  Scalar s = 0.5 * (values[0] + values[n]);
  for (int i = 1; i < n; ++i) s += values[i];
  return s * grid.h();
}

}  // namespace grpheat

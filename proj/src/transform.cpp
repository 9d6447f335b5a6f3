#include "grpheat/transform.hpp"

#include <cmath>
#include <limits>

namespace grpheat {

Vector integrate_potential(const SpaceGrid& grid, const Vector& w) {
  if (w.size() != grid.size()) throw ParameterError("potential does not match the grid");
  Vector integral(grid.size());
  integral[0] = 0;
  const Scalar half_h = 0.5 * grid.h();
  for (int i = 1; i <= grid.n(); ++i) integral[i] = integral[i - 1] + half_h * (w[i - 1] + w[i]);
  return integral;
}

Vector integrate_potential(const PotentialPath& w) { return integrate_potential(w.grid(), w.values()); }

TransformPair build_transform(const SpaceGrid& grid, const Vector& w) {
  TransformPair t{grid, integrate_potential(grid, w), {}, {}};
  const Scalar max_abs = t.integral.cwiseAbs().maxCoeff();
  // Both H_W and 1/H_W must be representable.
  if (!(max_abs < std::log(std::numeric_limits<Scalar>::max())))
    throw RangeError("exp(int W) overflows: max |int_0^x W| = " + std::to_string(max_abs));
  t.hw = t.integral.array().exp();
  t.hw_inv = t.hw.cwiseInverse();
  return t;
}

TransformPair build_transform(const PotentialPath& w) { return build_transform(w.grid(), w.values()); }

Field recover_u(const Field& v, const TransformPair& t) {
  if (!(v.xgrid() == t.grid)) throw ParameterError("field and transform live on different grids");
  Matrix u = v.values() * t.hw_inv.asDiagonal();
  return Field(v.tgrid(), v.xgrid(), std::move(u));
}

Field apply_hw(const Field& u, const TransformPair& t) {
  if (!(u.xgrid() == t.grid)) throw ParameterError("field and transform live on different grids");
  Matrix v = u.values() * t.hw.asDiagonal();
  return Field(u.tgrid(), u.xgrid(), std::move(v));
}

}  // namespace grpheat

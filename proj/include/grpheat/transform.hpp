#pragma once

#include "grpheat/field.hpp"
#include "grpheat/potential.hpp"

namespace grpheat {

/// The multiplier H_W = exp(I), I(x) = int_0^x W, at the grid nodes.
struct TransformPair {
  SpaceGrid grid;
  Vector integral;
  Vector hw;
  Vector hw_inv;
};

/// Cumulative composite trapezoid of W from 0; I(0) = 0.
Vector integrate_potential(const PotentialPath& w);
Vector integrate_potential(const SpaceGrid& grid, const Vector& w);

/// Throws RangeError when exp(I) would overflow.
TransformPair build_transform(const PotentialPath& w);
TransformPair build_transform(const SpaceGrid& grid, const Vector& w);

/// u = v / H_W row by row.
Field recover_u(const Field& v, const TransformPair& t);

/// v = u * H_W row by row; the inverse of recover_u.
Field apply_hw(const Field& u, const TransformPair& t);

}  // namespace grpheat

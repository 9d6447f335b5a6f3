#pragma once

#include "grpheat/core.hpp"

namespace grpheat {

/// Uniform grid of n intervals on [0, pi]: x_i = i*pi/n.
class SpaceGrid {
 public:
  explicit SpaceGrid(int n);

  int n() const { return n_; }
  int size() const { return n_ + 1; }
  Scalar h() const { return kPi / n_; }
  Scalar node(int i) const { return i == n_ ? kPi : i * h(); }
  Vector nodes() const;

  /// Apply f to every node.
  template <typename F>
  Vector sample(F&& f) const {
    Vector out(size());
    for (int i = 0; i <= n_; ++i) out[i] = f(node(i));
    return out;
  }

  friend bool operator==(const SpaceGrid&, const SpaceGrid&) = default;

 private:
  int n_;
};

/// Uniform time grid t_j = j*T/m, j = 0..m.
class TimeGrid {
 public:
  TimeGrid(int m, Scalar horizon);

  int m() const { return m_; }
  int size() const { return m_ + 1; }
  Scalar horizon() const { return horizon_; }
  Scalar dt() const { return horizon_ / m_; }
  Scalar node(int j) const { return j == m_ ? horizon_ : j * dt(); }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  int m_;
  Scalar horizon_;
};

/// Composite trapezoid weights on a space grid.
Vector trapezoid_weights(const SpaceGrid& grid);

/// Composite trapezoid of nodal values.
Scalar trapezoid(const SpaceGrid& grid, const Vector& values);

}  // namespace grpheat

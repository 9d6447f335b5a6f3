#pragma once

#include "grpheat/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>

namespace grpheat {

/// Space-time array u(t_j, x_i); row j holds time level t_j.
class Field {
 public:
  Field(TimeGrid tgrid, SpaceGrid xgrid);
  Field(TimeGrid tgrid, SpaceGrid xgrid, Matrix values);

  const TimeGrid& tgrid() const { return tgrid_; }
  const SpaceGrid& xgrid() const { return xgrid_; }
  const Matrix& values() const { return values_; }
  Matrix& values() { return values_; }

  auto row(int j) const { return values_.row(j); }
  Vector level(int j) const { return values_.row(j).transpose(); }

 private:
  TimeGrid tgrid_;
  SpaceGrid xgrid_;
  Matrix values_;
};

/// CSV with header `t,x,value`, one line per (t_j, x_i), 17 significant digits.
void write_field_csv(std::ostream& out, const Field& field);
void write_field_csv(const std::filesystem::path& path, const Field& field);
Field read_field_csv(const std::filesystem::path& path);

/// Binary layout: magic "GRPH", u32 version, u32 m, u32 n, f64 T, then (m+1)(n+1)
/// row-major f64. All little-endian.
void write_field_binary(const std::filesystem::path& path, const Field& field);
Field read_field_binary(const std::filesystem::path& path);

inline constexpr std::uint32_t kFieldBinaryVersion = 1;

}  // namespace grpheat

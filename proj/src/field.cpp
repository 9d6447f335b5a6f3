#include "grpheat/field.hpp"

#include "text_util.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>
#include <vector>

namespace grpheat {

Field::Field(TimeGrid tgrid, SpaceGrid xgrid)
    : tgrid_(tgrid), xgrid_(xgrid), values_(Matrix::Zero(tgrid.size(), xgrid.size())) {}

Field::Field(TimeGrid tgrid, SpaceGrid xgrid, Matrix values)
    : tgrid_(tgrid), xgrid_(xgrid), values_(std::move(values)) {
  if (values_.rows() != tgrid_.size() || values_.cols() != xgrid_.size())
    throw ParameterError("field array shape does not match its grids");
}

void write_field_csv(std::ostream& out, const Field& field) {
  out << "t,x,value\n";
  char buf[96];
  for (int j = 0; j < field.tgrid().size(); ++j) {
    const Scalar t = field.tgrid().node(j);
    for (int i = 0; i < field.xgrid().size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t, field.xgrid().node(i), field.values()(j, i));
      out << buf;
    }
  }
}

void write_field_csv(const std::filesystem::path& path, const Field& field) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  write_field_csv(out, field);
  if (!out) throw FormatError("failed writing " + path.string());
}

Field read_field_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "t,x,value")
    throw FormatError(path.string() + ": expected header 't,x,value'");
  std::vector<Scalar> ts, vals;
  int per_level = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    const auto parts = detail::split(line, ',');
    if (parts.size() != 3) throw FormatError(path.string() + ": malformed line '" + line + "'");
    const Scalar t = detail::parse_real(parts[0], "t");
    if (ts.empty() || t == ts.front()) ++per_level;
    ts.push_back(t);
    vals.push_back(detail::parse_real(parts[2], "value"));
  }
  if (per_level < 3 || vals.size() % per_level != 0)
    throw FormatError(path.string() + ": field CSV is not a complete (t, x) grid");
  const int n = per_level - 1;
  const int m = static_cast<int>(vals.size() / per_level) - 1;
  if (m < 1) throw FormatError(path.string() + ": field CSV needs at least two time levels");
  Matrix values = Eigen::Map<const Matrix>(vals.data(), m + 1, n + 1);
  return Field(TimeGrid(m, ts.back()), SpaceGrid(n), std::move(values));
}

namespace {

template <typename T>
void put(std::ostream& out, T v) {
  static_assert(std::endian::native == std::endian::little, "binary field I/O assumes a little-endian host");
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  out.write(bytes, sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& what) {
  char bytes[sizeof(T)];
  if (!in.read(bytes, sizeof(T))) throw FormatError("truncated binary field while reading " + what);
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

}  // namespace

void write_field_binary(const std::filesystem::path& path, const Field& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write("GRPH", 4);
  put<std::uint32_t>(out, kFieldBinaryVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(field.tgrid().m()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(field.xgrid().n()));
  put<double>(out, field.tgrid().horizon());
  const Matrix& v = field.values();
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!out) throw FormatError("failed writing " + path.string());
}

Field read_field_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "GRPH", 4) != 0)
    throw FormatError(path.string() + ": bad magic, not a GRPH field");
  const auto version = get<std::uint32_t>(in, "version");
  if (version != kFieldBinaryVersion)
    throw FormatError(path.string() + ": unsupported field version " + std::to_string(version));
  const auto m = get<std::uint32_t>(in, "m");
  const auto n = get<std::uint32_t>(in, "n");
  const auto horizon = get<double>(in, "T");
  Field field(TimeGrid(static_cast<int>(m), horizon), SpaceGrid(static_cast<int>(n)));
  Matrix& v = field.values();
  if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double))))
    throw FormatError(path.string() + ": truncated field data");
  return field;
}

}  // namespace grpheat

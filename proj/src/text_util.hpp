#pragma once

#include "grpheat/core.hpp"

#include <cerrno>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

namespace grpheat::detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

/// Parses a whole token as a real; returns false on trailing garbage or empty input.
inline bool try_parse_real(const std::string& token, double& out) {
  if (token.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(token.c_str(), &end);
  return end == token.c_str() + token.size() && errno != ERANGE;
}

inline double parse_real(const std::string& token, const std::string& what) {
  double v = 0;
  if (!try_parse_real(token, v)) throw FormatError("invalid number for " + what + ": '" + token + "'");
  return v;
}

inline long long parse_integer(const std::string& token, const std::string& what) {
  if (token.empty()) throw FormatError("missing integer for " + what);
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(token.c_str(), &end, 10);
  if (end != token.c_str() + token.size() || errno == ERANGE)
    throw FormatError("invalid integer for " + what + ": '" + token + "'");
  return v;
}

inline std::uint64_t parse_unsigned(const std::string& token, const std::string& what) {
  if (token.empty()) throw FormatError("missing integer for " + what);
  if (token[0] == '-') throw FormatError(what + " must be non-negative, got " + token);
  std::uint64_t v = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size())
    throw FormatError("invalid integer for " + what + ": '" + token + "'");
  return v;
}

}  // namespace grpheat::detail

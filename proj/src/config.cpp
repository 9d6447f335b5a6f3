#include "grpheat/config.hpp"

#include "grpheat/potential.hpp"
#include "text_util.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace grpheat {

namespace {

const std::map<std::string, Experiment>& experiment_names() {
  static const std::map<std::string, Experiment> names = {
      {"solve_classical", Experiment::solve_classical},
      {"solve_weak", Experiment::solve_weak},
      {"solve_regularized", Experiment::solve_regularized},
      {"spectral", Experiment::spectral},
      {"sweep", Experiment::sweep},
      {"regularity", Experiment::regularity},
      {"maxprinciple", Experiment::maxprinciple},
  };
  return names;
}

std::string real_text(Scalar v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct ThresholdKey {
  const char* key;
  Scalar Thresholds::*field;
};

constexpr ThresholdKey kThresholdKeys[] = {
    {"tol_oracle", &Thresholds::oracle},       {"tol_transform", &Thresholds::transform},
    {"rate_min", &Thresholds::rate_min},       {"rate_max", &Thresholds::rate_max},
    {"rate_r2_min", &Thresholds::rate_r2},     {"reduced_min", &Thresholds::reduced_min},
    {"reduced_max", &Thresholds::reduced_max}, {"space_min", &Thresholds::space_min},
    {"space_max", &Thresholds::space_max},     {"time_min", &Thresholds::time_min},
    {"time_max", &Thresholds::time_max},       {"tol_lambda", &Thresholds::lambda},
    {"sweep_noise", &Thresholds::sweep_noise},
};

Scalar positive_real(const std::string& value, const std::string& key) {
  const Scalar v = detail::parse_real(value, key);
  if (!(v > 0) || !std::isfinite(v)) throw ParameterError(key + " must be a positive real, got '" + value + "'");
  return v;
}

int int_at_least(const std::string& value, const std::string& key, long long lo) {
  const long long v = detail::parse_integer(value, key);
  if (v < lo || v > (1 << 24))
    throw ParameterError(key + " must be an integer in [" + std::to_string(lo) + ", 16777216], got '" + value + "'");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ParameterError(key + " must be true or false, got '" + value + "'");
}

std::string resolve_path(const std::string& path, const std::filesystem::path& base_dir) {
  std::filesystem::path p(path);
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return p.lexically_normal().string();
}

// Rewrites the file part of a potential or initial spec against base_dir.
std::string resolve_spec_path(const std::string& spec, const std::filesystem::path& base_dir) {
  for (const char* prefix : {"file:", "compensated:file:"}) {
    const std::string pre(prefix);
    if (spec.rfind(pre, 0) == 0) return pre + resolve_path(detail::trim(spec.substr(pre.size())), base_dir);
  }
  return spec;
}

void validate_initial(const std::string& spec, int n) {
  std::string body = spec;
  if (body.rfind("compensated:", 0) == 0) body = body.substr(12);
  if (body == "polybump") return;
  if (body.rfind("sin:", 0) == 0) {
    int_at_least(body.substr(4), "initial sine index", 1);
    return;
  }
  if (body.rfind("file:", 0) == 0) {
    const int count = count_potential_values(body.substr(5));
    if (count != n + 1)
      throw ParameterError("initial file " + body.substr(5) + " has " + std::to_string(count) + " values, n = " +
                           std::to_string(n) + " needs " + std::to_string(n + 1));
    return;
  }
  throw ParameterError("initial must be sin:<k>, polybump, file:<path> or compensated:<one of those>, got '" + spec +
                       "'");
}

void validate_potential(const std::string& spec, int n) {
  if (spec.rfind("file:", 0) == 0) {
    const int count = count_potential_values(spec.substr(5));
    if (count != n + 1)
      throw ParameterError("potential file " + spec.substr(5) + " has " + std::to_string(count) + " values, n = " +
                           std::to_string(n) + " needs " + std::to_string(n + 1));
    return;
  }
  // Parsing on a small grid checks the syntax and parameter domains cheaply.
  parse_potential_spec(spec, SpaceGrid(8), 0);
}

}  // namespace

std::string to_string(Experiment e) {
  for (const auto& [name, value] : experiment_names())
    if (value == e) return name;
  return "unknown";
}

std::string to_string(FieldFormat f) { return f == FieldFormat::csv ? "csv" : "binary"; }

RunConfig parse_config(const std::string& source, const std::filesystem::path& base_dir) {
  RunConfig c;
  std::set<std::string> seen;
  std::istringstream in(source);
  std::string line;
  int lineno = 0;

  std::map<std::string, std::function<void(const std::string&)>> setters = {
      {"experiment",
       [&](const std::string& v) {
         const auto it = experiment_names().find(v);
         if (it == experiment_names().end())
           throw ParameterError("experiment must be one of solve_classical, solve_weak, solve_regularized, spectral, "
                                "sweep, regularity, maxprinciple; got '" + v + "'");
         c.experiment = it->second;
       }},
      {"potential", [&](const std::string& v) { c.potential = resolve_spec_path(v, base_dir); }},
      {"initial", [&](const std::string& v) { c.initial = resolve_spec_path(v, base_dir); }},
      {"n", [&](const std::string& v) { c.n = int_at_least(v, "n", 4); }},
      {"m", [&](const std::string& v) { c.m = int_at_least(v, "m", 1); }},
      {"T", [&](const std::string& v) { c.T = positive_real(v, "T"); }},
      {"K", [&](const std::string& v) { c.K = int_at_least(v, "K", 1); }},
      {"eps_list",
       [&](const std::string& v) {
         c.eps_list.clear();
         for (const auto& part : detail::split(v, ',')) c.eps_list.push_back(positive_real(part, "eps_list entry"));
       }},
      {"epsilon", [&](const std::string& v) { c.epsilon = positive_real(v, "epsilon"); }},
      {"seed", [&](const std::string& v) { c.seed = detail::parse_unsigned(v, "seed"); }},
      {"output_dir", [&](const std::string& v) { c.output_dir = v; }},
      {"format",
       [&](const std::string& v) {
         if (v == "csv") c.format = FieldFormat::csv;
         else if (v == "binary") c.format = FieldFormat::binary;
         else throw ParameterError("format must be csv or binary, got '" + v + "'");
       }},
      {"gamma",
       [&](const std::string& v) {
         c.gamma = detail::parse_real(v, "gamma");
         if (!(c.gamma > 0 && c.gamma < 1)) throw ParameterError("gamma must lie in (0, 1), got '" + v + "'");
       }},
      {"floor_t",
       [&](const std::string& v) {
         const Scalar f = detail::parse_real(v, "floor_t");
         if (!(f >= 0) || !std::isfinite(f)) throw ParameterError("floor_t must be a non-negative real, got '" + v + "'");
         c.floor_t = f;
       }},
      {"dump_modes", [&](const std::string& v) { c.dump_modes = parse_bool(v, "dump_modes"); }},
      {"threads", [&](const std::string& v) { c.threads = int_at_least(v, "threads", 0); }},
  };
  for (const auto& t : kThresholdKeys) {
    const std::string key = t.key;
    setters[key] = [&c, key, field = t.field](const std::string& v) {
      c.thresholds.*field = detail::parse_real(v, key);
      if (!std::isfinite(c.thresholds.*field)) throw ParameterError(key + " must be finite");
    };
  }

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = detail::trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw FormatError("config line " + std::to_string(lineno) + ": expected key = value, got '" + body + "'");
    const std::string key = detail::trim(body.substr(0, eq));
    const std::string value = detail::trim(body.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ParameterError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw ParameterError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    if (value.empty()) throw ParameterError("config line " + std::to_string(lineno) + ": empty value for '" + key + "'");
    it->second(value);
  }

  // Cross-field rules.
  if (c.K > c.n - 1) throw ParameterError("K must not exceed n - 1 = " + std::to_string(c.n - 1));
  if (c.experiment == Experiment::spectral && c.K > c.n / 4)
    throw ParameterError("spectral experiments need K <= n/4 = " + std::to_string(c.n / 4));
  if (c.experiment == Experiment::sweep && c.eps_list.size() < 3)
    throw ParameterError(c.eps_list.empty() ? "sweep needs eps_list (at least 3 values)"
                                            : "sweep needs at least 3 values in eps_list");
  if (c.experiment == Experiment::solve_regularized && !c.epsilon)
    throw ParameterError("solve_regularized needs epsilon");
  if (c.floor_t && !(*c.floor_t < c.T / 2)) throw ParameterError("floor_t must be below T/2");
  validate_potential(c.potential, c.n);
  validate_initial(c.initial, c.n);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

void override_seed(RunConfig& config, std::uint64_t seed) {
  config.seed = seed;
  if (config.potential.rfind("fbm:", 0) != 0) return;
  std::string rebuilt = "fbm:";
  bool first = true;
  for (const auto& part : detail::split(config.potential.substr(4), ',')) {
    if (part.rfind("seed", 0) == 0 && detail::trim(part.substr(0, part.find('='))) == "seed") continue;
    rebuilt += (first ? "" : ",") + part;
    first = false;
  }
  config.potential = rebuilt + (first ? "" : ",") + "seed=" + std::to_string(seed);
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> out = {
      {"experiment", to_string(c.experiment)},
      {"potential", c.potential},
      {"initial", c.initial},
      {"n", std::to_string(c.n)},
      {"m", std::to_string(c.m)},
      {"T", real_text(c.T)},
      {"K", std::to_string(c.K)},
  };
  if (!c.eps_list.empty()) {
    std::string eps;
    for (std::size_t i = 0; i < c.eps_list.size(); ++i) eps += (i ? "," : "") + real_text(c.eps_list[i]);
    out.emplace_back("eps_list", eps);
  }
  if (c.epsilon) out.emplace_back("epsilon", real_text(*c.epsilon));
  out.emplace_back("seed", std::to_string(c.seed));
  out.emplace_back("output_dir", c.output_dir.string());
  out.emplace_back("format", to_string(c.format));
  out.emplace_back("gamma", real_text(c.gamma));
  if (c.floor_t) out.emplace_back("floor_t", real_text(*c.floor_t));
  out.emplace_back("dump_modes", c.dump_modes ? "true" : "false");
  out.emplace_back("threads", std::to_string(c.threads));
  for (const auto& t : kThresholdKeys) out.emplace_back(t.key, real_text(c.thresholds.*(t.field)));
  return out;
}

std::string render_config(const RunConfig& config) {
  std::string out;
  for (const auto& [key, value] : config_entries(config)) out += key + " = " + value + "\n";
  return out;
}

}  // namespace grpheat

#include "grpheat/run.hpp"

#include "grpheat/analysis.hpp"
#include "grpheat/spectral.hpp"
#include "grpheat/transform.hpp"
#include "grpheat/weak_solver.hpp"
#include "text_util.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace grpheat {

namespace {

using nlohmann::json;

std::string fmt(const char* format, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, a);
  return buf;
}

// Everything a run produces funnels through here so no file lands outside the directory.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  std::filesystem::path claim(const std::string& name) {
    names_.push_back(name);
    return dir_ / name;
  }

  void json_file(const std::string& name, const json& j) {
    std::ofstream out(claim(name));
    if (!out) throw FormatError("cannot write " + (dir_ / name).string());
    out << j.dump(2) << "\n";
  }

  const std::vector<std::string>& names() const { return names_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> names_;
};

struct Context {
  const RunConfig& config;
  SpaceGrid grid;
  TimeGrid tgrid;
  PotentialPath w;
  InitialCondition phi;
  ArtifactWriter& out;
  std::vector<CheckResult>& checks;

  void check(std::string name, bool pass, std::string detail) {
    checks.push_back({std::move(name), pass, std::move(detail)});
  }
};

std::optional<Scalar> constant_value(const PotentialPath& w) {
  if (const auto* c = std::get_if<ConstantSource>(&w.provenance())) return c->value;
  return std::nullopt;
}

// Index k of a plain `sin:<k>` initial condition, when that is what was requested.
std::optional<int> sine_index(const std::string& spec) {
  if (spec.rfind("sin:", 0) != 0) return std::nullopt;
  return static_cast<int>(detail::parse_integer(spec.substr(4), "initial sine index"));
}

void write_field(Context& c, const Field& f, const std::string& stem) {
  if (c.config.format == FieldFormat::csv) {
    write_field_csv(c.out.claim(stem + ".csv"), f);
  } else {
    write_field_binary(c.out.claim(stem + ".bin"), f);
  }
}

void field_sanity(Context& c, const Field& f) {
  const Matrix& v = f.values();
  c.check("finite", v.allFinite(), "all entries finite");
  const bool pinned = v.col(0).cwiseAbs().maxCoeff() == 0 && v.col(c.grid.n()).cwiseAbs().maxCoeff() == 0;
  c.check("dirichlet", pinned, "boundary columns identically zero");
}

// Closed form e^{-k^2 t} sin(kx) for constant W and sin:k data.
void heat_oracle(Context& c, const Field& f, Scalar tolerance) {
  const auto k = sine_index(c.config.initial);
  if (!constant_value(c.w) || !k) return;
  Scalar err = 0;
  const Vector s = sine_mode(*k, c.grid);
  for (int j = 0; j <= c.tgrid.m(); ++j) {
    const Scalar decay = std::exp(-static_cast<Scalar>(*k) * *k * c.tgrid.node(j));
    err = std::max(err, (f.level(j) - decay * s).cwiseAbs().maxCoeff());
  }
  c.check("heat_oracle", err <= tolerance,
          "max |u - exp(-k^2 t) sin(kx)| = " + fmt("%.3e", err) + " (limit " + fmt("%.1e", tolerance) + ")");
}

Vector effective_phi(const Context& c) { return c.phi.effective(build_transform(c.w)); }

json report_json(const ConvergenceReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"epsilon", e.epsilon},
                       {"potential_error", e.potential_error},
                       {"sup_error", e.sup_error},
                       {"l2_error", e.l2_error},
                       {"energy_error", e.energy_error},
                       {"reduced_error", e.reduced_error}});
  return {{"rates",
           {{"sup", r.fitted_rate_sup},
            {"l2", r.fitted_rate_l2},
            {"energy", r.fitted_rate_energy},
            {"reduced", r.fitted_rate_reduced}}},
          {"r_squared", {{"sup", r.r_squared}, {"energy", r.r_squared_energy}, {"reduced", r.r_squared_reduced}}},
          {"alpha_declared", r.alpha_declared},
          {"gamma", r.gamma},
          {"degenerate", r.degenerate},
          {"warnings", r.warnings},
          {"entries", entries}};
}

bool in_range(Scalar v, Scalar lo, Scalar hi) { return v >= lo && v <= hi; }

std::string range_text(Scalar v, Scalar lo, Scalar hi) {
  return fmt("%.4f", v) + " in [" + fmt("%g", lo) + ", " + fmt("%g", hi) + "]";
}

void run_solve_classical(Context& c) {
  const Field u = solve_classical_grp(c.w, c.phi, c.tgrid);
  write_field(c, u, "field");
  field_sanity(c, u);
  const auto value = constant_value(c.w);
  heat_oracle(c, u, value && *value != 0 ? c.config.thresholds.transform : c.config.thresholds.oracle);
}

void run_solve_weak(Context& c) {
  const WeakSolution sol = solve_generalized(c.w, effective_phi(c), c.tgrid, c.config.K);
  write_weak_csv(c.out.claim("weak.csv"), sol);
  const Field u = reconstruct(sol, c.grid);
  write_field(c, u, "field");
  const EnergyReport e = energy_report(sol, c.grid);
  c.out.json_file("summary.json", {{"sup_l2_sq", e.sup_l2_sq},
                                    {"int_h1_sq", e.int_h1_sq},
                                    {"energy", e.total()},
                                    {"coercive", sol.coercive}});
  field_sanity(c, u);
  c.check("energy_finite", std::isfinite(e.total()), "energy = " + fmt("%.6g", e.total()));
  heat_oracle(c, u, c.config.thresholds.oracle);
}

void run_solve_regularized(Context& c) {
  const SmoothPotential ws = mollify(std::make_shared<const PotentialPath>(c.w), *c.config.epsilon);
  const Field u = solve_regularized(ws, c.phi, c.tgrid);
  write_field(c, u, "field");
  const Field ref = solve_classical_grp(c.w, c.phi, c.tgrid);
  const Scalar dist = (u.values() - ref.values()).cwiseAbs().maxCoeff();
  const Scalar pot = (ws.values() - c.w.values()).cwiseAbs().maxCoeff();
  c.out.json_file("summary.json", {{"epsilon", ws.epsilon()},
                                    {"potential_error", pot},
                                    {"sup_distance_to_classical", dist},
                                    {"ratio", pot > 0 ? json(dist / pot) : json(nullptr)}});
  field_sanity(c, u);
  heat_oracle(c, u, c.config.thresholds.oracle);
}

void run_spectral(Context& c) {
  const SpectralDecomposition d = eigendecompose(c.w, c.config.K);
  write_spectrum_csv(c.out.claim("spectrum.csv"), d);
  if (c.config.dump_modes) write_modes_csv(c.out.claim("modes.csv"), d);
  const Vector uT = evolve_spectral(d, effective_phi(c), c.tgrid.horizon());
  {
    std::ofstream out(c.out.claim("solution.csv"));
    out << "x,value\n";
    char buf[96];
    for (int i = 0; i <= c.grid.n(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", c.grid.node(i), uT[i]);
      out << buf;
    }
  }
  bool ascending = true;
  for (int k = 1; k < d.K; ++k) ascending = ascending && d.lambdas[k] > d.lambdas[k - 1];
  c.check("ascending", ascending, "eigenvalues strictly increasing");
  if (constant_value(c.w)) {
    Scalar worst = 0;
    for (int k = 1; k <= std::min(d.K, 10); ++k) worst = std::max(worst, std::abs(d.lambdas[k - 1] / (k * k) - 1));
    c.check("lambda_k2", worst <= c.config.thresholds.lambda,
            "max_k<=10 |lambda_k/k^2 - 1| = " + fmt("%.3e", worst) + " (limit " +
                fmt("%.1e", c.config.thresholds.lambda) + ")");
    if (const auto k = sine_index(c.config.initial)) {
      const Scalar T = c.tgrid.horizon();
      const Scalar err = (uT - std::exp(-static_cast<Scalar>(*k) * *k * T) * sine_mode(*k, c.grid)).cwiseAbs().maxCoeff();
      c.check("heat_oracle", err <= c.config.thresholds.oracle,
              "max |u(T) - exp(-k^2 T) sin(kx)| = " + fmt("%.3e", err));
    }
  }
}

void run_sweep(Context& c) {
  SweepOptions opt;
  opt.gamma = c.config.gamma;
  opt.threads = c.config.threads;
  const ConvergenceReport r = convergence_sweep(c.w, c.phi, c.tgrid, c.config.eps_list, opt);
  write_sweep_csv(c.out.claim("sweep.csv"), r);
  c.out.json_file("summary.json", report_json(r));
  const Thresholds& th = c.config.thresholds;
  if (r.degenerate) {
    Scalar worst = 0;
    for (const auto& e : r.entries) worst = std::max(worst, e.sup_error);
    c.check("neutral", worst <= th.oracle, "potential unchanged by mollification; max sup error " + fmt("%.3e", worst));
    return;
  }
  c.check("rate_sup", in_range(r.fitted_rate_sup, th.rate_min, th.rate_max) && r.r_squared >= th.rate_r2,
          range_text(r.fitted_rate_sup, th.rate_min, th.rate_max) + ", r^2 " + fmt("%.4f", r.r_squared));
  c.check("rate_reduced", in_range(r.fitted_rate_reduced, th.reduced_min, th.reduced_max),
          range_text(r.fitted_rate_reduced, th.reduced_min, th.reduced_max));
  bool monotone = true;
  for (std::size_t k = 1; k < r.entries.size(); ++k)
    monotone = monotone && r.entries[k].sup_error <= r.entries[k - 1].sup_error * (1 + th.sweep_noise);
  c.check("monotone", monotone, "sup error non-increasing as epsilon shrinks");
}

void run_regularity(Context& c) {
  const Field u = solve_classical_grp(c.w, c.phi, c.tgrid);
  const bool compensated = c.phi.kind() == InitialKind::compensated;
  const Scalar floor = c.config.floor_t.value_or(compensated ? 0.0 : c.tgrid.horizon() / 4);
  if (!compensated && floor < c.tgrid.horizon() / 8)
    throw ParameterError("floor_t below T/8 is reserved for compensated initial data");
  const RegularityReport r = estimate_parabolic_holder(u, floor);
  c.out.json_file("regularity.json", {{"space_exponent", r.space_exponent},
                                       {"time_exponent", r.time_exponent},
                                       {"r_squared_space", r.fit_quality.first},
                                       {"r_squared_time", r.fit_quality.second},
                                       {"floor_t", floor},
                                       {"region", r.region}});
  const Thresholds& th = c.config.thresholds;
  c.check("space_exponent", in_range(r.space_exponent, th.space_min, th.space_max),
          range_text(r.space_exponent, th.space_min, th.space_max));
  c.check("time_exponent", in_range(r.time_exponent, th.time_min, th.time_max),
          range_text(r.time_exponent, th.time_min, th.time_max));
}

void run_maxprinciple(Context& c) {
  const MaxPrincipleResult r = max_principle_check(c.w, effective_phi(c), c.tgrid);
  c.out.json_file("maxprinciple.json", {{"sup_ratio", r.sup_ratio}, {"pass", r.pass}});
  c.check("max_principle", r.pass, "sup ratio " + fmt("%.17g", r.sup_ratio) + " (limit 1 + 1e-10)");
}

json config_json(const RunConfig& config) {
  json j = json::object();
  for (const auto& [key, value] : config_entries(config)) j[key] = value;
  return j;
}

}  // namespace

InitialCondition make_initial(const std::string& spec, const SpaceGrid& grid) {
  if (spec.rfind("compensated:", 0) == 0) {
    const InitialCondition inner = make_initial(spec.substr(12), grid);
    return InitialCondition::compensated(inner.values(), spec.substr(12));
  }
  if (spec == "polybump") {
    const Scalar scale = std::pow(kPi / 2, 4);
    return InitialCondition::analytic(
        "polybump", [scale](Scalar x) { return std::pow(x * (kPi - x), 2) / scale; }, grid);
  }
  if (spec.rfind("sin:", 0) == 0) {
    const long long k = detail::parse_integer(spec.substr(4), "initial sine index");
    if (k < 1) throw ParameterError("initial sine index must be >= 1");
    return InitialCondition::nodal(sine_mode(static_cast<int>(k), grid));
  }
  if (spec.rfind("file:", 0) == 0) return InitialCondition::nodal(load_potential(spec.substr(5), grid).values());
  throw ParameterError("unknown initial condition '" + spec + "'");
}

RunResult run(const RunConfig& config, std::ostream* log) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  json manifest = {{"tool", "grp-heat"}, {"version", kVersion}, {"config", config_json(config)}};
  std::optional<ArtifactWriter> out;
  try {
    out.emplace(config.output_dir);
    SpaceGrid grid(config.n);
    Context c{config,
              grid,
              TimeGrid(config.m, config.T),
              parse_potential_spec(config.potential, grid, config.seed),
              make_initial(config.initial, grid),
              *out,
              result.checks};
    save_potential(out->claim("potential.txt"), c.w);
    switch (config.experiment) {
      case Experiment::solve_classical: run_solve_classical(c); break;
      case Experiment::solve_weak: run_solve_weak(c); break;
      case Experiment::solve_regularized: run_solve_regularized(c); break;
      case Experiment::spectral: run_spectral(c); break;
      case Experiment::sweep: run_sweep(c); break;
      case Experiment::regularity: run_regularity(c); break;
      case Experiment::maxprinciple: run_maxprinciple(c); break;
    }
  } catch (const std::exception& e) {
    result.error = e.what();
  }

  bool all_pass = true;
  json checks = json::array();
  for (const auto& ch : result.checks) {
    all_pass = all_pass && ch.pass;
    checks.push_back({{"name", ch.name}, {"status", ch.pass ? "PASS" : "FAIL"}, {"detail", ch.detail}});
    if (log) *log << (ch.pass ? "PASS " : "FAIL ") << ch.name << ": " << ch.detail << "\n";
  }
  result.exit_code = result.error ? 2 : (all_pass ? 0 : 1);
  if (out) result.artifacts = out->names();
  manifest["checks"] = checks;
  manifest["artifacts"] = result.artifacts;
  manifest["status"] = result.error ? "error" : (all_pass ? "pass" : "fail");
  manifest["error"] = result.error ? json(*result.error) : json(nullptr);
  manifest["wall_time_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (result.error && log) *log << "ERROR " << *result.error << "\n";
  if (out) {
    std::ofstream mf(out->dir() / "manifest.json");
    mf << manifest.dump(2) << "\n";
  }
  return result;
}

}  // namespace grpheat

#include "grpheat/analysis.hpp"

#include "grpheat/regression.hpp"
#include "grpheat/weak_solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <memory>
#include <thread>

namespace grpheat {

namespace {

// Runs job(0..jobs-1) on up to `workers` threads. Each job writes only its own slot, so the
// outcome does not depend on scheduling. The first failing job (by index) is rethrown.
void parallel_for(int jobs, int workers, const std::function<void(int)>& job) {
  std::vector<std::exception_ptr> errors(jobs);
  if (workers <= 1) {
    for (int i = 0; i < jobs; ++i) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (int i = next++; i < jobs; i = next++) {
          try {
            job(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<Scalar> sorted_epsilons(std::span<const Scalar> eps_list) {
  if (eps_list.size() < 3) throw ParameterError("a convergence sweep needs at least 3 epsilons");
  std::vector<Scalar> eps(eps_list.begin(), eps_list.end());
  for (Scalar e : eps)
    if (!(e > 0) || !std::isfinite(e)) throw ParameterError("epsilons must be positive and finite");
  std::sort(eps.begin(), eps.end(), std::greater<>());
  if (std::adjacent_find(eps.begin(), eps.end()) != eps.end())
    throw ParameterError("epsilons must be distinct");
  return eps;
}

Scalar declared_or_estimated_alpha(const PotentialPath& w) {
  try {
    return effective_alpha(w);
  } catch (const ResolutionError&) {
    return 0;
  }
}

Scalar level_l2_sq(const SpaceGrid& grid, const Matrix& d, int j) {
  return trapezoid(grid, d.row(j).transpose().cwiseAbs2());
}

// Fits every rate of the report, or marks it degenerate when the potential did not move.
void fit_report(ConvergenceReport& r, const PotentialPath& w) {
  const Scalar tiny = 1e-12 * std::max<Scalar>(1, w.sup_norm());
  r.degenerate = std::all_of(r.entries.begin(), r.entries.end(),
                             [&](const ConvergenceEntry& e) { return e.potential_error <= tiny; });
  if (r.degenerate) {
    r.warnings.push_back("mollification leaves the potential unchanged; rates not meaningful");
    return;
  }
  auto fit = [&](Scalar ConvergenceEntry::*field, Scalar& rate, Scalar* r2) {
    std::vector<std::pair<Scalar, Scalar>> pairs;
    for (const auto& e : r.entries) pairs.emplace_back(e.epsilon, e.*field);
    try {
      const RateFit f = fit_rate(pairs);
      rate = f.slope;
      if (r2) *r2 = f.r_squared;
    } catch (const DataError&) {
      r.degenerate = true;
      r.warnings.push_back("zero error in a sweep entry; rate fit skipped");
    }
  };
  fit(&ConvergenceEntry::sup_error, r.fitted_rate_sup, &r.r_squared);
  fit(&ConvergenceEntry::l2_error, r.fitted_rate_l2, nullptr);
  fit(&ConvergenceEntry::energy_error, r.fitted_rate_energy, &r.r_squared_energy);
  if (r.gamma > 0) fit(&ConvergenceEntry::reduced_error, r.fitted_rate_reduced, &r.r_squared_reduced);
}

void resolution_guard(ConvergenceReport& r, const PotentialPath& w) {
  const Scalar h = w.grid().h();
  const Scalar floor = 10 * h * h * w.sup_norm();
  if (!r.entries.empty() && r.entries.back().potential_error < floor && !r.degenerate) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "resolution: sup|W - W^(eps_min)| = %.3g is below 10 h^2 sup|W| = %.3g", r.entries.back().potential_error,
                  floor);
    r.warnings.emplace_back(buf);
  }
}

// Max over lags of max |f(k + lag) - f(k)| / (lag*spacing)^exponent, along rows (axis 1) or
// columns (axis 0) of a row-major array.
Scalar holder_quotient(const Matrix& a, int axis, Scalar spacing, Scalar exponent) {
  const int len = axis == 1 ? static_cast<int>(a.cols()) : static_cast<int>(a.rows());
  Scalar best = 0;
  for (int lag : dyadic_lags(std::max(1, len / 8))) {
    Scalar osc = 0;
    if (axis == 1) {
      osc = (a.rightCols(len - lag) - a.leftCols(len - lag)).cwiseAbs().maxCoeff();
    } else {
      osc = (a.bottomRows(len - lag) - a.topRows(len - lag)).cwiseAbs().maxCoeff();
    }
    best = std::max(best, osc / std::pow(lag * spacing, exponent));
  }
  return best;
}

Matrix forward_x_difference(const Matrix& u, Scalar h) {
  const Eigen::Index n = u.cols() - 1;
  return (u.rightCols(n) - u.leftCols(n)) / h;
}

}  // namespace

RateFit fit_rate(std::span<const std::pair<Scalar, Scalar>> pairs) {
  if (pairs.size() < 2) throw ParameterError("rate fit needs at least two pairs");
  std::vector<Scalar> lx, ly;
  for (const auto& [eps, err] : pairs) {
    if (!(eps > 0) || !(err > 0) || !std::isfinite(eps) || !std::isfinite(err))
      throw DataError("rate fit needs positive finite entries");
    lx.push_back(std::log(eps));
    ly.push_back(std::log(err));
  }
  const LineFit f = least_squares_line(lx, ly);
  return {f.slope, f.r_squared};
}

int worker_count(int requested, int jobs) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GRPHEAT_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min<long>(n, cap);
  }
  return std::clamp(n, 1, std::max(1, jobs));
}

Scalar reduced_norm(const Field& d, Scalar gamma) {
  if (!(gamma > 0 && gamma < 1)) throw ParameterError("reduced norm needs gamma in (0, 1)");
  const Scalar h = d.xgrid().h();
  const Scalar dt = d.tgrid().dt();
  const Matrix& v = d.values();
  const Matrix dx = forward_x_difference(v, h);
  return v.cwiseAbs().maxCoeff() + dx.cwiseAbs().maxCoeff() + holder_quotient(dx, 1, h, gamma) +
         holder_quotient(dx, 0, dt, gamma / 2) + holder_quotient(v, 0, dt, (1 + gamma) / 2);
}

ConvergenceReport convergence_sweep(const PotentialPath& w, const InitialCondition& phi, const TimeGrid& tg,
                                    std::span<const Scalar> eps_list, const SweepOptions& options) {
  const std::vector<Scalar> eps = sorted_epsilons(eps_list);
  const auto parent = std::make_shared<const PotentialPath>(w);
  const SpaceGrid& grid = w.grid();
  const Field reference = solve_classical_grp(w, phi, tg);

  ConvergenceReport report;
  report.entries.resize(eps.size());
  report.alpha_declared = declared_or_estimated_alpha(w);
  report.gamma = options.gamma;

  const int jobs = static_cast<int>(eps.size());
  parallel_for(jobs, worker_count(options.threads, jobs), [&](int k) {
    const SmoothPotential ws = mollify(parent, eps[k]);
    Field diff = solve_regularized(ws, phi, tg);
    diff.values() -= reference.values();
    const Matrix& d = diff.values();

    ConvergenceEntry& e = report.entries[k];
    e.epsilon = eps[k];
    e.potential_error = (ws.values() - w.values()).cwiseAbs().maxCoeff();
    e.sup_error = d.cwiseAbs().maxCoeff();
    Scalar sup_l2_sq = 0, int_h1_sq = 0;
    for (int j = 0; j <= tg.m(); ++j) {
      sup_l2_sq = std::max(sup_l2_sq, level_l2_sq(grid, d, j));
      const Scalar weight = (j == 0 || j == tg.m()) ? 0.5 : 1.0;
      int_h1_sq += weight * tg.dt() * h1_norm_sq(d.row(j).transpose(), grid);
    }
    e.l2_error = std::sqrt(sup_l2_sq);
    e.energy_error = sup_l2_sq + int_h1_sq;
    if (options.gamma > 0) e.reduced_error = reduced_norm(diff, options.gamma);
  });

  fit_report(report, w);
  resolution_guard(report, w);
  return report;
}

ConvergenceReport weak_energy_sweep(const PotentialPath& w, const Vector& phi, const TimeGrid& tg, int K,
                                    std::span<const Scalar> eps_list, const SweepOptions& options) {
  const std::vector<Scalar> eps = sorted_epsilons(eps_list);
  const auto parent = std::make_shared<const PotentialPath>(w);
  const SpaceGrid& grid = w.grid();
  const WeakSolution reference = solve_generalized(w, phi, tg, K);

  ConvergenceReport report;
  report.entries.resize(eps.size());
  report.alpha_declared = declared_or_estimated_alpha(w);
  report.gamma = options.gamma;

  const int jobs = static_cast<int>(eps.size());
  parallel_for(jobs, worker_count(options.threads, jobs), [&](int k) {
    const SmoothPotential ws = mollify(parent, eps[k]);
    WeakSolution diff = solve_generalized(ws, phi, tg, K);
    diff.modal -= reference.modal;
    const Field nodal = reconstruct(diff, grid);

    ConvergenceEntry& e = report.entries[k];
    e.epsilon = eps[k];
    e.potential_error = (ws.values() - w.values()).cwiseAbs().maxCoeff();
    e.sup_error = nodal.values().cwiseAbs().maxCoeff();
    e.l2_error = diff.modal.rowwise().norm().maxCoeff();
    e.energy_error = energy_report(diff, grid).total();
    if (options.gamma > 0) e.reduced_error = reduced_norm(nodal, options.gamma);
  });

  fit_report(report, w);
  resolution_guard(report, w);
  return report;
}

RegularityReport estimate_parabolic_holder(const Field& u, Scalar floor_t) {
  const TimeGrid& tg = u.tgrid();
  const SpaceGrid& xg = u.xgrid();
  if (!(floor_t >= 0 && floor_t < tg.horizon() / 2))
    throw ParameterError("regularity window floor must lie in [0, T/2)");
  if (!u.values().allFinite()) throw DataError("field is not finite");
  int j0 = 0;
  while (j0 <= tg.m() && tg.node(j0) < floor_t * (1 - 1e-12)) ++j0;
  const int rows = tg.m() + 1 - j0;
  if (rows < 64 || xg.size() < 64)
    throw ResolutionError("regularity estimate needs 64 nodes in t and x, got " + std::to_string(rows) + " and " +
                          std::to_string(xg.size()));

  const Matrix window = u.values().bottomRows(rows);
  RegularityReport out;

  // Space: exponent of u_x over the whole window.
  const Matrix ux = forward_x_difference(window, xg.h());
  const auto xlags = dyadic_lags(static_cast<int>(ux.cols()) / 8);
  std::vector<Scalar> xosc;
  for (int lag : xlags) {
    const int len = static_cast<int>(ux.cols()) - lag;
    xosc.push_back((ux.rightCols(len) - ux.leftCols(len)).cwiseAbs().maxCoeff());
  }
  const OscillationFit sx = fit_oscillations(xlags, xosc, xg.h());
  out.space_exponent = std::clamp(1 + (sx.degenerate ? 1.0 : std::clamp(sx.slope, 0.0, 1.0)), 0.0, 2.0);
  out.fit_quality.first = sx.degenerate ? 1.0 : sx.r_squared;

  // Time: per-node exponent along t for the middle half of x, lags up to T/8.
  const auto tlags = dyadic_lags(std::max(1, tg.m() / 8));
  const int i_lo = xg.n() / 4, i_hi = (3 * xg.n()) / 4;
  Scalar sum_exp = 0, sum_r2 = 0;
  Vector column(rows);
  std::vector<Scalar> tosc(tlags.size());
  for (int i = i_lo; i <= i_hi; ++i) {
    column = window.col(i);
    const std::span<const Scalar> f(column.data(), column.size());
    for (std::size_t l = 0; l < tlags.size(); ++l) tosc[l] = max_oscillation(f, tlags[l]);
    const OscillationFit st = fit_oscillations(tlags, tosc, tg.dt());
    sum_exp += st.degenerate ? 1.0 : std::clamp(st.slope, 0.0, 1.0);
    sum_r2 += st.degenerate ? 1.0 : st.r_squared;
  }
  const int count = i_hi - i_lo + 1;
  out.time_exponent = sum_exp / count;
  out.fit_quality.second = sum_r2 / count;

  char buf[200];
  std::snprintf(buf, sizeof buf, "t in [%.6g, %.6g]; time fit over x in [%.6g, %.6g], lags up to %d steps",
                tg.node(j0), tg.horizon(), xg.node(i_lo), xg.node(i_hi), tlags.back());
  out.region = buf;
  return out;
}

MaxPrincipleResult max_principle_check(const PotentialPath& w, const Vector& h0, const TimeGrid& tg) {
  if (h0.size() != w.grid().size()) throw ParameterError("initial data does not match the grid");
  if (!h0.allFinite()) throw DataError("initial data is not finite");
  const Scalar sup0 = h0.cwiseAbs().maxCoeff();
  if (!(sup0 > 0)) throw DataError("initial data is identically zero");
  const Field v = solve_drift_diffusion(w, h0, tg);
  MaxPrincipleResult r;
  r.sup_ratio = v.values().cwiseAbs().rowwise().maxCoeff().maxCoeff() / sup0;
  r.pass = r.sup_ratio <= 1 + 1e-10;
  return r;
}

void write_sweep_csv(std::ostream& out, const ConvergenceReport& report) {
  out << "epsilon,sup_error,l2_error,energy_error\n";
  char buf[128];
  for (const auto& e : report.entries) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", e.epsilon, e.sup_error, e.l2_error, e.energy_error);
    out << buf;
  }
}

void write_sweep_csv(const std::filesystem::path& path, const ConvergenceReport& report) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  write_sweep_csv(out, report);
}

}  // namespace grpheat

#pragma once

#include "grpheat/classical_solver.hpp"
#include "grpheat/field.hpp"
#include "grpheat/potential.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace grpheat {

struct RateFit {
  Scalar slope = 0;
  Scalar r_squared = 0;
};

/// Least-squares slope of log(error) against log(epsilon). Needs at least two pairs, all
/// entries positive.
RateFit fit_rate(std::span<const std::pair<Scalar, Scalar>> pairs);

struct ConvergenceEntry {
  Scalar epsilon = 0;
  Scalar potential_error = 0;  ///< sup |W - W^(eps)| at the nodes
  Scalar sup_error = 0;
  Scalar l2_error = 0;         ///< sup over t of the discrete L2 distance
  Scalar energy_error = 0;     ///< sup_t ||D||_0^2 + int ||D||_1^2
  Scalar reduced_error = 0;    ///< discrete C^{(1+gamma)/2, 1+gamma} surrogate, if requested
};

struct ConvergenceReport {
  std::vector<ConvergenceEntry> entries;  ///< descending epsilon
  Scalar fitted_rate_sup = 0;
  Scalar fitted_rate_l2 = 0;
  Scalar fitted_rate_energy = 0;
  Scalar fitted_rate_reduced = 0;
  Scalar r_squared = 0;  ///< of the sup-norm fit
  Scalar r_squared_energy = 0;
  Scalar r_squared_reduced = 0;
  Scalar alpha_declared = 0;
  Scalar gamma = 0;
  /// Mollification left the potential unchanged, so no rate is meaningful.
  bool degenerate = false;
  std::vector<std::string> warnings;
};

struct SweepOptions {
  /// Exponent of the reduced norm; zero or negative skips it.
  Scalar gamma = 0;
  /// Worker cap; 0 means hardware concurrency, further capped by GRPHEAT_THREADS.
  int threads = 0;
};

/// Distance of regularized solutions u^(eps) to the transform-route solution u.
ConvergenceReport convergence_sweep(const PotentialPath& w, const InitialCondition& phi, const TimeGrid& tg,
                                    std::span<const Scalar> eps_list, const SweepOptions& options = {});

/// Weak-route variant: Galerkin solutions for W^(eps) against the one for W, energy
/// measured modally.
ConvergenceReport weak_energy_sweep(const PotentialPath& w, const Vector& phi, const TimeGrid& tg, int K,
                                    std::span<const Scalar> eps_list, const SweepOptions& options = {});

/// sup|D| + sup|D_x| + Holder-quotient seminorms of D_x in x (exponent gamma) and in t
/// (gamma/2), and of D in t ((1+gamma)/2), each maximised over the dyadic lags.
Scalar reduced_norm(const Field& d, Scalar gamma);

struct RegularityReport {
  Scalar space_exponent = 0;
  Scalar time_exponent = 0;
  std::pair<Scalar, Scalar> fit_quality{0, 0};  ///< r^2 of the space and time fits
  std::string region;
};

/// Parabolic Holder exponents: space as 1 + the exponent of u_x, time as the mean over the
/// middle half of x-nodes of the exponent of u along t, lags up to T/8. Rows with
/// t < floor_t are ignored.
RegularityReport estimate_parabolic_holder(const Field& u, Scalar floor_t);

struct MaxPrincipleResult {
  Scalar sup_ratio = 0;
  bool pass = false;
};

/// Evolves v_t = v_xx - 2 W v_x and compares every level's sup-norm with that of h0.
MaxPrincipleResult max_principle_check(const PotentialPath& w, const Vector& h0, const TimeGrid& tg);

/// Worker count honouring GRPHEAT_THREADS.
int worker_count(int requested, int jobs);

/// CSV `epsilon,sup_error,l2_error,energy_error`.
void write_sweep_csv(std::ostream& out, const ConvergenceReport& report);
void write_sweep_csv(const std::filesystem::path& path, const ConvergenceReport& report);

}  // namespace grpheat

#pragma once

#include "grpheat/potential.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace grpheat {

struct CriterionOutcome {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct AcceptanceOptions {
  /// Data artifacts (one CSV per criterion) land here; empty means none are written.
  std::filesystem::path out_dir;
  /// Criterion ids to run; empty runs all of 1..11.
  std::vector<int> only;
  int threads = 0;
};

/// Constants, Weierstrass alpha in {0.3, 0.5, 0.7} with 16 terms, fBm H in {0.3, 0.5, 0.7}
/// for seeds 1..5, all on `grid`.
std::vector<PotentialPath> standard_corpus(const SpaceGrid& grid);

/// Energy-estimate buckets by sup|W| at T = 1, with the calibrated constants.
struct EnergyBucket {
  Scalar sup_lo;
  Scalar sup_hi;
  Scalar constant;
};
const std::vector<EnergyBucket>& energy_buckets();

/// Formats `[PASS] 3 convergence rate: ...` with the runtime.
std::string format_outcome(const CriterionOutcome& o);

/// Runs the built-in acceptance corpus. Each finished criterion is printed to `progress`.
std::vector<CriterionOutcome> run_acceptance(const AcceptanceOptions& options, std::ostream* progress = nullptr);

}  // namespace grpheat

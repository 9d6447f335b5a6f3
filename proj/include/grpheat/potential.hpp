#pragma once

#include "grpheat/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>

namespace grpheat {

struct FbmSource {
  Scalar hurst;
  std::uint64_t seed;
};
struct WeierstrassSource {
  Scalar alpha;
  int terms;
};
struct ConstantSource {
  Scalar value;
};
struct AnalyticSource {
  std::string tag;
};
struct FileSource {
  std::string path;
};

using Provenance = std::variant<FbmSource, WeierstrassSource, ConstantSource, AnalyticSource, FileSource>;

/// Human-readable description, e.g. "fbm:H=0.5,seed=7".
std::string describe(const Provenance& provenance);

/// Nodal samples of a rough potential W on [0, pi].
///
/// Values must be finite. Paths drawn from fBm or the Weierstrass family are anchored,
/// W(0) = 0. An optional nominal Holder exponent is carried for rate predictions.
class PotentialPath {
 public:
  PotentialPath(SpaceGrid grid, Vector values, Provenance provenance,
                std::optional<Scalar> declared_alpha = std::nullopt);

  const SpaceGrid& grid() const { return grid_; }
  const Vector& values() const { return values_; }
  const Provenance& provenance() const { return provenance_; }
  std::optional<Scalar> declared_alpha() const { return declared_alpha_; }
  Scalar sup_norm() const { return values_.cwiseAbs().maxCoeff(); }

 private:
  SpaceGrid grid_;
  Vector values_;
  Provenance provenance_;
  std::optional<Scalar> declared_alpha_;
};

/// Mollified potential W^(eps) with its analytic derivative at the nodes.
class SmoothPotential {
 public:
  SmoothPotential(Vector values, Vector derivative, Scalar epsilon,
                  std::shared_ptr<const PotentialPath> parent);

  const SpaceGrid& grid() const { return parent_->grid(); }
  const Vector& values() const { return values_; }
  const Vector& derivative() const { return derivative_; }
  Scalar epsilon() const { return epsilon_; }
  const PotentialPath& parent() const { return *parent_; }

 private:
  Vector values_;
  Vector derivative_;
  Scalar epsilon_;
  std::shared_ptr<const PotentialPath> parent_;
};

/// Fractional Brownian motion at the grid nodes, W(0) = 0, exact Gaussian law via a
/// cached Cholesky factor of the covariance. Deterministic in (hurst, n, seed).
PotentialPath sample_fbm(Scalar hurst, const SpaceGrid& grid, std::uint64_t seed);

/// W(x) = sum_{j<terms} 2^{-alpha j} (cos(2^j x) - 1).
PotentialPath weierstrass(Scalar alpha, int terms, const SpaceGrid& grid);

PotentialPath constant_potential(Scalar value, const SpaceGrid& grid);

PotentialPath analytic_potential(const std::string& tag, const std::function<Scalar(Scalar)>& f,
                                 const SpaceGrid& grid,
                                 std::optional<Scalar> declared_alpha = std::nullopt);

/// The bump kernel c*exp(-1/(1-s^2)) on (-1, 1) with unit mass, and its derivative.
Scalar bump_kernel(Scalar s);
Scalar bump_kernel_derivative(Scalar s);

/// Convolution with the eps-rescaled bump kernel after even reflection of W across both
/// endpoints. The derivative comes from the kernel derivative, never from differencing.
SmoothPotential mollify(const PotentialPath& w, Scalar epsilon);
SmoothPotential mollify(std::shared_ptr<const PotentialPath> w, Scalar epsilon);

struct HolderEstimate {
  Scalar exponent = 1;
  Scalar r_squared = 0;
  bool degenerate = false;
};

/// Empirical Holder exponent: slope of log max-oscillation against log lag over dyadic
/// lags 1..n/8, clipped to [0, 1]. A constant path returns 1 flagged degenerate.
HolderEstimate estimate_holder(const PotentialPath& w);

/// Exponent used for rate predictions: declared when present, else estimated.
Scalar effective_alpha(const PotentialPath& w);

/// Potential files: one real per line, exactly n+1 values, '#' lines ignored.
PotentialPath load_potential(const std::filesystem::path& path, const SpaceGrid& grid);
void save_potential(const std::filesystem::path& path, const PotentialPath& w);

/// Counts the data lines of a potential file without binding to a grid.
int count_potential_values(const std::filesystem::path& path);

/// Parses `fbm:H=<h>,seed=<s>`, `weierstrass:alpha=<a>,terms=<k>`, `const:<c>` or
/// `file:<path>`. `default_seed` is used when an fbm spec omits its seed.
PotentialPath parse_potential_spec(const std::string& spec, const SpaceGrid& grid,
                                   std::uint64_t default_seed = 0);

}  // namespace grpheat

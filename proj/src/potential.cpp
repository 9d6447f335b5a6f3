#include "grpheat/potential.hpp"

#include "grpheat/regression.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <sstream>

namespace grpheat {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

bool is_anchored_family(const Provenance& p) {
  return std::holds_alternative<FbmSource>(p) || std::holds_alternative<WeierstrassSource>(p);
}

Scalar unnormalized_bump(Scalar s) { return std::abs(s) < 1 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

Scalar bump_normalizer() {
  // Every derivative vanishes at +-1, so the trapezoid rule converges faster than any power.
  static const Scalar c = [] {
    constexpr int kPoints = 200000;
    const Scalar ds = 2.0 / kPoints;
    Scalar mass = 0;
    for (int i = 1; i < kPoints; ++i) mass += unnormalized_bump(-1.0 + i * ds);
    return 1.0 / (mass * ds);
  }();
  return c;
}

// --- fBm covariance factor cache -------------------------------------------------

using CholeskyFactor = Eigen::MatrixXd;

class FbmFactorCache {
 public:
  std::shared_ptr<const CholeskyFactor> get(Scalar hurst, const SpaceGrid& grid) {
    const Key key{hurst, grid.n()};
    {
      std::shared_lock lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    auto factor = std::make_shared<const CholeskyFactor>(build(hurst, grid));
    std::unique_lock lock(mutex_);
    return cache_.try_emplace(key, std::move(factor)).first->second;
  }

 private:
  using Key = std::pair<Scalar, int>;

  static CholeskyFactor build(Scalar hurst, const SpaceGrid& grid) {
    const int n = grid.n();
    const Scalar two_h = 2 * hurst;
    Eigen::MatrixXd cov(n, n);
    for (int a = 0; a < n; ++a) {
      const Scalar s = grid.node(a + 1);
      for (int b = 0; b <= a; ++b) {
        const Scalar t = grid.node(b + 1);
        const Scalar c =
            0.5 * (std::pow(s, two_h) + std::pow(t, two_h) - std::pow(std::abs(s - t), two_h));
        cov(a, b) = c;
        cov(b, a) = c;
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      throw NumericalError("fBm covariance is not numerically positive definite (H=" +
                           std::to_string(hurst) + ", n=" + std::to_string(n) + ")");
    return llt.matrixL();
  }

  std::shared_mutex mutex_;
  std::map<Key, std::shared_ptr<const CholeskyFactor>> cache_;
};

FbmFactorCache& fbm_cache() {
  static FbmFactorCache cache;
  return cache;
}

// Shortest text that reads back to the same double.
std::string format_real(Scalar v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string describe(const Provenance& provenance) {
  return std::visit(
      Overloaded{
          [](const FbmSource& s) { return "fbm:H=" + format_real(s.hurst) + ",seed=" + std::to_string(s.seed); },
          [](const WeierstrassSource& s) {
            return "weierstrass:alpha=" + format_real(s.alpha) + ",terms=" + std::to_string(s.terms);
          },
          [](const ConstantSource& s) { return "const:" + format_real(s.value); },
          [](const AnalyticSource& s) { return "analytic:" + s.tag; },
          [](const FileSource& s) { return "file:" + s.path; },
      },
      provenance);
}

PotentialPath::PotentialPath(SpaceGrid grid, Vector values, Provenance provenance,
                             std::optional<Scalar> declared_alpha)
    : grid_(grid), values_(std::move(values)), provenance_(std::move(provenance)), declared_alpha_(declared_alpha) {
  if (values_.size() != grid_.size())
    throw FormatError("potential has " + std::to_string(values_.size()) + " values, grid expects " +
                      std::to_string(grid_.size()));
  if (!values_.allFinite()) throw DataError("potential contains non-finite values");
  if (declared_alpha_ && !(*declared_alpha_ > 0 && *declared_alpha_ < 1))
    throw ParameterError("declared Holder exponent must lie in (0, 1)");
  if (is_anchored_family(provenance_) && values_[0] != 0)
    throw DataError("fbm and weierstrass paths must satisfy W(0) = 0");
}

SmoothPotential::SmoothPotential(Vector values, Vector derivative, Scalar epsilon,
                                 std::shared_ptr<const PotentialPath> parent)
    : values_(std::move(values)), derivative_(std::move(derivative)), epsilon_(epsilon), parent_(std::move(parent)) {
  if (!parent_) throw ParameterError("smooth potential needs a parent path");
  if (values_.size() != parent_->grid().size() || derivative_.size() != values_.size())
    throw ParameterError("smooth potential arrays do not match the grid");
  if (!values_.allFinite() || !derivative_.allFinite())
    throw DataError("mollified potential is not finite");
}

PotentialPath sample_fbm(Scalar hurst, const SpaceGrid& grid, std::uint64_t seed) {
  if (!(hurst > 0 && hurst < 1)) throw ParameterError("Hurst parameter must lie in (0, 1)");
  const auto factor = fbm_cache().get(hurst, grid);
  std::mt19937_64 rng(seed);
  std::normal_distribution<Scalar> normal(0.0, 1.0);
  Eigen::VectorXd z(grid.n());
  for (int i = 0; i < grid.n(); ++i) z[i] = normal(rng);
  Vector values = Vector::Zero(grid.size());
  values.tail(grid.n()) = factor->triangularView<Eigen::Lower>() * z;
  return PotentialPath(grid, std::move(values), FbmSource{hurst, seed}, hurst);
}

PotentialPath weierstrass(Scalar alpha, int terms, const SpaceGrid& grid) {
  if (!(alpha > 0 && alpha < 1)) throw ParameterError("Weierstrass exponent must lie in (0, 1)");
  if (terms < 1) throw ParameterError("Weierstrass series needs at least one term");
  Vector values = grid.sample([&](Scalar x) {
    Scalar s = 0;
    for (int j = 0; j < terms; ++j) {
      const Scalar freq = std::ldexp(1.0, j);
      s += std::pow(freq, -alpha) * (std::cos(freq * x) - 1.0);
    }
    return s;
  });
  values[0] = 0;
  return PotentialPath(grid, std::move(values), WeierstrassSource{alpha, terms}, alpha);
}

PotentialPath constant_potential(Scalar value, const SpaceGrid& grid) {
  return PotentialPath(grid, Vector::Constant(grid.size(), value), ConstantSource{value});
}

PotentialPath analytic_potential(const std::string& tag, const std::function<Scalar(Scalar)>& f,
                                 const SpaceGrid& grid, std::optional<Scalar> declared_alpha) {
  return PotentialPath(grid, grid.sample(f), AnalyticSource{tag}, declared_alpha);
}

Scalar bump_kernel(Scalar s) { return bump_normalizer() * unnormalized_bump(s); }

Scalar bump_kernel_derivative(Scalar s) {
  if (std::abs(s) >= 1) return 0;
  const Scalar q = 1.0 - s * s;
  return bump_kernel(s) * (-2.0 * s / (q * q));
}

SmoothPotential mollify(const PotentialPath& w, Scalar epsilon) {
  return mollify(std::make_shared<const PotentialPath>(w), epsilon);
}

SmoothPotential mollify(std::shared_ptr<const PotentialPath> w, Scalar epsilon) {
  if (!w) throw ParameterError("mollify needs a potential");
  if (!(epsilon > 0) || !std::isfinite(epsilon)) throw ParameterError("mollifier scale must be positive");
  if (epsilon > kPi)
    throw ParameterError("mollifier scale " + std::to_string(epsilon) +
                         " exceeds the reflected domain (needs eps <= pi)");
  const SpaceGrid& grid = w->grid();
  const int n = grid.n();
  const Scalar h = grid.h();
  // Quadrature on the grid refined r-fold, with at least 64 subintervals across the support.
  const int r = std::max(4, static_cast<int>(std::ceil(32.0 * h / epsilon)));
  const Scalar delta = h / r;
  const long long half_width = static_cast<long long>(std::ceil(epsilon / delta)) - 1;
  const long long nr = static_cast<long long>(n) * r;

  std::vector<Scalar> kernel(2 * half_width + 1), dkernel(2 * half_width + 1);
  Scalar mass = 0;
  for (long long j = -half_width; j <= half_width; ++j) {
    const Scalar s = j * delta / epsilon;
    kernel[j + half_width] = bump_kernel(s) * delta / epsilon;
    dkernel[j + half_width] = bump_kernel_derivative(s) * delta / (epsilon * epsilon);
    mass += kernel[j + half_width];
  }
  // Normalizing by the discrete mass makes constants exact and the map a convex combination.
  for (auto& k : kernel) k /= mass;
  for (auto& k : dkernel) k /= mass;

  const Vector& W = w->values();
  auto extended = [&](long long q) {
    // q indexes the refined grid; reflect evenly across 0 and pi, then interpolate linearly.
    if (q < 0) q = -q;
    if (q > nr) q = 2 * nr - q;
    const long long i0 = q / r;
    const long long rem = q % r;
    if (rem == 0) return W[i0];
    const Scalar f = static_cast<Scalar>(rem) / r;
    return (1 - f) * W[i0] + f * W[i0 + 1];
  };

  Vector values(grid.size()), derivative(grid.size());
  for (int i = 0; i <= n; ++i) {
    Scalar v = 0, d = 0;
    const long long base = static_cast<long long>(i) * r;
    for (long long j = -half_width; j <= half_width; ++j) {
      // The kernel argument is (x_i - y)/eps with y = x_i - j*delta.
      const Scalar wy = extended(base - j);
      v += kernel[j + half_width] * wy;
      d += dkernel[j + half_width] * wy;
    }
    values[i] = v;
    derivative[i] = d;
  }
  return SmoothPotential(std::move(values), std::move(derivative), epsilon, std::move(w));
}

HolderEstimate estimate_holder(const PotentialPath& w) {
  const int n = w.grid().n();
  if (n < 64) throw ResolutionError("Holder estimate needs n >= 64, got " + std::to_string(n));
  const auto lags = dyadic_lags(n / 8);
  std::vector<Scalar> osc;
  const std::span<const Scalar> f(w.values().data(), w.values().size());
  for (int l : lags) osc.push_back(max_oscillation(f, l));
  const OscillationFit fit = fit_oscillations(lags, osc, w.grid().h());
  HolderEstimate est;
  est.degenerate = fit.degenerate;
  est.exponent = fit.degenerate ? 1.0 : std::clamp(fit.slope, 0.0, 1.0);
  est.r_squared = fit.r_squared;
  return est;
}

Scalar effective_alpha(const PotentialPath& w) {
  if (w.declared_alpha()) return *w.declared_alpha();
  return estimate_holder(w).exponent;
}

namespace {

std::vector<Scalar> read_potential_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open potential file " + path.string());
  std::vector<Scalar> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    double v = 0;
    if (!detail::try_parse_real(t, v))
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": not a real number: '" + t + "'");
    if (!std::isfinite(v))
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": non-finite potential value");
    values.push_back(v);
  }
  return values;
}

}  // namespace

int count_potential_values(const std::filesystem::path& path) {
  return static_cast<int>(read_potential_values(path).size());
}

PotentialPath load_potential(const std::filesystem::path& path, const SpaceGrid& grid) {
  const auto values = read_potential_values(path);
  if (static_cast<int>(values.size()) != grid.size())
    throw FormatError("potential file " + path.string() + " has " + std::to_string(values.size()) +
                      " values, expected n+1 = " + std::to_string(grid.size()));
  Vector v = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  return PotentialPath(grid, std::move(v), FileSource{path.string()});
}

void save_potential(const std::filesystem::path& path, const PotentialPath& w) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write potential file " + path.string());
  out << "# grp-heat potential n=" << w.grid().n() << " source=" << describe(w.provenance()) << "\n";
  char buf[64];
  for (Eigen::Index i = 0; i < w.values().size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g\n", w.values()[i]);
    out << buf;
  }
  if (!out) throw FormatError("failed writing potential file " + path.string());
}

PotentialPath parse_potential_spec(const std::string& spec, const SpaceGrid& grid, std::uint64_t default_seed) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw FormatError("potential spec '" + spec + "' lacks a kind prefix");
  const std::string kind = detail::trim(spec.substr(0, colon));
  const std::string rest = spec.substr(colon + 1);
  if (kind == "const") return constant_potential(detail::parse_real(detail::trim(rest), "const potential"), grid);
  if (kind == "file") return load_potential(detail::trim(rest), grid);

  std::map<std::string, std::string> kv;
  for (const auto& part : detail::split(rest, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw FormatError("potential parameter '" + part + "' is not key=value");
    kv[detail::trim(part.substr(0, eq))] = detail::trim(part.substr(eq + 1));
  }
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto reject_leftovers = [&] {
    if (!kv.empty()) throw FormatError("unknown potential parameter '" + kv.begin()->first + "' in '" + spec + "'");
  };
  if (kind == "fbm") {
    const auto hurst = take("H");
    if (!hurst) throw FormatError("fbm potential needs H=<hurst>");
    const auto seed = take("seed");
    reject_leftovers();
    return sample_fbm(detail::parse_real(*hurst, "fbm H"), grid,
                      seed ? detail::parse_unsigned(*seed, "fbm seed") : default_seed);
  }
  if (kind == "weierstrass") {
    const auto alpha = take("alpha");
    const auto terms = take("terms");
    if (!alpha) throw FormatError("weierstrass potential needs alpha=<a>");
    reject_leftovers();
    const int k = terms ? static_cast<int>(detail::parse_integer(*terms, "weierstrass terms")) : 16;
    return weierstrass(detail::parse_real(*alpha, "weierstrass alpha"), k, grid);
  }
  throw FormatError("unknown potential kind '" + kind + "'");
}

}  // namespace grpheat

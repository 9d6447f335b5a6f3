#include "grpheat/spectral.hpp"

#include "grpheat/transform.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>

namespace grpheat {

namespace {

constexpr int kMaxInverseIterations = 12;

Scalar infinity_norm(const Tridiagonal<Scalar>& a) {
  Scalar best = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    Scalar row = std::abs(a.diag[i]);
    if (i > 0) row += std::abs(a.lower[i]);
    if (i + 1 < a.size()) row += std::abs(a.upper[i]);
    best = std::max(best, row);
  }
  return best;
}

/// Smallest x with sturm_count(a, x) >= index+1, i.e. the index-th eigenvalue (0-based).
Scalar bisect_eigenvalue(const Tridiagonal<Scalar>& a, int index, Scalar lo, Scalar hi) {
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  for (int it = 0; it < 200; ++it) {
    const Scalar mid = 0.5 * (lo + hi);
    if (hi - lo <= 2 * eps * std::max({std::abs(lo), std::abs(hi), Scalar(1)})) break;
    if (sturm_count(a, mid) > index)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Tridiagonal<Scalar> symmetrized_operator(const SpaceGrid& grid, const Vector& /*w*/, const Vector& integral) {
  // Weight e^{-2I} with geometric-mean half-node weights e^{-(I_i + I_{i+1})}. Scaled by
  // M^{-1/2} = e^{I}, the couplings become exactly -1/h^2 and the diagonal
  // (e^{dl} + e^{-dr})/h^2 - Q_i, dl, dr the cell increments of I. The W^2 term is sampled
  // through the same increments, Q_i = (g(dl) + g(-dr))/h^2 with g(d) = e^d - 1 - d, which
  // approximates W(x_i)^2 and leaves the discrete Schrodinger form
  //   -Laplacian_h - (I_{i+1} - 2 I_i + I_{i-1})/h^2,
  // so constant W drops out up to rounding.
  const int n = grid.n();
  const Scalar inv_h2 = 1.0 / (grid.h() * grid.h());
  Tridiagonal<Scalar> b(n - 1);
  for (int k = 0; k < n - 1; ++k) {
    const int i = k + 1;
    const Scalar second_difference = (integral[i + 1] - integral[i]) - (integral[i] - integral[i - 1]);
    b.diag[k] = (2.0 - second_difference) * inv_h2;
    b.upper[k] = -inv_h2;
    b.lower[k] = -inv_h2;
  }
  return b;
}

int sturm_count(const Tridiagonal<Scalar>& a, Scalar x) {
  const Scalar tiny = std::numeric_limits<Scalar>::min() / std::numeric_limits<Scalar>::epsilon();
  int count = 0;
  Scalar q = 1;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const Scalar coupling = i > 0 ? a.lower[i] * a.upper[i - 1] : 0.0;
    q = a.diag[i] - x - (i > 0 ? coupling / q : 0.0);
    if (q == 0) q = -tiny;
    if (q < 0) ++count;
  }
  return count;
}

SpectralDecomposition eigendecompose(const PotentialPath& w, int K) {
  const SpaceGrid& grid = w.grid();
  const int n = grid.n();
  if (K < 1 || K > n / 4)
    throw ParameterError("eigendecompose needs 1 <= K <= n/4 = " + std::to_string(n / 4) + ", got K=" +
                         std::to_string(K));
  if (!std::isfinite(w.sup_norm())) throw DataError("potential is not bounded");

  const Vector integral = integrate_potential(w);
  if (!(2.0 * integral.cwiseAbs().maxCoeff() < std::log(std::numeric_limits<Scalar>::max())))
    throw RangeError("weight e^{-2 int W} is not representable");

  const Tridiagonal<Scalar> b = symmetrized_operator(grid, w.values(), integral);
  const Scalar norm = infinity_norm(b);
  Scalar lo = std::numeric_limits<Scalar>::max(), hi = std::numeric_limits<Scalar>::lowest();
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    Scalar r = 0;
    if (i > 0) r += std::abs(b.lower[i]);
    if (i + 1 < b.size()) r += std::abs(b.upper[i]);
    lo = std::min(lo, b.diag[i] - r);
    hi = std::max(hi, b.diag[i] + r);
  }

  SpectralDecomposition d{grid, K, Vector(K), Matrix::Zero(K, grid.size()), (-2.0 * integral.array()).exp(),
                          integral};

  const Scalar h = grid.h();
  const Scalar tol = 1e3 * std::numeric_limits<Scalar>::epsilon() * norm;
  std::vector<Vector> found;
  for (int k = 0; k < K; ++k) {
    const Scalar lambda = bisect_eigenvalue(b, k, lo, hi);
    d.lambdas[k] = lambda;

    const ThomasFactorization<Scalar> shifted(b.shifted(-lambda, 1.0), /*perturb_pivots=*/true);
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL + k);
    std::uniform_real_distribution<Scalar> uni(0.5, 1.5);
    Vector y(b.size());
    for (auto& v : y) v = uni(rng);
    y.normalize();
    bool converged = false;
    int it = 0;
    while (it < kMaxInverseIterations && !converged) {
      ++it;
      shifted.solve_in_place(y);
      for (const auto& prev : found) y -= prev.dot(y) * prev;
      y.normalize();
      const Scalar residual = (b.apply(y) - lambda * y).norm();
      converged = residual <= tol;
    }
    if (!converged)
      throw NumericalError("inverse iteration for eigenpair " + std::to_string(k + 1) + " did not converge after " +
                           std::to_string(it) + " iterations");
    if (y[0] < 0) y = -y;
    found.push_back(y);
    // Eigenvectors of the symmetric form are the L eigenfunctions at the interior nodes.
    d.modes.row(k).segment(1, n - 1) = y.transpose() / std::sqrt(h);
  }
  return d;
}

Vector evolve_spectral(const SpectralDecomposition& d, const Vector& phi, Scalar t) {
  if (!(t >= 0)) throw ParameterError("evolve_spectral needs t >= 0");
  if (phi.size() != d.grid.size()) throw ParameterError("initial condition does not match the grid");
  const Vector weights = trapezoid_weights(d.grid);
  const Vector coeffs = d.modes * phi.cwiseProduct(weights);
  const Vector decayed = coeffs.cwiseProduct((-t * d.lambdas.array()).exp().matrix());
  return d.modes.transpose() * decayed;
}

KernelValue fundamental_kernel(const SpectralDecomposition& d, Scalar t, int x_idx, int y_idx) {
  if (!(t > 0)) throw ParameterError("fundamental kernel needs t > 0");
  if (x_idx < 0 || y_idx < 0 || x_idx > d.grid.n() || y_idx > d.grid.n())
    throw ParameterError("kernel node index out of range");
  KernelValue kv;
  for (int k = 0; k < d.K; ++k) kv.value += std::exp(-d.lambdas[k] * t) * (d.modes(k, x_idx) * d.modes(k, y_idx));
  kv.tail_proxy = d.K * std::exp(-d.lambdas[d.K - 1] * t);
  return kv;
}

Scalar transformed_kernel(const SpectralDecomposition& d, Scalar t, int x_idx, int y_idx) {
  if (!(t > 0)) throw ParameterError("fundamental kernel needs t > 0");
  if (x_idx < 0 || y_idx < 0 || x_idx > d.grid.n() || y_idx > d.grid.n())
    throw ParameterError("kernel node index out of range");
  const Scalar fx = std::exp(d.integral[x_idx]);
  const Scalar fy = std::exp(d.integral[y_idx]);
  Scalar s = 0;
  for (int k = 0; k < d.K; ++k)
    s += std::exp(-d.lambdas[k] * t) * (fx * d.modes(k, x_idx)) * (fy * d.modes(k, y_idx));
  return s * d.weight[y_idx];
}

void write_spectrum_csv(std::ostream& out, const SpectralDecomposition& d) {
  out << "k,lambda,lambda_over_k2\n";
  char buf[96];
  for (int k = 1; k <= d.K; ++k) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", k, d.lambdas[k - 1],
                  d.lambdas[k - 1] / (static_cast<Scalar>(k) * k));
    out << buf;
  }
}

void write_spectrum_csv(const std::filesystem::path& path, const SpectralDecomposition& d) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  write_spectrum_csv(out, d);
}

void write_modes_csv(const std::filesystem::path& path, const SpectralDecomposition& d) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "k,x,value\n";
  char buf[96];
  for (int k = 0; k < d.K; ++k)
    for (int i = 0; i <= d.grid.n(); ++i) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", k + 1, d.grid.node(i), d.modes(k, i));
      out << buf;
    }
}

}  // namespace grpheat

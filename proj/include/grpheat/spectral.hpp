#pragma once

#include "grpheat/potential.hpp"
#include "grpheat/tridiagonal.hpp"

#include <filesystem>
#include <iosfwd>

namespace grpheat {

/// Lowest K eigenpairs of L h = -(h' + hW)' + h'W with zero Dirichlet data.
///
/// L is similar to -A_W, A_W h = h'' - 2Wh' + W^2 h, through multiplication by e^{-I},
/// I = int_0^x W, and A_W is self-adjoint under the weight e^{-2I}. The pencil is
/// discretized in conservative form with geometric-mean half-node weights, so the
/// discrete problem stays symmetric and a constant W cancels exactly.
struct SpectralDecomposition {
  SpaceGrid grid;
  int K = 0;
  Vector lambdas;   ///< ascending
  Matrix modes;     ///< K x (n+1), trapezoid-orthonormal, positive at the first interior node
  Vector weight;    ///< e^{-2I(x_i)}
  Vector integral;  ///< I(x_i)
};

/// Symmetric standard form M^{-1/2} (K_W) M^{-1/2} of the weighted pencil for -A_W on the
/// interior nodes. Its eigenvectors are the eigenfunctions of L sampled at the nodes.
Tridiagonal<Scalar> symmetrized_operator(const SpaceGrid& grid, const Vector& w, const Vector& integral);

/// Number of eigenvalues of the symmetric tridiagonal `a` strictly below `x`.
int sturm_count(const Tridiagonal<Scalar>& a, Scalar x);

/// Requires K <= n/4.
SpectralDecomposition eigendecompose(const PotentialPath& w, int K);

/// Truncated series sum_k e^{-lambda_k t} (phi, m_k)_0 m_k at the nodes.
Vector evolve_spectral(const SpectralDecomposition& d, const Vector& phi, Scalar t);

struct KernelValue {
  Scalar value = 0;
  /// K e^{-lambda_K t}: a crude heuristic proxy for the truncation tail, not a bound.
  Scalar tail_proxy = 0;
};

/// Fundamental GRP solution p(t, x_i, y_j) = sum_k e^{-lambda_k t} m_k(x_i) m_k(y_j); t > 0.
KernelValue fundamental_kernel(const SpectralDecomposition& d, Scalar t, int x_idx, int y_idx);

/// Kernel of the transformed equation, p_W(t,x,y) = sum_k e^{-lambda_k t} f_k(x) f_k(y) w(y)
/// with f_k = e^{I} m_k the weighted-orthonormal eigenfunctions of A_W.
Scalar transformed_kernel(const SpectralDecomposition& d, Scalar t, int x_idx, int y_idx);

/// CSV `k,lambda,lambda_over_k2`.
void write_spectrum_csv(std::ostream& out, const SpectralDecomposition& d);
void write_spectrum_csv(const std::filesystem::path& path, const SpectralDecomposition& d);
/// CSV `k,x,value` of the eigenfunctions.
void write_modes_csv(const std::filesystem::path& path, const SpectralDecomposition& d);

}  // namespace grpheat

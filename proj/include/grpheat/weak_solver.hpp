#pragma once

#include "grpheat/field.hpp"
#include "grpheat/potential.hpp"

#include <filesystem>
#include <iosfwd>

namespace grpheat {

/// Coefficients against the orthonormal basis e_k = sqrt(2/pi) sin(kx), k = 1..K.
struct SineCoefficients {
  Vector coeffs;
  int K() const { return static_cast<int>(coeffs.size()); }
};

/// e_k(x_i) = sqrt(2/pi) sin(k x_i), k = 1..K as rows.
Matrix sine_basis(const SpaceGrid& grid, int K);

/// Trapezoid quadrature of sqrt(2/pi) int_0^pi h(x) sin(kx) dx for k = 1..K (K <= n-1).
SineCoefficients sine_transform(const Vector& values, const SpaceGrid& grid, int K);

/// Nodal reconstruction sum_k c_k e_k(x_i).
Vector sine_reconstruct(const SineCoefficients& c, const SpaceGrid& grid);

struct SobolevNorms {
  Scalar l2 = 0;
  Scalar h1 = 0;
  Scalar hminus1 = 0;
};

/// L2 and H1 by trapezoid (H1 via a fourth-order difference quotient of h'), H^{-1}
/// from the first n/2 sine coefficients.
SobolevNorms h_norms(const Vector& values, const SpaceGrid& grid);

/// Squared H1 norm alone, the same quadrature as h_norms.
Scalar h1_norm_sq(const Vector& values, const SpaceGrid& grid);

/// Modal trajectory of the Galerkin solution; row j holds coefficients at t_j.
struct WeakSolution {
  TimeGrid tgrid;
  Matrix modal;
  /// Whether the assembled operator was positive definite (coercive).
  bool coercive = true;
  int K() const { return static_cast<int>(modal.cols()); }
};

/// Galerkin matrix A_{jk} = (e_k', e_j') + (W e_k, e_j') + (W e_k', e_j) of the form
/// u_t = (u_x + uW)_x - u_x W. The W terms are integrated exactly against the piecewise
/// linear interpolant of the nodal samples.
Matrix galerkin_matrix(const SpaceGrid& grid, const Vector& w, int K);

/// Crank-Nicolson in modal space: (I + dt/2 A) c_new = (I - dt/2 A) c_old.
WeakSolution solve_generalized(const PotentialPath& w, const Vector& phi, const TimeGrid& tg, int K);
WeakSolution solve_generalized(const SmoothPotential& ws, const Vector& phi, const TimeGrid& tg, int K);
WeakSolution solve_generalized(const SpaceGrid& grid, const Vector& w, const Vector& phi, const TimeGrid& tg,
                               int K);

struct EnergyReport {
  Scalar sup_l2_sq = 0;
  Scalar int_h1_sq = 0;
  Scalar total() const { return sup_l2_sq + int_h1_sq; }
};

/// sup_t ||u||_0^2 and the time trapezoid of ||u||_1^2, from the modal coefficients.
EnergyReport energy_report(const WeakSolution& sol, const SpaceGrid& grid);

/// Nodal field reconstructed from a weak solution.
Field reconstruct(const WeakSolution& sol, const SpaceGrid& grid);

/// CSV `t,k,coeff`.
void write_weak_csv(std::ostream& out, const WeakSolution& sol);
void write_weak_csv(const std::filesystem::path& path, const WeakSolution& sol);

}  // namespace grpheat

#include "grpheat/weak_solver.hpp"

#include "grpheat/classical_solver.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

namespace grpheat {

namespace {

const Scalar kBasisScale = std::sqrt(2.0 / kPi);

void check_modes(int K, const SpaceGrid& grid) {
  if (K < 1 || K > grid.n() - 1)
    throw ParameterError("mode count K=" + std::to_string(K) + " must lie in [1, n-1] = [1, " +
                         std::to_string(grid.n() - 1) + "]");
}

/// int_a^b cos(q x) dx.
Scalar cos_integral(int q, Scalar a, Scalar b) {
  if (q == 0) return b - a;
  return (std::sin(q * b) - std::sin(q * a)) / q;
}

/// Fourth-order first derivative at every node, one-sided near the boundary.
Vector derivative4(const Vector& f, Scalar h) {
  const Eigen::Index n = f.size() - 1;
  Vector d(f.size());
  const Scalar c = 1.0 / (12.0 * h);
  for (Eigen::Index i = 2; i <= n - 2; ++i) d[i] = c * (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]);
  d[0] = c * (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]);
  d[1] = c * (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]);
  d[n] = -c * (-25 * f[n] + 48 * f[n - 1] - 36 * f[n - 2] + 16 * f[n - 3] - 3 * f[n - 4]);
  d[n - 1] = -c * (-3 * f[n] - 10 * f[n - 1] + 18 * f[n - 2] - 6 * f[n - 3] + f[n - 4]);
  return d;
}

}  // namespace

Matrix sine_basis(const SpaceGrid& grid, int K) {
  Matrix basis(K, grid.size());
  for (int k = 1; k <= K; ++k) basis.row(k - 1) = kBasisScale * sine_mode(k, grid).transpose();
  return basis;
}

SineCoefficients sine_transform(const Vector& values, const SpaceGrid& grid, int K) {
  check_modes(K, grid);
  if (values.size() != grid.size()) throw ParameterError("sine transform input does not match the grid");
  const Vector weighted = values.cwiseProduct(trapezoid_weights(grid));
  return {sine_basis(grid, K) * weighted};
}

Vector sine_reconstruct(const SineCoefficients& c, const SpaceGrid& grid) {
  return sine_basis(grid, c.K()).transpose() * c.coeffs;
}

SobolevNorms h_norms(const Vector& values, const SpaceGrid& grid) {
  if (values.size() != grid.size()) throw ParameterError("norm input does not match the grid");
  if (!values.allFinite()) throw DataError("norm input is not finite");
  SobolevNorms out;
  const Scalar l2_sq = trapezoid(grid, values.cwiseAbs2());
  const Scalar grad_sq = grid.n() >= 4 ? trapezoid(grid, derivative4(values, grid.h()).cwiseAbs2()) : 0.0;
  out.l2 = std::sqrt(l2_sq);
  out.h1 = std::sqrt(l2_sq + grad_sq);
  const int kmax = std::max(1, grid.n() / 2);
  const Vector c = sine_transform(values, grid, std::min(kmax, grid.n() - 1)).coeffs;
  Scalar hm = 0;
  for (Eigen::Index k = 0; k < c.size(); ++k) hm += c[k] * c[k] / static_cast<Scalar>((k + 1) * (k + 1));
  out.hminus1 = std::sqrt(hm);
  return out;
}

Scalar h1_norm_sq(const Vector& values, const SpaceGrid& grid) {
  if (values.size() != grid.size()) throw ParameterError("norm input does not match the grid");
  const Scalar l2_sq = trapezoid(grid, values.cwiseAbs2());
  return grid.n() >= 4 ? l2_sq + trapezoid(grid, derivative4(values, grid.h()).cwiseAbs2()) : l2_sq;
}

Matrix galerkin_matrix(const SpaceGrid& grid, const Vector& w, int K) {
  check_modes(K, grid);
  if (w.size() != grid.size()) throw ParameterError("potential does not match the grid");
  if (!w.allFinite()) throw DataError("potential is not finite");
  // (W e_k, e_j') + (W e_k', e_j) = int W (e_j e_k)' = -sum_cells slope_c int_c e_j e_k for the
  // piecewise linear interpolant, since e_j e_k vanishes at both ends. Constant W drops out.
  // e_j e_k = (cos((j-k)x) - cos((j+k)x)) / pi.
  const int n = grid.n();
  const Scalar h = grid.h();
  Matrix cos_int(2 * K + 1, n);  // cos_int(q, c) = int over cell c of cos(q x)
  for (int q = 0; q <= 2 * K; ++q)
    for (int c = 0; c < n; ++c) cos_int(q, c) = cos_integral(q, grid.node(c), grid.node(c + 1));
  Vector slopes(n);
  for (int c = 0; c < n; ++c) slopes[c] = (w[c + 1] - w[c]) / h;
  const Vector moments = cos_int * slopes;  // sum_c slope_c int_c cos(q x)

  Matrix a = Matrix::Zero(K, K);
  for (int j = 1; j <= K; ++j) {
    for (int k = 1; k <= K; ++k) {
      const Scalar product_moment = (moments[std::abs(j - k)] - moments[j + k]) / kPi;
      a(j - 1, k - 1) = -product_moment;
    }
    a(j - 1, j - 1) += static_cast<Scalar>(j) * j;
  }
  return a;
}

WeakSolution solve_generalized(const SpaceGrid& grid, const Vector& w, const Vector& phi, const TimeGrid& tg,
                               int K) {
  check_modes(K, grid);
  if (phi.size() != grid.size()) throw ParameterError("initial condition does not match the grid");
  if (!phi.allFinite()) throw DataError("initial condition is not finite");
  const Matrix a = galerkin_matrix(grid, w, K);
  const Scalar dt = tg.dt();
  const Matrix identity = Matrix::Identity(K, K);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lhs(identity + 0.5 * dt * a);
  const Scalar rcond = lhs.rcond();
  if (!(rcond > 1e-14)) throw NumericalError("modal Crank-Nicolson system is singular (rcond=" + std::to_string(rcond) + ")");
  const Eigen::MatrixXd step = lhs.solve(Eigen::MatrixXd(identity - 0.5 * dt * a));

  WeakSolution sol{tg, Matrix(tg.size(), K), true};
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> spectrum(Eigen::MatrixXd(a), Eigen::EigenvaluesOnly);
  sol.coercive = spectrum.eigenvalues().minCoeff() > 0;

  Eigen::VectorXd c = sine_transform(phi, grid, K).coeffs;
  sol.modal.row(0) = c.transpose();
  for (int j = 1; j <= tg.m(); ++j) {
    c = step * c;
    sol.modal.row(j) = c.transpose();
  }
  if (!sol.modal.allFinite()) throw NumericalError("modal time stepping produced non-finite coefficients");
  return sol;
}

WeakSolution solve_generalized(const PotentialPath& w, const Vector& phi, const TimeGrid& tg, int K) {
  return solve_generalized(w.grid(), w.values(), phi, tg, K);
}

WeakSolution solve_generalized(const SmoothPotential& ws, const Vector& phi, const TimeGrid& tg, int K) {
  return solve_generalized(ws.grid(), ws.values(), phi, tg, K);
}

EnergyReport energy_report(const WeakSolution& sol, const SpaceGrid& grid) {
  check_modes(sol.K(), grid);
  EnergyReport r;
  Vector k2(sol.K());
  for (int k = 1; k <= sol.K(); ++k) k2[k - 1] = 1.0 + static_cast<Scalar>(k) * k;
  const Scalar dt = sol.tgrid.dt();
  for (int j = 0; j <= sol.tgrid.m(); ++j) {
    const auto c = sol.modal.row(j);
    r.sup_l2_sq = std::max(r.sup_l2_sq, c.squaredNorm());
    const Scalar h1_sq = c.cwiseAbs2().dot(k2.transpose());
    r.int_h1_sq += (j == 0 || j == sol.tgrid.m() ? 0.5 : 1.0) * dt * h1_sq;
  }
  return r;
}

Field reconstruct(const WeakSolution& sol, const SpaceGrid& grid) {
  check_modes(sol.K(), grid);
  Matrix values = sol.modal * sine_basis(grid, sol.K());
  values.col(0).setZero();
  values.col(grid.n()).setZero();
  return Field(sol.tgrid, grid, std::move(values));
}

void write_weak_csv(std::ostream& out, const WeakSolution& sol) {
  out << "t,k,coeff\n";
  char buf[96];
  for (int j = 0; j <= sol.tgrid.m(); ++j)
    for (int k = 0; k < sol.K(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g\n", sol.tgrid.node(j), k + 1, sol.modal(j, k));
      out << buf;
    }
}

void write_weak_csv(const std::filesystem::path& path, const WeakSolution& sol) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  write_weak_csv(out, sol);
}

}  // namespace grpheat

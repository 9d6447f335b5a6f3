#include "grpheat/classical_solver.hpp"

#include <cmath>

namespace grpheat {

namespace {

void require_dirichlet(const Vector& phi, const SpaceGrid& grid, const char* what) {
  if (phi.size() != grid.size())
    throw ParameterError(std::string(what) + " has " + std::to_string(phi.size()) + " values, grid expects " +
                         std::to_string(grid.size()));
  if (!phi.allFinite()) throw DataError(std::string(what) + " is not finite");
  const Scalar scale = std::max<Scalar>(1, phi.cwiseAbs().maxCoeff());
  const Scalar tol = 1e-10 * scale;
  if (std::abs(phi[0]) > tol || std::abs(phi[grid.n()]) > tol)
    throw ParameterError(std::string(what) + " must vanish at x = 0 and x = pi");
}

}  // namespace

InitialCondition::InitialCondition(InitialKind kind, std::string tag, Vector values)
    : kind_(kind), tag_(std::move(tag)), values_(std::move(values)) {
  if (!values_.allFinite()) throw DataError("initial condition is not finite");
}

InitialCondition InitialCondition::nodal(Vector values) {
  return InitialCondition(InitialKind::nodal, "nodal", std::move(values));
}

InitialCondition InitialCondition::analytic(std::string tag, const std::function<Scalar(Scalar)>& f,
                                            const SpaceGrid& grid) {
  return InitialCondition(InitialKind::analytic, std::move(tag), grid.sample(f));
}

InitialCondition InitialCondition::compensated(Vector psi, std::string tag) {
  return InitialCondition(InitialKind::compensated, std::move(tag), std::move(psi));
}

Vector InitialCondition::effective(const TransformPair& t) const {
  if (values_.size() != t.grid.size()) throw ParameterError("initial condition does not match the grid");
  if (kind_ == InitialKind::compensated) return values_.cwiseProduct(t.hw_inv);
  return values_;
}

Vector sine_mode(int k, const SpaceGrid& grid) {
  Vector v = grid.sample([k](Scalar x) { return std::sin(k * x); });
  v[0] = 0;
  v[grid.n()] = 0;
  return v;
}

Tridiagonal<Scalar> interior_operator(const SpaceGrid& grid, const Vector& drift, const Vector& reaction) {
  const int n = grid.n();
  const Scalar h = grid.h();
  const Scalar inv_h2 = 1.0 / (h * h);
  const Scalar inv_2h = 0.5 / h;
  Tridiagonal<Scalar> op(n - 1);
  for (int k = 0; k < n - 1; ++k) {
    const int i = k + 1;
    op.lower[k] = inv_h2 - drift[i] * inv_2h;
    op.diag[k] = -2.0 * inv_h2 + reaction[i];
    op.upper[k] = inv_h2 + drift[i] * inv_2h;
  }
  return op;
}

Field crank_nicolson(const Tridiagonal<Scalar>& op, const Vector& initial, const TimeGrid& tg,
                     const SpaceGrid& grid) {
  const int n = grid.n();
  const Scalar dt = tg.dt();
  const ThomasFactorization<Scalar> implicit(op.shifted(1.0, -0.5 * dt));
  const Tridiagonal<Scalar> explicit_part = op.shifted(1.0, 0.5 * dt);

  Field field(tg, grid);
  Matrix& out = field.values();
  out.row(0) = initial.transpose();
  out(0, 0) = 0;
  out(0, n) = 0;
  Vector state = initial.segment(1, n - 1);
  for (int j = 1; j <= tg.m(); ++j) {
    Vector rhs = explicit_part.apply(state);
    implicit.solve_in_place(rhs);
    state = std::move(rhs);
    out.row(j).segment(1, n - 1) = state.transpose();
  }
  if (!out.allFinite()) throw NumericalError("Crank-Nicolson produced non-finite values; try a smaller dt");
  return field;
}

Field solve_transformed(const PotentialPath& w, const Vector& phi0, const TimeGrid& tg) {
  const SpaceGrid& grid = w.grid();
  require_dirichlet(phi0, grid, "transformed initial data");
  const Vector& W = w.values();
  const Vector drift = -2.0 * W;
  const Vector reaction = W.cwiseAbs2();
  return crank_nicolson(interior_operator(grid, drift, reaction), phi0, tg, grid);
}

Field solve_classical_grp(const PotentialPath& w, const InitialCondition& phi, const TimeGrid& tg) {
  const TransformPair t = build_transform(w);
  const Vector phi_eff = phi.effective(t);
  require_dirichlet(phi_eff, w.grid(), "initial condition");
  const Field v = solve_transformed(w, phi_eff.cwiseProduct(t.hw), tg);
  Field u = recover_u(v, t);
  // Row 0 is phi itself, not phi*H_W/H_W rounded.
  u.values().row(0) = phi_eff.transpose();
  u.values()(0, 0) = 0;
  u.values()(0, w.grid().n()) = 0;
  return u;
}

Field solve_regularized(const SmoothPotential& ws, const InitialCondition& phi, const TimeGrid& tg) {
  const SpaceGrid& grid = ws.grid();
  const Vector phi_eff = phi.kind() == InitialKind::compensated
                             ? phi.effective(build_transform(ws.parent()))
                             : phi.values();
  require_dirichlet(phi_eff, grid, "initial condition");
  const Vector drift = Vector::Zero(grid.size());
  return crank_nicolson(interior_operator(grid, drift, ws.derivative()), phi_eff, tg, grid);
}

Field solve_drift_diffusion(const PotentialPath& w, const Vector& h0, const TimeGrid& tg) {
  const SpaceGrid& grid = w.grid();
  require_dirichlet(h0, grid, "drift-diffusion initial data");
  const Vector drift = -2.0 * w.values();
  const Vector reaction = Vector::Zero(grid.size());
  return crank_nicolson(interior_operator(grid, drift, reaction), h0, tg, grid);
}

}  // namespace grpheat

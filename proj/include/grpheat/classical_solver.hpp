#pragma once

#include "grpheat/field.hpp"
#include "grpheat/potential.hpp"
#include "grpheat/transform.hpp"
#include "grpheat/tridiagonal.hpp"

#include <functional>
#include <string>

namespace grpheat {

enum class InitialKind { nodal, analytic, compensated };

/// Initial data phi at the grid nodes. For the compensated kind the stored values are psi
/// and the effective initial condition is psi / H_W.
///
/// The classical route assumes phi in C^{1+alpha} but only checks the Dirichlet endpoints.
class InitialCondition {
 public:
  static InitialCondition nodal(Vector values);
  static InitialCondition analytic(std::string tag, const std::function<Scalar(Scalar)>& f, const SpaceGrid& grid);
  static InitialCondition compensated(Vector psi, std::string tag = "psi");

  InitialKind kind() const { return kind_; }
  const std::string& tag() const { return tag_; }
  const Vector& values() const { return values_; }

  /// phi at the nodes; for compensated data this is psi * hw_inv.
  Vector effective(const TransformPair& t) const;

 private:
  InitialCondition(InitialKind kind, std::string tag, Vector values);

  InitialKind kind_;
  std::string tag_;
  Vector values_;
};

/// sin(k x) at the nodes.
Vector sine_mode(int k, const SpaceGrid& grid);

/// Central-difference matrix of  v'' + drift(x) v' + reaction(x) v  on interior nodes
/// (zero Dirichlet data eliminated).
Tridiagonal<Scalar> interior_operator(const SpaceGrid& grid, const Vector& drift, const Vector& reaction);

/// Crank-Nicolson evolution of v_t = A v with zero Dirichlet columns pinned.
Field crank_nicolson(const Tridiagonal<Scalar>& op, const Vector& initial, const TimeGrid& tg,
                     const SpaceGrid& grid);

/// v_t = v_xx - 2 W v_x + W^2 v, v(0) = phi0.
Field solve_transformed(const PotentialPath& w, const Vector& phi0, const TimeGrid& tg);

/// u = F_t[H_W phi] / H_W through the transformed equation.
Field solve_classical_grp(const PotentialPath& w, const InitialCondition& phi, const TimeGrid& tg);

/// u_t = u_xx + W'_eps(x) u with the mollified derivative collocated at the nodes.
Field solve_regularized(const SmoothPotential& ws, const InitialCondition& phi, const TimeGrid& tg);

/// Drift-diffusion part v_t = v_xx - 2 W v_x alone (no zero-order term).
Field solve_drift_diffusion(const PotentialPath& w, const Vector& h0, const TimeGrid& tg);

}  // namespace grpheat

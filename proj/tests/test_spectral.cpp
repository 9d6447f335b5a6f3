#include "grpheat/classical_solver.hpp"
#include "grpheat/spectral.hpp"
#include "grpheat/transform.hpp"
#include "grpheat/weak_solver.hpp"

#include "support.hpp"

#include <Eigen/Eigenvalues>

using namespace grpheat;
using test::max_abs;
using test::sqrt2pi_sin;

namespace {

Eigen::MatrixXd dense(const Tridiagonal<Scalar>& a) {
  const Eigen::Index n = a.size();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = a.diag[i];
    if (i + 1 < n) {
      d(i, i + 1) = a.upper[i];
      d(i + 1, i) = a.lower[i + 1];
    }
  }
  return d;
}

Scalar discrete_l2(const Vector& v, const SpaceGrid& g) { return std::sqrt(trapezoid(g, v.cwiseProduct(v))); }

}  // namespace

TEST_CASE("dirichlet laplacian spectrum") {
  const SpaceGrid g(1024);
  const auto d = eigendecompose(constant_potential(0, g), 10);
  for (int k = 1; k <= 10; ++k) {
    CAPTURE(k);
    CHECK(std::abs(d.lambdas[k - 1] / (k * k) - 1) < 1e-3);
    CHECK(max_abs(d.modes.row(k - 1).transpose() - sqrt2pi_sin(k, g)) < 1e-4);
  }
}

TEST_CASE("constant potentials do not move the spectrum") {
  const SpaceGrid g(512);
  const auto base = eigendecompose(constant_potential(0, g), 10);
  for (Scalar c : {-2.0, 1.0, 5.0}) {
    const auto d = eigendecompose(constant_potential(c, g), 10);
    CHECK(max_abs(d.lambdas.cwiseQuotient(base.lambdas) - Vector::Ones(10)) < 1e-3);
    CHECK(max_abs(d.lambdas - base.lambdas) < 1e-8);
  }
}

TEST_CASE("modes are orthonormal and fixed in sign") {
  const SpaceGrid g(512);
  for (const auto& w : {weierstrass(0.5, 16, g), sample_fbm(0.3, g, 2)}) {
    const auto d = eigendecompose(w, 16);
    for (int a = 0; a < 16; ++a) {
      CHECK(d.modes(a, 1) > 0);
      CHECK(d.modes(a, 0) == 0.0);
      CHECK(d.modes(a, g.n()) == 0.0);
      if (a > 0) CHECK(d.lambdas[a] > d.lambdas[a - 1]);
      for (int b = 0; b < 16; ++b) {
        const Scalar ip = trapezoid(g, d.modes.row(a).transpose().cwiseProduct(d.modes.row(b).transpose()));
        CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) < 1e-6);
      }
    }
  }
}

TEST_CASE("eigenvalues agree with a dense symmetric solver") {
  const SpaceGrid g(512);
  const auto w = sample_fbm(0.5, g, 1);
  const Vector integral = integrate_potential(w);
  const auto op = symmetrized_operator(g, w.values(), integral);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(op), Eigen::EigenvaluesOnly);
  const auto d = eigendecompose(w, 32);
  for (int k = 0; k < 32; ++k) CHECK(d.lambdas[k] == doctest::Approx(es.eigenvalues()[k]).epsilon(1e-10));
  // Sturm counts bracket every eigenvalue.
  for (int k = 0; k < 32; ++k) {
    CHECK(sturm_count(op, d.lambdas[k] - 1e-7) == k);
    CHECK(sturm_count(op, d.lambdas[k] + 1e-7) == k + 1);
  }
}

TEST_CASE("finite difference and galerkin spectra agree") {
  // The Galerkin matrix is the sine-basis projection of the same operator, so its lowest
  // eigenvalues approximate the finite-difference ones from an independent discretization.
  const SpaceGrid g(1024);
  const auto w = weierstrass(0.5, 16, g);
  const auto d = eigendecompose(w, 10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(galerkin_matrix(g, w.values(), 128), Eigen::EigenvaluesOnly);
  for (int k = 0; k < 10; ++k) {
    CAPTURE(k);
    CHECK(es.eigenvalues()[k] == doctest::Approx(d.lambdas[k]).epsilon(2e-3).scale(1.0));
  }
}

TEST_CASE("eigenvalue asymptotics on a weierstrass path") {
  const SpaceGrid g(2048);
  const auto d = eigendecompose(weierstrass(0.5, 16, g), 20);
  CHECK(std::abs(d.lambdas[19] / 400 - 1) <= 0.1);
  int decreasing = 0;
  const int ks[4] = {5, 10, 15, 20};
  for (int i = 0; i + 1 < 4; ++i) {
    const Scalar a = std::abs(d.lambdas[ks[i] - 1] / (ks[i] * ks[i]) - 1);
    const Scalar b = std::abs(d.lambdas[ks[i + 1] - 1] / (ks[i + 1] * ks[i + 1]) - 1);
    decreasing += b < a;
  }
  CHECK(decreasing >= 2);
}

TEST_CASE("spectral evolution") {
  const SpaceGrid g(1024);
  const auto d0 = eigendecompose(constant_potential(0, g), 16);
  const Vector s1 = sine_mode(1, g);
  CHECK(max_abs(evolve_spectral(d0, s1, 1.0) - std::exp(-1.0) * s1) < 1e-4);

  const auto w = weierstrass(0.5, 16, g);
  const auto d = eigendecompose(w, 64);
  // Data in the span of the modes come back unchanged at t = 0.
  const Vector in_span = 0.3 * d.modes.row(0).transpose() - 1.2 * d.modes.row(4).transpose();
  CHECK(max_abs(evolve_spectral(d, in_span, 0.0) - in_span) < 1e-6);

  const TimeGrid tg(512, 0.5);
  const Field u = solve_classical_grp(w, InitialCondition::nodal(s1), tg);
  CHECK(discrete_l2(evolve_spectral(d, s1, 0.5) - u.level(tg.m()), g) < 1e-2);
  CHECK_THROWS_AS(evolve_spectral(d, s1, -0.1), ParameterError);
}

TEST_CASE("fundamental kernel") {
  const SpaceGrid g(512);
  const int mid = g.n() / 2;
  const auto d10 = eigendecompose(constant_potential(0, g), 10);
  const auto d100 = eigendecompose(constant_potential(0, g), 100);
  CHECK(std::abs(fundamental_kernel(d10, 1.0, mid, mid).value - fundamental_kernel(d100, 1.0, mid, mid).value) < 1e-8);
  CHECK(fundamental_kernel(d10, 1.0, mid, mid).tail_proxy == doctest::Approx(10 * std::exp(-d10.lambdas[9])));
  for (int x : {10, 100, 300})
    for (int y : {20, 256, 400})
      CHECK(fundamental_kernel(d10, 0.3, x, y).value == fundamental_kernel(d10, 0.3, y, x).value);
  CHECK_THROWS_AS(fundamental_kernel(d10, 0.0, 1, 1), ParameterError);
  CHECK_THROWS_AS(fundamental_kernel(d10, -1.0, 1, 1), ParameterError);
  CHECK_THROWS_AS(fundamental_kernel(d10, 1.0, 0, g.n() + 1), ParameterError);
}

TEST_CASE("transformed kernel is symmetric under its weight") {
  const SpaceGrid g(512);
  const auto d = eigendecompose(sample_fbm(0.5, g, 1), 64);
  Scalar worst = 0;
  for (int x = 64; x < g.n(); x += 96)
    for (int y = 64; y < g.n(); y += 96) {
      const Scalar a = d.weight[x] * transformed_kernel(d, 0.5, x, y);
      const Scalar b = d.weight[y] * transformed_kernel(d, 0.5, y, x);
      worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
    }
  CHECK(worst < 1e-6);
}

TEST_CASE("kernel semigroup property") {
  const SpaceGrid g(512);
  for (const auto& w : {constant_potential(0, g), sample_fbm(0.5, g, 1)}) {
    const auto d = eigendecompose(w, 128);
    for (int x = 64; x < g.n(); x += 96)
      for (int y = 64; y < g.n(); y += 96) {
        Vector prod(g.size());
        for (int z = 0; z <= g.n(); ++z)
          prod[z] = fundamental_kernel(d, 0.5, x, z).value * fundamental_kernel(d, 0.5, z, y).value;
        CHECK(std::abs(trapezoid(g, prod) - fundamental_kernel(d, 1.0, x, y).value) < 1e-4);
      }
  }
}

TEST_CASE("eigendecompose validation") {
  const SpaceGrid g(64);
  CHECK_THROWS_AS(eigendecompose(constant_potential(0, g), 17), ParameterError);
  CHECK_THROWS_AS(eigendecompose(constant_potential(0, g), 0), ParameterError);
  CHECK_NOTHROW(eigendecompose(constant_potential(0, g), 16));
}

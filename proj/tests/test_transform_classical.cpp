#include "grpheat/classical_solver.hpp"
#include "grpheat/transform.hpp"

#include "support.hpp"

#include <random>

using namespace grpheat;
using test::max_abs;

namespace {

Scalar field_error(const Field& f, const std::function<Scalar(Scalar, Scalar)>& exact) {
  Scalar err = 0;
  for (int j = 0; j <= f.tgrid().m(); ++j)
    for (int i = 0; i <= f.xgrid().n(); ++i)
      err = std::max(err, std::abs(f.values()(j, i) - exact(f.tgrid().node(j), f.xgrid().node(i))));
  return err;
}

}  // namespace

TEST_CASE("integral of a constant is exact") {
  const SpaceGrid g(50);
  const Vector i = integrate_potential(constant_potential(1.5, g));
  CHECK(i[0] == 0.0);
  CHECK(max_abs(i - g.sample([](Scalar x) { return 1.5 * x; })) < 1e-13);
}

TEST_CASE("integral of cos converges at second order") {
  Scalar prev = 0;
  for (int n : {64, 128, 256}) {
    const SpaceGrid g(n);
    const auto w = analytic_potential("cos", [](Scalar x) { return std::cos(x); }, g);
    const Scalar err = max_abs(integrate_potential(w) - g.sample([](Scalar x) { return std::sin(x); }));
    if (prev > 0) {
      CHECK(prev / err > 3.5);
      CHECK(prev / err < 4.5);
    }
    prev = err;
  }
}

TEST_CASE("transform overflow is reported") {
  const SpaceGrid g(16);
  CHECK_THROWS_AS(build_transform(constant_potential(300, g)), RangeError);
  CHECK_NOTHROW(build_transform(constant_potential(100, g)));
  CHECK_THROWS_AS(integrate_potential(g, Vector::Zero(5)), ParameterError);
}

TEST_CASE("property: multiplier identities") {
  std::mt19937_64 rng(7);
  const SpaceGrid g(128);
  const TimeGrid tg(3, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto w = test::random_potential(rng, g);
    const TransformPair t = build_transform(w);
    CHECK(t.hw[0] == 1.0);
    CHECK(max_abs(t.hw.cwiseProduct(t.hw_inv) - Vector::Ones(g.size())) < 1e-13);

    // Shifting W by c multiplies H_W by e^{cx}.
    const Scalar c = std::uniform_real_distribution<Scalar>(-1, 1)(rng);
    const TransformPair ts = build_transform(g, w.values() + Vector::Constant(g.size(), c));
    const Vector ecx = g.sample([c](Scalar x) { return std::exp(c * x); });
    CHECK(max_abs(ts.hw.cwiseQuotient(t.hw) - ecx) < 1e-12 * ecx.maxCoeff());

    Matrix v = Matrix::Random(tg.size(), g.size());
    const Field f(tg, g, v);
    const Field back = recover_u(apply_hw(f, t), t);
    CHECK((back.values() - f.values()).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("zero potential reproduces the heat semigroup") {
  const SpaceGrid g(256);
  const TimeGrid tg(512, 1.0);
  const auto phi = InitialCondition::analytic("sin", [](Scalar x) { return std::sin(x); }, g);
  const Field u = solve_classical_grp(constant_potential(0, g), phi, tg);
  CHECK(field_error(u, [](Scalar t, Scalar x) { return std::exp(-t) * std::sin(x); }) < 1e-4);
}

TEST_CASE("a constant potential leaves the heat flow unchanged") {
  const SpaceGrid g(512);
  const TimeGrid tg(1024, 1.0);
  for (Scalar c : {-2.0, 1.0, 2.0}) {
    CAPTURE(c);
    const auto phi = InitialCondition::analytic("sin3", [](Scalar x) { return std::sin(3 * x); }, g);
    const Field u = solve_classical_grp(constant_potential(c, g), phi, tg);
    CHECK(field_error(u, [](Scalar t, Scalar x) { return std::exp(-9 * t) * std::sin(3 * x); }) < 5e-3);
  }
}

TEST_CASE("crank nicolson is second order in time") {
  // With h fixed the semi-discrete solution is the reference, so successive dt halvings
  // shrink the differences by four.
  const SpaceGrid g(64);
  const auto w = weierstrass(0.5, 6, g);
  const Vector phi = g.sample([](Scalar x) { return x * (kPi - x); });
  std::vector<Vector> finals;
  for (int m : {16, 32, 64, 128}) finals.push_back(solve_transformed(w, phi, TimeGrid(m, 0.5)).level(m));
  const Scalar e1 = max_abs(finals[0] - finals[1]), e2 = max_abs(finals[1] - finals[2]),
               e3 = max_abs(finals[2] - finals[3]);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);
  CHECK(e2 / e3 > 3.5);
  CHECK(e2 / e3 < 4.5);
}

TEST_CASE("space discretization is second order for smooth data") {
  const auto f = [](Scalar x) { return 0.5 * std::sin(2 * x); };
  std::vector<Scalar> errs;
  for (int n : {32, 64, 128}) {
    const SpaceGrid g(n);
    const TimeGrid tg(2048, 0.25);
    const auto w = analytic_potential("s", f, g);
    const Field u = solve_classical_grp(w, InitialCondition::analytic("sin", [](Scalar x) { return std::sin(x); }, g), tg);
    // Reference on a 4x finer grid, sampled at the coarse nodes.
    const SpaceGrid gf(4 * n);
    const Field uf =
        solve_classical_grp(analytic_potential("s", f, gf),
                            InitialCondition::analytic("sin", [](Scalar x) { return std::sin(x); }, gf), tg);
    Scalar err = 0;
    for (int i = 0; i <= n; ++i) err = std::max(err, std::abs(u.values()(2048, i) - uf.values()(2048, 4 * i)));
    errs.push_back(err);
  }
  CHECK(errs[0] / errs[1] > 3.3);
  CHECK(errs[1] / errs[2] > 3.3);
}

TEST_CASE("heat flow obeys the maximum principle") {
  std::mt19937_64 rng(99);
  const SpaceGrid g(128);
  const TimeGrid tg(256, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const Vector phi = test::random_initial(rng, g);
    const Field u = solve_classical_grp(constant_potential(0, g), InitialCondition::nodal(phi), tg);
    CHECK(u.values().cwiseAbs().maxCoeff() <= max_abs(phi) * (1 + 1e-12));
  }
}

TEST_CASE("property: dirichlet columns stay zero and the first row is phi") {
  std::mt19937_64 rng(3);
  const SpaceGrid g(256);
  const TimeGrid tg(64, 0.5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto w = test::random_potential(rng, g);
    const Vector phi = test::random_initial(rng, g);
    const Field u = solve_classical_grp(w, InitialCondition::nodal(phi), tg);
    CAPTURE(describe(w.provenance()));
    CHECK(u.values().allFinite());
    CHECK(u.values().col(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(u.values().col(g.n()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(max_abs(u.level(0) - phi) < 1e-13 * (1 + max_abs(phi)));
  }
}

TEST_CASE("regularized solve approaches the transformed solve") {
  const SpaceGrid g(512);
  const TimeGrid tg(512, 0.5);
  const auto w = std::make_shared<const PotentialPath>(weierstrass(0.7, 16, g));
  const auto phi = InitialCondition::analytic("sin", [](Scalar x) { return std::sin(x); }, g);
  const Field ref = solve_classical_grp(*w, phi, tg);
  Scalar prev = 1e300;
  for (Scalar eps : {0.25, 0.125, 0.0625}) {
    const Field ue = solve_regularized(mollify(w, eps), phi, tg);
    const Scalar err = (ue.values() - ref.values()).cwiseAbs().maxCoeff();
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 0.1);
}

TEST_CASE("compensated data start from psi in the transformed frame") {
  const SpaceGrid g(128);
  const TimeGrid tg(64, 0.5);
  const auto w = sample_fbm(0.5, g, 4);
  const Vector psi = sine_mode(1, g);
  const auto comp = InitialCondition::compensated(psi);
  const TransformPair t = build_transform(w);
  CHECK(max_abs(comp.effective(t) - psi.cwiseProduct(t.hw_inv)) == 0.0);
  const Field a = solve_classical_grp(w, comp, tg);
  const Field b = solve_classical_grp(w, InitialCondition::nodal(comp.effective(t)), tg);
  CHECK((a.values() - b.values()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("initial condition validation") {
  const SpaceGrid g(16);
  Vector bad = sine_mode(1, g);
  bad[0] = 0.1;
  CHECK_THROWS_AS(solve_classical_grp(constant_potential(0, g), InitialCondition::nodal(bad), TimeGrid(4, 1.0)),
                  ParameterError);
  bad[0] = 0;
  bad[3] = std::nan("");
  CHECK_THROWS_AS(InitialCondition::nodal(bad), DataError);
  const auto phi = InitialCondition::nodal(sine_mode(1, SpaceGrid(8)));
  CHECK_THROWS_AS(solve_classical_grp(constant_potential(0, g), phi, TimeGrid(4, 1.0)), ParameterError);
}

TEST_CASE("interior operator on constants") {
  const SpaceGrid g(10);
  const Vector zero = Vector::Zero(g.size());
  const auto a = interior_operator(g, zero, zero);
  CHECK(a.size() == 9);
  CHECK(a.diag[3] == doctest::Approx(-2 / (g.h() * g.h())));
  CHECK(a.upper[3] == doctest::Approx(1 / (g.h() * g.h())));
}

#include "grpheat/analysis.hpp"

#include "support.hpp"

#include <cstdlib>
#include <random>
#include <sstream>

using namespace grpheat;
using test::max_abs;

namespace {

using Pairs = std::vector<std::pair<Scalar, Scalar>>;

const std::vector<Scalar> kDyadic = {0.125, 0.0625, 0.03125, 0.015625, 0.0078125};

Field sampled_field(int m, int n, Scalar T, const std::function<Scalar(Scalar, Scalar)>& f) {
  const TimeGrid tg(m, T);
  const SpaceGrid g(n);
  Matrix v(tg.size(), g.size());
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= n; ++i) v(j, i) = f(tg.node(j), g.node(i));
  return Field(tg, g, v);
}

InitialCondition sine_initial(const SpaceGrid& g) {
  return InitialCondition::analytic("sin", [](Scalar x) { return std::sin(x); }, g);
}

}  // namespace

TEST_CASE("rate fit examples") {
  Pairs id, half, scaled;
  for (Scalar e : kDyadic) {
    id.emplace_back(e, e);
    half.emplace_back(e, std::sqrt(e));
    scaled.emplace_back(e, 17 * std::pow(e, 0.7));
  }
  const RateFit a = fit_rate(id);
  CHECK(a.slope == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(a.r_squared == doctest::Approx(1.0));
  CHECK(fit_rate(half).slope == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(fit_rate(scaled).slope - 0.7) < 1e-12);
  CHECK_THROWS_AS(fit_rate(Pairs{{0.1, 0.0}, {0.2, 1.0}}), DataError);
  CHECK_THROWS_AS(fit_rate(Pairs{{-0.1, 1.0}, {0.2, 1.0}}), DataError);
  CHECK_THROWS_AS(fit_rate(Pairs{{0.1, 1.0}}), ParameterError);
}

TEST_CASE("property: rate fit is invariant under scaling of the errors") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<Scalar> u(0.1, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    Pairs p, q;
    const Scalar c = u(rng) * 100;
    for (Scalar e : kDyadic) {
      const Scalar err = std::pow(e, u(rng) * 0.2 + 0.4);
      p.emplace_back(e, err);
      q.emplace_back(e, c * err);
    }
    CHECK(fit_rate(p).slope == doctest::Approx(fit_rate(q).slope).epsilon(1e-10));
    CHECK(fit_rate(p).r_squared <= 1.0 + 1e-12);
  }
}

TEST_CASE("sweep over a constant potential is degenerate") {
  const SpaceGrid g(256);
  const TimeGrid tg(256, 1.0);
  const std::vector<Scalar> eps = {0.25, 0.125, 0.0625};
  const auto r = convergence_sweep(constant_potential(2.0, g), sine_initial(g), tg, eps);
  CHECK(r.degenerate);
  REQUIRE(r.entries.size() == 3);
  for (const auto& e : r.entries) {
    CHECK(e.sup_error <= 1e-3);
    CHECK(e.l2_error <= 1e-3);
  }
}

TEST_CASE("sweep input validation and ordering") {
  const SpaceGrid g(64);
  const TimeGrid tg(16, 0.5);
  const auto w = weierstrass(0.5, 8, g);
  CHECK_THROWS_AS(convergence_sweep(w, sine_initial(g), tg, std::vector<Scalar>{0.1, 0.2}), ParameterError);
  CHECK_THROWS_AS(convergence_sweep(w, sine_initial(g), tg, std::vector<Scalar>{0.1, 0.2, 0.2}), ParameterError);
  CHECK_THROWS_AS(convergence_sweep(w, sine_initial(g), tg, std::vector<Scalar>{0.1, 0.2, -0.3}), ParameterError);
  const auto r = convergence_sweep(w, sine_initial(g), tg, std::vector<Scalar>{0.2, 0.5, 0.3});
  CHECK(r.entries[0].epsilon == 0.5);
  CHECK(r.entries[2].epsilon == 0.2);
  CHECK(r.alpha_declared == 0.5);
}

TEST_CASE("sweep results do not depend on the worker count") {
  const SpaceGrid g(128);
  const TimeGrid tg(64, 0.5);
  const auto w = sample_fbm(0.5, g, 5);
  SweepOptions one, many;
  one.threads = 1;
  many.threads = 4;
  one.gamma = many.gamma = 0.25;
  const auto a = convergence_sweep(w, sine_initial(g), tg, kDyadic, one);
  const auto b = convergence_sweep(w, sine_initial(g), tg, kDyadic, many);
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].sup_error == b.entries[i].sup_error);
    CHECK(a.entries[i].energy_error == b.entries[i].energy_error);
    CHECK(a.entries[i].reduced_error == b.entries[i].reduced_error);
  }
}

TEST_CASE("sup-norm rates are stable under grid refinement") {
  std::vector<Scalar> rates;
  for (int n : {256, 512, 1024}) {
    const SpaceGrid g(n);
    rates.push_back(convergence_sweep(weierstrass(0.5, 16, g), sine_initial(g), TimeGrid(n, 1.0), kDyadic).fitted_rate_sup);
  }
  CHECK(std::abs(rates[1] - rates[0]) <= 0.1);
  CHECK(std::abs(rates[2] - rates[1]) <= 0.1);
}

TEST_CASE("weak energy sweep converges") {
  const SpaceGrid g(512);
  const TimeGrid tg(512, 1.0);
  const auto r = weak_energy_sweep(weierstrass(0.5, 16, g), g.sample([](Scalar x) { return std::sin(x); }), tg, 64,
                                   kDyadic);
  CHECK(r.entries.back().energy_error < 1e-3);
  for (std::size_t i = 1; i < r.entries.size(); ++i)
    CHECK(r.entries[i].energy_error <= 1.1 * r.entries[i - 1].energy_error);
}

TEST_CASE("reduced norm of simple fields") {
  CHECK(reduced_norm(sampled_field(64, 64, 1.0, [](Scalar, Scalar) { return 0.0; }), 0.25) == 0.0);
  // D = x: sup |D| = pi, D_x = 1, and every Holder quotient vanishes.
  const Scalar affine = reduced_norm(sampled_field(64, 64, 1.0, [](Scalar, Scalar x) { return x; }), 0.25);
  CHECK(affine == doctest::Approx(kPi + 1).epsilon(1e-10));
  CHECK_THROWS_AS(reduced_norm(sampled_field(8, 8, 1.0, [](Scalar, Scalar x) { return x; }), 1.5), ParameterError);
}

TEST_CASE("property: reduced norm is absolutely homogeneous") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    Matrix v = Matrix::Random(65, 65);
    const Field d(TimeGrid(64, 1.0), SpaceGrid(64), v);
    const Scalar c = -3.5 + trial;
    const Field cd(TimeGrid(64, 1.0), SpaceGrid(64), c * v);
    CHECK(reduced_norm(cd, 0.25) == doctest::Approx(std::abs(c) * reduced_norm(d, 0.25)).epsilon(1e-12));
  }
}

TEST_CASE("parabolic holder estimate of a smooth field") {
  const Field u = sampled_field(256, 256, 1.0, [](Scalar t, Scalar x) { return std::exp(-t) * std::sin(x); });
  const auto r = estimate_parabolic_holder(u, 0.25);
  CHECK(r.space_exponent >= 1.9);
  CHECK(r.time_exponent >= 0.95);
  CHECK_THROWS_AS(estimate_parabolic_holder(u, 0.5), ParameterError);
  CHECK_THROWS_AS(estimate_parabolic_holder(u, -0.1), ParameterError);
  CHECK_THROWS_AS(estimate_parabolic_holder(sampled_field(32, 256, 1.0, [](Scalar, Scalar x) { return x; }), 0.0),
                  ResolutionError);
}

TEST_CASE("space regularity of a rough solution") {
  const SpaceGrid g(512);
  const TimeGrid tg(512, 1.0);
  const Field u = solve_classical_grp(weierstrass(0.5, 16, g), sine_initial(g), tg);
  const auto r = estimate_parabolic_holder(u, 0.25);
  CHECK(r.space_exponent >= 1.3);
  CHECK(r.space_exponent <= 1.7);
}

TEST_CASE("compensated data are smoother in time near zero") {
  const SpaceGrid g(512);
  const TimeGrid tg(512, 1.0);
  const auto w = weierstrass(0.5, 16, g);
  const TransformPair t = build_transform(w);
  Vector psi = g.sample([](Scalar x) {
    Scalar s = std::sin(x);
    for (int j = 1; j <= 11; ++j) s += 0.1 * std::pow(2.0, -2.5 * j) * std::sin(std::ldexp(1.0, j) * x);
    return s;
  });
  psi[0] = psi[g.n()] = 0;
  const auto generic = estimate_parabolic_holder(solve_classical_grp(w, sine_initial(g), tg), 0.0);
  const auto comp = estimate_parabolic_holder(solve_classical_grp(w, InitialCondition::compensated(psi), tg), 0.0);
  CHECK(comp.time_exponent >= 0.75);
  CHECK(comp.time_exponent > generic.time_exponent);
}

TEST_CASE("maximum principle examples") {
  const SpaceGrid g(512);
  const TimeGrid tg(512, 1.0);
  const auto zero = max_principle_check(constant_potential(0, g), sine_mode(1, g), tg);
  CHECK(zero.sup_ratio <= 1.0 + 1e-12);
  CHECK(zero.pass);
  CHECK(max_principle_check(constant_potential(5, g), sine_mode(3, g), tg).pass);
  CHECK(max_principle_check(sample_fbm(0.5, g, 7), sine_mode(1, g), tg).pass);
  CHECK_THROWS_AS(max_principle_check(constant_potential(0, g), Vector::Zero(g.size()), tg), DataError);
}

TEST_CASE("property: drift diffusion never amplifies the sup norm") {
  std::mt19937_64 rng(23);
  const SpaceGrid g(256);
  const TimeGrid tg(256, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const auto w = test::random_potential(rng, g);
    CAPTURE(describe(w.provenance()));
    CHECK(max_principle_check(w, test::random_initial(rng, g), tg).pass);
  }
}

TEST_CASE("worker count honours the environment cap") {
  CHECK(worker_count(4, 2) == 2);
  CHECK(worker_count(1, 10) == 1);
  CHECK(worker_count(0, 1) == 1);
  ::setenv("GRPHEAT_THREADS", "1", 1);
  CHECK(worker_count(8, 8) == 1);
  ::unsetenv("GRPHEAT_THREADS");
}

TEST_CASE("sweep csv layout") {
  ConvergenceReport r;
  r.entries.push_back({0.5, 0.1, 0.2, 0.3, 0.4, 0.0});
  std::ostringstream out;
  write_sweep_csv(out, r);
  CHECK(out.str() == "epsilon,sup_error,l2_error,energy_error\n0.5,0.20000000000000001,0.29999999999999999,0.40000000000000002\n");
}

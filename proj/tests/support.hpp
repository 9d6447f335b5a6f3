#pragma once

#include "grpheat/potential.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

namespace grpheat::test {

inline Scalar max_abs(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

inline Vector sqrt2pi_sin(int k, const SpaceGrid& g) {
  return g.sample([k](Scalar x) { return std::sqrt(2 / kPi) * std::sin(k * x); });
}

/// Draws a potential from one of the built-in families with random parameters.
inline PotentialPath random_potential(std::mt19937_64& rng, const SpaceGrid& g) {
  std::uniform_real_distribution<Scalar> unit(0.0, 1.0);
  switch (rng() % 4) {
    case 0: return constant_potential(8 * unit(rng) - 4, g);
    case 1: return weierstrass(0.2 + 0.7 * unit(rng), 1 + static_cast<int>(rng() % 16), g);
    case 2: return sample_fbm(0.2 + 0.7 * unit(rng), g, rng() % 1000);
    default: {
      const Scalar a = 4 * unit(rng) - 2, f = 1 + 5 * unit(rng);
      return analytic_potential("sin", [a, f](Scalar x) { return a * std::sin(f * x); }, g);
    }
  }
}

/// Smooth initial data with zero endpoints: a few random sine modes.
inline Vector random_initial(std::mt19937_64& rng, const SpaceGrid& g) {
  std::normal_distribution<Scalar> normal;
  Vector phi = Vector::Zero(g.size());
  for (int k = 1; k <= 4; ++k) {
    const Scalar c = normal(rng) / (k * k);
    phi += g.sample([k, c](Scalar x) { return c * std::sin(k * x); });
  }
  phi[0] = phi[g.n()] = 0;
  return phi;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("grpheat-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace grpheat::test

#pragma once

// Randomized finite models and catalog-wide sweeps that pair independent computations.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ellis/spaces.hpp"

namespace ellis {

/// A map on {0..n-1}, n uniform in [1, max_points]; a permutation when `invertible`.
CascadeModel random_finite_model(std::mt19937_64& rng, std::size_t max_points, bool invertible);

struct TheoremSuiteReport {
  std::size_t models = 0;
  std::size_t invertible = 0;
  std::size_t groups = 0;
  std::size_t multi_ideal = 0;
  std::size_t group_equivalence = 0;    // group <=> unique idempotent e <=> no proximal pair
  std::size_t unique_ideal_vs_proximal = 0;
  std::size_t ideal_isomorphism = 0;
  std::size_t power_decomposition = 0;
  std::size_t nakamura = 0;
  std::size_t distal_consequences = 0;
  std::size_t associativity = 0;
  std::vector<std::string> failures;    // first few, with the offending table
  std::size_t violations() const noexcept {
    return group_equivalence + unique_ideal_vs_proximal + ideal_isomorphism + power_decomposition + nakamura +
           distal_consequences + associativity;
  }
};

TheoremSuiteReport theorem_equivalence_suite(std::size_t count, std::size_t max_points, std::uint64_t seed);

struct RigiditySweepRow {
  std::string model;
  bool weakly_rigid = false;
  bool identity_isolated = true;
  bool agree = false;
  bool chain_ok = true;
  long long horizon = 0;
};

/// Weak rigidity of the whole sample against isolation of e, on every catalog model.
std::vector<RigiditySweepRow> catalog_rigidity_sweep(long long horizon, double tau);

struct ThetaSweepRow {
  std::string model;
  std::size_t base_size = 0;
  std::size_t hyper_size = 0;
  std::size_t hyper_envelope_size = 0;
  bool well_defined = false;
  bool surjective = false;
  bool injective = false;
  std::size_t homomorphism_violations = 0;
  bool induced_map_inducible = false;
};

/// Theta and inducibility of the induced map on every finite-exact catalog model.
std::vector<ThetaSweepRow> catalog_theta_sweep(std::size_t k, std::size_t budget = 250000);

}  // namespace ellis

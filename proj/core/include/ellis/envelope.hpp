#pragma once

// Enveloping semigroups of finite and sampled models. Finite-exact models get the
// literal iterate monoid; sampled models get a tolerance-clustered approximation
// built from iterates, tail limits and their composites.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ellis/hyperspace.hpp"
#include "ellis/spaces.hpp"

namespace ellis {

enum class Provenance { identity, iterate, limit, composite };
std::string_view to_string(Provenance p) noexcept;

/// One envelope element restricted to the sample.
struct MapSample {
  std::string name;
  Provenance provenance = Provenance::identity;
  long long exponent = 0;            // iterates: the representative power
  std::uint32_t left = 0, right = 0; // composites: left o right
  std::size_t cluster = 0;           // limits: cluster id
  std::vector<std::uint32_t> ids;    // snapped images; empty when not computed
  PointCloud raw;                    // coordinate images (approximate envelopes only)
  std::vector<long long> exponents;  // powers of f represented by this element
  double snap_error = 0.0;           // worst sup-distance of an absorbed power
};

enum class PowerRange { forward, two_sided };

struct Envelope {
  bool exact = true;
  std::shared_ptr<const CascadeModel> model;
  std::vector<MapSample> elements;
  std::uint32_t identity = 0;
  std::uint32_t generator = 0;
  // exact: f^{index+period} = f^{index}
  long long index = 0;
  long long period = 0;
  std::vector<std::vector<std::uint32_t>> table;   // table[a][b] = a o b
  std::vector<std::vector<float>> product_error;   // approximate only
  double tau = 0.0;
  long long horizon = 0;
  PowerRange range = PowerRange::forward;
  bool stabilized = true;
  double max_snap_error = 0.0;
  std::size_t limit_count = 0;
  std::map<long long, std::uint32_t> membership;   // power -> element, |power| <= horizon
  std::map<long long, double> identity_distance;   // power -> sup-distance to e
  std::vector<std::string> notes;

  std::size_t size() const noexcept { return elements.size(); }
  std::uint32_t compose(std::uint32_t a, std::uint32_t b) const { return table.at(a).at(b); }
  /// Element representing f^n, if n is in range.
  std::optional<std::uint32_t> element_of_power(long long n) const;
  /// Image of sample point x under element a, as coordinates.
  Point image(std::uint32_t a, std::uint32_t x) const;
  double sup_distance(std::uint32_t a, std::uint32_t b) const;
  /// Elements that are not identities of the form f^n (limits and composites).
  std::vector<std::uint32_t> non_iterates() const;
  std::vector<std::string> names() const;
  Json to_json(bool with_images = false) const;
};

/// The iterate monoid {f^0, ..., f^{i+p-1}} of a finite-exact model.
Envelope exact_envelope(const CascadeModel& model);
Envelope exact_envelope(std::shared_ptr<const CascadeModel> model);

struct ApproxOptions {
  long long horizon = 60;
  double tau = 1e-3;
  PowerRange range = PowerRange::forward;
  std::size_t max_elements = 4096;
  std::size_t min_witnesses = 3;
};

/// Tolerance-clustered envelope of a model observed on its sample.
Envelope approx_envelope(std::shared_ptr<const CascadeModel> model, const ApproxOptions& options);
Envelope approx_envelope(const CascadeModel& model, const ApproxOptions& options);

struct IsolationResult {
  bool isolated = true;
  std::optional<long long> witness;
  double closest = 0.0;  // smallest sup-distance to e seen
};

/// Smallest n in [1, horizon] with sup-distance(f^n, e) < tau.
IsolationResult identity_isolated(const Envelope& env, double tau, std::optional<long long> horizon = {});

struct PowerDecomposition {
  long long n = 0;
  std::size_t lhs_size = 0;
  std::size_t rhs_size = 0;
  std::size_t power_envelope_size = 0;
  bool equal = false;
};

/// E(X,f) against the union of f^r o E(X,f^n), r = 0..n-1; finite-exact models only.
PowerDecomposition envelope_power_decomposition(const CascadeModel& model, long long n);

struct ThetaReport {
  bool well_defined = true;
  bool surjective = false;
  bool injective = false;
  std::size_t homomorphism_violations = 0;
  std::size_t singleton_escapes = 0;
  std::size_t unmatched = 0;
  std::vector<std::optional<std::uint32_t>> theta;  // hyper element -> base element
  std::vector<std::pair<std::uint32_t, std::uint32_t>> violating_pairs;  // first few
};

/// Restricts each hyper-envelope element to singletons and maps it into the base envelope.
ThetaReport theta_check(const Envelope& base_env, const Envelope& hyper_env, const HyperCascadeModel& hyper);

struct InducibilityReport {
  bool singletons_ok = true;
  bool monotone_ok = true;
  bool minimal_ok = true;
  std::optional<std::uint32_t> smaller;  // an element strictly below, if any
};

/// Conditions for a map of the hyperspace to be induced: singletons to singletons,
/// monotone for inclusion, and minimal for pointwise inclusion among `others`.
InducibilityReport inducibility_check(const HyperCascadeModel& hyper, const std::vector<std::uint32_t>& alpha,
                                      const std::vector<std::vector<std::uint32_t>>& others = {});

struct StabilizationReport {
  std::vector<long long> horizons;
  std::vector<std::size_t> counts;
  std::vector<bool> stabilized;
  std::string verdict;  // stabilizing | growing | inconclusive
};

StabilizationReport stabilization_diagnostic(std::shared_ptr<const CascadeModel> model,
                                             const std::vector<long long>& horizons, double tau,
                                             PowerRange range = PowerRange::forward,
                                             std::size_t max_elements = 4096);

/// Text rendering of the composition table with element names.
std::string render_table(const Envelope& env);

}  // namespace ellis

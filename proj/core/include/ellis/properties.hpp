#pragma once

// Horizon-bounded property checks on sampled or finite cascades and on subshifts.
// Every verdict is relative to the horizon and tolerance it was computed with.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ellis/envelope.hpp"
#include "ellis/spaces.hpp"
#include "ellis/symbolic.hpp"

namespace ellis {

enum class Verdict { holds, fails, inconclusive };
std::string_view to_string(Verdict v) noexcept;

struct PropertyVerdict {
  std::string property;
  Verdict verdict = Verdict::inconclusive;
  long long horizon = 0;
  double tau = 0.0;
  Json witness = nullptr;  // witness when it holds, counterexample when it fails
  bool holds() const noexcept { return verdict == Verdict::holds; }
};

Json to_json(const PropertyVerdict& v);

struct OpenSet {
  enum class Kind { ball, points, cylinder };
  Kind kind = Kind::ball;
  PointId center;
  double radius = 0.0;
  std::vector<std::uint32_t> members;
  Word word;

  static OpenSet ball(PointId center, double radius);
  static OpenSet points(std::vector<std::uint32_t> ids);
  static OpenSet cylinder(Word w);
  std::string label() const;
};

/// Sample points inside U; throws empty-set when U misses the sample.
std::vector<std::uint32_t> resolve(const CascadeModel& model, const OpenSet& u);

/// Greedy net of balls of the given radius (default 4x resolution); singletons on finite models.
std::vector<OpenSet> default_cover(const CascadeModel& model, std::optional<double> radius = {});
/// Cylinders of all allowed words of length 1..max_len.
std::vector<OpenSet> cylinder_cover(const Subshift& shift, std::size_t max_len);

/// N(U,V) within [1, horizon]; exact on finite models, snapped raw images otherwise.
std::vector<long long> hitting_set(const CascadeModel& model, const OpenSet& u, const OpenSet& v, long long horizon);
std::vector<long long> hitting_set(const Subshift& shift, const OpenSet& u, const OpenSet& v, long long horizon);

struct TransitivityReport {
  long long horizon = 0;
  std::size_t cover_size = 0;
  std::vector<std::string> labels;
  std::vector<std::vector<std::vector<long long>>> hits;  // hits[u][v] = N(U,V)
  PropertyVerdict transitive;
  PropertyVerdict weakly_mixing;
  PropertyVerdict mixing;
  std::size_t run_length = 10;
  bool chain_ok = true;
};

TransitivityReport classify_transitivity(const CascadeModel& model, long long horizon,
                                         const std::vector<OpenSet>& cover, std::size_t run_length = 10);
TransitivityReport classify_transitivity(const Subshift& shift, long long horizon, std::size_t max_len,
                                         std::size_t run_length = 10);

struct StrongTransitivityReport {
  PropertyVerdict strongly_transitive;
  PropertyVerdict minimal;
  PropertyVerdict transitive;
  bool theorem_consistent = true;  // invertible models: strong transitivity <=> minimality
  bool chain_ok = true;            // strongly transitive => transitive
};

StrongTransitivityReport strong_transitivity_check(const CascadeModel& model, long long horizon,
                                                   const std::vector<OpenSet>& cover);

struct EquicontinuityReport {
  std::vector<double> eps;
  long long horizon = 0;
  std::vector<std::vector<std::uint32_t>> eq_points;  // per eps
  std::vector<std::uint32_t> equicontinuity_points;   // eq at every eps
  std::vector<double> separation;                     // per point, sup over neighbours and n
  double sensitivity = 0.0;                           // min over points of the separation
  PropertyVerdict almost_equicontinuous;
  PropertyVerdict sensitive;
  PropertyVerdict equicontinuous;  // every point is an equicontinuity point
};

EquicontinuityReport equicontinuity_scan(const CascadeModel& model, const std::vector<double>& eps,
                                         long long horizon, std::optional<std::vector<OpenSet>> cover = {});

struct HyperEquicontinuityReport {
  EquicontinuityReport base;
  EquicontinuityReport hyper;
  std::size_t hyper_size = 0;
  bool agree = false;
};

HyperEquicontinuityReport hyper_equicontinuity_crosscheck(const CascadeModel& base, std::size_t k,
                                                          const std::vector<double>& eps, long long horizon,
                                                          std::size_t budget = 250000);

struct RigidityReport {
  long long horizon = 0;
  double tau = 0.0;
  std::size_t tuple_size = 0;
  PropertyVerdict weakly_rigid;
  PropertyVerdict rigid;
  PropertyVerdict uniformly_rigid;
  bool chain_ok = true;
  double best_sample_sup = 0.0;
  double best_uniform_sup = 0.0;
};

/// tuple_size 0 tests the whole sample as a single tuple.
RigidityReport rigidity_battery(const CascadeModel& model, long long horizon, double tau, std::size_t tuple_size = 0,
                                std::size_t tuples = 64, std::uint64_t seed = 1);

struct PointRecurrence {
  bool recurrent = false;
  bool nonwandering = false;
  bool essentially_nonwandering = false;
  bool almost_periodic = false;
  std::size_t hits = 0;
  std::optional<long long> gap;
};

struct RecurrenceReport {
  long long horizon = 0;
  double tau = 0.0;
  std::vector<PointRecurrence> points;
  std::size_t recurrent = 0, nonwandering = 0, essentially_nonwandering = 0, almost_periodic = 0;
};

RecurrenceReport recurrence_report(const CascadeModel& model, long long horizon, double tau);

struct ElementContinuity {
  std::uint32_t element = 0;
  bool continuous = true;
  std::optional<std::pair<std::uint32_t, std::uint32_t>> jump;  // neighbouring points mapped far apart
  double jump_size = 0.0;
};

struct WapReport {
  std::vector<double> eps;
  std::vector<ElementContinuity> elements;
  bool all_elements_continuous = true;
  double worst_modulus = 0.0;  // largest image gap across neighbouring sample points
  bool stabilized = true;
};

/// Discrete continuity scan of the non-iterate elements (the cycle part for exact envelopes).
WapReport wap_proxy_check(const Envelope& env, const std::vector<double>& eps);

struct DistalSemiflowReport {
  bool distal = false;
  bool pointwise_almost_periodic = false;
  bool surjective = false;
  bool consequences_hold = true;
  std::optional<std::pair<std::uint32_t, std::uint32_t>> proximal_pair;
};

DistalSemiflowReport distal_semiflow_check(const CascadeModel& model);

}  // namespace ellis

#pragma once

// Finite semigroups given by composition tables: idempotents, minimal left ideals,
// the kernel and its groups, ideal isomorphisms and the proximal relation.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ellis/envelope.hpp"

namespace ellis {

enum class Validation { strict, report };

struct AssociativityReport {
  bool exhaustive = true;
  std::size_t triples_checked = 0;
  std::size_t violations = 0;
  std::optional<std::array<std::uint32_t, 3>> example;
};

class FiniteSemigroup {
 public:
  /// Strict validation throws on a non-closed or non-associative table.
  static FiniteSemigroup from_table(std::vector<std::vector<std::uint32_t>> table,
                                    std::optional<std::uint32_t> identity = {},
                                    std::optional<std::uint32_t> generator = {},
                                    Validation mode = Validation::strict,
                                    std::vector<std::string> names = {});
  /// Exact envelopes validate strictly, approximate ones in report mode.
  static FiniteSemigroup from_envelope(const Envelope& env);
  /// {size, table, identity, generator, names?}
  static FiniteSemigroup from_json(const Json& j, Validation mode = Validation::strict);

  std::size_t size() const noexcept { return table_.size(); }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const { return table_[a][b]; }
  const std::vector<std::vector<std::uint32_t>>& table() const noexcept { return table_; }
  std::optional<std::uint32_t> identity() const noexcept { return identity_; }
  std::optional<std::uint32_t> generator() const noexcept { return generator_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  Validation mode() const noexcept { return mode_; }
  const AssociativityReport& associativity() const noexcept { return assoc_; }
  std::string name(std::uint32_t a) const { return names_.at(a); }

  Json to_json() const;

 private:
  std::vector<std::vector<std::uint32_t>> table_;
  std::optional<std::uint32_t> identity_;
  std::optional<std::uint32_t> generator_;
  std::vector<std::string> names_;
  Validation mode_ = Validation::strict;
  AssociativityReport assoc_;
};

/// Exhaustive up to `exhaustive_limit` elements, otherwise a seeded sample of triples.
AssociativityReport check_associativity(const std::vector<std::vector<std::uint32_t>>& table,
                                        std::size_t exhaustive_limit = 64, std::size_t samples = 200000,
                                        std::uint64_t seed = 1);

std::vector<std::uint32_t> idempotents(const FiniteSemigroup& s);

/// S a, the principal left ideal generated by a (a included).
std::vector<std::uint32_t> left_ideal(const FiniteSemigroup& s, std::uint32_t a);

/// Inclusion-minimal principal left ideals, sorted, deduplicated.
std::vector<std::vector<std::uint32_t>> minimal_left_ideals(const FiniteSemigroup& s);

struct IdealGroup {
  std::uint32_t idempotent = 0;
  std::vector<std::uint32_t> members;  // vI
  bool is_group = false;
};

struct IdealDecomposition {
  std::vector<std::vector<std::uint32_t>> ideals;
  std::vector<std::vector<std::uint32_t>> idempotents_per_ideal;
  std::vector<std::vector<IdealGroup>> groups;
  std::vector<std::uint32_t> kernel;
  bool ideals_disjoint = true;
  bool every_ideal_has_idempotent = true;
  bool groups_partition_ideals = true;
  bool group_axioms_hold = true;
};

IdealDecomposition kernel_and_groups(const FiniteSemigroup& s);

struct IsomorphismReport {
  bool pairing_found = false;
  bool isomorphic = false;
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  std::string orientation;  // "uv=v,vu=u" or "uv=u,vu=v"
  bool bijective = false;
  bool intertwines = false;
  std::vector<std::string> violations;
};

/// Pairs an idempotent u of I with one v of K and tests right multiplication by v as a map I -> K.
IsomorphismReport ideal_isomorphism_check(const FiniteSemigroup& s, const std::vector<std::uint32_t>& i,
                                          const std::vector<std::uint32_t>& k);

struct GroupDistal {
  bool is_group = false;
  bool unique_idempotent_is_identity = false;
  bool agree = false;
};

GroupDistal is_group_distal(const FiniteSemigroup& s);

struct ProximalStructure {
  std::size_t sample_size = 0;
  std::size_t proximal_pairs = 0;             // unordered pairs x != y
  std::vector<std::pair<std::uint32_t, std::uint32_t>> examples;  // first few pairs
  std::vector<std::size_t> ideal_relation_pairs;  // |R_alpha| per minimal ideal
  bool is_equivalence = true;
  std::optional<std::array<std::uint32_t, 3>> transitivity_failure;
  std::size_t ideal_count = 0;
  bool unique_ideal = false;
  bool consistent = false;  // unique ideal <=> equivalence
  bool union_covers = false;  // P(X) is the union of the ideal relations
};

/// Pairs collapsed by some envelope element (within tau for approximate envelopes).
ProximalStructure proximal_structure(const Envelope& env, const FiniteSemigroup& s);

struct PeriodicElement {
  std::uint32_t element = 0;
  long long period = 0;
  std::vector<std::uint32_t> orbit;
  bool orbit_is_minimal_ideal = false;
};

struct PeriodicAnalysis {
  std::vector<PeriodicElement> periodic;
  long long common_period = 0;  // lcm of least periods
  bool periods_equal = true;
  bool orbits_are_minimal_ideals = true;
  bool count_bound_ok = true;  // |periodic| <= 2 * common period
};

/// Periodic points of left multiplication by the generator.
PeriodicAnalysis periodic_element_analysis(const FiniteSemigroup& s);

struct RecurrentIdempotent {
  std::uint32_t element = 0;
  std::optional<long long> witness;  // least n >= 1 with f^n u = u
  bool identity = false;
};

struct RecurrenceCheck {
  std::vector<RecurrentIdempotent> idempotents;
  std::size_t violations = 0;  // non-recurrent idempotents other than e
};

RecurrenceCheck recurrent_idempotent_check(const FiniteSemigroup& s);

}  // namespace ellis

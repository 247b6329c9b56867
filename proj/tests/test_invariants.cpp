// Seeded randomized checks of the structural statements, each against a brute-force
// computation on raw map tables.

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "ellis/algebra.hpp"
#include "ellis/corpus.hpp"
#include "ellis/envelope.hpp"
#include "ellis/properties.hpp"
#include "support.hpp"

using namespace ellis;

namespace {

constexpr int kModels = 600;

struct Oracle {
  std::vector<test::Table> monoid;
  std::set<std::pair<std::uint32_t, std::uint32_t>> proximal;  // x < y
  bool bijective = false;
};

Oracle oracle_for(const test::Table& f) {
  Oracle o;
  o.monoid = test::iterate_monoid(f);
  o.bijective = std::set<std::uint32_t>(f.begin(), f.end()).size() == f.size();
  for (const auto& g : o.monoid)
    for (std::uint32_t x = 0; x < f.size(); ++x)
      for (std::uint32_t y = x + 1; y < f.size(); ++y)
        if (g[x] == g[y]) o.proximal.insert({x, y});
  return o;
}

bool proximal_transitive(const Oracle& o, std::size_t n) {
  auto prox = [&](std::uint32_t x, std::uint32_t y) {
    return x == y || o.proximal.count({std::min(x, y), std::max(x, y)}) > 0;
  };
  for (std::uint32_t x = 0; x < n; ++x)
    for (std::uint32_t y = 0; y < n; ++y)
      for (std::uint32_t z = 0; z < n; ++z)
        if (prox(x, y) && prox(y, z) && !prox(x, z)) return false;
  return true;
}

std::size_t minimal_ideal_count(const std::vector<test::Table>& monoid) {
  std::set<std::set<test::Table>> ideals;
  for (const auto& a : monoid) {
    std::set<test::Table> l{a};
    for (const auto& b : monoid) l.insert(test::compose(b, a));
    ideals.insert(l);
  }
  std::size_t count = 0;
  for (const auto& l : ideals)
    count += std::none_of(ideals.begin(), ideals.end(), [&](const auto& m) {
      return m != l && std::includes(l.begin(), l.end(), m.begin(), m.end());
    });
  return count;
}

}  // namespace

TEST_CASE("envelope group, idempotents and proximality agree") {
  std::mt19937_64 rng(31);
  std::size_t groups = 0, multi = 0;
  for (int t = 0; t < kModels; ++t) {
    auto f = test::random_map(rng, 1 + rng() % 8, rng() % 2 == 0);
    CAPTURE(f);
    auto o = oracle_for(f);
    auto env = exact_envelope(finite_map_model("random", f));
    auto s = FiniteSemigroup::from_envelope(env);
    CHECK(s.associativity().violations == 0);
    auto gd = is_group_distal(s);
    CHECK(gd.is_group == o.bijective);
    CHECK(gd.unique_idempotent_is_identity == o.bijective);
    auto p = proximal_structure(env, s);
    CHECK(p.proximal_pairs == o.proximal.size());
    CHECK((p.proximal_pairs == 0) == gd.is_group);
    groups += gd.is_group;

    // a unique minimal left ideal exactly when proximality is transitive
    auto ideals = minimal_left_ideals(s);
    CHECK(ideals.size() == minimal_ideal_count(o.monoid));
    CHECK(p.is_equivalence == proximal_transitive(o, f.size()));
    CHECK((ideals.size() == 1) == p.is_equivalence);
    multi += ideals.size() > 1;

    // every pair of minimal ideals is isomorphic through an idempotent pairing
    for (const auto& i : ideals)
      for (const auto& k : ideals) {
        auto iso = ideal_isomorphism_check(s, i, k);
        CHECK(iso.isomorphic);
        CHECK(i.size() == k.size());
      }

    // idempotents exist, and every minimal ideal holds one
    CHECK_FALSE(idempotents(s).empty());
    auto kg = kernel_and_groups(s);
    CHECK(kg.every_ideal_has_idempotent);
    CHECK(kg.groups_partition_ideals);
    CHECK(kg.group_axioms_hold);

    auto pa = periodic_element_analysis(s);
    CHECK(pa.periods_equal);
    CHECK(pa.orbits_are_minimal_ideals);
    CHECK(recurrent_idempotent_check(s).violations == 0);

    auto d = distal_semiflow_check(finite_map_model("random", f));
    CHECK(d.distal == o.bijective);
    if (d.distal) CHECK((d.consequences_hold && d.pointwise_almost_periodic && d.surjective));
  }
  CHECK(groups > 50);
  CHECK(groups < kModels);
  // iterate monoids are commutative, so the kernel is the only minimal left ideal
  CHECK(multi == 0);
}

TEST_CASE("several minimal ideals on sampled envelopes") {
  ApproxOptions o;
  o.horizon = 80;
  o.tau = 1e-3;
  o.range = PowerRange::two_sided;
  for (auto [name, grid] : {std::pair{"square-map", "201"}, std::pair{"neg-cube", "401"}}) {
    CAPTURE(name);
    auto env = approx_envelope(load_example(name, {{"grid", grid}}), o);
    auto s = FiniteSemigroup::from_envelope(env);
    auto ideals = minimal_left_ideals(s);
    CHECK(ideals.size() > 1);
    auto p = proximal_structure(env, s);
    CHECK_FALSE(p.is_equivalence);
    CHECK(p.consistent);
    for (const auto& i : ideals)
      for (const auto& k : ideals) CHECK(ideal_isomorphism_check(s, i, k).isomorphic);
  }
}

TEST_CASE("theta and inducibility on random hyperspaces") {
  std::mt19937_64 rng(37);
  for (int t = 0; t < kModels; ++t) {
    auto f = test::random_map(rng, 1 + rng() % 6, rng() % 2 == 0);
    CAPTURE(f);
    auto base = finite_map_model("random", f);
    auto hyper = build_hyper_model(base, 2);
    auto henv = exact_envelope(hyper.model_ptr());
    auto th = theta_check(exact_envelope(base), henv, hyper);
    CHECK(th.well_defined);
    CHECK(th.surjective);
    CHECK(th.homomorphism_violations == 0);
    CHECK(th.singleton_escapes == 0);
    for (const auto& e : henv.elements) {
      auto rep = inducibility_check(hyper, e.ids);
      CHECK((rep.singletons_ok && rep.monotone_ok && rep.minimal_ok));
    }
  }
}

TEST_CASE("library corpus suite across seeds") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto r = theorem_equivalence_suite(500, 8, seed);
    CHECK(r.models == 500);
    CHECK(r.violations() == 0);
    CHECK(r.invertible > 0);
    CHECK(r.invertible < r.models);
    CHECK(r.multi_ideal == 0);
  }
  std::mt19937_64 a(5), b(5);
  for (int i = 0; i < 20; ++i) CHECK(random_finite_model(a, 8, false).table() == random_finite_model(b, 8, false).table());
}

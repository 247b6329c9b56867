#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "ellis/algebra.hpp"
#include "ellis/error.hpp"
#include "support.hpp"

using namespace ellis;

namespace {

using Ideal = std::vector<std::uint32_t>;

/// Inclusion-minimal sets S a u {a}, by brute force.
std::vector<Ideal> minimal_ideals_oracle(const FiniteSemigroup& s) {
  std::set<std::set<std::uint32_t>> all;
  for (std::uint32_t a = 0; a < s.size(); ++a) {
    std::set<std::uint32_t> l{a};
    for (std::uint32_t b = 0; b < s.size(); ++b) l.insert(s.mul(b, a));
    all.insert(l);
  }
  std::vector<Ideal> out;
  for (const auto& l : all) {
    bool minimal = std::none_of(all.begin(), all.end(), [&](const auto& m) {
      return m != l && std::includes(l.begin(), l.end(), m.begin(), m.end());
    });
    if (minimal) out.emplace_back(l.begin(), l.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint32_t find_name(const FiniteSemigroup& s, const std::string& n) {
  auto it = std::find(s.names().begin(), s.names().end(), n);
  REQUIRE(it != s.names().end());
  return static_cast<std::uint32_t>(it - s.names().begin());
}

Envelope square_envelope(std::size_t grid = 201) {
  ApproxOptions o;
  o.horizon = 60;
  o.tau = 1e-3;
  o.range = PowerRange::two_sided;
  return approx_envelope(load_example("square-map", {{"grid", std::to_string(grid)}}), o);
}

}  // namespace

TEST_CASE("table validation") {
  CHECK_THROWS_AS(FiniteSemigroup::from_table({}), Error);
  CHECK_THROWS_AS(FiniteSemigroup::from_table({{0, 1}, {1}}), Error);
  CHECK_THROWS_AS(FiniteSemigroup::from_table({{0, 2}, {1, 0}}), Error);
  std::vector<std::vector<std::uint32_t>> bad{{1, 0}, {0, 0}};
  try {
    FiniteSemigroup::from_table(bad);
    FAIL("expected invariant-violation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invariant_violation);
  }
  auto reported = FiniteSemigroup::from_table(bad, {}, {}, Validation::report);
  CHECK(reported.associativity().violations > 0);
  auto a = check_associativity(bad);
  CHECK(a.exhaustive);
  CHECK(a.triples_checked == 8);
  REQUIRE(a.example);
  auto [x, y, z] = *a.example;
  CHECK(bad[bad[x][y]][z] != bad[x][bad[y][z]]);
}

TEST_CASE("JSON round trip") {
  auto s = FiniteSemigroup::from_envelope(exact_envelope(finite_map_model("c3", {1, 2, 0})));
  auto back = FiniteSemigroup::from_json(s.to_json());
  CHECK(back.table() == s.table());
  CHECK(back.identity() == s.identity());
  CHECK(back.generator() == s.generator());
  CHECK(back.names() == s.names());
  CHECK_THROWS_AS(FiniteSemigroup::from_json({{"size", 2}}), Error);
}

TEST_CASE("idempotents") {
  auto c3 = FiniteSemigroup::from_envelope(exact_envelope(finite_map_model("c3", {1, 2, 0})));
  CHECK(idempotents(c3) == std::vector<std::uint32_t>{*c3.identity()});
  auto cst = FiniteSemigroup::from_envelope(exact_envelope(finite_map_model("const", {0, 0})));
  CHECK(idempotents(cst).size() == 2);
  auto sq = FiniteSemigroup::from_envelope(square_envelope());
  auto ids = idempotents(sq);
  CHECK(ids.size() == 3);
  for (auto u : ids) CHECK(sq.mul(u, u) == u);
}

TEST_CASE("minimal left ideals and the kernel") {
  auto c3 = FiniteSemigroup::from_envelope(exact_envelope(finite_map_model("c3", {1, 2, 0})));
  auto k3 = kernel_and_groups(c3);
  REQUIRE(k3.ideals.size() == 1);
  CHECK(k3.ideals[0].size() == 3);
  REQUIRE(k3.groups[0].size() == 1);
  CHECK(k3.groups[0][0].is_group);

  auto cst = FiniteSemigroup::from_envelope(exact_envelope(finite_map_model("const", {0, 0, 0})));
  auto kc = kernel_and_groups(cst);
  CHECK(kc.kernel == std::vector<std::uint32_t>{*cst.generator()});

  auto stack = FiniteSemigroup::from_envelope(exact_envelope(load_example("periodic-stack", {{"truncate", "10"}})));
  auto ks = kernel_and_groups(stack);
  CHECK(ks.kernel.size() == 3);
  REQUIRE(ks.groups.size() == 1);
  CHECK(ks.groups[0][0].is_group);
  CHECK(ks.groups[0][0].members.size() == 3);

  auto sq = FiniteSemigroup::from_envelope(square_envelope());
  auto ksq = kernel_and_groups(sq);
  CHECK(ksq.ideals.size() == 2);
  for (const auto& i : ksq.ideals) CHECK(i.size() == 1);
  CHECK(ksq.ideals_disjoint);
  CHECK(ksq.group_axioms_hold);

  ApproxOptions o;
  o.horizon = 80;
  o.tau = 1e-3;
  o.range = PowerRange::two_sided;
  auto neg = FiniteSemigroup::from_envelope(approx_envelope(load_example("neg-cube", {{"grid", "401"}}), o));
  CHECK(minimal_left_ideals(neg) == minimal_ideals_oracle(neg));
  auto kn = kernel_and_groups(neg);
  CHECK(kn.every_ideal_has_idempotent);
  CHECK(kn.groups_partition_ideals);
}

TEST_CASE("ideal isomorphism on the square map") {
  auto sq = FiniteSemigroup::from_envelope(square_envelope());
  auto ideals = minimal_left_ideals(sq);
  REQUIRE(ideals.size() == 2);
  auto rep = ideal_isomorphism_check(sq, ideals[0], ideals[1]);
  CHECK(rep.pairing_found);
  CHECK(rep.isomorphic);
  CHECK(rep.bijective);
  CHECK(rep.intertwines);
  CHECK(sq.mul(rep.u, rep.v) == rep.v);
  CHECK(sq.mul(rep.v, rep.u) == rep.u);
  auto self = ideal_isomorphism_check(sq, ideals[0], ideals[0]);
  CHECK(self.isomorphic);
}

TEST_CASE("group and distality") {
  auto c3 = FiniteSemigroup::from_envelope(exact_envelope(finite_map_model("c3", {1, 2, 0})));
  auto g = is_group_distal(c3);
  CHECK(g.is_group);
  CHECK(g.unique_idempotent_is_identity);
  auto sq = is_group_distal(FiniteSemigroup::from_envelope(square_envelope()));
  CHECK_FALSE(sq.is_group);
  CHECK_FALSE(sq.unique_idempotent_is_identity);
  CHECK(sq.agree);
}

TEST_CASE("proximal structure") {
  auto env = square_envelope(101);
  auto s = FiniteSemigroup::from_envelope(env);
  auto p = proximal_structure(env, s);
  // every pair except {0, 1} is collapsed by one of the two limits
  CHECK(p.proximal_pairs == 101 * 100 / 2 - 1);
  CHECK_FALSE(p.is_equivalence);
  CHECK(p.ideal_count == 2);
  CHECK(p.consistent);
  CHECK(p.union_covers);

  ApproxOptions o;
  o.horizon = 200;
  o.tau = 0.01;
  auto rot_env = approx_envelope(load_example("irrational-rotation", {{"grid", "72"}}), o);
  auto pr = proximal_structure(rot_env, FiniteSemigroup::from_envelope(rot_env));
  CHECK(pr.proximal_pairs == 0);
  CHECK(pr.is_equivalence);

  auto iso_env = exact_envelope(load_example("isolated-ones-subshift", {{"truncate", "8"}}));
  auto pi = proximal_structure(iso_env, FiniteSemigroup::from_envelope(iso_env));
  CHECK(pi.unique_ideal);
  CHECK(pi.is_equivalence);
  CHECK(pi.proximal_pairs == pi.sample_size * (pi.sample_size - 1) / 2);
}

TEST_CASE("periodic elements and recurrent idempotents") {
  for (int n : {2, 3, 5}) {
    CAPTURE(n);
    auto s = FiniteSemigroup::from_envelope(
        exact_envelope(load_example("periodic-stack", {{"n", std::to_string(n)}, {"truncate", "12"}})));
    auto pa = periodic_element_analysis(s);
    CHECK(pa.common_period == n);
    CHECK(pa.periods_equal);
    CHECK(pa.orbits_are_minimal_ideals);
    CHECK(pa.count_bound_ok);
    CHECK(pa.periodic.size() == static_cast<std::size_t>(n));
    auto rc = recurrent_idempotent_check(s);
    CHECK(rc.violations == 0);
    for (const auto& ri : rc.idempotents)
      if (!ri.identity) CHECK(ri.witness == n);
  }
  auto c3 = FiniteSemigroup::from_envelope(exact_envelope(finite_map_model("c3", {1, 2, 0})));
  CHECK(periodic_element_analysis(c3).periodic.size() == 3);

  auto sq = FiniteSemigroup::from_envelope(square_envelope());
  auto rq = recurrent_idempotent_check(sq);
  for (const auto& ri : rq.idempotents)
    if (!ri.identity) CHECK(ri.witness == 1);
  auto plain = FiniteSemigroup::from_table({{0, 1}, {1, 1}});
  CHECK_THROWS_AS(periodic_element_analysis(plain), Error);
}

TEST_CASE("oracle agreement on random envelopes") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 500; ++t) {
    auto f = test::random_map(rng, 1 + rng() % 8, rng() % 3 == 0);
    auto s = FiniteSemigroup::from_envelope(exact_envelope(finite_map_model("random", f)));
    CHECK(minimal_left_ideals(s) == minimal_ideals_oracle(s));
    for (std::uint32_t a = 0; a < s.size(); ++a) {
      auto l = left_ideal(s, a);
      CHECK(std::find(l.begin(), l.end(), a) != l.end());
    }
    CHECK(find_name(s, s.name(*s.generator())) == *s.generator());
  }
}

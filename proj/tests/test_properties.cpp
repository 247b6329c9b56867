#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "ellis/error.hpp"
#include "ellis/properties.hpp"
#include "support.hpp"

using namespace ellis;

namespace {

std::vector<long long> one_to(long long n) {
  std::vector<long long> out;
  for (long long i = 1; i <= n; ++i) out.push_back(i);
  return out;
}

PointId at(const CascadeModel& m, std::vector<double> c) {
  auto s = m.space().nearest(c);
  REQUIRE(s.error < 1e-9);
  return s.id;
}

}  // namespace

TEST_CASE("hitting sets") {
  auto id = load_example("identity", {{"n", "4"}});
  auto u = OpenSet::points({0});
  CHECK(hitting_set(id, u, u, 10) == one_to(10));
  CHECK(hitting_set(id, u, OpenSet::points({1}), 10).empty());

  auto full = Subshift::full_shift(2);
  CHECK(hitting_set(full, OpenSet::cylinder("1"), OpenSet::cylinder("0"), 10) == one_to(10));

  auto two = load_example("double-circle-rotation", {{"grid", "72"}});
  auto inner = OpenSet::ball(at(two, {1, 0}), 0.5);
  auto outer = OpenSet::ball(at(two, {2, 0}), 0.5);
  CHECK(hitting_set(two, inner, outer, 200).empty());
  CHECK_FALSE(hitting_set(two, inner, inner, 200).empty());

  CHECK_THROWS_AS(hitting_set(id, u, u, 0), Error);
  CHECK_THROWS_AS(resolve(id, OpenSet::points({})), Error);
}

TEST_CASE("transitivity classes") {
  auto id = load_example("identity", {{"n", "4"}});
  auto ti = classify_transitivity(id, 20, default_cover(id));
  CHECK(ti.transitive.verdict == Verdict::fails);
  CHECK(ti.chain_ok);

  auto c3 = finite_map_model("c3", {1, 2, 0});
  auto tc = classify_transitivity(c3, 30, default_cover(c3));
  CHECK(tc.transitive.holds());
  CHECK(tc.mixing.verdict == Verdict::fails);

  auto g = classify_transitivity(Subshift::golden_mean(), 50, 3);
  CHECK(g.mixing.holds());
  CHECK(g.weakly_mixing.holds());
  CHECK(g.transitive.holds());
  auto flip = classify_transitivity(Subshift::edge_graph("ab", {{0, 1}, {1, 0}}), 50, 2);
  CHECK(flip.transitive.holds());
  CHECK(flip.mixing.verdict == Verdict::fails);
}

TEST_CASE("strong transitivity") {
  auto c3 = finite_map_model("c3", {1, 2, 0});
  auto s = strong_transitivity_check(c3, 10, default_cover(c3));
  CHECK(s.strongly_transitive.holds());
  CHECK(s.minimal.holds());
  CHECK(s.theorem_consistent);
  auto sq = discretize(load_example("square-map", {{"grid", "21"}}));
  auto ss = strong_transitivity_check(sq, 50, default_cover(sq));
  CHECK(ss.strongly_transitive.verdict == Verdict::fails);
  CHECK(ss.chain_ok);
}

TEST_CASE("equicontinuity") {
  auto rot = load_example("irrational-rotation", {{"grid", "72"}});
  auto r = equicontinuity_scan(rot, {0.2}, 200);
  CHECK(r.equicontinuous.holds());
  CHECK(r.equicontinuity_points.size() == rot.size());

  auto shift = load_example("full-shift", {{"samples", "300"}});
  auto s = equicontinuity_scan(shift, {0.25}, 50);
  CHECK(s.equicontinuity_points.empty());
  CHECK(s.sensitive.holds());
  CHECK(s.sensitivity >= 0.5);

  CHECK_THROWS_AS(equicontinuity_scan(rot, {}, 10), Error);
}

TEST_CASE("rigidity") {
  auto rot = load_example("irrational-rotation", {{"grid", "360"}});
  auto r = rigidity_battery(rot, 1000, 0.05);
  CHECK(r.uniformly_rigid.holds());
  CHECK(r.rigid.holds());
  CHECK(r.weakly_rigid.holds());
  CHECK(r.chain_ok);
  CHECK(r.uniformly_rigid.witness.at("n") == 89);

  auto shift = load_example("full-shift", {{"samples", "500"}});
  auto s = rigidity_battery(shift, 500, 0.4);
  CHECK(s.weakly_rigid.verdict == Verdict::fails);
  CHECK(s.chain_ok);
  CHECK_THROWS_AS(rigidity_battery(rot, 0, 0.1), Error);
}

TEST_CASE("recurrence") {
  auto id = load_example("identity", {{"n", "5"}});
  auto r = recurrence_report(id, 20, 1e-9);
  CHECK(r.recurrent == 5);
  CHECK(r.almost_periodic == 5);
  CHECK(r.nonwandering == 5);
  for (const auto& p : r.points) CHECK(p.gap == 1);

  auto sq = load_example("square-map", {{"grid", "101"}});
  auto rs = recurrence_report(sq, 200, 1e-3);
  CHECK(rs.recurrent == 2);  // only the fixed points 0 and 1

  auto stack = load_example("periodic-stack", {{"n", "2"}, {"truncate", "10"}});
  auto rp = recurrence_report(stack, 100, 1e-9);
  CHECK(rp.recurrent == 2);  // the fibre at infinity
  CHECK(rp.almost_periodic == 2);
}

TEST_CASE("envelope continuity proxy") {
  ApproxOptions o;
  o.horizon = 60;
  o.tau = 1e-3;
  o.range = PowerRange::two_sided;
  auto sq = approx_envelope(load_example("square-map", {{"grid", "101"}}), o);
  auto w = wap_proxy_check(sq, {0.1});
  CHECK_FALSE(w.all_elements_continuous);
  const std::uint32_t one = static_cast<std::uint32_t>(sq.model->size() - 1);
  bool jump_at_one = false;
  for (const auto& e : w.elements)
    if (!e.continuous && e.jump && (e.jump->first == one || e.jump->second == one)) jump_at_one = true;
  CHECK(jump_at_one);

  ApproxOptions ro;
  ro.horizon = 200;
  ro.tau = 0.01;
  auto rot = approx_envelope(load_example("irrational-rotation", {{"grid", "72"}}), ro);
  CHECK(wap_proxy_check(rot, {0.2}).all_elements_continuous);

  auto iso = exact_envelope(load_example("isolated-ones-subshift", {{"truncate", "10"}}));
  CHECK(wap_proxy_check(iso, {0.1}).all_elements_continuous);
}

TEST_CASE("distal semiflows") {
  auto perm = distal_semiflow_check(finite_map_model("perm", {2, 0, 1, 4, 3}));
  CHECK(perm.distal);
  CHECK(perm.pointwise_almost_periodic);
  CHECK(perm.surjective);
  CHECK(perm.consequences_hold);
  auto collapse = distal_semiflow_check(finite_map_model("collapse", {0, 0}));
  CHECK_FALSE(collapse.distal);
  REQUIRE(collapse.proximal_pair);
  CHECK(collapse.proximal_pair->first != collapse.proximal_pair->second);
}

TEST_CASE("random finite models: verdict chains and theorem consistency") {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng() % 7;
    auto f = test::random_map(rng, n, rng() % 2 == 0);
    const bool invertible = std::set<std::uint32_t>(f.begin(), f.end()).size() == n;
    auto m = finite_map_model("random", f);
    auto cover = default_cover(m);
    const long long horizon = static_cast<long long>(4 * n);
    auto st = strong_transitivity_check(m, horizon, cover);
    CHECK(st.chain_ok);
    if (invertible) {
      CHECK(st.theorem_consistent);
      // a permutation is minimal iff the orbit of 0 is everything
      std::set<std::uint32_t> orbit;
      for (std::uint32_t x = 0; orbit.insert(x).second; x = f[x]) {
      }
      bool single_cycle = orbit.size() == n;
      CHECK(st.minimal.holds() == single_cycle);
    }
    auto tr = classify_transitivity(m, horizon, cover);
    CHECK(tr.chain_ok);
    // hitting sets only grow with the horizon
    auto longer = classify_transitivity(m, 2 * horizon, cover);
    for (std::size_t u = 0; u < tr.hits.size(); ++u)
      for (std::size_t v = 0; v < tr.hits[u].size(); ++v) {
        const auto& a = tr.hits[u][v];
        const auto& b = longer.hits[u][v];
        CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
      }
    auto d = distal_semiflow_check(m);
    CHECK(d.distal == invertible);
    if (d.distal) CHECK(d.consequences_hold);
  }
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "ellis/error.hpp"
#include "ellis/hyperspace.hpp"
#include "support.hpp"

using namespace ellis;

namespace {

PointId at(const CascadeModel& m, double x) {
  auto s = m.space().nearest(std::vector<double>{x});
  REQUIRE(s.error < 1e-12);
  return s.id;
}

/// max of the two directed sup-inf distances, by brute force.
double hausdorff_oracle(const MetricSpaceModel& s, const std::vector<std::uint32_t>& a,
                        const std::vector<std::uint32_t>& b) {
  auto directed = [&](const auto& p, const auto& q) {
    double worst = 0.0;
    for (auto x : p) {
      double best = INFINITY;
      for (auto y : q) best = std::min(best, s.distance(PointId{x}, PointId{y}));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

std::size_t binomial_sum(std::size_t n, std::size_t k) {
  std::size_t total = 0;
  for (std::size_t j = 1; j <= k; ++j) {
    std::size_t c = 1;
    for (std::size_t i = 0; i < j; ++i) c = c * (n - i) / (i + 1);
    total += c;
  }
  return total;
}

}  // namespace

TEST_CASE("Hausdorff distance on a grid") {
  auto m = load_example("square-map", {{"grid", "11"}});
  const auto& s = m.space();
  auto a = HyperPoint::canonical({at(m, 0).value, at(m, 1).value});
  auto b = HyperPoint::canonical({at(m, 0).value, at(m, 0.5).value, at(m, 1).value});
  CHECK(hausdorff_distance(s, a, b) == doctest::Approx(0.5));
  CHECK(hausdorff_distance(s, a, b) == doctest::Approx(hausdorff_oracle(s, a.members, b.members)));
  CHECK(hausdorff_distance(s, a, a) == 0.0);
  CHECK_THROWS_AS(hausdorff_distance(s, a, HyperPoint{}), Error);
}

TEST_CASE("Hausdorff metric: oracle agreement, triangle inequality, singleton isometry") {
  auto m = load_example("square-map", {{"grid", "6"}});
  auto h = build_hyper_model(m, 2);
  REQUIRE(h.size() == 21);
  const auto& pts = h.points();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) {
      double dij = hausdorff_distance(m.space(), pts[i], pts[j]);
      CHECK(dij == doctest::Approx(hausdorff_oracle(m.space(), pts[i].members, pts[j].members)));
      CHECK(h.model().metric(PointId{static_cast<std::uint32_t>(i)}, PointId{static_cast<std::uint32_t>(j)}) ==
            doctest::Approx(dij));
      for (std::size_t k = 0; k < pts.size(); ++k)
        CHECK(hausdorff_distance(m.space(), pts[i], pts[k]) <=
              dij + hausdorff_distance(m.space(), pts[j], pts[k]) + 1e-12);
    }
  for (std::uint32_t x = 0; x < m.size(); ++x)
    for (std::uint32_t y = 0; y < m.size(); ++y)
      CHECK(hausdorff_distance(m.space(), HyperPoint{{x}}, HyperPoint{{y}}) ==
            doctest::Approx(m.metric(PointId{x}, PointId{y})));
}

TEST_CASE("hyper model sizes and layout") {
  auto three = finite_map_model("three", {1, 2, 0});
  auto h3 = build_hyper_model(three, 3);
  CHECK(h3.size() == 7);
  for (std::uint32_t x = 0; x < 3; ++x) CHECK(h3.points()[h3.singleton(x)] == HyperPoint{{x}});

  auto id = load_example("identity", {{"n", "4"}});
  auto hi = build_hyper_model(id, 2);
  CHECK(hi.size() == 10);
  for (std::uint32_t a = 0; a < hi.size(); ++a) CHECK(hi.model().table()[a] == a);

  for (std::size_t n : {3u, 7u, 12u})
    for (std::size_t k : {1u, 2u, 3u}) CHECK(bounded_subset_count(n, k) == binomial_sum(n, k));

  auto sq = load_example("square-map", {{"grid", "11"}});
  CHECK(build_hyper_model(sq, 2).size() == 66);
  CHECK_THROWS_AS(build_hyper_model(sq, 3, 100), Error);
  try {
    build_hyper_model(sq, 0);
    FAIL("expected invalid-parameter");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_parameter);
  }
}

TEST_CASE("induced map") {
  auto sq = load_example("square-map", {{"grid", "11"}});
  auto h = build_hyper_model(sq, 2);
  std::uint32_t zero = at(sq, 0).value, one = at(sq, 1).value;
  auto both = HyperPoint::canonical({zero, one});
  CHECK(h.induced_step(both) == both);
  // singletons go to singletons of the base image
  for (std::uint32_t x = 0; x < sq.size(); ++x)
    CHECK(h.induced_step(HyperPoint{{x}}) == HyperPoint{{sq.table()[x]}});
  // every orbit of f* ends in {0}, {1} or {0,1}
  std::set<std::uint32_t> ends;
  const auto& t = h.model().table();
  for (std::uint32_t a = 0; a < h.size(); ++a) {
    std::uint32_t b = a;
    for (int i = 0; i < 200; ++i) b = t[b];
    ends.insert(b);
  }
  std::set<std::uint32_t> want{*h.find(HyperPoint{{zero}}), *h.find(HyperPoint{{one}}), *h.find(both)};
  CHECK(std::includes(want.begin(), want.end(), ends.begin(), ends.end()));

  auto p2 = load_example("periodic-stack", {{"n", "2"}, {"truncate", "5"}});
  auto hp = build_hyper_model(p2, 1);
  for (std::uint32_t x = 0; x < p2.size(); ++x)
    CHECK(hp.induced_step(HyperPoint{{x}}).members == std::vector<std::uint32_t>{p2.table()[x]});
}

TEST_CASE("inclusion is preserved along induced orbits") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 500; ++t) {
    auto f = test::random_map(rng, 2 + rng() % 7, rng() % 2 == 0);
    auto m = finite_map_model("random", f);
    auto h = build_hyper_model(m, 3);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(h.size() - 1));
    auto a = h.points()[pick(rng)], b = h.points()[pick(rng)];
    std::vector<std::uint32_t> u = a.members;
    u.insert(u.end(), b.members.begin(), b.members.end());
    auto big = HyperPoint::canonical(u);
    if (big.members.size() > 3) continue;
    for (int i = 0; i < 10; ++i) {
      CHECK(a.subset_of(big));
      a = h.induced_step(a);
      big = h.induced_step(big);
    }
  }
}

TEST_CASE("Vietoris membership") {
  auto m = load_example("square-map", {{"grid", "11"}});
  std::uint32_t zero = at(m, 0).value, half = at(m, 0.5).value, one = at(m, 1).value;
  std::vector<Ball> basis{{PointId{zero}, 0.15}, {PointId{one}, 0.15}};
  CHECK(vietoris_member(m.space(), HyperPoint::canonical({zero, one}), basis));
  CHECK_FALSE(vietoris_member(m.space(), HyperPoint{{zero}}, basis));  // misses the second set
  CHECK_FALSE(vietoris_member(m.space(), HyperPoint::canonical({zero, half, one}), basis));  // 0.5 outside
  CHECK(vietoris_member(m.space(), HyperPoint::canonical({zero, at(m, 0.1).value, one}), basis));
  try {
    vietoris_member(m.space(), HyperPoint{{zero}}, {});
    FAIL("expected empty-basis");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::empty_basis);
  }
}

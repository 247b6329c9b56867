#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "ellis/error.hpp"
#include "ellis/spaces.hpp"
#include "support.hpp"

using namespace ellis;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PointId locate(const CascadeModel& m, std::initializer_list<double> c) {
  std::vector<double> p(c);
  auto s = m.space().nearest(p);
  REQUIRE(s.error == 0.0);
  return s.id;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::invariant_violation;
}

}  // namespace

TEST_CASE("square-map step and orbit") {
  auto m = load_example("square-map", {{"grid", "1001"}});
  CHECK(m.size() == 1001);
  CHECK_FALSE(m.finite_exact());
  auto half = locate(m, {0.5});
  auto r = m.step(half);
  CHECK(r.raw[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(m.space().point(r.snapped)[0] == doctest::Approx(0.25));

  auto seg = m.orbit_segment(locate(m, {0.9}), 0, 3);
  REQUIRE(seg.size() == 4);
  const double want[] = {0.9, 0.81, 0.6561, 0.43046721};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::fabs(seg[i].raw[0] - want[i]) < 1e-12);
    CHECK(seg[i].snap_error <= 0.0005 + 1e-12);
  }
}

TEST_CASE("identity orbit is constant") {
  auto m = load_example("identity", {{"n", "5"}});
  CHECK(m.finite_exact());
  CHECK(m.invertible());
  for (std::uint32_t x = 0; x < 5; ++x)
    for (const auto& s : m.orbit_segment(PointId{x}, -3, 3)) CHECK(s.snapped.value == x);
}

TEST_CASE("periodic-stack steps") {
  auto m3 = load_example("periodic-stack", {{"n", "3"}, {"truncate", "50"}});
  CHECK(m3.size() == 3 * 102);
  CHECK(m3.step(locate(m3, {3, 0, 1})).snapped == locate(m3, {3, 1, 2}));
  CHECK(m3.step(locate(m3, {3, 0, 3})).snapped == locate(m3, {3, 1, 1}));
  CHECK(m3.step(locate(m3, {3, kInf, 2})).snapped == locate(m3, {3, kInf, 3}));

  auto m2 = load_example("periodic-stack", {{"n", "2"}, {"truncate", "50"}});
  auto seg = m2.orbit_segment(locate(m2, {2, 0, 1}), 0, 2);
  CHECK(seg[0].snapped == locate(m2, {2, 0, 1}));
  CHECK(seg[1].snapped == locate(m2, {2, 1, 2}));
  CHECK(seg[2].snapped == locate(m2, {2, 2, 1}));
}

TEST_CASE("circle metric") {
  auto m = load_example("irrational-rotation", {{"grid", "360"}});
  auto a = locate(m, {0.0});
  auto b = m.space().nearest(std::vector<double>{std::numbers::pi}).id;
  CHECK(m.metric(a, b) == doctest::Approx(std::numbers::pi).epsilon(1e-12));
  CHECK(m.metric(a, a) == 0.0);
}

TEST_CASE("shift window metric") {
  auto m = load_example("full-shift", {{"samples", "4"}});
  const double s = m.space().point(PointId{0})[0];
  const double nan = std::nan("");
  auto d = [&](double flip) {
    std::vector<double> a{s, 0, nan}, b{s, 0, flip};
    return m.space().distance(a, b);
  };
  // a flip at position p leaves agreement on [-(|p|-1), |p|-1]
  CHECK(d(0) == 1.0);
  CHECK(d(1) == 0.5);
  CHECK(d(-1) == 0.5);
  CHECK(d(3) == 0.125);
  CHECK(d(-5) == std::ldexp(1.0, -5));
  std::vector<double> a{s, 0, nan};
  CHECK(m.space().distance(a, a) == 0.0);
  auto img = m.apply(a, 1);
  CHECK(img[0] == s);
  CHECK(img[1] == 1.0);
}

TEST_CASE("omega-limit estimates") {
  auto sq = load_example("square-map", {{"grid", "1001"}});
  auto w = sq.omega_limit_estimate(locate(sq, {0.5}), 200, 1e-6);
  REQUIRE(w.size() == 1);
  CHECK(sq.space().point(w[0])[0] == 0.0);

  auto id = load_example("identity", {{"n", "4"}});
  auto wi = id.omega_limit_estimate(PointId{2}, 50, 1e-9);
  REQUIRE(wi.size() == 1);
  CHECK(wi[0].value == 2);

  auto rot = load_example("irrational-rotation", {{"grid", "360"}});
  auto spacing = 2 * std::numbers::pi / 360;
  CHECK(rot.omega_limit_estimate(PointId{0}, 10000, spacing).size() == 360);
}

TEST_CASE("invalid parameters and names") {
  CHECK(code_of([] { load_example("square-map", {{"grid", "1"}}); }) == ErrorCode::invalid_parameter);
  CHECK(code_of([] { load_example("square-map", {{"grdi", "10"}}); }) == ErrorCode::invalid_parameter);
  CHECK(code_of([] { load_example("no-such-model"); }) == ErrorCode::unknown_name);
  auto fm = finite_map_model("collapse", {0, 0});
  CHECK_FALSE(fm.invertible());
  CHECK(code_of([&] { fm.orbit_segment(PointId{1}, -1, 0); }) == ErrorCode::negative_power_on_noninvertible);
  CHECK(code_of([&] { fm.step(PointId{7}); }) == ErrorCode::out_of_range);
}

TEST_CASE("catalog models load deterministically") {
  for (const auto& e : catalog()) {
    CAPTURE(e.name);
    auto a = load_example(e.name);
    auto b = load_example(e.name);
    CHECK(to_json(a) == to_json(b));
    CHECK(a.table() == b.table());
    CHECK(a.size() > 0);
  }
}

TEST_CASE("metric axioms on catalog samples") {
  std::mt19937_64 rng(7);
  for (const auto& e : catalog()) {
    CAPTURE(e.name);
    auto m = load_example(e.name);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(m.size() - 1));
    for (int t = 0; t < 300; ++t) {
      PointId x{pick(rng)}, y{pick(rng)}, z{pick(rng)};
      double xy = m.metric(x, y), yx = m.metric(y, x);
      CHECK(xy == yx);
      CHECK(m.metric(x, x) == 0.0);
      CHECK(xy >= 0.0);
      if (x != y) CHECK(xy > 0.0);
      CHECK(m.metric(x, z) <= xy + m.metric(y, z) + 1e-12);
    }
  }
}

TEST_CASE("invertible models: step then inverse is the identity") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 500; ++t) {
    auto table = test::random_map(rng, 1 + rng() % 9, true);
    auto m = finite_map_model("perm", table);
    REQUIRE(m.invertible());
    const auto& inv = *m.inverse_table();
    for (std::uint32_t x = 0; x < table.size(); ++x) {
      CHECK(inv[table[x]] == x);
      CHECK(table[inv[x]] == x);
    }
  }
  auto rot = load_example("irrational-rotation", {{"grid", "360"}});
  for (std::uint32_t x = 0; x < rot.size(); x += 17) {
    auto p = rot.space().point(PointId{x});
    auto back = rot.apply(rot.apply(p, 5), -5);
    CHECK(rot.space().distance(p, back) < 1e-9);
  }
}

TEST_CASE("finite orbits follow the table and omega-limits are cycles") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 500; ++t) {
    auto table = test::random_map(rng, 1 + rng() % 12, rng() % 2 == 0);
    auto m = finite_map_model("random", table);
    auto cycles = test::cycle_points(table);
    for (std::uint32_t x = 0; x < table.size(); ++x) {
      auto seg = m.orbit_segment(PointId{x}, 0, 8);
      for (std::size_t i = 0; i + 1 < seg.size(); ++i) CHECK(seg[i + 1].snapped.value == table[seg[i].snapped.value]);
      // omega(x) is the cycle reached from x
      std::set<std::uint32_t> want;
      std::uint32_t y = x;
      for (std::size_t k = 0; k < table.size(); ++k) y = table[y];
      std::uint32_t z = y;
      do {
        want.insert(z);
        z = table[z];
      } while (z != y);
      std::set<std::uint32_t> got;
      for (auto p : m.omega_limit_estimate(PointId{x}, 64, 0.5)) got.insert(p.value);
      CHECK(got == want);
      for (auto p : want) CHECK(cycles.count(p));
    }
  }
}

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "ellis/envelope.hpp"
#include "ellis/error.hpp"
#include "support.hpp"

using namespace ellis;

namespace {

std::set<test::Table> element_maps(const Envelope& env) {
  std::set<test::Table> out;
  for (const auto& e : env.elements) out.insert(e.ids);
  return out;
}

/// E(f) = union of f^r o E(f^n), computed on raw tables.
bool power_decomposition_oracle(const test::Table& f, long long n) {
  auto lhs = test::iterate_monoid(f);
  test::Table fn = test::identity_map(f.size());
  for (long long k = 0; k < n; ++k) fn = test::compose(f, fn);
  std::set<test::Table> rhs;
  for (auto g : test::iterate_monoid(fn))
    for (long long r = 0; r < n; ++r) {
      rhs.insert(g);
      g = test::compose(f, g);
    }
  return std::set<test::Table>(lhs.begin(), lhs.end()) == rhs;
}

/// Smallest n in [1, horizon] with 2*pi*||n alpha|| < tau.
long long rotation_return(double alpha, double tau, long long horizon) {
  for (long long n = 1; n <= horizon; ++n) {
    double frac = n * alpha - std::floor(n * alpha);
    if (2 * std::numbers::pi * std::min(frac, 1 - frac) < tau) return n;
  }
  return 0;
}

}  // namespace

TEST_CASE("exact envelopes match the iterate monoid") {
  auto constant = exact_envelope(finite_map_model("const", {0, 0, 0}));
  CHECK(constant.size() == 2);
  CHECK(constant.compose(constant.generator, constant.generator) == constant.generator);

  auto cycle = exact_envelope(finite_map_model("c3", {1, 2, 0}));
  CHECK(cycle.size() == 3);
  CHECK(cycle.period == 3);
  CHECK(cycle.index == 0);

  auto tail = exact_envelope(finite_map_model("tail", {1, 2, 3, 2}));
  CHECK(tail.index == 2);
  CHECK(tail.period == 2);
  CHECK(tail.size() == 4);

  std::mt19937_64 rng(17);
  for (int t = 0; t < 500; ++t) {
    auto f = test::random_map(rng, 1 + rng() % 8, rng() % 3 == 0);
    auto env = exact_envelope(finite_map_model("random", f));
    auto monoid = test::iterate_monoid(f);
    auto [index, period] = test::index_period(f);
    REQUIRE(env.size() == monoid.size());
    CHECK(element_maps(env) == std::set<test::Table>(monoid.begin(), monoid.end()));
    CHECK(env.index == index);
    CHECK(env.period == period);
    for (std::size_t k = 0; k < monoid.size(); ++k) CHECK(env.elements[*env.element_of_power(k)].ids == monoid[k]);
    // table[a][b] = a o b
    for (std::uint32_t a = 0; a < env.size(); ++a)
      for (std::uint32_t b = 0; b < env.size(); ++b)
        CHECK(env.elements[env.compose(a, b)].ids == test::compose(env.elements[a].ids, env.elements[b].ids));
  }
}

TEST_CASE("exact envelopes refuse sampled models") {
  try {
    exact_envelope(load_example("square-map", {{"grid", "11"}}));
    FAIL("expected invalid-parameter");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_parameter);
  }
  CHECK(exact_envelope(discretize(load_example("square-map", {{"grid", "11"}}))).size() > 1);
}

TEST_CASE("approximate envelope of the square map") {
  auto model = std::make_shared<const CascadeModel>(load_example("square-map", {{"grid", "1001"}}));
  ApproxOptions o;
  o.horizon = 60;
  o.tau = 1e-3;
  auto forward = approx_envelope(model, o);
  CHECK(forward.limit_count == 1);  // only 0 off 1; the other limit needs backward powers
  o.range = PowerRange::two_sided;
  auto env = approx_envelope(model, o);
  CHECK(env.limit_count == 2);
  CHECK(env.stabilized);
  // distinct elements are more than tau apart
  for (std::uint32_t a = 0; a < env.size(); ++a)
    for (std::uint32_t b = a + 1; b < env.size(); ++b) CHECK(env.sup_distance(a, b) > o.tau);
  for (auto a : env.non_iterates()) CHECK(env.compose(env.generator, a) == a);
  CHECK_THROWS_AS(approx_envelope(model, ApproxOptions{0, 1e-3}), Error);
  CHECK_THROWS_AS(approx_envelope(model, ApproxOptions{10, 0.0}), Error);
  ApproxOptions two;
  two.range = PowerRange::two_sided;
  CHECK_THROWS_AS(approx_envelope(finite_map_model("collapse", {0, 0}), two), Error);
}

TEST_CASE("approximate envelope of the identity is trivial") {
  auto env = approx_envelope(load_example("identity", {{"n", "6"}}), ApproxOptions{});
  CHECK(env.size() == 1);
  CHECK(env.identity == env.generator);
}

TEST_CASE("identity isolation") {
  auto id = approx_envelope(load_example("identity", {{"n", "3"}}), ApproxOptions{});
  auto r = identity_isolated(id, 1e-3);
  CHECK_FALSE(r.isolated);
  CHECK(r.witness == 1);

  const double alpha = 0.6180339887498949;
  ApproxOptions o;
  o.horizon = 1000;
  o.tau = 0.05;
  auto rot = approx_envelope(load_example("irrational-rotation", {{"grid", "360"}}), o);
  auto rr = identity_isolated(rot, 0.05);
  CHECK_FALSE(rr.isolated);
  CHECK(rr.witness == rotation_return(alpha, 0.05, 1000));
  CHECK(rr.witness == 89);

  auto fixed_free = approx_envelope(load_example("square-map", {{"grid", "101"}}), ApproxOptions{60, 1e-3});
  CHECK(identity_isolated(fixed_free, 1e-3).isolated);
}

TEST_CASE("power decomposition") {
  CHECK(envelope_power_decomposition(finite_map_model("c3", {1, 2, 0}), 3).equal);
  CHECK(envelope_power_decomposition(finite_map_model("const", {0, 0}), 2).equal);
  std::mt19937_64 rng(19);
  for (int t = 0; t < 500; ++t) {
    auto f = test::random_map(rng, 1 + rng() % 8, rng() % 2 == 0);
    for (long long n : {2LL, 3LL}) {
      auto r = envelope_power_decomposition(finite_map_model("random", f), n);
      CHECK(r.equal == power_decomposition_oracle(f, n));
      CHECK(r.equal);
    }
  }
  CHECK_THROWS_AS(envelope_power_decomposition(load_example("square-map", {{"grid", "11"}}), 2), Error);
}

TEST_CASE("theta and inducibility") {
  auto id = load_example("identity", {{"n", "3"}});
  auto hid = build_hyper_model(id, 2);
  auto th = theta_check(exact_envelope(id), exact_envelope(hid.model_ptr()), hid);
  CHECK(th.well_defined);
  CHECK(th.surjective);
  CHECK(th.injective);
  CHECK(th.homomorphism_violations == 0);

  auto iso = load_example("isolated-ones-subshift", {{"truncate", "6"}});
  auto hiso = build_hyper_model(iso, 2);
  auto ti = theta_check(exact_envelope(iso), exact_envelope(hiso.model_ptr()), hiso);
  CHECK(ti.injective);
  CHECK(ti.homomorphism_violations == 0);

  auto sq = discretize(load_example("square-map", {{"grid", "11"}}));
  auto hsq = build_hyper_model(sq, 2);
  auto hsq_env = exact_envelope(hsq.model_ptr());
  auto ts = theta_check(exact_envelope(sq), hsq_env, hsq);
  CHECK(ts.well_defined);
  CHECK(ts.surjective);
  CHECK(ts.homomorphism_violations == 0);

  auto induced = inducibility_check(hid, hid.model().table());
  CHECK((induced.singletons_ok && induced.monotone_ok && induced.minimal_ok));
  for (const auto& e : hsq_env.elements) {
    auto rep = inducibility_check(hsq, e.ids);
    CHECK((rep.singletons_ok && rep.monotone_ok));
  }
  // a map sending the singleton {0} to {0,1} is not induced
  auto alpha = hid.model().table();
  alpha[hid.singleton(0)] = *hid.find(HyperPoint{{0, 1}});
  CHECK_FALSE(inducibility_check(hid, alpha).singletons_ok);
  alpha.pop_back();
  CHECK_THROWS_AS(inducibility_check(hid, alpha), Error);
}

TEST_CASE("stabilization diagnostic") {
  auto sq = std::make_shared<const CascadeModel>(load_example("square-map", {{"grid", "1001"}}));
  auto s = stabilization_diagnostic(sq, {20, 40, 60}, 1e-3);
  CHECK(s.verdict == "stabilizing");
  auto id = std::make_shared<const CascadeModel>(load_example("identity", {{"n", "4"}}));
  auto si = stabilization_diagnostic(id, {10, 20, 40}, 1e-3);
  CHECK(si.verdict == "stabilizing");
  for (auto c : si.counts) CHECK(c == 1);
  auto shift = std::make_shared<const CascadeModel>(load_example("full-shift", {{"samples", "500"}}));
  CHECK(stabilization_diagnostic(shift, {50, 100, 200}, 0.4).verdict == "growing");
  CHECK_THROWS_AS(stabilization_diagnostic(id, {20, 10}, 1e-3), Error);
}

TEST_CASE("envelope rendering and serialization") {
  auto env = exact_envelope(finite_map_model("c3", {1, 2, 0}));
  auto text = render_table(env);
  for (const auto& n : env.names()) CHECK(text.find(n) != std::string::npos);
  auto j = env.to_json();
  CHECK(j.at("size") == 3);
  CHECK(j.at("exact") == true);
}

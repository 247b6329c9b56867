#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "ellis/error.hpp"
#include "ellis/symbolic.hpp"

using namespace ellis;

namespace {

std::vector<Word> all_words(const std::string& alphabet, std::size_t n) {
  std::vector<Word> out{""};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Word> next;
    for (const auto& w : out)
      for (char a : alphabet) next.push_back(w + a);
    out = std::move(next);
  }
  return out;
}

Count brute_count(const std::string& alphabet, std::size_t n, const std::function<bool(const Word&)>& allowed) {
  Count c = 0;
  for (const auto& w : all_words(alphabet, n)) c += allowed(w);
  return c;
}

bool avoids(const Word& w, const std::vector<Word>& forbidden) {
  for (const auto& f : forbidden)
    if (w.find(f) != std::string::npos) return false;
  return true;
}

/// Internal zero runs between two 1s have an allowed length.
bool spacing_ok(const Word& w, const std::function<bool(long long)>& gap_ok) {
  long long last = -1;
  for (long long i = 0; i < static_cast<long long>(w.size()); ++i)
    if (w[i] == '1') {
      if (last >= 0 && !gap_ok(i - last - 1)) return false;
      last = i;
    }
  return true;
}

/// Points of least period n in the full k-shift: words of length n with no smaller rotation period.
Count least_period_points(int k, std::size_t n) {
  Count c = 0;
  for (const auto& w : all_words(std::string("0123456789").substr(0, k), n)) {
    std::size_t p = 1;
    while (p < n && !(n % p == 0 && w.substr(p) + w.substr(0, p) == w)) ++p;
    c += p == n;
  }
  return c;
}

}  // namespace

TEST_CASE("languages") {
  CHECK(language(Subshift::golden_mean(), 2) == std::vector<Word>{"00", "01", "10"});
  CHECK(language(Subshift::full_shift(2), 3).size() == 8);
  auto even3 = language(Subshift::even_shift(), 3);
  CHECK(even3.size() == 7);
  CHECK(std::find(even3.begin(), even3.end(), "101") == even3.end());
  CHECK(Subshift::even_shift().contains("1001"));
  CHECK_FALSE(Subshift::even_shift().contains("10001"));
}

TEST_CASE("word counts against enumeration") {
  auto golden = Subshift::golden_mean();
  Count a = 1, b = 2;  // |B_0|, |B_1|
  for (std::size_t n = 1; n <= 40; ++n) {
    CHECK(count_words(golden, n) == b);
    if (n >= 1) CHECK(transfer_count(golden, n) == b);
    Count next = a + b;
    a = b;
    b = next;
  }
  for (std::size_t n = 1; n <= 30; ++n) CHECK(count_words(Subshift::full_shift(2), n) == (Count{1} << n));

  const std::vector<Word> forbidden{"00", "111"};
  auto sft = Subshift::forbidden_blocks("01", forbidden);
  for (std::size_t n = 1; n <= 14; ++n) {
    CAPTURE(n);
    Count want = brute_count("01", n, [&](const Word& w) { return avoids(w, forbidden); });
    CHECK(count_words(sft, n) == want);
    if (n >= 2) CHECK(transfer_count(sft, n) == want);
  }
  auto sft3 = Subshift::forbidden_blocks("abc", {"ab", "cc", "bab"});
  for (std::size_t n = 1; n <= 8; ++n)
    CHECK(count_words(sft3, n) == brute_count("abc", n, [](const Word& w) { return avoids(w, {"ab", "cc"}); }));
}

TEST_CASE("spacing shift counts") {
  auto spacing = build_subshift({{"kind", "spacing"}, {"spacing", {{"cutoff", 6}, {"multiples_of", 2}}}});
  for (std::size_t n = 1; n <= 14; ++n) {
    CAPTURE(n);
    Count want = brute_count("01", n, [](const Word& w) {
      return spacing_ok(w, [](long long g) { return g > 6 || g % 2 == 0; });
    });
    CHECK(count_words(spacing, n) == want);
  }
}

TEST_CASE("entropy") {
  auto full = entropy_estimates(Subshift::full_shift(2), 12);
  CHECK(std::fabs(full.spectral - std::log(2.0)) < 1e-10);
  CHECK(std::fabs(spectral_entropy(Subshift::golden_mean()) - std::log(std::numbers::phi)) < 1e-9);
  CHECK(spectral_entropy(Subshift::forbidden_blocks("01", {"1"})) == doctest::Approx(0.0).epsilon(1e-12));
  auto g = entropy_estimates(Subshift::golden_mean(), 20);
  CHECK(g.per_symbol_nonincreasing);
  for (const auto& r : g.rows) CHECK(r.per_symbol >= g.spectral - 1e-12);
}

TEST_CASE("subadditivity of log word counts") {
  for (const auto& s : {Subshift::golden_mean(), Subshift::even_shift(), Subshift::full_shift(3),
                        Subshift::forbidden_blocks("01", {"00", "111"})})
    for (std::size_t m = 1; m <= 8; ++m)
      for (std::size_t n = 1; n <= 8; ++n)
        CHECK(std::log(static_cast<double>(count_words(s, m + n))) <=
              std::log(static_cast<double>(count_words(s, m))) + std::log(static_cast<double>(count_words(s, n))) +
                  1e-12);
}

TEST_CASE("classification") {
  auto full = classify_sft(Subshift::full_shift(2));
  CHECK(full.irreducible);
  CHECK(full.mixing);
  CHECK(full.period == 1);
  CHECK(classify_sft(Subshift::golden_mean()).mixing);
  auto two_points = classify_sft(Subshift::forbidden_blocks("01", {"01", "10"}));
  CHECK_FALSE(two_points.irreducible);
  CHECK(two_points.components == 2);
  auto flip = classify_sft(Subshift::edge_graph("ab", {{0, 1}, {1, 0}}));
  CHECK(flip.irreducible);
  CHECK_FALSE(flip.mixing);
  CHECK(flip.period == 2);
}

TEST_CASE("periodic spectrum") {
  auto sp = periodic_spectrum(Subshift::full_shift(2), 8);
  for (std::size_t n = 1; n <= 8; ++n) {
    CAPTURE(n);
    CHECK(sp.fixed_by.at(n) == (Count{1} << n));
    CHECK(sp.least.at(n) == least_period_points(2, n));
    CHECK(sp.orbits.at(n) * static_cast<Count>(n) == sp.least.at(n));
  }
  auto gp = periodic_spectrum(Subshift::golden_mean(), 6);
  CHECK(gp.least.at(1) == 1);
  CHECK(gp.least.at(2) == 2);
  auto fixed = periodic_spectrum(Subshift::forbidden_blocks("01", {"1"}), 4);
  CHECK(fixed.least.at(1) == 1);
  CHECK(fixed.least.count(3) == 0);  // periods with no points are omitted
}

TEST_CASE("embedding preconditions") {
  auto golden_even = boyle_precondition(Subshift::golden_mean(), Subshift::even_shift(), 10);
  CHECK(std::fabs(golden_even.entropy_gap) < 1e-9);
  CHECK_FALSE(golden_even.hypotheses_hold);
  auto full_golden = boyle_precondition(Subshift::full_shift(2), Subshift::golden_mean(), 10);
  CHECK(full_golden.entropy_gap == doctest::Approx(std::log(2.0) - std::log(std::numbers::phi)).epsilon(1e-9));
  CHECK(full_golden.per_divides);
  auto self = boyle_precondition(Subshift::golden_mean(), Subshift::golden_mean(), 10);
  CHECK_FALSE(self.hypotheses_hold);
}

TEST_CASE("sliding block codes") {
  auto code = golden_to_even_code();
  CHECK(apply_block_code(code, "000") == "11");
  CHECK(apply_block_code(code, "010") == "00");
  try {
    apply_block_code(code, "011");
    FAIL("expected rule-undefined");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::rule_undefined);
  }
  for (std::size_t n = code.window(); n <= 16; ++n)
    CHECK(verify_factor(code, Subshift::golden_mean(), Subshift::even_shift(), n));
  auto id = identity_code("01");
  CHECK(apply_block_code(id, "0110") == "0110");
  CHECK(verify_factor(id, Subshift::golden_mean(), Subshift::golden_mean(), 10));
  CHECK_FALSE(verify_factor(id, Subshift::full_shift(2), Subshift::golden_mean(), 6));
}

TEST_CASE("cylinder metric") {
  auto same = cylinder_metric("01101", "01101");
  CHECK(same.distance == 0.0);
  CHECK(same.indistinguishable);
  auto centre = cylinder_metric("00100", "00000");
  CHECK(centre.distance == 1.0);
  CHECK(centre.k == -1);
  auto outer = cylinder_metric("10000", "00000");
  CHECK(outer.k == 1);
  CHECK(outer.distance == 0.25);
  CHECK(cylinder_metric("010", "110").distance == 0.5);
  CHECK_THROWS_AS(cylinder_metric("01", "011"), Error);
}

TEST_CASE("cylinder hitting sets") {
  auto full = cylinder_hitting_set(Subshift::full_shift(2), "1", "0", 10);
  CHECK(full == std::vector<long long>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  auto golden = cylinder_hitting_set(Subshift::golden_mean(), "1", "1", 6);
  CHECK(golden == std::vector<long long>{2, 3, 4, 5, 6});
}

TEST_CASE("spec parsing errors") {
  CHECK_THROWS_AS(build_subshift({{"kind", "bogus"}}), Error);
  CHECK_THROWS_AS(build_subshift(nlohmann::json::array()), Error);
  CHECK_THROWS_AS(build_subshift({{"kind", "spacing"}, {"spacing", {{"cutoff", 4}, {"multiples_of", 0}}}}), Error);
}

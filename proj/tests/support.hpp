#pragma once

// Seeded generators and brute-force oracles shared by the unit tests.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "ellis/spaces.hpp"

namespace test {

using Table = std::vector<std::uint32_t>;

/// Self-map of {0..n-1}; a permutation when `invertible`.
inline Table random_map(std::mt19937_64& rng, std::size_t n, bool invertible) {
  Table t(n);
  if (invertible) {
    for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<std::uint32_t>(i);
    std::shuffle(t.begin(), t.end(), rng);
  } else {
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
    for (auto& v : t) v = pick(rng);
  }
  return t;
}

inline Table compose(const Table& a, const Table& b) {
  Table out(b.size());
  for (std::size_t x = 0; x < b.size(); ++x) out[x] = a[b[x]];
  return out;
}

inline Table identity_map(std::size_t n) {
  Table t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<std::uint32_t>(i);
  return t;
}

/// Distinct maps f^0, f^1, ... in order of first appearance.
inline std::vector<Table> iterate_monoid(const Table& f) {
  std::vector<Table> out{identity_map(f.size())};
  std::set<Table> seen{out[0]};
  for (;;) {
    Table next = compose(f, out.back());
    if (!seen.insert(next).second) return out;
    out.push_back(next);
  }
}

/// Index i and period p with f^{i+p} = f^i, found by iterating maps.
inline std::pair<long long, long long> index_period(const Table& f) {
  std::map<Table, long long> first;
  Table g = identity_map(f.size());
  for (long long k = 0;; ++k) {
    auto [it, fresh] = first.emplace(g, k);
    if (!fresh) return {it->second, k - it->second};
    g = compose(f, g);
  }
}

/// Points on a cycle of f.
inline std::set<std::uint32_t> cycle_points(const Table& f) {
  std::set<std::uint32_t> out;
  for (std::uint32_t x = 0; x < f.size(); ++x) {
    std::uint32_t y = f[x];
    for (std::size_t k = 0; k < f.size() && y != x; ++k) y = f[y];
    if (y == x) out.insert(x);
  }
  return out;
}

}  // namespace test

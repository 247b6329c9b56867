#include "ellis/algebra.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "ellis/error.hpp"

namespace ellis {

namespace {

struct BitMatrix {
  std::size_t n = 0, words = 0;
  std::vector<std::uint64_t> data;
  BitMatrix(std::size_t n_, bool fill) : n(n_), words((n_ + 63) / 64), data(n_ * words, fill ? ~0ULL : 0ULL) {
    if (fill) trim();
  }
  void trim() {
    if (n % 64 == 0) return;
    const std::uint64_t mask = (1ULL << (n % 64)) - 1;
    for (std::size_t r = 0; r < n; ++r) data[r * words + words - 1] &= mask;
  }
  bool get(std::size_t r, std::size_t c) const { return (data[r * words + c / 64] >> (c % 64)) & 1ULL; }
  void set(std::size_t r, std::size_t c) { data[r * words + c / 64] |= 1ULL << (c % 64); }
  const std::uint64_t* row(std::size_t r) const { return data.data() + r * words; }
  void or_with(const BitMatrix& o) {
    for (std::size_t i = 0; i < data.size(); ++i) data[i] |= o.data[i];
  }
  void and_with(const BitMatrix& o) {
    for (std::size_t i = 0; i < data.size(); ++i) data[i] &= o.data[i];
  }
  bool operator==(const BitMatrix& o) const { return data == o.data; }
  std::size_t offdiag_pairs() const {
    std::size_t c = 0;
    for (std::uint64_t w : data) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return (c - n) / 2;
  }
};

long long lcm_ll(long long a, long long b) { return a / std::gcd(a, b) * b; }

}  // namespace

AssociativityReport check_associativity(const std::vector<std::vector<std::uint32_t>>& t,
                                        std::size_t exhaustive_limit, std::size_t samples, std::uint64_t seed) {
  AssociativityReport r;
  const std::size_t n = t.size();
  auto test = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    ++r.triples_checked;
    if (t[t[a][b]][c] != t[a][t[b][c]]) {
      if (!r.example) r.example = std::array<std::uint32_t, 3>{a, b, c};
      ++r.violations;
    }
  };
  if (n <= exhaustive_limit) {
    r.exhaustive = true;
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = 0; b < n; ++b)
        for (std::uint32_t c = 0; c < n; ++c) test(a, b, c);
    return r;
  }
  r.exhaustive = false;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
  for (std::size_t i = 0; i < samples; ++i) test(pick(rng), pick(rng), pick(rng));
  return r;
}

FiniteSemigroup FiniteSemigroup::from_table(std::vector<std::vector<std::uint32_t>> table,
                                            std::optional<std::uint32_t> identity,
                                            std::optional<std::uint32_t> generator, Validation mode,
                                            std::vector<std::string> names) {
  const std::size_t n = table.size();
  if (n == 0) throw Error(ErrorCode::empty_set, "semigroup table is empty");
  for (const auto& row : table) {
    if (row.size() != n) throw Error(ErrorCode::length_mismatch, "semigroup table must be square");
    for (std::uint32_t v : row)
      if (v >= n) throw Error(ErrorCode::out_of_range, "semigroup table is not closed");
  }
  if (identity && *identity >= n) throw Error(ErrorCode::out_of_range, "identity index out of range");
  if (generator && *generator >= n) throw Error(ErrorCode::out_of_range, "generator index out of range");
  if (identity) {
    for (std::uint32_t a = 0; a < n; ++a)
      if (table[*identity][a] != a || table[a][*identity] != a) {
        if (mode == Validation::strict) throw Error(ErrorCode::invariant_violation, "identity is not two-sided");
      }
  }
  FiniteSemigroup s;
  s.assoc_ = check_associativity(table);
  if (mode == Validation::strict && s.assoc_.violations > 0)
    throw Error(ErrorCode::invariant_violation, "composition table is not associative");
  if (names.empty())
    for (std::size_t i = 0; i < n; ++i) names.push_back("s" + std::to_string(i));
  if (names.size() != n) throw Error(ErrorCode::length_mismatch, "one name per element");
  s.table_ = std::move(table);
  s.identity_ = identity;
  s.generator_ = generator;
  s.names_ = std::move(names);
  s.mode_ = mode;
  return s;
}

FiniteSemigroup FiniteSemigroup::from_envelope(const Envelope& env) {
  return from_table(env.table, env.identity, env.generator, env.exact ? Validation::strict : Validation::report,
                    env.names());
}

FiniteSemigroup FiniteSemigroup::from_json(const Json& j, Validation mode) {
  if (!j.is_object() || !j.contains("table"))
    throw Error(ErrorCode::bad_spec, "semigroup JSON needs a table");
  auto table = j.at("table").get<std::vector<std::vector<std::uint32_t>>>();
  if (j.contains("size") && j.at("size").get<std::size_t>() != table.size())
    throw Error(ErrorCode::length_mismatch, "size disagrees with the table");
  std::optional<std::uint32_t> id, gen;
  if (j.contains("identity") && !j.at("identity").is_null()) id = j.at("identity").get<std::uint32_t>();
  if (j.contains("generator") && !j.at("generator").is_null()) gen = j.at("generator").get<std::uint32_t>();
  std::vector<std::string> names;
  if (j.contains("names")) names = j.at("names").get<std::vector<std::string>>();
  return from_table(std::move(table), id, gen, mode, std::move(names));
}

Json FiniteSemigroup::to_json() const {
  Json j;
  j["size"] = size();
  j["table"] = table_;
  j["identity"] = identity_ ? Json(*identity_) : Json(nullptr);
  j["generator"] = generator_ ? Json(*generator_) : Json(nullptr);
  j["names"] = names_;
  return j;
}

std::vector<std::uint32_t> idempotents(const FiniteSemigroup& s) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t a = 0; a < s.size(); ++a)
    if (s.mul(a, a) == a) out.push_back(a);
  return out;
}

std::vector<std::uint32_t> left_ideal(const FiniteSemigroup& s, std::uint32_t a) {
  std::vector<char> in(s.size(), 0);
  in[a] = 1;
  for (std::uint32_t t = 0; t < s.size(); ++t) in[s.mul(t, a)] = 1;
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < s.size(); ++i)
    if (in[i]) out.push_back(i);
  return out;
}

std::vector<std::vector<std::uint32_t>> minimal_left_ideals(const FiniteSemigroup& s) {
  std::set<std::vector<std::uint32_t>> all;
  for (std::uint32_t a = 0; a < s.size(); ++a) all.insert(left_ideal(s, a));
  std::vector<std::vector<std::uint32_t>> out;
  for (const auto& i : all) {
    bool minimal = true;
    for (const auto& j : all) {
      if (j.size() < i.size() && std::includes(i.begin(), i.end(), j.begin(), j.end())) {
        minimal = false;
        break;
      }
    }
    if (minimal) out.push_back(i);
  }
  return out;
}

IdealDecomposition kernel_and_groups(const FiniteSemigroup& s) {
  IdealDecomposition d;
  d.ideals = minimal_left_ideals(s);
  std::set<std::uint32_t> kernel;
  std::vector<int> owner(s.size(), -1);
  for (std::size_t i = 0; i < d.ideals.size(); ++i) {
    for (std::uint32_t a : d.ideals[i]) {
      if (owner[a] >= 0) d.ideals_disjoint = false;
      owner[a] = static_cast<int>(i);
      kernel.insert(a);
    }
  }
  d.kernel.assign(kernel.begin(), kernel.end());
  for (const auto& ideal : d.ideals) {
    std::vector<std::uint32_t> j;
    for (std::uint32_t a : ideal)
      if (s.mul(a, a) == a) j.push_back(a);
    if (j.empty()) d.every_ideal_has_idempotent = false;
    d.idempotents_per_ideal.push_back(j);

    std::vector<IdealGroup> groups;
    std::vector<int> covered(s.size(), 0);
    for (std::uint32_t v : j) {
      IdealGroup g;
      g.idempotent = v;
      std::set<std::uint32_t> vi;
      for (std::uint32_t a : ideal) vi.insert(s.mul(v, a));
      g.members.assign(vi.begin(), vi.end());
      for (std::uint32_t a : g.members) ++covered[a];
      // closed, v is the identity, every element has an inverse
      bool ok = true;
      for (std::uint32_t a : g.members) {
        if (s.mul(v, a) != a || s.mul(a, v) != a) ok = false;
        bool inv = false;
        for (std::uint32_t b : g.members) {
          if (!vi.count(s.mul(a, b))) ok = false;
          if (s.mul(a, b) == v && s.mul(b, a) == v) inv = true;
        }
        if (!inv) ok = false;
      }
      g.is_group = ok;
      if (!ok) d.group_axioms_hold = false;
      groups.push_back(std::move(g));
    }
    for (std::uint32_t a : ideal)
      if (covered[a] != 1) d.groups_partition_ideals = false;
    d.groups.push_back(std::move(groups));
  }
  return d;
}

IsomorphismReport ideal_isomorphism_check(const FiniteSemigroup& s, const std::vector<std::uint32_t>& i,
                                          const std::vector<std::uint32_t>& k) {
  IsomorphismReport r;
  std::vector<std::uint32_t> ui, vk;
  for (std::uint32_t a : i)
    if (s.mul(a, a) == a) ui.push_back(a);
  for (std::uint32_t a : k)
    if (s.mul(a, a) == a) vk.push_back(a);
  const std::set<std::uint32_t> kset(k.begin(), k.end());

  struct Orientation {
    const char* name;
    bool (*holds)(const FiniteSemigroup&, std::uint32_t, std::uint32_t);
  };
  const Orientation orientations[] = {
      {"uv=v,vu=u", [](const FiniteSemigroup& t, std::uint32_t u, std::uint32_t v) {
         return t.mul(u, v) == v && t.mul(v, u) == u;
       }},
      {"uv=u,vu=v", [](const FiniteSemigroup& t, std::uint32_t u, std::uint32_t v) {
         return t.mul(u, v) == u && t.mul(v, u) == v;
       }},
  };
  for (const auto& o : orientations) {
    for (std::uint32_t u : ui) {
      for (std::uint32_t v : vk) {
        if (!o.holds(s, u, v)) continue;
        r.pairing_found = true;
        r.u = u;
        r.v = v;
        r.orientation = o.name;
        std::set<std::uint32_t> image;
        bool into = true;
        for (std::uint32_t p : i) {
          std::uint32_t q = s.mul(p, v);
          if (!kset.count(q)) into = false;
          image.insert(q);
        }
        r.bijective = into && image.size() == i.size() && image.size() == k.size();
        r.intertwines = true;
        if (auto g = s.generator()) {
          for (std::uint32_t p : i)
            if (s.mul(s.mul(*g, p), v) != s.mul(*g, s.mul(p, v))) r.intertwines = false;
        }
        if (!r.bijective) r.violations.push_back("right multiplication is not a bijection I -> K");
        if (!r.intertwines) r.violations.push_back("right multiplication does not commute with the generator");
        r.isomorphic = r.bijective && r.intertwines;
        return r;
      }
    }
  }
  r.violations.push_back("no-pairing-found");
  return r;
}

GroupDistal is_group_distal(const FiniteSemigroup& s) {
  GroupDistal g;
  auto id = s.identity();
  auto idem = idempotents(s);
  g.unique_idempotent_is_identity = id && idem.size() == 1 && idem[0] == *id;
  if (id) {
    g.is_group = true;
    for (std::uint32_t a = 0; a < s.size() && g.is_group; ++a) {
      bool inv = false;
      for (std::uint32_t b = 0; b < s.size() && !inv; ++b) inv = s.mul(a, b) == *id && s.mul(b, a) == *id;
      g.is_group = inv;
    }
  }
  g.agree = g.is_group == g.unique_idempotent_is_identity;
  return g;
}

ProximalStructure proximal_structure(const Envelope& env, const FiniteSemigroup& s) {
  ProximalStructure r;
  const auto& space = env.model->space();
  const std::size_t n = space.size();
  r.sample_size = n;
  auto collapse = [&](std::uint32_t a) {
    BitMatrix m(n, false);
    for (std::size_t x = 0; x < n; ++x) m.set(x, x);
    const MapSample& el = env.elements[a];
    if (env.exact || el.raw.empty()) {
      std::vector<std::vector<std::uint32_t>> fibres(n);
      for (std::uint32_t x = 0; x < n; ++x) fibres[el.ids[x]].push_back(x);
      for (const auto& f : fibres)
        for (std::uint32_t x : f)
          for (std::uint32_t y : f) m.set(x, y);
    } else {
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y)
          if (space.distance(el.raw[x], el.raw[y]) < env.tau) {
            m.set(x, y);
            m.set(y, x);
          }
    }
    return m;
  };
  auto ideals = minimal_left_ideals(s);
  r.ideal_count = ideals.size();
  r.unique_ideal = ideals.size() == 1;
  std::vector<int> in_ideal(s.size(), 0);
  for (const auto& i : ideals)
    for (std::uint32_t a : i) in_ideal[a] = 1;

  BitMatrix p(n, false);
  std::vector<BitMatrix> per_ideal(ideals.size(), BitMatrix(n, true));
  std::vector<std::optional<BitMatrix>> cache(s.size());
  for (std::uint32_t a = 0; a < s.size(); ++a) {
    BitMatrix m = collapse(a);
    p.or_with(m);
    if (in_ideal[a]) cache[a] = std::move(m);
  }
  for (std::size_t i = 0; i < ideals.size(); ++i)
    for (std::uint32_t a : ideals[i]) per_ideal[i].and_with(*cache[a]);

  r.proximal_pairs = p.offdiag_pairs();
  for (std::uint32_t x = 0; x < n && r.examples.size() < 8; ++x)
    for (std::uint32_t y = x + 1; y < n && r.examples.size() < 8; ++y)
      if (p.get(x, y)) r.examples.emplace_back(x, y);
  BitMatrix uni(n, false);
  for (const auto& m : per_ideal) {
    r.ideal_relation_pairs.push_back(m.offdiag_pairs());
    uni.or_with(m);
  }
  r.union_covers = uni == p;

  for (std::uint32_t x = 0; x < n && r.is_equivalence; ++x) {
    for (std::uint32_t y = 0; y < n && r.is_equivalence; ++y) {
      if (y == x || !p.get(x, y)) continue;
      if (std::equal(p.row(x), p.row(x) + p.words, p.row(y))) continue;
      for (std::uint32_t z = 0; z < n; ++z) {
        if (p.get(x, z) != p.get(y, z)) {
          r.is_equivalence = false;
          r.transitivity_failure = p.get(x, z) ? std::array<std::uint32_t, 3>{y, x, z}
                                               : std::array<std::uint32_t, 3>{x, y, z};
          break;
        }
      }
    }
  }
  r.consistent = r.unique_ideal == r.is_equivalence;
  return r;
}

PeriodicAnalysis periodic_element_analysis(const FiniteSemigroup& s) {
  PeriodicAnalysis r;
  auto g = s.generator();
  if (!g) throw Error(ErrorCode::invalid_parameter, "periodic analysis needs a generator");
  const std::size_t n = s.size();
  auto ideals = minimal_left_ideals(s);
  std::set<std::vector<std::uint32_t>> ideal_set(ideals.begin(), ideals.end());
  for (std::uint32_t p = 0; p < n; ++p) {
    std::uint32_t q = p;
    long long period = 0;
    for (std::size_t k = 1; k <= n; ++k) {
      q = s.mul(*g, q);
      if (q == p) {
        period = static_cast<long long>(k);
        break;
      }
    }
    if (period == 0) continue;
    PeriodicElement e;
    e.element = p;
    e.period = period;
    q = p;
    for (long long k = 0; k < period; ++k) {
      e.orbit.push_back(q);
      q = s.mul(*g, q);
    }
    std::sort(e.orbit.begin(), e.orbit.end());
    e.orbit_is_minimal_ideal = ideal_set.count(e.orbit) > 0;
    if (!e.orbit_is_minimal_ideal) r.orbits_are_minimal_ideals = false;
    r.periodic.push_back(std::move(e));
  }
  r.common_period = 1;
  for (const auto& e : r.periodic) {
    r.common_period = lcm_ll(r.common_period, e.period);
    if (e.period != r.periodic.front().period) r.periods_equal = false;
  }
  if (r.periodic.empty()) r.common_period = 0;
  r.count_bound_ok = static_cast<long long>(r.periodic.size()) <= 2 * r.common_period;
  return r;
}

RecurrenceCheck recurrent_idempotent_check(const FiniteSemigroup& s) {
  RecurrenceCheck r;
  auto g = s.generator();
  if (!g) throw Error(ErrorCode::invalid_parameter, "recurrence check needs a generator");
  for (std::uint32_t u : idempotents(s)) {
    RecurrentIdempotent ri;
    ri.element = u;
    ri.identity = s.identity() && *s.identity() == u;
    std::uint32_t q = u;
    for (std::size_t k = 1; k <= s.size(); ++k) {
      q = s.mul(*g, q);
      if (q == u) {
        ri.witness = static_cast<long long>(k);
        break;
      }
    }
    if (!ri.witness && !ri.identity) ++r.violations;
    r.idempotents.push_back(ri);
  }
  return r;
}

}  // namespace ellis

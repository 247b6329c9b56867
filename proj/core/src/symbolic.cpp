#include "ellis/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>

#include "ellis/error.hpp"

namespace ellis {

namespace {

using StateSet = std::vector<std::uint32_t>;  // sorted

constexpr std::size_t kStateBudget = 1u << 16;
constexpr Count kCountMax = (static_cast<Count>(1) << 120);

void check_count(Count c) {
  if (c > kCountMax) throw Error(ErrorCode::budget_exceeded, "word count overflows 120 bits");
}

void validate_alphabet(const std::string& alphabet) {
  if (alphabet.empty()) throw Error(ErrorCode::bad_spec, "empty alphabet");
  std::set<char> seen(alphabet.begin(), alphabet.end());
  if (seen.size() != alphabet.size()) throw Error(ErrorCode::bad_spec, "repeated alphabet symbol");
}

/// Keeps only states on bi-infinite paths and renumbers them.
Presentation trim(std::size_t states, const std::vector<LabeledEdge>& edges,
                  const std::vector<std::string>& names) {
  std::vector<bool> alive(states, true);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> in(states, 0), out(states, 0);
    for (const auto& e : edges)
      if (alive[e.from] && alive[e.to]) {
        ++out[e.from];
        ++in[e.to];
      }
    for (std::size_t s = 0; s < states; ++s)
      if (alive[s] && (in[s] == 0 || out[s] == 0)) {
        alive[s] = false;
        changed = true;
      }
  }
  std::vector<std::uint32_t> remap(states, std::numeric_limits<std::uint32_t>::max());
  Presentation p;
  for (std::size_t s = 0; s < states; ++s)
    if (alive[s]) {
      remap[s] = static_cast<std::uint32_t>(p.states++);
      p.state_names.push_back(s < names.size() ? names[s] : std::to_string(s));
    }
  for (const auto& e : edges)
    if (alive[e.from] && alive[e.to]) p.edges.push_back({remap[e.from], remap[e.to], e.label});
  std::sort(p.edges.begin(), p.edges.end(), [](const LabeledEdge& a, const LabeledEdge& b) {
    return std::tie(a.from, a.label, a.to) < std::tie(b.from, b.label, b.to);
  });
  p.finalize();
  return p;
}

bool right_resolving(std::size_t states, const std::vector<LabeledEdge>& edges) {
  std::set<std::pair<std::uint32_t, char>> seen;
  for (const auto& e : edges) {
    (void)states;
    if (!seen.insert({e.from, e.label}).second) return false;
  }
  return true;
}

StateSet all_states(const Presentation& p) {
  StateSet s(p.states);
  std::iota(s.begin(), s.end(), 0u);
  return s;
}

StateSet step_set(const Presentation& p, const StateSet& from, char a) {
  StateSet next;
  for (std::uint32_t s : from)
    if (auto t = p.follow(s, a)) next.push_back(*t);
  std::sort(next.begin(), next.end());
  next.erase(std::unique(next.begin(), next.end()), next.end());
  return next;
}

StateSet successors(const Presentation& p, const StateSet& from) {
  StateSet next;
  for (std::uint32_t s : from)
    for (const auto& [a, t] : p.out[s]) next.push_back(t);
  std::sort(next.begin(), next.end());
  next.erase(std::unique(next.begin(), next.end()), next.end());
  return next;
}

/// Subset construction from the full state set; the result is deterministic.
Presentation determinize(const std::string& alphabet, std::size_t states,
                         const std::vector<LabeledEdge>& edges) {
  Presentation raw;
  raw.states = states;
  raw.edges = edges;
  raw.finalize();
  std::map<StateSet, std::uint32_t> index;
  std::vector<StateSet> queue;
  std::vector<LabeledEdge> out_edges;
  StateSet start = all_states(raw);
  index[start] = 0;
  queue.push_back(start);
  for (std::size_t q = 0; q < queue.size(); ++q) {
    for (char a : alphabet) {
      StateSet next = step_set(raw, queue[q], a);
      if (next.empty()) continue;
      auto [it, fresh] = index.emplace(next, static_cast<std::uint32_t>(queue.size()));
      if (fresh) {
        queue.push_back(next);
        if (queue.size() > kStateBudget) throw Error(ErrorCode::budget_exceeded, "subset construction too large");
      }
      out_edges.push_back({static_cast<std::uint32_t>(q), it->second, a});
    }
  }
  std::vector<std::string> names;
  for (const auto& s : queue) {
    std::string n = "{";
    for (std::size_t i = 0; i < s.size(); ++i) n += (i ? "," : "") + std::to_string(s[i]);
    names.push_back(n + "}");
  }
  return trim(queue.size(), out_edges, names);
}

bool has_forbidden_suffix(const std::string& w, const std::vector<Word>& forbidden) {
  for (const auto& f : forbidden)
    if (f.size() <= w.size() && w.compare(w.size() - f.size(), f.size(), f) == 0) return true;
  return false;
}

Count add_checked(Count a, Count b) {
  Count s = a + b;
  check_count(s);
  return s;
}

std::vector<std::pair<std::uint32_t, std::uint64_t>> row_sparse(const std::vector<std::uint64_t>& row) {
  std::vector<std::pair<std::uint32_t, std::uint64_t>> out;
  for (std::size_t j = 0; j < row.size(); ++j)
    if (row[j]) out.push_back({static_cast<std::uint32_t>(j), row[j]});
  return out;
}

}  // namespace

std::string count_to_string(Count c) {
  if (c == 0) return "0";
  bool neg = c < 0;
  if (neg) c = -c;
  std::string s;
  while (c > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(c % 10)));
    c /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

std::vector<std::vector<std::uint64_t>> Presentation::adjacency() const {
  std::vector<std::vector<std::uint64_t>> a(states, std::vector<std::uint64_t>(states, 0));
  for (const auto& e : edges) ++a[e.from][e.to];
  return a;
}

std::optional<std::uint32_t> Presentation::follow(std::uint32_t s, char a) const {
  for (const auto& [label, t] : out[s])
    if (label == a) return t;
  return std::nullopt;
}

void Presentation::finalize() {
  out.assign(states, {});
  for (const auto& e : edges) out[e.from].push_back({e.label, e.to});
  for (auto& o : out) std::sort(o.begin(), o.end());
}

// Constructors -------------------------------------------------------------------

Subshift Subshift::forbidden_blocks(std::string alphabet, std::vector<Word> forbidden) {
  validate_alphabet(alphabet);
  std::size_t max_len = 0;
  for (const auto& f : forbidden) {
    if (f.empty()) throw Error(ErrorCode::bad_spec, "empty forbidden block");
    for (char c : f)
      if (alphabet.find(c) == std::string::npos)
        throw Error(ErrorCode::bad_spec, "forbidden block '" + f + "' uses a symbol outside the alphabet");
    max_len = std::max(max_len, f.size());
  }
  std::sort(forbidden.begin(), forbidden.end());
  forbidden.erase(std::unique(forbidden.begin(), forbidden.end()), forbidden.end());

  Subshift s;
  s.kind_ = ShiftKind::forbidden_blocks;
  s.alphabet_ = alphabet;
  s.forbidden_ = forbidden;
  s.block_length_ = std::max<std::size_t>(2, max_len);
  const std::size_t m = s.block_length_ - 1;

  // states: allowed (L-1)-words, built breadth-first so invalid prefixes are pruned
  std::vector<std::string> words{""};
  for (std::size_t len = 0; len < m; ++len) {
    std::vector<std::string> next;
    for (const auto& w : words)
      for (char a : alphabet) {
        std::string v = w + a;
        if (!has_forbidden_suffix(v, forbidden)) next.push_back(v);
      }
    words.swap(next);
    if (words.size() > kStateBudget) throw Error(ErrorCode::budget_exceeded, "higher-block graph too large");
  }
  std::map<std::string, std::uint32_t> index;
  for (std::size_t i = 0; i < words.size(); ++i) index[words[i]] = static_cast<std::uint32_t>(i);
  std::vector<LabeledEdge> edges;
  for (std::size_t i = 0; i < words.size(); ++i)
    for (char a : alphabet) {
      std::string v = words[i] + a;
      if (has_forbidden_suffix(v, forbidden)) continue;
      auto it = index.find(v.substr(1));
      if (it != index.end()) edges.push_back({static_cast<std::uint32_t>(i), it->second, a});
    }
  s.pres_ = trim(words.size(), edges, words);
  std::string d = "forbidden {";
  for (std::size_t i = 0; i < forbidden.size(); ++i) d += (i ? "," : "") + forbidden[i];
  s.description_ = d + "} over '" + alphabet + "'";
  s.source_ = {{"alphabet", alphabet}, {"kind", "forbidden"}, {"forbidden", forbidden}};
  return s;
}

Subshift Subshift::edge_graph(std::string alphabet, std::vector<std::vector<int>> matrix) {
  validate_alphabet(alphabet);
  const std::size_t n = matrix.size();
  if (n == 0 || n != alphabet.size())
    throw Error(ErrorCode::bad_spec, "vertex shift needs one alphabet symbol per matrix row");
  std::vector<LabeledEdge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i].size() != n) throw Error(ErrorCode::bad_spec, "adjacency matrix is not square");
    for (std::size_t j = 0; j < n; ++j) {
      if (matrix[i][j] != 0 && matrix[i][j] != 1) throw Error(ErrorCode::bad_spec, "adjacency entries must be 0/1");
      if (matrix[i][j]) edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), alphabet[j]});
    }
  }
  Subshift s;
  s.kind_ = ShiftKind::edge_graph;
  s.alphabet_ = alphabet;
  s.block_length_ = 2;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!matrix[i][j]) s.forbidden_.push_back(std::string{alphabet[i], alphabet[j]});
  std::vector<std::string> names;
  for (char c : alphabet) names.push_back(std::string(1, c));
  s.pres_ = trim(n, edges, names);
  s.description_ = "vertex shift on " + std::to_string(n) + " states";
  s.source_ = {{"alphabet", alphabet}, {"kind", "matrix"}, {"matrix", matrix}};
  return s;
}

Subshift Subshift::labeled_graph(std::string alphabet, std::size_t states, std::vector<LabeledEdge> edges) {
  validate_alphabet(alphabet);
  if (states == 0) throw Error(ErrorCode::bad_spec, "labeled graph has no states");
  for (const auto& e : edges) {
    if (e.from >= states || e.to >= states) throw Error(ErrorCode::bad_spec, "edge endpoint out of range");
    if (alphabet.find(e.label) == std::string::npos) throw Error(ErrorCode::bad_spec, "edge label outside the alphabet");
  }
  Subshift s;
  s.kind_ = ShiftKind::labeled_graph;
  s.alphabet_ = alphabet;
  s.block_length_ = 0;
  s.input_right_resolving_ = right_resolving(states, edges);
  if (s.input_right_resolving_)
    s.pres_ = trim(states, edges, {});
  else
    s.pres_ = determinize(alphabet, states, edges);
  s.description_ = "sofic shift on " + std::to_string(states) + " states";
  nlohmann::json je = nlohmann::json::array();
  for (const auto& e : edges) je.push_back({e.from, e.to, std::string(1, e.label)});
  s.source_ = {{"alphabet", alphabet}, {"kind", "labeled"}, {"states", states}, {"labeled_edges", je}};
  return s;
}

Subshift Subshift::spacing(SpacingSpec spec) {
  if (spec.cutoff < 0 || spec.cutoff > 24) throw Error(ErrorCode::bad_spec, "spacing cutoff must be in [0,24]");
  std::set<long long> allowed(spec.gaps.begin(), spec.gaps.end());
  std::vector<Word> forbidden;
  for (long long g = 0; g <= spec.cutoff; ++g)
    if (!allowed.count(g)) forbidden.push_back("1" + std::string(static_cast<std::size_t>(g), '0') + "1");
  Subshift s = forbidden_blocks("01", forbidden);
  s.kind_ = ShiftKind::spacing;
  std::sort(spec.gaps.begin(), spec.gaps.end());
  s.spacing_ = spec;
  s.description_ = "spacing shift, cutoff " + std::to_string(spec.cutoff);
  s.source_ = {{"alphabet", "01"}, {"kind", "spacing"},
               {"spacing", {{"gaps", spec.gaps}, {"cutoff", spec.cutoff}}}};
  return s;
}

Subshift Subshift::full_shift(int symbols) {
  if (symbols < 1 || symbols > 36) throw Error(ErrorCode::bad_spec, "full shift needs 1..36 symbols");
  std::string alphabet;
  for (int i = 0; i < symbols; ++i) alphabet.push_back(i < 10 ? static_cast<char>('0' + i) : static_cast<char>('a' + i - 10));
  return forbidden_blocks(alphabet, {});
}

Subshift Subshift::golden_mean() { return forbidden_blocks("01", {"11"}); }

Subshift Subshift::even_shift() {
  // state 0: even number of 0s since the last 1; state 1: odd
  return labeled_graph("01", 2, {{0, 0, '1'}, {0, 1, '0'}, {1, 0, '0'}});
}

bool Subshift::contains(const Word& w) const {
  StateSet cur = all_states(pres_);
  for (char a : w) {
    cur = step_set(pres_, cur, a);
    if (cur.empty()) return false;
  }
  return !cur.empty();
}

nlohmann::json Subshift::to_json() const {
  nlohmann::json j = source_;
  j["description"] = description_;
  j["presentation_states"] = pres_.states;
  j["presentation_edges"] = pres_.edges.size();
  if (block_length_) j["block_length"] = block_length_;
  return j;
}

Subshift build_subshift(const nlohmann::json& spec) {
  try {
    if (!spec.is_object()) throw Error(ErrorCode::bad_spec, "shift spec must be an object");
    std::string kind = spec.value("kind", "");
    auto alphabet_of = [&spec](const char* fallback) {
      if (!spec.contains("alphabet")) return std::string(fallback);
      const auto& a = spec.at("alphabet");
      if (a.is_string()) return a.get<std::string>();
      std::string out;
      for (const auto& s : a) {
        std::string sym = s.get<std::string>();
        if (sym.size() != 1) throw Error(ErrorCode::bad_spec, "alphabet symbols must be single characters");
        out += sym;
      }
      return out;
    };
    if (kind == "forbidden")
      return Subshift::forbidden_blocks(alphabet_of("01"), spec.value("forbidden", std::vector<std::string>{}));
    if (kind == "matrix")
      return Subshift::edge_graph(alphabet_of(""), spec.at("matrix").get<std::vector<std::vector<int>>>());
    if (kind == "labeled") {
      std::vector<LabeledEdge> edges;
      std::size_t states = spec.value("states", std::size_t{0});
      for (const auto& e : spec.at("labeled_edges")) {
        std::string label = e.at(2).get<std::string>();
        if (label.size() != 1) throw Error(ErrorCode::bad_spec, "edge labels must be single characters");
        LabeledEdge le{e.at(0).get<std::uint32_t>(), e.at(1).get<std::uint32_t>(), label[0]};
        states = std::max<std::size_t>(states, std::max(le.from, le.to) + 1);
        edges.push_back(le);
      }
      return Subshift::labeled_graph(alphabet_of("01"), states, edges);
    }
    if (kind == "spacing") {
      const auto& sp = spec.at("spacing");
      SpacingSpec s;
      s.cutoff = sp.at("cutoff").get<long long>();
      if (sp.contains("gaps")) s.gaps = sp.at("gaps").get<std::vector<long long>>();
      if (sp.contains("multiples_of")) {
        long long k = sp.at("multiples_of").get<long long>();
        if (k < 1) throw Error(ErrorCode::bad_spec, "multiples_of must be >= 1");
        for (long long g = 0; g <= s.cutoff; g += k) s.gaps.push_back(g);
      }
      return Subshift::spacing(s);
    }
    throw Error(ErrorCode::bad_spec, "unknown shift kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::bad_spec, e.what());
  }
}

// Languages ----------------------------------------------------------------------

std::vector<Word> language(const Subshift& shift, std::size_t n) {
  const Presentation& p = shift.presentation();
  std::vector<Word> out;
  if (p.states == 0) return out;
  std::string alphabet = shift.alphabet();
  std::sort(alphabet.begin(), alphabet.end());
  std::string prefix;
  std::function<void(const StateSet&)> walk = [&](const StateSet& cur) {
    if (prefix.size() == n) {
      out.push_back(prefix);
      return;
    }
    for (char a : alphabet) {
      StateSet next = step_set(p, cur, a);
      if (next.empty()) continue;
      prefix.push_back(a);
      walk(next);
      prefix.pop_back();
    }
  };
  walk(all_states(p));
  return out;
}

Count count_words(const Subshift& shift, std::size_t n) {
  const Presentation& p = shift.presentation();
  if (p.states == 0) return 0;
  std::map<StateSet, Count> dp{{all_states(p), 1}};
  for (std::size_t k = 0; k < n; ++k) {
    std::map<StateSet, Count> next;
    for (const auto& [set, c] : dp)
      for (char a : shift.alphabet()) {
        StateSet t = step_set(p, set, a);
        if (!t.empty()) next[t] = add_checked(next[t], c);
      }
    dp.swap(next);
  }
  Count total = 0;
  for (const auto& [set, c] : dp) total = add_checked(total, c);
  return total;
}

Count transfer_count(const Subshift& shift, std::size_t n) {
  if (!shift.is_finite_type())
    throw Error(ErrorCode::bad_spec, "transfer-matrix counting needs a finite-type shift");
  const Presentation& p = shift.presentation();
  if (p.states == 0) return n == 0 ? 1 : 0;
  if (n == 0) return 1;
  const std::size_t m = shift.block_length() - 1;
  if (n < m)
    throw Error(ErrorCode::invalid_parameter,
                "transfer count needs n >= " + std::to_string(m) + " for this block length");
  std::vector<Count> v(p.states, 1);
  for (std::size_t k = 0; k < n - m; ++k) {
    std::vector<Count> next(p.states, 0);
    for (const auto& e : p.edges) next[e.to] = add_checked(next[e.to], v[e.from]);
    v.swap(next);
  }
  Count total = 0;
  for (Count c : v) total = add_checked(total, c);
  return total;
}

// Entropy --------------------------------------------------------------------------

SpectralEstimate spectral_radius(const std::vector<std::vector<std::uint64_t>>& a, double rel_tol,
                                 std::size_t max_iter) {
  SpectralEstimate est;
  const std::size_t n = a.size();
  if (n == 0) return est;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> rows;
  for (const auto& r : a) rows.push_back(row_sparse(r));

  // irreducibility: strongly connected adjacency graph
  {
    auto reach = [&](bool transpose) {
      std::vector<bool> seen(n, false);
      std::vector<std::size_t> stack{0};
      seen[0] = true;
      while (!stack.empty()) {
        std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v = 0; v < n; ++v) {
          bool edge = transpose ? a[v][u] != 0 : a[u][v] != 0;
          if (edge && !seen[v]) {
            seen[v] = true;
            stack.push_back(v);
          }
        }
      }
      return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
    };
    est.reducible = !(reach(false) && reach(true));
  }

  std::vector<double> v(n, 1.0), w(n);
  for (std::size_t it = 1; it <= max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = v[i];  // the +I term
      for (const auto& [j, c] : rows[i]) s += static_cast<double>(c) * v[j];
      w[i] = s;
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = w[i] / v[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      norm = std::max(norm, w[i]);
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
    // keep every coordinate positive so the ratio bounds stay valid
    for (double& x : v) x = std::max(x, 1e-300);
    est.lower = lo - 1.0;
    est.upper = hi - 1.0;
    est.iterations = it;
    if (hi - lo <= rel_tol * hi) {
      est.converged = true;
      break;
    }
  }
  est.radius = 0.5 * (est.lower + est.upper);
  return est;
}

double spectral_entropy(const Subshift& shift) {
  auto est = spectral_radius(shift.presentation().adjacency());
  return est.radius > 0 ? std::log(est.radius) : -std::numeric_limits<double>::infinity();
}

EntropyReport entropy_estimates(const Subshift& shift, std::size_t n_max) {
  if (n_max < 2) throw Error(ErrorCode::invalid_parameter, "n_max must be >= 2");
  EntropyReport r;
  for (std::size_t n = 1; n <= n_max; ++n) {
    Count c = count_words(shift, n);
    double per = c > 0 ? std::log(static_cast<double>(c)) / static_cast<double>(n)
                       : -std::numeric_limits<double>::infinity();
    if (!r.rows.empty() && per > r.rows.back().per_symbol + 1e-12) r.per_symbol_nonincreasing = false;
    r.rows.push_back({n, c, per});
  }
  r.estimate = spectral_radius(shift.presentation().adjacency());
  r.reducible_warning = r.estimate.reducible;
  r.spectral = r.estimate.radius > 0 ? std::log(r.estimate.radius) : -std::numeric_limits<double>::infinity();
  Count a = r.rows[n_max - 1].words, b = r.rows[n_max - 2].words;
  r.limit_estimate = (a > 0 && b > 0) ? std::log(static_cast<double>(a) / static_cast<double>(b))
                                      : -std::numeric_limits<double>::infinity();
  return r;
}

// Classification ----------------------------------------------------------------

Classification classify_sft(const Subshift& shift) {
  const Presentation& p = shift.presentation();
  Classification c;
  const std::size_t n = p.states;
  if (n == 0) return c;

  // Tarjan SCC, iterative
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on(n, false);
  std::vector<std::uint32_t> stack;
  int counter = 0, comps = 0;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    std::vector<std::pair<std::uint32_t, std::size_t>> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on[root] = true;
    while (!call.empty()) {
      auto& [u, k] = call.back();
      if (k < p.out[u].size()) {
        std::uint32_t v = p.out[u][k++].second;
        if (index[v] < 0) {
          index[v] = low[v] = counter++;
          stack.push_back(v);
          on[v] = true;
          call.push_back({v, 0});
        } else if (on[v]) {
          low[u] = std::min(low[u], index[v]);
        }
        continue;
      }
      if (low[u] == index[u]) {
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on[w] = false;
          comp[w] = comps;
        } while (w != u);
        ++comps;
      }
      std::uint32_t done = u;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }
  c.components = static_cast<std::size_t>(comps);
  c.irreducible = comps == 1;
  if (!c.irreducible) return c;

  std::vector<long long> level(n, -1);
  std::vector<std::uint32_t> queue{0};
  level[0] = 0;
  for (std::size_t q = 0; q < queue.size(); ++q)
    for (const auto& [a, v] : p.out[queue[q]])
      if (level[v] < 0) {
        level[v] = level[queue[q]] + 1;
        queue.push_back(v);
      }
  long long g = 0;
  for (const auto& e : p.edges) g = std::gcd(g, std::llabs(level[e.from] + 1 - level[e.to]));
  c.period = g;
  c.mixing = g == 1;
  return c;
}

// Periodic points ------------------------------------------------------------------

namespace {

int mobius(std::size_t n) {
  int mu = 1;
  for (std::size_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  if (n > 1) mu = -mu;
  return mu;
}

}  // namespace

PeriodicSpectrum periodic_spectrum(const Subshift& shift, std::size_t n_max) {
  PeriodicSpectrum out;
  const Presentation& p = shift.presentation();
  if (n_max == 0) return out;
  for (std::size_t n = 1; n <= n_max; ++n) out.fixed_by[n] = 0;

  if (shift.is_finite_type()) {
    out.method = "trace";
    for (std::uint32_t s = 0; s < p.states; ++s) {
      std::vector<Count> v(p.states, 0);
      v[s] = 1;
      for (std::size_t n = 1; n <= n_max; ++n) {
        std::vector<Count> next(p.states, 0);
        for (const auto& e : p.edges)
          if (v[e.from]) next[e.to] = add_checked(next[e.to], v[e.from]);
        v.swap(next);
        out.fixed_by[n] = add_checked(out.fixed_by[n], v[s]);
      }
    }
  } else {
    out.method = "periodic-words";
    const std::size_t k = shift.alphabet().size();
    double total = 0;
    for (std::size_t n = 1; n <= n_max; ++n) total += std::pow(static_cast<double>(k), static_cast<double>(n));
    if (total > 5e6) throw Error(ErrorCode::budget_exceeded, "periodic-word enumeration too large");
    for (std::size_t n = 1; n <= n_max; ++n) {
      std::string w(n, shift.alphabet()[0]);
      std::vector<std::size_t> digits(n, 0);
      while (true) {
        // w^infinity is a point iff reading w induces a map on states with a cycle
        std::vector<long long> g(p.states, -1);
        for (std::uint32_t s = 0; s < p.states; ++s) {
          long long cur = s;
          for (char a : w) {
            auto t = p.follow(static_cast<std::uint32_t>(cur), a);
            if (!t) {
              cur = -1;
              break;
            }
            cur = *t;
          }
          g[s] = cur;
        }
        bool cycle = false;
        for (std::uint32_t s = 0; s < p.states && !cycle; ++s) {
          long long cur = s;
          for (std::size_t k2 = 0; k2 < p.states && cur >= 0; ++k2) {
            cur = g[cur];
            if (cur == s) cycle = true;
          }
        }
        if (cycle) out.fixed_by[n] += 1;
        std::size_t i = 0;
        while (i < n && ++digits[i] == k) digits[i++] = 0;
        if (i == n) break;
        for (std::size_t j = 0; j < n; ++j) w[j] = shift.alphabet()[digits[j]];
      }
    }
  }
  for (std::size_t n = 1; n <= n_max; ++n) {
    Count least = 0;
    for (std::size_t d = 1; d <= n; ++d)
      if (n % d == 0) least += static_cast<Count>(mobius(n / d)) * out.fixed_by[d];
    if (least != 0) {
      out.least[n] = least;
      out.orbits[n] = least / static_cast<Count>(n);
    }
  }
  return out;
}

BoyleReport boyle_precondition(const Subshift& x, const Subshift& y, std::size_t n_max) {
  BoyleReport r;
  for (const auto& [n, c] : periodic_spectrum(x, n_max).least)
    if (c > 0) r.x_periods.push_back(n);
  for (const auto& [n, c] : periodic_spectrum(y, n_max).least)
    if (c > 0) r.y_periods.push_back(n);
  for (std::size_t px : r.x_periods) {
    bool ok = std::any_of(r.y_periods.begin(), r.y_periods.end(), [px](std::size_t q) { return px % q == 0; });
    if (!ok) r.undivided.push_back(px);
  }
  r.per_divides = r.undivided.empty();
  r.entropy_gap = spectral_entropy(x) - spectral_entropy(y);
  r.hypotheses_hold = r.per_divides && r.entropy_gap > 1e-9;
  return r;
}

// Block codes -----------------------------------------------------------------------

Word apply_block_code(const SlidingBlockCode& code, const Word& word) {
  const std::size_t w = code.window();
  if (word.size() < w)
    throw Error(ErrorCode::length_mismatch, "word shorter than the code window");
  Word out;
  out.reserve(word.size() - w + 1);
  for (std::size_t i = 0; i + w <= word.size(); ++i) {
    auto it = code.rule.find(word.substr(i, w));
    if (it == code.rule.end())
      throw Error(ErrorCode::rule_undefined, "no rule for window '" + word.substr(i, w) + "'");
    out.push_back(it->second);
  }
  return out;
}

bool verify_factor(const SlidingBlockCode& code, const Subshift& domain, const Subshift& codomain,
                   std::size_t n) {
  if (n < code.window()) throw Error(ErrorCode::invalid_parameter, "n shorter than the code window");
  for (const auto& w : language(domain, n)) {
    Word img;
    try {
      img = apply_block_code(code, w);
    } catch (const Error&) {
      return false;
    }
    if (!codomain.contains(img)) return false;
  }
  return true;
}

SlidingBlockCode golden_to_even_code() {
  SlidingBlockCode c;
  c.memory = 0;
  c.anticipation = 1;
  c.rule = {{"00", '1'}, {"01", '0'}, {"10", '0'}};
  return c;
}

SlidingBlockCode identity_code(const std::string& alphabet) {
  SlidingBlockCode c;
  for (char a : alphabet) c.rule[std::string(1, a)] = a;
  return c;
}

CylinderDistance cylinder_metric(const Word& x, const Word& y) {
  if (x.size() != y.size() || x.size() % 2 == 0)
    throw Error(ErrorCode::length_mismatch, "central blocks must have equal odd length");
  const long long c = static_cast<long long>(x.size() / 2);
  CylinderDistance d;
  long long k = -1;
  while (k + 1 <= c && x[c - (k + 1)] == y[c - (k + 1)] && x[c + (k + 1)] == y[c + (k + 1)]) ++k;
  d.k = k;
  if (k == c) {
    d.indistinguishable = true;
    d.distance = 0.0;
  } else {
    d.distance = std::ldexp(1.0, -static_cast<int>(k + 1));
  }
  return d;
}

std::vector<long long> cylinder_hitting_set(const Subshift& shift, const Word& u, const Word& v,
                                            long long horizon) {
  if (u.empty() || v.empty()) throw Error(ErrorCode::empty_set, "cylinder words must be nonempty");
  if (!shift.contains(u) || !shift.contains(v)) throw Error(ErrorCode::empty_set, "cylinder is empty in this shift");
  const Presentation& p = shift.presentation();
  std::vector<long long> hits;
  const long long lu = static_cast<long long>(u.size());
  for (long long n = 1; n < lu && n <= horizon; ++n) {
    Word w = u;
    bool consistent = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
      long long pos = n + static_cast<long long>(i);
      if (pos < lu) {
        if (w[pos] != v[i]) consistent = false;
      } else {
        w.push_back(v[i]);
      }
    }
    if (consistent && shift.contains(w)) hits.push_back(n);
  }
  StateSet cur = all_states(p);
  for (char a : u) cur = step_set(p, cur, a);
  for (long long n = lu; n <= horizon; ++n) {
    StateSet t = cur;
    for (char a : v) {
      t = step_set(p, t, a);
      if (t.empty()) break;
    }
    if (!t.empty()) hits.push_back(n);
    cur = successors(p, cur);
  }
  return hits;
}

}  // namespace ellis

#include "ellis/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "ellis/error.hpp"

namespace ellis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint32_t kMissing = std::numeric_limits<std::uint32_t>::max();

struct TableHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (std::uint32_t x : v) h = (h ^ x) * 1099511628211ULL;
    return h;
  }
};

/// Sup-distance over the sample; stops as soon as the running sup reaches `bound`.
/// `hint` remembers where the last early stop happened and is tried first.
double sup_dist(const MetricSpaceModel& space, const PointCloud& a, const PointCloud& b, double bound = kInf,
                std::size_t* hint = nullptr) {
  double s = 0.0;
  if (hint && *hint < a.size()) {
    s = space.distance(a[*hint], b[*hint]);
    if (s >= bound) return s;
  }
  for (std::size_t x = 0; x < a.size(); ++x) {
    s = std::max(s, space.distance(a[x], b[x]));
    if (s >= bound) {
      if (hint) *hint = x;
      return s;
    }
  }
  return s;
}

double sup_dist_ids(const MetricSpaceModel& space, const std::vector<std::uint32_t>& a,
                    const std::vector<std::uint32_t>& b) {
  double s = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x)
    if (a[x] != b[x]) s = std::max(s, space.distance(PointId{a[x]}, PointId{b[x]}));
  return s;
}

std::string power_name(long long k) { return k == 0 ? "e" : "f^" + std::to_string(k); }

std::vector<std::uint32_t> snap_all(const MetricSpaceModel& space, const PointCloud& raw) {
  std::vector<std::uint32_t> ids(raw.size());
  for (std::size_t x = 0; x < raw.size(); ++x) ids[x] = space.nearest(raw[x]).id.value;
  return ids;
}

}  // namespace

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::identity: return "identity";
    case Provenance::iterate: return "iterate";
    case Provenance::limit: return "limit";
    case Provenance::composite: return "composite";
  }
  return "?";
}

std::optional<std::uint32_t> Envelope::element_of_power(long long n) const {
  if (exact) {
    if (period <= 0) return std::nullopt;
    if (n < 0) {
      if (!model->invertible()) return std::nullopt;
      long long r = ((n % period) + period) % period;
      return static_cast<std::uint32_t>(r);
    }
    if (n < index + period) return static_cast<std::uint32_t>(n);
    return static_cast<std::uint32_t>(index + (n - index) % period);
  }
  if (n == 0) return identity;
  auto it = membership.find(n);
  if (it == membership.end()) return std::nullopt;
  return it->second;
}

Point Envelope::image(std::uint32_t a, std::uint32_t x) const {
  const MapSample& s = elements.at(a);
  if (!s.raw.empty()) {
    Coords c = s.raw[x];
    return Point(c.begin(), c.end());
  }
  Coords c = model->space().point(PointId{s.ids.at(x)});
  return Point(c.begin(), c.end());
}

double Envelope::sup_distance(std::uint32_t a, std::uint32_t b) const {
  const MapSample& p = elements.at(a);
  const MapSample& q = elements.at(b);
  if (!p.raw.empty() && !q.raw.empty()) return sup_dist(model->space(), p.raw, q.raw);
  return sup_dist_ids(model->space(), p.ids, q.ids);
}

std::vector<std::uint32_t> Envelope::non_iterates() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < elements.size(); ++i)
    if (elements[i].provenance == Provenance::limit || elements[i].provenance == Provenance::composite)
      out.push_back(i);
  return out;
}

std::vector<std::string> Envelope::names() const {
  std::vector<std::string> out;
  for (const auto& e : elements) out.push_back(e.name);
  return out;
}

Json Envelope::to_json(bool with_images) const {
  Json j;
  j["exact"] = exact;
  j["model"] = model->name();
  j["size"] = elements.size();
  j["identity"] = elements[identity].name;
  j["generator"] = elements[generator].name;
  j["tau"] = tau;
  j["horizon"] = horizon;
  j["power_range"] = range == PowerRange::two_sided ? "two-sided" : "forward";
  j["stabilized"] = stabilized;
  j["max_snap_error"] = max_snap_error;
  j["limit_count"] = limit_count;
  if (exact) {
    j["index"] = index;
    j["period"] = period;
  }
  Json els = Json::array();
  for (const auto& e : elements) {
    Json el;
    el["name"] = e.name;
    el["provenance"] = std::string(to_string(e.provenance));
    if (e.provenance == Provenance::iterate) el["exponent"] = e.exponent;
    if (e.provenance == Provenance::composite)
      el["of"] = {elements[e.left].name, elements[e.right].name};
    el["powers"] = e.exponents.size();
    if (with_images && !e.ids.empty()) el["images"] = e.ids;
    els.push_back(std::move(el));
  }
  j["elements"] = std::move(els);
  if (elements.size() <= 512) {
    j["table"] = table;
  } else {
    j["table_omitted"] = true;
  }
  if (!notes.empty()) j["notes"] = notes;
  return j;
}

// Exact envelopes -------------------------------------------------------------------

Envelope exact_envelope(const CascadeModel& model) {
  return exact_envelope(std::make_shared<const CascadeModel>(model));
}

Envelope exact_envelope(std::shared_ptr<const CascadeModel> model) {
  if (!model->finite_exact())
    throw Error(ErrorCode::invalid_parameter, "exact envelopes need a finite-exact model; discretize first");
  const auto& f = model->table();
  const std::size_t n = f.size();
  std::unordered_map<std::vector<std::uint32_t>, long long, TableHash> seen;
  std::vector<std::vector<std::uint32_t>> maps;
  std::vector<std::uint32_t> cur(n);
  std::iota(cur.begin(), cur.end(), 0U);
  Envelope env;
  env.exact = true;
  env.model = model;
  while (true) {
    auto [it, inserted] = seen.emplace(cur, static_cast<long long>(maps.size()));
    if (!inserted) {
      env.index = it->second;
      env.period = static_cast<long long>(maps.size()) - it->second;
      break;
    }
    maps.push_back(cur);
    std::vector<std::uint32_t> next(n);
    for (std::size_t x = 0; x < n; ++x) next[x] = f[cur[x]];
    cur = std::move(next);
  }
  const long long count = static_cast<long long>(maps.size());
  env.horizon = count;
  env.range = model->invertible() ? PowerRange::two_sided : PowerRange::forward;
  for (long long k = 0; k < count; ++k) {
    MapSample s;
    s.name = power_name(k);
    s.provenance = k == 0 ? Provenance::identity : Provenance::iterate;
    s.exponent = k;
    s.exponents = {k};
    s.ids = std::move(maps[static_cast<std::size_t>(k)]);
    env.elements.push_back(std::move(s));
  }
  env.identity = 0;
  env.generator = *env.element_of_power(1);
  env.table.assign(static_cast<std::size_t>(count), std::vector<std::uint32_t>(static_cast<std::size_t>(count)));
  for (long long a = 0; a < count; ++a)
    for (long long b = 0; b < count; ++b)
      env.table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = *env.element_of_power(a + b);
  std::vector<double> to_e(static_cast<std::size_t>(count));
  for (long long k = 0; k < count; ++k)
    to_e[static_cast<std::size_t>(k)] = sup_dist_ids(model->space(), env.elements[static_cast<std::size_t>(k)].ids,
                                                     env.elements[0].ids);
  for (long long k = -(model->invertible() ? count : 0); k <= count; ++k) {
    std::uint32_t e = *env.element_of_power(k);
    env.membership[k] = e;
    env.identity_distance[k] = to_e[e];
  }
  return env;
}

// Approximate envelopes ------------------------------------------------------------

namespace {

class ApproxBuilder {
 public:
  ApproxBuilder(std::shared_ptr<const CascadeModel> model, const ApproxOptions& o)
      : model_(std::move(model)), m_(*model_), space_(m_.space()), o_(o) {}

  Envelope run();

 private:
  PointCloud advance(const PointCloud& in, long long dir) const {
    PointCloud out(in.dim(), in.size());
    for (std::size_t x = 0; x < in.size(); ++x) m_.apply(in[x], dir, out[x]);
    return out;
  }

  /// Nearest element in sup-distance, with early abort against the running best.
  std::pair<std::uint32_t, double> nearest(const PointCloud& cand) const {
    std::uint32_t best = 0;
    double bd = kInf;
    for (std::uint32_t i = 0; i < env_.elements.size(); ++i) {
      double d = sup_dist(space_, cand, env_.elements[i].raw, bd, &hint_);
      if (d < bd) {
        bd = d;
        best = i;
        if (bd == 0.0) break;
      }
    }
    return {best, bd};
  }

  void ensure_table_size() {
    const std::size_t k = env_.elements.size();
    env_.table.resize(k);
    env_.product_error.resize(k);
    for (std::size_t a = 0; a < k; ++a) {
      env_.table[a].resize(k, kMissing);
      env_.product_error[a].resize(k, 0.0F);
    }
  }

  /// Matches a product against the elements, adding it as a composite when nothing is within tau.
  std::uint32_t place(PointCloud cand, std::uint32_t a, std::uint32_t b, double& err) {
    auto [idx, d] = nearest(cand);
    if (d < o_.tau) {
      err = d;
      return idx;
    }
    if (env_.elements.size() >= o_.max_elements) {
      if (env_.stabilized) env_.notes.push_back("element budget reached; products snapped to nearest element");
      env_.stabilized = false;
      err = d;
      return idx;
    }
    MapSample s;
    s.provenance = Provenance::composite;
    s.left = a;
    s.right = b;
    s.name = "lim#" + std::to_string(++lim_counter_);
    s.ids = snap_all(space_, cand);
    s.raw = std::move(cand);
    env_.elements.push_back(std::move(s));
    ensure_table_size();
    err = 0.0;
    return static_cast<std::uint32_t>(env_.elements.size() - 1);
  }

  void set(std::uint32_t a, std::uint32_t b, std::uint32_t v, double err) {
    env_.table[a][b] = v;
    env_.product_error[a][b] = static_cast<float>(err);
    env_.max_snap_error = std::max(env_.max_snap_error, err);
  }

  /// f^j o X for every iterate element f^j, and X o f^j by commutation with f.
  void fill_iterate_products(std::uint32_t xi) {
    for (int dir : {1, -1}) {
      std::vector<std::pair<long long, std::uint32_t>> reps;
      for (std::uint32_t a = 0; a < env_.elements.size(); ++a) {
        const auto& s = env_.elements[a];
        if (s.provenance == Provenance::iterate && (s.exponent > 0) == (dir > 0)) reps.emplace_back(std::llabs(s.exponent), a);
      }
      if (reps.empty()) continue;
      std::sort(reps.begin(), reps.end());
      PointCloud cur = env_.elements[xi].raw;
      long long at = 0;
      for (auto [j, a] : reps) {
        while (at < j) {
          cur = advance(cur, dir);
          ++at;
        }
        if (env_.table[a][xi] != kMissing) continue;
        double err = 0.0;
        std::uint32_t v = place(cur, a, xi, err);
        set(a, xi, v, err);
        set(xi, a, v, err);
      }
    }
  }

  std::shared_ptr<const CascadeModel> model_;
  const CascadeModel& m_;
  const MetricSpaceModel& space_;
  ApproxOptions o_;
  Envelope env_;
  std::size_t lim_counter_ = 0;
  mutable std::size_t hint_ = 0;
};

Envelope ApproxBuilder::run() {
  if (o_.horizon < 1) throw Error(ErrorCode::invalid_parameter, "horizon must be >= 1");
  if (!(o_.tau > 0.0)) throw Error(ErrorCode::invalid_parameter, "tau must be > 0");
  const bool two = o_.range == PowerRange::two_sided;
  if (two && !m_.invertible())
    throw Error(ErrorCode::invalid_parameter, "two-sided power ranges need an exact inverse evaluator");
  const long long N = o_.horizon;
  const double tau = o_.tau;
  env_.exact = false;
  env_.model = model_;
  env_.tau = tau;
  env_.horizon = N;
  env_.range = o_.range;

  const PointCloud& id = space_.points();
  std::map<long long, PointCloud> img;
  {
    PointCloud cur = id;
    for (long long k = 1; k <= N; ++k) img[k] = cur = advance(cur, 1);
    if (two) {
      cur = id;
      for (long long k = 1; k <= N; ++k) img[-k] = cur = advance(cur, -1);
    }
  }
  PointCloud frontier_pos = img[N];
  PointCloud frontier_neg = two ? img[-N] : PointCloud();
  for (auto& [k, p] : img) env_.identity_distance[k] = sup_dist(space_, p, id);

  // tail clusters, deepest iterate first
  struct Cluster {
    long long rep;
    std::vector<long long> members;
  };
  std::vector<Cluster> clusters;
  for (long long j = N; j > N / 2; --j) {
    for (long long s : {j, -j}) {
      if (s < 0 && !two) continue;
      bool joined = false;
      for (auto& c : clusters) {
        if (sup_dist(space_, img[s], img[c.rep], tau, &hint_) < tau) {
          c.members.push_back(s);
          joined = true;
          break;
        }
      }
      if (!joined) clusters.push_back({s, {s}});
    }
  }
  std::vector<MapSample> limits;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (clusters[c].members.size() < o_.min_witnesses) continue;
    if (env_.identity_distance[clusters[c].rep] < tau) continue;
    MapSample s;
    s.provenance = Provenance::limit;
    s.cluster = c;
    s.raw = img[clusters[c].rep];
    limits.push_back(std::move(s));
  }

  // membership of each power: e, then limits, then iterates, else a new iterate
  MapSample e;
  e.name = "e";
  e.provenance = Provenance::identity;
  e.raw = id;
  e.exponents = {0};
  std::vector<MapSample> iterates;
  enum class Tag { identity, limit, iterate };
  std::map<long long, std::pair<Tag, std::size_t>> tags;
  for (long long j = 1; j <= N; ++j) {
    for (long long s : {j, -j}) {
      if (s < 0 && !two) continue;
      const PointCloud& p = img[s];
      double de = env_.identity_distance[s];
      if (de < tau) {
        tags[s] = {Tag::identity, 0};
        e.exponents.push_back(s);
        e.snap_error = std::max(e.snap_error, de);
        continue;
      }
      auto closest = [&](std::vector<MapSample>& pool) -> std::optional<std::pair<std::size_t, double>> {
        std::optional<std::pair<std::size_t, double>> best;
        for (std::size_t i = 0; i < pool.size(); ++i) {
          double d = sup_dist(space_, p, pool[i].raw, best ? best->second : tau, &hint_);
          if (d < (best ? best->second : tau)) best = {{i, d}};
        }
        return best;
      };
      if (auto hit = closest(limits)) {
        tags[s] = {Tag::limit, hit->first};
        limits[hit->first].exponents.push_back(s);
        limits[hit->first].snap_error = std::max(limits[hit->first].snap_error, hit->second);
        continue;
      }
      if (auto hit = closest(iterates)) {
        tags[s] = {Tag::iterate, hit->first};
        iterates[hit->first].exponents.push_back(s);
        iterates[hit->first].snap_error = std::max(iterates[hit->first].snap_error, hit->second);
        continue;
      }
      MapSample it;
      it.name = power_name(s);
      it.provenance = Provenance::iterate;
      it.exponent = s;
      it.exponents = {s};
      it.raw = std::move(img[s]);
      tags[s] = {Tag::iterate, iterates.size()};
      iterates.push_back(std::move(it));
    }
  }
  img.clear();

  const std::uint32_t first_limit = static_cast<std::uint32_t>(1 + iterates.size());
  env_.elements.push_back(std::move(e));
  for (auto& it : iterates) env_.elements.push_back(std::move(it));
  for (auto& l : limits) {
    l.name = "lim#" + std::to_string(++lim_counter_);
    env_.elements.push_back(std::move(l));
  }
  env_.limit_count = limits.size();
  for (auto& [s, t] : tags) {
    std::uint32_t idx = t.first == Tag::identity ? 0
                        : t.first == Tag::iterate ? static_cast<std::uint32_t>(1 + t.second)
                                                  : static_cast<std::uint32_t>(first_limit + t.second);
    env_.membership[s] = idx;
  }
  env_.membership[0] = 0;
  for (const auto& el : env_.elements) env_.max_snap_error = std::max(env_.max_snap_error, el.snap_error);
  env_.identity = 0;
  env_.generator = env_.membership.at(1);

  // snapped images: always for non-iterates, for the rest when affordable
  const double cost = static_cast<double>(space_.size()) * static_cast<double>(space_.size()) *
                      static_cast<double>(env_.elements.size());
  const bool all_ids = space_.has_locator() || cost <= 5e7;
  for (auto& el : env_.elements) {
    if (el.provenance == Provenance::identity) {
      el.ids.resize(space_.size());
      std::iota(el.ids.begin(), el.ids.end(), 0U);
    } else if (all_ids || el.provenance != Provenance::iterate) {
      el.ids = snap_all(space_, el.raw);
    }
  }

  // powers just past the horizon, for products of iterates
  std::map<long long, std::pair<std::uint32_t, double>> ext;
  for (int dir : {1, -1}) {
    if (dir < 0 && !two) continue;
    PointCloud cur = dir > 0 ? frontier_pos : frontier_neg;
    for (long long k = N + 1; k <= 2 * N; ++k) {
      cur = advance(cur, dir);
      auto hit = nearest(cur);
      ext[dir * k] = hit;
      if (hit.second >= tau && env_.stabilized) {
        env_.stabilized = false;
        env_.notes.push_back("f^" + std::to_string(dir * k) + " is farther than tau from every element");
      }
    }
  }
  auto power_element = [&](long long k) -> std::pair<std::uint32_t, double> {
    if (auto it = env_.membership.find(k); it != env_.membership.end()) return {it->second, 0.0};
    return ext.at(k);
  };

  ensure_table_size();
  const std::size_t base_count = env_.elements.size();
  for (std::uint32_t a = 0; a < base_count; ++a) {
    for (std::uint32_t b = 0; b < base_count; ++b) {
      const auto& pa = env_.elements[a];
      const auto& pb = env_.elements[b];
      if (pa.provenance == Provenance::identity) {
        set(a, b, b, 0.0);
      } else if (pb.provenance == Provenance::identity) {
        set(a, b, a, 0.0);
      } else if (pa.provenance == Provenance::iterate && pb.provenance == Provenance::iterate) {
        auto [v, err] = power_element(pa.exponent + pb.exponent);
        set(a, b, v, err);
      }
    }
  }
  // closure over non-iterates, including composites appended on the way
  for (std::uint32_t x = 0; x < env_.elements.size(); ++x) {
    if (env_.elements[x].provenance == Provenance::identity || env_.elements[x].provenance == Provenance::iterate)
      continue;
    fill_iterate_products(x);
    for (std::uint32_t y = 0; y <= x; ++y) {
      for (auto [a, b] : {std::pair{x, y}, std::pair{y, x}}) {
        if (env_.table[a][b] != kMissing) continue;
        const auto& pa = env_.elements[a];
        const auto& pb = env_.elements[b];
        if (pa.provenance == Provenance::identity) {
          set(a, b, b, 0.0);
          continue;
        }
        if (pb.provenance == Provenance::identity) {
          set(a, b, a, 0.0);
          continue;
        }
        PointCloud cand(space_.dim(), space_.size());
        for (std::size_t p = 0; p < space_.size(); ++p) {
          Coords c = pa.raw[pb.ids[p]];
          std::copy(c.begin(), c.end(), cand[p].begin());
        }
        double err = 0.0;
        std::uint32_t v = place(std::move(cand), a, b, err);
        set(a, b, v, err);
      }
    }
  }
  for (const auto& row : env_.table)
    for (std::uint32_t v : row)
      if (v == kMissing) throw Error(ErrorCode::invariant_violation, "composition table left incomplete");
  return std::move(env_);
}

}  // namespace

Envelope approx_envelope(std::shared_ptr<const CascadeModel> model, const ApproxOptions& options) {
  return ApproxBuilder(std::move(model), options).run();
}

Envelope approx_envelope(const CascadeModel& model, const ApproxOptions& options) {
  return approx_envelope(std::make_shared<const CascadeModel>(model), options);
}

// Checks ------------------------------------------------------------------------------

IsolationResult identity_isolated(const Envelope& env, double tau, std::optional<long long> horizon) {
  IsolationResult r;
  r.closest = kInf;
  if (env.exact) {
    const long long h = horizon.value_or(env.index + env.period);
    std::vector<std::optional<double>> cache(env.size());
    for (long long n = 1; n <= h; ++n) {
      std::uint32_t a = *env.element_of_power(n);
      if (!cache[a]) cache[a] = env.sup_distance(a, env.identity);
      r.closest = std::min(r.closest, *cache[a]);
      if (*cache[a] < tau) {
        r.isolated = false;
        r.witness = n;
        return r;
      }
    }
    return r;
  }
  const long long h = std::min(horizon.value_or(env.horizon), env.horizon);
  for (long long n = 1; n <= h; ++n) {
    double d = env.identity_distance.at(n);
    r.closest = std::min(r.closest, d);
    if (d < tau) {
      r.isolated = false;
      r.witness = n;
      return r;
    }
  }
  return r;
}

PowerDecomposition envelope_power_decomposition(const CascadeModel& model, long long n) {
  if (!model.finite_exact())
    throw Error(ErrorCode::invalid_parameter, "power decomposition needs a finite-exact model");
  if (n < 1) throw Error(ErrorCode::invalid_parameter, "power must be >= 1");
  PowerDecomposition r;
  r.n = n;
  Envelope full = exact_envelope(model);
  std::set<std::vector<std::uint32_t>> lhs;
  for (const auto& e : full.elements) lhs.insert(e.ids);

  const auto& f = model.table();
  std::vector<std::uint32_t> fn(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) {
    std::uint32_t y = static_cast<std::uint32_t>(x);
    for (long long k = 0; k < n; ++k) y = f[y];
    fn[x] = y;
  }
  Envelope pow_env = exact_envelope(
      CascadeModel::finite(model.name() + "^" + std::to_string(n), model.params(), model.space_ptr(), fn));
  r.power_envelope_size = pow_env.size();
  std::set<std::vector<std::uint32_t>> rhs;
  for (const auto& el : pow_env.elements) {
    std::vector<std::uint32_t> cur = el.ids;
    for (long long k = 0; k < n; ++k) {
      rhs.insert(cur);
      for (auto& v : cur) v = f[v];
    }
  }
  r.lhs_size = lhs.size();
  r.rhs_size = rhs.size();
  r.equal = lhs == rhs;
  return r;
}

ThetaReport theta_check(const Envelope& base_env, const Envelope& hyper_env, const HyperCascadeModel& hyper) {
  ThetaReport r;
  const std::size_t n = hyper.base().size();
  const auto& points = hyper.points();
  const MetricSpaceModel& bspace = base_env.model->space();
  std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, TableHash> base_index;
  if (base_env.exact)
    for (std::uint32_t b = 0; b < base_env.size(); ++b) base_index.emplace(base_env.elements[b].ids, b);

  r.theta.assign(hyper_env.size(), std::nullopt);
  for (std::uint32_t a = 0; a < hyper_env.size(); ++a) {
    const auto& ids = hyper_env.elements[a].ids;
    if (ids.empty()) throw Error(ErrorCode::invalid_parameter, "hyper envelope lacks snapped images");
    std::vector<std::uint32_t> restricted(n);
    bool escaped = false;
    for (std::uint32_t x = 0; x < n; ++x) {
      const auto& img = points[ids[x]].members;
      if (img.size() != 1) {
        escaped = true;
        break;
      }
      restricted[x] = img[0];
    }
    if (escaped) {
      ++r.singleton_escapes;
      r.well_defined = false;
      continue;
    }
    if (base_env.exact) {
      auto it = base_index.find(restricted);
      if (it != base_index.end()) r.theta[a] = it->second;
    } else {
      double best = kInf;
      for (std::uint32_t b = 0; b < base_env.size(); ++b) {
        double s = 0.0;
        for (std::uint32_t x = 0; x < n && s < best; ++x) {
          Point img = base_env.image(b, x);
          s = std::max(s, bspace.distance(bspace.point(PointId{restricted[x]}), img));
        }
        if (s < best) {
          best = s;
          if (s < base_env.tau) r.theta[a] = b;
        }
      }
      if (best >= base_env.tau) r.theta[a].reset();
    }
    if (!r.theta[a]) {
      ++r.unmatched;
      r.well_defined = false;
    }
  }
  std::set<std::uint32_t> hit;
  bool injective = true;
  for (const auto& t : r.theta) {
    if (!t) continue;
    if (!hit.insert(*t).second) injective = false;
  }
  r.injective = injective && r.well_defined;
  r.surjective = hit.size() == base_env.size();
  for (std::uint32_t a = 0; a < hyper_env.size(); ++a) {
    for (std::uint32_t b = 0; b < hyper_env.size(); ++b) {
      auto ab = r.theta[hyper_env.compose(a, b)];
      if (!r.theta[a] || !r.theta[b] || !ab) continue;
      if (*ab != base_env.compose(*r.theta[a], *r.theta[b])) {
        ++r.homomorphism_violations;
        if (r.violating_pairs.size() < 16) r.violating_pairs.emplace_back(a, b);
      }
    }
  }
  return r;
}

InducibilityReport inducibility_check(const HyperCascadeModel& hyper, const std::vector<std::uint32_t>& alpha,
                                      const std::vector<std::vector<std::uint32_t>>& others) {
  InducibilityReport r;
  const auto& points = hyper.points();
  if (alpha.size() != points.size())
    throw Error(ErrorCode::length_mismatch, "map must be total on the hyper model");
  for (std::uint32_t x = 0; x < hyper.base().size(); ++x)
    if (points[alpha[x]].members.size() != 1) r.singletons_ok = false;

  for (std::uint32_t b = 0; b < points.size() && r.monotone_ok; ++b) {
    const auto& mem = points[b].members;
    if (mem.size() < 2) continue;
    const std::uint32_t full = (1U << mem.size()) - 1;
    for (std::uint32_t mask = 1; mask < full; ++mask) {
      std::vector<std::uint32_t> sub;
      for (std::size_t i = 0; i < mem.size(); ++i)
        if (mask & (1U << i)) sub.push_back(mem[i]);
      auto a = hyper.find(HyperPoint{sub});
      if (!a) continue;
      if (!points[alpha[*a]].subset_of(points[alpha[b]])) {
        r.monotone_ok = false;
        break;
      }
    }
  }

  for (std::uint32_t o = 0; o < others.size(); ++o) {
    const auto& beta = others[o];
    if (beta == alpha || beta.size() != alpha.size()) continue;
    bool below = true;
    for (std::size_t a = 0; a < alpha.size() && below; ++a)
      below = points[beta[a]].subset_of(points[alpha[a]]);
    if (below) {
      r.minimal_ok = false;
      r.smaller = o;
      break;
    }
  }
  return r;
}

StabilizationReport stabilization_diagnostic(std::shared_ptr<const CascadeModel> model,
                                             const std::vector<long long>& horizons, double tau,
                                             PowerRange range, std::size_t max_elements) {
  StabilizationReport r;
  r.horizons = horizons;
  for (std::size_t i = 1; i < horizons.size(); ++i)
    if (horizons[i] <= horizons[i - 1]) throw Error(ErrorCode::invalid_parameter, "horizons must increase");
  for (long long h : horizons) {
    ApproxOptions o;
    o.horizon = h;
    o.tau = tau;
    o.range = range;
    o.max_elements = max_elements;
    Envelope env = approx_envelope(model, o);
    r.counts.push_back(env.size());
    r.stabilized.push_back(env.stabilized);
  }
  bool growing = r.counts.size() >= 2;
  for (std::size_t i = 1; i < r.counts.size(); ++i)
    if (r.counts[i] <= r.counts[i - 1]) growing = false;
  if (growing) {
    r.verdict = "growing";
  } else if (r.counts.size() >= 2 && r.counts.back() == r.counts[r.counts.size() - 2]) {
    r.verdict = "stabilizing";
  } else {
    r.verdict = "inconclusive";
  }
  return r;
}

std::string render_table(const Envelope& env) {
  auto names = env.names();
  std::size_t w = 1;
  for (const auto& s : names) w = std::max(w, s.size());
  std::ostringstream out;
  auto cell = [&](const std::string& s) { out << ' ' << s << std::string(w - s.size(), ' '); };
  cell("o");
  out << " |";
  for (const auto& s : names) cell(s);
  out << '\n' << std::string((w + 1) * (names.size() + 1) + 2, '-') << '\n';
  for (std::size_t a = 0; a < names.size(); ++a) {
    cell(names[a]);
    out << " |";
    for (std::size_t b = 0; b < names.size(); ++b) cell(names[env.table[a][b]]);
    out << '\n';
  }
  return out.str();
}

}  // namespace ellis

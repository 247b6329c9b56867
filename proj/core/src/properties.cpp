#include "ellis/properties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "ellis/error.hpp"
#include "ellis/hyperspace.hpp"

namespace ellis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PropertyVerdict verdict(std::string name, bool holds, long long horizon, double tau, Json witness) {
  return {std::move(name), holds ? Verdict::holds : Verdict::fails, horizon, tau, std::move(witness)};
}

/// Snapped images of `members` under f^n for n = 1..horizon (row n-1).
std::vector<std::vector<std::uint32_t>> orbit_ids(const CascadeModel& m, const std::vector<std::uint32_t>& members,
                                                  long long horizon, long long dir = 1) {
  std::vector<std::vector<std::uint32_t>> out(static_cast<std::size_t>(horizon));
  if (m.finite_exact()) {
    const std::vector<std::uint32_t>* t = &m.table();
    if (dir < 0) {
      t = m.inverse_table();
      if (!t) throw Error(ErrorCode::preimages_unavailable, "map is not invertible");
    }
    std::vector<std::uint32_t> cur = members;
    for (long long n = 0; n < horizon; ++n) {
      for (auto& c : cur) c = (*t)[c];
      out[static_cast<std::size_t>(n)] = cur;
    }
    return out;
  }
  const auto& space = m.space();
  PointCloud cur(space.dim());
  for (std::uint32_t x : members) cur.push_back(space.point(PointId{x}));
  PointCloud next(space.dim(), members.size());
  for (long long n = 0; n < horizon; ++n) {
    auto& row = out[static_cast<std::size_t>(n)];
    row.resize(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
      m.apply(cur[i], dir, next[i]);
      row[i] = space.nearest(next[i]).id.value;
    }
    std::swap(cur, next);
  }
  return out;
}

/// Raw orbit of a point: row n holds f^n(p), n = 0..horizon.
PointCloud raw_orbit(const CascadeModel& m, Coords p, long long horizon) {
  PointCloud out(p.size());
  out.reserve(static_cast<std::size_t>(horizon) + 1);
  out.push_back(p);
  Point cur(p.begin(), p.end()), next(p.size());
  for (long long n = 1; n <= horizon; ++n) {
    m.apply(cur, 1, next);
    out.push_back(next);
    std::swap(cur, next);
  }
  return out;
}

std::vector<std::uint32_t> neighbour_ids(const MetricSpaceModel& space, std::uint32_t x) {
  std::set<std::uint32_t> ids;
  PointCloud nb = space.neighbors(PointId{x});
  for (std::size_t i = 0; i < nb.size(); ++i) {
    std::uint32_t id = space.nearest(nb[i]).id.value;
    if (id != x) ids.insert(id);
  }
  return {ids.begin(), ids.end()};
}

void evaluate(TransitivityReport& r, const std::vector<std::vector<std::vector<char>>>& marks) {
  const long long h = r.horizon;
  const std::size_t c = marks.size();
  r.hits.assign(c, std::vector<std::vector<long long>>(c));
  Json trans_fail = nullptr, mix_fail = nullptr, thick_fail = nullptr;
  long long worst_tail = 0;
  std::size_t longest_needed = 0;
  // a mixing tail starting by h/2+1 is a run of h - h/2, so short horizons ask for no more
  const std::size_t run_needed = std::min(r.run_length, static_cast<std::size_t>(h - h / 2));
  for (std::size_t u = 0; u < c; ++u) {
    for (std::size_t v = 0; v < c; ++v) {
      const auto& mk = marks[u][v];
      for (long long n = 1; n <= h; ++n)
        if (mk[static_cast<std::size_t>(n)]) r.hits[u][v].push_back(n);
      if (r.hits[u][v].empty() && trans_fail.is_null()) trans_fail = {{"U", r.labels[u]}, {"V", r.labels[v]}};
      long long tail = h + 1;
      while (tail > 1 && mk[static_cast<std::size_t>(tail - 1)]) --tail;
      if (tail > h / 2 + 1 || tail > h) {
        if (mix_fail.is_null()) mix_fail = {{"U", r.labels[u]}, {"V", r.labels[v]}, {"tail_start", tail}};
      } else {
        worst_tail = std::max(worst_tail, tail);
      }
      std::size_t run = 0, best = 0;
      for (long long n = 1; n <= h; ++n) {
        run = mk[static_cast<std::size_t>(n)] ? run + 1 : 0;
        best = std::max(best, run);
      }
      if (best < run_needed && thick_fail.is_null())
        thick_fail = {{"U", r.labels[u]}, {"V", r.labels[v]}, {"longest_run", best}};
      longest_needed = std::max(longest_needed, best);
    }
  }
  // product-pair test on (U1,V1),(U2,V2)
  Json product_fail = nullptr;
  const std::size_t pairs = c * c;
  auto intersects = [&](std::size_t p, std::size_t q) {
    const auto& a = marks[p / c][p % c];
    const auto& b = marks[q / c][q % c];
    for (long long n = 1; n <= h; ++n)
      if (a[static_cast<std::size_t>(n)] && b[static_cast<std::size_t>(n)]) return true;
    return false;
  };
  auto record = [&](std::size_t p, std::size_t q) {
    product_fail = {{"U1", r.labels[p / c]}, {"V1", r.labels[p % c]}, {"U2", r.labels[q / c]}, {"V2", r.labels[q % c]}};
  };
  bool sampled = pairs > 400;
  if (!sampled) {
    for (std::size_t p = 0; p < pairs && product_fail.is_null(); ++p)
      for (std::size_t q = p; q < pairs && product_fail.is_null(); ++q)
        if (!intersects(p, q)) record(p, q);
  } else {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> pick(0, pairs - 1);
    for (int i = 0; i < 100000 && product_fail.is_null(); ++i) {
      std::size_t p = pick(rng), q = pick(rng);
      if (!intersects(p, q)) record(p, q);
    }
  }
  r.transitive = verdict("transitive", trans_fail.is_null(), h, 0.0,
                         trans_fail.is_null() ? Json{{"pairs", pairs}} : trans_fail);
  bool wm = product_fail.is_null() && thick_fail.is_null();
  Json wm_w = wm ? Json{{"product_pairs", sampled ? "sampled" : "exhaustive"}, {"run_length", run_needed}}
                 : (product_fail.is_null() ? thick_fail : product_fail);
  r.weakly_mixing = verdict("weakly_mixing", wm, h, 0.0, wm_w);
  r.mixing = verdict("mixing", mix_fail.is_null(), h, 0.0,
                     mix_fail.is_null() ? Json{{"latest_tail_start", worst_tail}} : mix_fail);
  r.chain_ok = (!r.mixing.holds() || r.weakly_mixing.holds()) && (!r.weakly_mixing.holds() || r.transitive.holds());
}

bool cover_dense(const std::vector<char>& seen, const std::vector<std::vector<std::uint32_t>>& cover_members) {
  for (const auto& mem : cover_members)
    if (std::none_of(mem.begin(), mem.end(), [&](std::uint32_t x) { return seen[x] != 0; })) return false;
  return true;
}

}  // namespace

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

Json to_json(const PropertyVerdict& v) {
  return {{"property", v.property}, {"verdict", std::string(to_string(v.verdict))},
          {"horizon", v.horizon},   {"tau", v.tau},
          {"witness", v.witness}};
}

OpenSet OpenSet::ball(PointId center, double radius) {
  OpenSet o;
  o.kind = Kind::ball;
  o.center = center;
  o.radius = radius;
  return o;
}

OpenSet OpenSet::points(std::vector<std::uint32_t> ids) {
  OpenSet o;
  o.kind = Kind::points;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  o.members = std::move(ids);
  return o;
}

OpenSet OpenSet::cylinder(Word w) {
  OpenSet o;
  o.kind = Kind::cylinder;
  o.word = std::move(w);
  return o;
}

std::string OpenSet::label() const {
  switch (kind) {
    case Kind::ball: return "B(" + std::to_string(center.value) + "," + std::to_string(radius) + ")";
    case Kind::cylinder: return "[" + word + "]";
    case Kind::points: {
      std::string s = "{";
      for (std::size_t i = 0; i < members.size(); ++i) s += (i ? "," : "") + std::to_string(members[i]);
      return s + "}";
    }
  }
  return "?";
}

std::vector<std::uint32_t> resolve(const CascadeModel& model, const OpenSet& u) {
  const auto& space = model.space();
  std::vector<std::uint32_t> out;
  switch (u.kind) {
    case OpenSet::Kind::cylinder:
      throw Error(ErrorCode::invalid_parameter, "cylinder sets are evaluated on a subshift");
    case OpenSet::Kind::points:
      for (std::uint32_t x : u.members) {
        space.check(PointId{x});
        out.push_back(x);
      }
      break;
    case OpenSet::Kind::ball:
      space.check(u.center);
      for (std::uint32_t x = 0; x < space.size(); ++x)
        if (space.distance(u.center, PointId{x}) < u.radius) out.push_back(x);
      break;
  }
  if (out.empty()) throw Error(ErrorCode::empty_set, "open set " + u.label() + " misses the sample");
  return out;
}

std::vector<OpenSet> default_cover(const CascadeModel& model, std::optional<double> radius) {
  const auto& space = model.space();
  std::vector<OpenSet> cover;
  if (model.finite_exact() && !radius) {
    for (std::uint32_t x = 0; x < space.size(); ++x) cover.push_back(OpenSet::points({x}));
    return cover;
  }
  const double r = radius.value_or(4.0 * space.resolution());
  if (!(r > 0.0)) throw Error(ErrorCode::invalid_parameter, "cover radius must be positive");
  std::vector<char> covered(space.size(), 0);
  for (std::uint32_t x = 0; x < space.size(); ++x) {
    if (covered[x]) continue;
    cover.push_back(OpenSet::ball(PointId{x}, r));
    for (std::uint32_t y = 0; y < space.size(); ++y)
      if (!covered[y] && space.distance(PointId{x}, PointId{y}) < r) covered[y] = 1;
  }
  return cover;
}

std::vector<OpenSet> cylinder_cover(const Subshift& shift, std::size_t max_len) {
  std::vector<OpenSet> cover;
  for (std::size_t len = 1; len <= max_len; ++len)
    for (const Word& w : language(shift, len)) cover.push_back(OpenSet::cylinder(w));
  return cover;
}

std::vector<long long> hitting_set(const CascadeModel& model, const OpenSet& u, const OpenSet& v, long long horizon) {
  if (horizon < 1) throw Error(ErrorCode::invalid_parameter, "horizon must be >= 1");
  auto um = resolve(model, u);
  auto vm = resolve(model, v);
  std::vector<char> in_v(model.size(), 0);
  for (std::uint32_t x : vm) in_v[x] = 1;
  auto orbits = orbit_ids(model, um, horizon);
  std::vector<long long> out;
  for (long long n = 1; n <= horizon; ++n) {
    const auto& row = orbits[static_cast<std::size_t>(n - 1)];
    if (std::any_of(row.begin(), row.end(), [&](std::uint32_t x) { return in_v[x] != 0; })) out.push_back(n);
  }
  return out;
}

std::vector<long long> hitting_set(const Subshift& shift, const OpenSet& u, const OpenSet& v, long long horizon) {
  if (u.kind != OpenSet::Kind::cylinder || v.kind != OpenSet::Kind::cylinder)
    throw Error(ErrorCode::invalid_parameter, "subshift hitting sets take cylinder sets");
  return cylinder_hitting_set(shift, u.word, v.word, horizon);
}

TransitivityReport classify_transitivity(const CascadeModel& model, long long horizon,
                                         const std::vector<OpenSet>& cover, std::size_t run_length) {
  if (horizon < 1) throw Error(ErrorCode::invalid_parameter, "horizon must be >= 1");
  TransitivityReport r;
  r.horizon = horizon;
  r.run_length = run_length;
  r.cover_size = cover.size();
  const std::size_t c = cover.size();
  std::vector<std::vector<std::uint32_t>> members;
  std::vector<std::vector<std::uint32_t>> owners(model.size());
  for (std::size_t i = 0; i < c; ++i) {
    members.push_back(resolve(model, cover[i]));
    r.labels.push_back(cover[i].label());
    for (std::uint32_t x : members.back()) owners[x].push_back(static_cast<std::uint32_t>(i));
  }
  std::vector<std::vector<std::vector<char>>> marks(
      c, std::vector<std::vector<char>>(c, std::vector<char>(static_cast<std::size_t>(horizon) + 1, 0)));
  for (std::size_t u = 0; u < c; ++u) {
    auto orbits = orbit_ids(model, members[u], horizon);
    for (long long n = 1; n <= horizon; ++n)
      for (std::uint32_t x : orbits[static_cast<std::size_t>(n - 1)])
        for (std::uint32_t v : owners[x]) marks[u][v][static_cast<std::size_t>(n)] = 1;
  }
  evaluate(r, marks);
  return r;
}

TransitivityReport classify_transitivity(const Subshift& shift, long long horizon, std::size_t max_len,
                                         std::size_t run_length) {
  if (horizon < 1) throw Error(ErrorCode::invalid_parameter, "horizon must be >= 1");
  TransitivityReport r;
  r.horizon = horizon;
  r.run_length = run_length;
  auto cover = cylinder_cover(shift, max_len);
  const std::size_t c = cover.size();
  r.cover_size = c;
  for (const auto& o : cover) r.labels.push_back(o.label());
  std::vector<std::vector<std::vector<char>>> marks(
      c, std::vector<std::vector<char>>(c, std::vector<char>(static_cast<std::size_t>(horizon) + 1, 0)));
  for (std::size_t u = 0; u < c; ++u)
    for (std::size_t v = 0; v < c; ++v)
      for (long long n : cylinder_hitting_set(shift, cover[u].word, cover[v].word, horizon))
        marks[u][v][static_cast<std::size_t>(n)] = 1;
  evaluate(r, marks);
  return r;
}

StrongTransitivityReport strong_transitivity_check(const CascadeModel& model, long long horizon,
                                                   const std::vector<OpenSet>& cover) {
  StrongTransitivityReport r;
  const std::size_t n = model.size();
  std::vector<std::vector<std::uint32_t>> cover_members;
  for (const auto& o : cover) cover_members.push_back(resolve(model, o));

  std::vector<std::vector<std::uint32_t>> pre;
  if (model.finite_exact()) {
    pre = model.preimages();
  } else if (!model.invertible()) {
    throw Error(ErrorCode::preimages_unavailable, "backward orbits need preimages or an inverse");
  }
  std::vector<std::uint32_t> all(n);
  for (std::uint32_t x = 0; x < n; ++x) all[x] = x;
  std::vector<std::vector<std::uint32_t>> backward_rows;
  if (!model.finite_exact()) backward_rows = orbit_ids(model, all, horizon, -1);
  auto forward_rows = orbit_ids(model, all, horizon, 1);

  Json st_fail = nullptr, min_fail = nullptr;
  for (std::uint32_t x = 0; x < n; ++x) {
    std::vector<char> seen(n, 0);
    seen[x] = 1;
    if (model.finite_exact()) {
      std::vector<std::uint32_t> frontier{x};
      for (long long d = 0; d < horizon && !frontier.empty(); ++d) {
        std::vector<std::uint32_t> next;
        for (std::uint32_t y : frontier)
          for (std::uint32_t p : pre[y])
            if (!seen[p]) {
              seen[p] = 1;
              next.push_back(p);
            }
        frontier = std::move(next);
      }
    } else {
      for (const auto& row : backward_rows) seen[row[x]] = 1;
    }
    if (st_fail.is_null() && !cover_dense(seen, cover_members)) st_fail = {{"point", x}};

    std::vector<char> fwd(n, 0);
    fwd[x] = 1;
    for (const auto& row : forward_rows) fwd[row[x]] = 1;
    if (min_fail.is_null() && !cover_dense(fwd, cover_members)) min_fail = {{"point", x}};
  }
  r.strongly_transitive = verdict("strongly_transitive", st_fail.is_null(), horizon, 0.0,
                                  st_fail.is_null() ? Json{{"points", n}} : st_fail);
  r.minimal = verdict("minimal", min_fail.is_null(), horizon, 0.0, min_fail.is_null() ? Json{{"points", n}} : min_fail);
  r.transitive = classify_transitivity(model, horizon, cover).transitive;
  r.theorem_consistent = !model.invertible() || r.strongly_transitive.holds() == r.minimal.holds();
  r.chain_ok = !r.strongly_transitive.holds() || r.transitive.holds();
  return r;
}

EquicontinuityReport equicontinuity_scan(const CascadeModel& model, const std::vector<double>& eps,
                                         long long horizon, std::optional<std::vector<OpenSet>> cover) {
  if (eps.empty()) throw Error(ErrorCode::invalid_parameter, "need at least one epsilon");
  EquicontinuityReport r;
  r.eps = eps;
  r.horizon = horizon;
  const auto& space = model.space();
  const std::size_t n = space.size();
  r.separation.assign(n, 0.0);
  for (std::uint32_t y = 0; y < n; ++y) {
    PointCloud nb = space.neighbors(PointId{y});
    if (nb.empty()) continue;
    PointCloud oy = raw_orbit(model, space.point(PointId{y}), horizon);
    double sep = 0.0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      PointCloud oz = raw_orbit(model, nb[i], horizon);
      for (std::size_t t = 0; t < oy.size(); ++t) sep = std::max(sep, space.distance(oy[t], oz[t]));
    }
    r.separation[y] = sep;
  }
  auto cv = cover ? *cover : default_cover(model);
  std::vector<std::vector<std::uint32_t>> cover_members;
  for (const auto& o : cv) cover_members.push_back(resolve(model, o));

  Json ae_fail = nullptr;
  std::vector<char> all_eq(n, 1);
  for (double e : eps) {
    std::vector<std::uint32_t> pts;
    std::vector<char> mark(n, 0);
    for (std::uint32_t y = 0; y < n; ++y) {
      if (r.separation[y] < e) {
        pts.push_back(y);
        mark[y] = 1;
      } else {
        all_eq[y] = 0;
      }
    }
    if (ae_fail.is_null() && !cover_dense(mark, cover_members)) ae_fail = {{"eps", e}, {"eq_points", pts.size()}};
    r.eq_points.push_back(std::move(pts));
  }
  for (std::uint32_t y = 0; y < n; ++y)
    if (all_eq[y]) r.equicontinuity_points.push_back(y);
  r.sensitivity = n ? *std::min_element(r.separation.begin(), r.separation.end()) : 0.0;
  const double eps_min = *std::min_element(eps.begin(), eps.end());
  r.almost_equicontinuous =
      verdict("almost_equicontinuous", ae_fail.is_null(), horizon, eps_min,
              ae_fail.is_null() ? Json{{"eq_points", r.equicontinuity_points.size()}, {"cover", cv.size()}} : ae_fail);
  r.sensitive = verdict("sensitive", r.sensitivity >= eps_min, horizon, eps_min, {{"delta", r.sensitivity}});
  r.equicontinuous = verdict("equicontinuous", r.equicontinuity_points.size() == n, horizon, eps_min,
                             {{"eq_points", r.equicontinuity_points.size()}, {"points", n}});
  return r;
}

HyperEquicontinuityReport hyper_equicontinuity_crosscheck(const CascadeModel& base, std::size_t k,
                                                          const std::vector<double>& eps, long long horizon,
                                                          std::size_t budget) {
  HyperEquicontinuityReport r;
  HyperCascadeModel hyper = build_hyper_model(base, k, budget);
  r.hyper_size = hyper.size();
  r.base = equicontinuity_scan(base, eps, horizon);
  r.hyper = equicontinuity_scan(hyper.model(), eps, horizon);
  r.agree = r.base.almost_equicontinuous.holds() == r.hyper.almost_equicontinuous.holds();
  return r;
}

RigidityReport rigidity_battery(const CascadeModel& model, long long horizon, double tau, std::size_t tuple_size,
                                std::size_t tuples, std::uint64_t seed) {
  if (horizon < 1) throw Error(ErrorCode::invalid_parameter, "horizon must be >= 1");
  if (!(tau > 0.0)) throw Error(ErrorCode::invalid_parameter, "tau must be > 0");
  RigidityReport r;
  r.horizon = horizon;
  r.tau = tau;
  r.tuple_size = tuple_size;
  const auto& space = model.space();
  const std::size_t n = space.size();
  const auto h = static_cast<std::size_t>(horizon);
  std::vector<std::vector<double>> d(h + 1, std::vector<double>(n, 0.0));
  {
    PointCloud cur = space.points(), next(space.dim(), n);
    for (std::size_t t = 1; t <= h; ++t) {
      for (std::size_t x = 0; x < n; ++x) {
        model.apply(cur[x], 1, next[x]);
        d[t][x] = space.distance(next[x], space.point(PointId{static_cast<std::uint32_t>(x)}));
      }
      std::swap(cur, next);
    }
  }
  std::vector<double> probe_sup(h + 1, 0.0);
  const PointCloud& probes = space.probes();
  if (!probes.empty()) {
    PointCloud cur = probes, next(space.dim(), probes.size());
    for (std::size_t t = 1; t <= h; ++t) {
      for (std::size_t p = 0; p < probes.size(); ++p) {
        model.apply(cur[p], 1, next[p]);
        probe_sup[t] = std::max(probe_sup[t], space.distance(next[p], probes[p]));
      }
      std::swap(cur, next);
    }
  }
  std::optional<long long> rigid_n, uniform_n;
  r.best_sample_sup = kInf;
  r.best_uniform_sup = kInf;
  for (std::size_t t = 1; t <= h; ++t) {
    double s = *std::max_element(d[t].begin(), d[t].end());
    double u = std::max(s, probe_sup[t]);
    r.best_sample_sup = std::min(r.best_sample_sup, s);
    r.best_uniform_sup = std::min(r.best_uniform_sup, u);
    if (!rigid_n && s < tau) rigid_n = static_cast<long long>(t);
    if (!uniform_n && u < tau) uniform_n = static_cast<long long>(t);
  }
  r.rigid = verdict("rigid", rigid_n.has_value(), horizon, tau,
                    rigid_n ? Json{{"n", *rigid_n}} : Json{{"best_sup", r.best_sample_sup}});
  r.uniformly_rigid =
      verdict("uniformly_rigid", uniform_n.has_value(), horizon, tau,
              uniform_n ? Json{{"n", *uniform_n}, {"probes", probes.size()}}
                        : Json{{"best_sup", r.best_uniform_sup}, {"probes", probes.size()}});

  if (tuple_size == 0 || tuple_size >= n) {
    r.weakly_rigid = verdict("weakly_rigid", rigid_n.has_value(), horizon, tau,
                             rigid_n ? Json{{"n", *rigid_n}, {"tuple", "sample"}} : Json{{"tuple", "sample"}});
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
    Json fail = nullptr;
    for (std::size_t i = 0; i < tuples && fail.is_null(); ++i) {
      std::vector<std::uint32_t> tup(tuple_size);
      for (auto& x : tup) x = pick(rng);
      bool ok = false;
      for (std::size_t t = 1; t <= h && !ok; ++t)
        ok = std::all_of(tup.begin(), tup.end(), [&](std::uint32_t x) { return d[t][x] < tau; });
      if (!ok) fail = {{"tuple", tup}};
    }
    r.weakly_rigid = verdict("weakly_rigid", fail.is_null(), horizon, tau,
                             fail.is_null() ? Json{{"tuples", tuples}, {"tuple_size", tuple_size}} : fail);
  }
  r.chain_ok = (!r.uniformly_rigid.holds() || r.rigid.holds()) && (!r.rigid.holds() || r.weakly_rigid.holds());
  return r;
}

RecurrenceReport recurrence_report(const CascadeModel& model, long long horizon, double tau) {
  if (horizon < 1) throw Error(ErrorCode::invalid_parameter, "horizon must be >= 1");
  RecurrenceReport r;
  r.horizon = horizon;
  r.tau = tau;
  const auto& space = model.space();
  const std::size_t n = space.size();
  const auto h = static_cast<std::size_t>(horizon);
  if (static_cast<double>(n) * static_cast<double>(h + 1) * static_cast<double>(space.dim()) > 4e7)
    throw Error(ErrorCode::budget_exceeded, "recurrence scan needs sample size x horizon below the budget");
  std::vector<PointCloud> orbits;
  orbits.reserve(n);
  for (std::uint32_t x = 0; x < n; ++x) orbits.push_back(raw_orbit(model, space.point(PointId{x}), horizon));

  for (std::uint32_t x = 0; x < n; ++x) {
    PointRecurrence p;
    Coords cx = space.point(PointId{x});
    std::vector<long long> hits;
    for (std::size_t t = 1; t <= h; ++t)
      if (space.distance(orbits[x][t], cx) < tau) hits.push_back(static_cast<long long>(t));
    p.hits = hits.size();
    p.recurrent = hits.size() >= 2;

    std::vector<char> ret(h + 1, 0);
    for (std::uint32_t z = 0; z < n; ++z) {
      if (space.distance(PointId{z}, PointId{x}) >= tau) continue;
      for (std::size_t t = 1; t <= h; ++t)
        if (!ret[t] && space.distance(orbits[z][t], cx) < tau) ret[t] = 1;
    }
    p.nonwandering = std::any_of(ret.begin() + 1, ret.end(), [](char c) { return c != 0; });
    std::size_t tail = h + 1;
    while (tail > 1 && ret[tail - 1]) --tail;
    p.essentially_nonwandering = tail <= h / 2 + 1 && tail <= h;

    if (hits.size() >= 2) {
      long long gap = hits.front();
      for (std::size_t i = 1; i < hits.size(); ++i) gap = std::max(gap, hits[i] - hits[i - 1]);
      gap = std::max(gap, horizon - hits.back());
      p.gap = gap;
      p.almost_periodic = gap <= std::max<long long>(1, horizon / 4);
    }
    r.recurrent += p.recurrent;
    r.nonwandering += p.nonwandering;
    r.essentially_nonwandering += p.essentially_nonwandering;
    r.almost_periodic += p.almost_periodic;
    r.points.push_back(p);
  }
  return r;
}

WapReport wap_proxy_check(const Envelope& env, const std::vector<double>& eps) {
  if (eps.empty()) throw Error(ErrorCode::invalid_parameter, "need at least one epsilon");
  WapReport r;
  r.eps = eps;
  r.stabilized = env.stabilized;
  const auto& space = env.model->space();
  const std::size_t n = space.size();
  std::vector<std::vector<std::uint32_t>> nb(n);
  for (std::uint32_t x = 0; x < n; ++x) nb[x] = neighbour_ids(space, x);
  const double eps_min = *std::min_element(eps.begin(), eps.end());

  std::vector<std::uint32_t> scan;
  if (env.exact) {
    for (long long k = env.index; k < env.index + env.period; ++k) scan.push_back(static_cast<std::uint32_t>(k));
  } else {
    scan = env.non_iterates();
  }
  for (std::uint32_t a : scan) {
    ElementContinuity c;
    c.element = a;
    for (std::uint32_t x = 0; x < n; ++x) {
      Point px = env.image(a, x);
      for (std::uint32_t y : nb[x]) {
        double g = space.distance(px, env.image(a, y));
        if (g > c.jump_size) {
          c.jump_size = g;
          c.jump = std::pair{x, y};
        }
      }
    }
    c.continuous = c.jump_size < eps_min;
    if (c.continuous) c.jump.reset();
    r.all_elements_continuous = r.all_elements_continuous && c.continuous;
    r.worst_modulus = std::max(r.worst_modulus, c.jump_size);
    r.elements.push_back(c);
  }
  return r;
}

DistalSemiflowReport distal_semiflow_check(const CascadeModel& model) {
  if (!model.finite_exact()) throw Error(ErrorCode::invalid_parameter, "distal semiflow check needs a finite-exact model");
  DistalSemiflowReport r;
  Envelope env = exact_envelope(model);
  const std::size_t n = model.size();
  r.distal = true;
  for (const auto& el : env.elements) {
    std::vector<std::int64_t> first(n, -1);
    for (std::uint32_t x = 0; x < n && r.distal; ++x) {
      auto& slot = first[el.ids[x]];
      if (slot >= 0) {
        r.distal = false;
        r.proximal_pair = std::pair{static_cast<std::uint32_t>(slot), x};
      } else {
        slot = x;
      }
    }
    if (!r.distal) break;
  }
  const auto& f = model.table();
  std::vector<char> hit(n, 0);
  for (std::uint32_t v : f) hit[v] = 1;
  r.surjective = std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
  r.pointwise_almost_periodic = true;
  for (std::uint32_t x = 0; x < n && r.pointwise_almost_periodic; ++x) {
    std::uint32_t y = f[x];
    bool back = y == x;
    for (std::size_t k = 1; k < n && !back; ++k) {
      y = f[y];
      back = y == x;
    }
    r.pointwise_almost_periodic = back;
  }
  r.consequences_hold = !r.distal || (r.pointwise_almost_periodic && r.surjective);
  return r;
}

}  // namespace ellis

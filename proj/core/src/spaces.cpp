#include "ellis/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ellis/error.hpp"

namespace ellis {

void PointCloud::push_back(Coords p) {
  if (dim_ == 0 && data_.empty()) dim_ = p.size();
  if (p.size() != dim_) throw Error(ErrorCode::length_mismatch, "point dimension differs from cloud");
  data_.insert(data_.end(), p.begin(), p.end());
}

std::string_view to_string(MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::euclidean: return "euclidean";
    case MetricKind::circle_arc: return "circle-arc";
    case MetricKind::polar_plane: return "polar-plane";
    case MetricKind::shift: return "shift";
    case MetricKind::isolated_ones: return "isolated-ones";
    case MetricKind::star_compactified: return "star-compactified";
    case MetricKind::discrete: return "discrete";
    case MetricKind::table: return "table";
    case MetricKind::hausdorff: return "hausdorff";
  }
  return "unknown";
}

MetricSpaceModel::MetricSpaceModel(PointCloud points, Options options)
    : points_(std::move(points)),
      kind_(options.kind),
      resolution_(options.resolution),
      metric_kind_(options.metric_kind),
      metric_params_(std::move(options.metric_params)),
      metric_(std::move(options.metric)),
      locator_(std::move(options.locator)),
      neighbors_(std::move(options.neighbors)),
      probes_(std::move(options.probes)) {
  if (points_.empty()) throw Error(ErrorCode::invalid_parameter, "space has no points");
  if (!metric_) throw Error(ErrorCode::invalid_parameter, "space has no metric");
  if (points_.size() > std::numeric_limits<std::uint32_t>::max())
    throw Error(ErrorCode::budget_exceeded, "too many points");
}

void MetricSpaceModel::check(PointId id) const {
  if (id.value >= size())
    throw Error(ErrorCode::out_of_range,
                "point id " + std::to_string(id.value) + " >= " + std::to_string(size()));
}

Coords MetricSpaceModel::point(PointId id) const {
  check(id);
  return points_[id.value];
}

double MetricSpaceModel::distance(PointId a, PointId b) const {
  check(a);
  check(b);
  if (a == b) return 0.0;
  return metric_(points_[a.value], points_[b.value]);
}

Snap MetricSpaceModel::nearest(Coords p) const {
  if (locator_) return locator_(p);
  Snap best{PointId{0}, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < size(); ++i) {
    double d = metric_(p, points_[i]);
    if (d < best.error) best = {PointId{static_cast<std::uint32_t>(i)}, d};
  }
  return best;
}

double MetricSpaceModel::nearest_neighbor_distance(PointId id) const {
  check(id);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i) {
    if (i == id.value) continue;
    double d = metric_(points_[id.value], points_[i]);
    if (d > 0.0) best = std::min(best, d);
  }
  return best;
}

PointCloud MetricSpaceModel::neighbors(PointId id) const {
  check(id);
  if (neighbors_) return neighbors_(id);
  PointCloud out(dim());
  double best = nearest_neighbor_distance(id);
  if (!std::isfinite(best)) return out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (i == id.value) continue;
    double d = metric_(points_[id.value], points_[i]);
    if (d > 0.0 && d <= best * (1.0 + 1e-9)) out.push_back(points_[i]);
  }
  return out;
}

MetricSpaceModel MetricSpaceModel::with_kind(SpaceKind kind) const {
  MetricSpaceModel copy = *this;
  copy.kind_ = kind;
  return copy;
}

// CascadeModel ---------------------------------------------------------------

CascadeModel CascadeModel::finite(std::string name, ParamMap params,
                                  std::shared_ptr<const MetricSpaceModel> space,
                                  std::vector<std::uint32_t> table) {
  if (!space) throw Error(ErrorCode::invalid_parameter, "null space");
  if (!space->finite_exact())
    throw Error(ErrorCode::invalid_parameter, "finite model needs a finite-exact space");
  const std::size_t n = space->size();
  if (table.size() != n) throw Error(ErrorCode::length_mismatch, "map table size != space size");
  std::vector<std::uint32_t> inverse(n, std::numeric_limits<std::uint32_t>::max());
  bool bijective = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (table[i] >= n) throw Error(ErrorCode::out_of_range, "map image index out of range");
    if (inverse[table[i]] != std::numeric_limits<std::uint32_t>::max()) bijective = false;
    inverse[table[i]] = static_cast<std::uint32_t>(i);
  }

  CascadeModel m;
  m.name_ = std::move(name);
  m.params_ = std::move(params);
  m.space_ = std::move(space);
  m.table_ = std::move(table);
  m.invertible_ = bijective;
  if (bijective) m.inverse_table_ = std::move(inverse);

  return m;
}

CascadeModel CascadeModel::sampled(std::string name, ParamMap params,
                                   std::shared_ptr<const MetricSpaceModel> space, MapFn forward,
                                   MapFn inverse) {
  if (!space) throw Error(ErrorCode::invalid_parameter, "null space");
  if (!forward) throw Error(ErrorCode::invalid_parameter, "sampled model needs an evaluator");
  CascadeModel m;
  m.name_ = std::move(name);
  m.params_ = std::move(params);
  m.space_ = std::move(space);
  m.forward_ = std::move(forward);
  m.inverse_ = std::move(inverse);
  m.invertible_ = static_cast<bool>(m.inverse_);

  const std::size_t n = m.space_->size();
  const std::size_t d = m.space_->dim();
  Point buf(d);
  m.table_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.forward_(m.space_->points()[i], buf);
    m.table_[i] = m.space_->nearest(buf).id.value;
  }
  if (m.inverse_) {
    std::vector<std::uint32_t> inv(n);
    for (std::size_t i = 0; i < n; ++i) {
      m.inverse_(m.space_->points()[i], buf);
      inv[i] = m.space_->nearest(buf).id.value;
    }
    m.inverse_table_ = std::move(inv);
  }
  return m;
}

StepResult CascadeModel::step(PointId x) const {
  space_->check(x);
  if (!forward_) {
    PointId y{table_[x.value]};
    Coords c = space_->point(y);
    return {Point(c.begin(), c.end()), y, 0.0};
  }
  Point raw(space_->dim());
  forward_(space_->point(x), raw);
  Snap s = space_->nearest(raw);
  return {std::move(raw), s.id, s.error};
}

void CascadeModel::apply(Coords p, long long power, std::span<double> out) const {
  if (power < 0 && !invertible_)
    throw Error(ErrorCode::negative_power_on_noninvertible,
                "model '" + name_ + "' has no inverse; power " + std::to_string(power));
  if (!forward_) {
    std::uint32_t id = space_->nearest(p).id.value;
    const auto& t = power >= 0 ? table_ : *inverse_table_;
    for (long long k = 0, e = power >= 0 ? power : -power; k < e; ++k) id = t[id];
    Coords c = space_->points()[id];
    std::copy(c.begin(), c.end(), out.begin());
    return;
  }
  const MapFn& fn = power >= 0 ? forward_ : inverse_;
  long long e = power >= 0 ? power : -power;
  std::copy(p.begin(), p.end(), out.begin());
  if (e == 0) return;
  Point tmp(p.size());
  for (long long k = 0; k < e; ++k) {
    std::copy(out.begin(), out.end(), tmp.begin());
    fn(tmp, out);
  }
}

Point CascadeModel::apply(Coords p, long long power) const {
  Point out(p.size());
  apply(p, power, out);
  return out;
}

std::vector<StepResult> CascadeModel::orbit_segment(PointId x, long long n_from,
                                                    long long n_to) const {
  space_->check(x);
  if (n_from > n_to) throw Error(ErrorCode::invalid_parameter, "n_from > n_to");
  if (n_from < 0 && !invertible_)
    throw Error(ErrorCode::negative_power_on_noninvertible,
                "model '" + name_ + "' cannot iterate backwards");
  std::vector<StepResult> out;
  out.reserve(static_cast<std::size_t>(n_to - n_from + 1));
  if (!forward_) {
    std::uint32_t id = x.value;
    const auto& t = n_from >= 0 ? table_ : *inverse_table_;
    for (long long k = 0, e = std::llabs(n_from); k < e; ++k) id = t[id];
    for (long long n = n_from; n <= n_to; ++n) {
      Coords c = space_->points()[id];
      out.push_back({Point(c.begin(), c.end()), PointId{id}, 0.0});
      id = table_[id];
    }
    return out;
  }
  Point cur = apply(space_->point(x), n_from);
  Point next(cur.size());
  for (long long n = n_from; n <= n_to; ++n) {
    Snap s = space_->nearest(cur);
    out.push_back({cur, s.id, s.error});
    if (n == n_to) break;
    forward_(cur, next);
    std::swap(cur, next);
  }
  return out;
}

std::vector<PointId> CascadeModel::omega_limit_estimate(PointId x, std::size_t horizon,
                                                        double tol) const {
  if (horizon < 1) throw Error(ErrorCode::invalid_parameter, "horizon must be >= 1");
  auto orbit = orbit_segment(x, 0, static_cast<long long>(horizon));
  std::vector<int> hits(size(), 0);
  const auto& pts = space_->points();
  for (std::size_t n = horizon / 2; n <= horizon; ++n) {
    const StepResult& s = orbit[n];
    if (s.snap_error > tol) continue;
    if (finite_exact() || tol < 1e-12) {
      ++hits[s.snapped.value];
      continue;
    }
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (space_->distance(s.raw, pts[i]) <= tol) ++hits[i];
  }
  std::vector<PointId> out;
  for (std::size_t i = 0; i < hits.size(); ++i)
    if (hits[i] >= 2) out.push_back(PointId{static_cast<std::uint32_t>(i)});
  return out;
}

std::vector<std::vector<std::uint32_t>> CascadeModel::preimages() const {
  if (!finite_exact())
    throw Error(ErrorCode::preimages_unavailable, "preimages need a finite-exact model");
  std::vector<std::vector<std::uint32_t>> pre(size());
  for (std::size_t i = 0; i < table_.size(); ++i)
    pre[table_[i]].push_back(static_cast<std::uint32_t>(i));
  return pre;
}

CascadeModel discretize(const CascadeModel& model) {
  if (model.finite_exact()) return model;
  auto space = std::make_shared<const MetricSpaceModel>(
      model.space().with_kind(SpaceKind::finite_exact));
  return CascadeModel::finite(model.name() + "/discrete", model.params(), std::move(space),
                              model.table());
}

CascadeModel finite_map_model(std::string name, std::vector<std::uint32_t> table) {
  const std::size_t n = table.size();
  if (n == 0) throw Error(ErrorCode::invalid_parameter, "empty map table");
  PointCloud pts(1);
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = static_cast<double>(i);
    pts.push_back(Coords(&v, 1));
  }
  MetricSpaceModel::Options opt;
  opt.kind = SpaceKind::finite_exact;
  opt.metric_kind = MetricKind::discrete;
  opt.metric = [](Coords a, Coords b) { return a[0] == b[0] ? 0.0 : 1.0; };
  opt.locator = [n](Coords p) {
    double r = std::round(p[0]);
    r = std::clamp(r, 0.0, static_cast<double>(n - 1));
    return Snap{PointId{static_cast<std::uint32_t>(r)}, r == p[0] ? 0.0 : 1.0};
  };
  opt.neighbors = [](PointId) { return PointCloud(1); };
  auto space = std::make_shared<const MetricSpaceModel>(std::move(pts), std::move(opt));
  ParamMap params{{"n", std::to_string(n)}};
  return CascadeModel::finite(std::move(name), std::move(params), std::move(space),
                              std::move(table));
}

namespace {

Json coords_json(Coords c) {
  Json row = Json::array();
  for (double v : c) {
    if (std::isnan(v))
      row.push_back(nullptr);
    else if (std::isinf(v))
      row.push_back(v > 0 ? "inf" : "-inf");
    else
      row.push_back(v);
  }
  return row;
}

}  // namespace

Json to_json(const CascadeModel& model) {
  Json j;
  j["name"] = model.name();
  j["params"] = model.params();
  j["kind"] = model.finite_exact() ? "finite-exact" : "sampled";
  j["resolution"] = model.space().resolution();
  j["invertible"] = model.invertible();
  j["metric"] = {{"kind", to_string(model.space().metric_kind())},
                 {"params", model.space().metric_params()}};
  j["dim"] = model.space().dim();
  Json pts = Json::array();
  for (std::size_t i = 0; i < model.size(); ++i) pts.push_back(coords_json(model.space().points()[i]));
  j["points"] = std::move(pts);
  j["map"] = model.table();
  return j;
}

}  // namespace ellis

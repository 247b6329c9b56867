#include "ellis/hyperspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ellis/error.hpp"

namespace ellis {

HyperPoint HyperPoint::canonical(std::vector<std::uint32_t> ids) {
  if (ids.empty()) throw Error(ErrorCode::empty_set, "hyperpoints are nonempty");
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return HyperPoint{std::move(ids)};
}

bool HyperPoint::subset_of(const HyperPoint& other) const {
  return std::includes(other.members.begin(), other.members.end(), members.begin(), members.end());
}

std::size_t HyperPointHash::operator()(const HyperPoint& p) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (std::uint32_t m : p.members) h = (h ^ m) * 1099511628211ULL;
  return h;
}

double hausdorff_distance(const MetricSpaceModel& space, const HyperPoint& a, const HyperPoint& b) {
  if (a.members.empty() || b.members.empty()) throw Error(ErrorCode::empty_set, "Hausdorff distance of an empty set");
  auto directed = [&space](const HyperPoint& x, const HyperPoint& y) {
    double worst = 0.0;
    for (std::uint32_t p : x.members) {
      double best = std::numeric_limits<double>::infinity();
      for (std::uint32_t q : y.members) best = std::min(best, space.distance(PointId{p}, PointId{q}));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

double hausdorff_coords(const MetricSpaceModel& space, Coords a, Coords b) {
  const std::size_t d = space.dim();
  auto blocks = [d](Coords c) {
    std::vector<Coords> out;
    for (std::size_t i = 0; i + d <= c.size(); i += d)
      if (!std::isnan(c[i])) out.push_back(c.subspan(i, d));
    return out;
  };
  auto ba = blocks(a), bb = blocks(b);
  if (ba.empty() || bb.empty()) throw Error(ErrorCode::empty_set, "Hausdorff distance of an empty set");
  auto directed = [&space](const std::vector<Coords>& x, const std::vector<Coords>& y) {
    double worst = 0.0;
    for (Coords p : x) {
      double best = std::numeric_limits<double>::infinity();
      for (Coords q : y) best = std::min(best, space.distance(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(ba, bb), directed(bb, ba));
}

bool vietoris_member(const MetricSpaceModel& space, const HyperPoint& a, const std::vector<Ball>& basis) {
  if (basis.empty()) throw Error(ErrorCode::empty_basis, "Vietoris basis needs at least one open set");
  if (a.members.empty()) throw Error(ErrorCode::empty_set, "hyperpoints are nonempty");
  auto inside = [&space](std::uint32_t p, const Ball& v) {
    return space.distance(PointId{p}, v.center) < v.radius;
  };
  for (std::uint32_t p : a.members)
    if (std::none_of(basis.begin(), basis.end(), [&](const Ball& v) { return inside(p, v); })) return false;
  for (const Ball& v : basis)
    if (std::none_of(a.members.begin(), a.members.end(), [&](std::uint32_t p) { return inside(p, v); }))
      return false;
  return true;
}

std::size_t bounded_subset_count(std::size_t n, std::size_t k) {
  std::size_t total = 0;
  double c = 1.0;
  for (std::size_t j = 1; j <= k && j <= n; ++j) {
    c = c * static_cast<double>(n - j + 1) / static_cast<double>(j);
    if (c > 1e15) return std::numeric_limits<std::size_t>::max();
    total += static_cast<std::size_t>(std::llround(c));
  }
  return total;
}

std::optional<std::uint32_t> HyperCascadeModel::find(const HyperPoint& a) const {
  auto it = index_->find(a);
  if (it == index_->end()) return std::nullopt;
  return it->second;
}

HyperPoint HyperCascadeModel::induced_step(const HyperPoint& a) const {
  std::vector<std::uint32_t> img;
  for (std::uint32_t m : a.members) img.push_back(base_->step(PointId{m}).snapped.value);
  return HyperPoint::canonical(std::move(img));
}

Json HyperCascadeModel::to_json() const {
  Json j;
  j["base"] = base_->name();
  j["max_cardinality"] = k_;
  Json pts = Json::array();
  for (const auto& p : *points_) pts.push_back(p.members);
  j["points"] = std::move(pts);
  j["map"] = model_->table();
  return j;
}

HyperCascadeModel build_hyper_model(const CascadeModel& base, std::size_t k, std::size_t budget) {
  if (k < 1) throw Error(ErrorCode::invalid_parameter, "max cardinality must be >= 1");
  const std::size_t n = base.size();
  const std::size_t total = bounded_subset_count(n, k);
  if (total > budget)
    throw Error(ErrorCode::budget_exceeded, "hyperspace with " + std::to_string(n) + " points and k=" +
                                                std::to_string(k) + " exceeds the budget of " + std::to_string(budget));

  HyperCascadeModel h;
  h.base_ = std::make_shared<const CascadeModel>(base);
  h.k_ = k;
  auto points = std::make_shared<std::vector<HyperPoint>>();
  points->reserve(total);
  for (std::uint32_t i = 0; i < n; ++i) points->push_back({{i}});
  for (std::size_t size = 2; size <= k && size <= n; ++size) {
    std::vector<std::uint32_t> comb(size);
    for (std::size_t i = 0; i < size; ++i) comb[i] = static_cast<std::uint32_t>(i);
    while (true) {
      points->push_back({comb});
      std::size_t i = size;
      while (i > 0 && comb[i - 1] == n - size + i - 1) --i;
      if (i == 0) break;
      ++comb[i - 1];
      for (std::size_t j = i; j < size; ++j) comb[j] = comb[j - 1] + 1;
    }
  }
  auto index = std::make_shared<std::unordered_map<HyperPoint, std::uint32_t, HyperPointHash>>();
  index->reserve(points->size());
  for (std::size_t i = 0; i < points->size(); ++i) (*index)[(*points)[i]] = static_cast<std::uint32_t>(i);

  const std::size_t d = base.space().dim();
  const std::size_t width = std::min(k, n) * d;
  PointCloud coords(width);
  coords.reserve(points->size());
  Point row(width);
  for (const auto& p : *points) {
    std::fill(row.begin(), row.end(), std::nan(""));
    for (std::size_t m = 0; m < p.members.size(); ++m) {
      Coords c = base.space().point(PointId{p.members[m]});
      std::copy(c.begin(), c.end(), row.begin() + static_cast<long>(m * d));
    }
    coords.push_back(row);
  }

  auto base_space = base.space_ptr();
  auto base_model = h.base_;
  MetricSpaceModel::Options opt;
  opt.kind = base.space().kind();
  opt.resolution = base.space().resolution();
  opt.metric_kind = MetricKind::hausdorff;
  opt.metric_params = {{"base_metric", to_string(base.space().metric_kind())}, {"max_cardinality", k}};
  opt.metric = [base_space](Coords a, Coords b) { return hausdorff_coords(*base_space, a, b); };
  auto shared_coords = std::make_shared<PointCloud>(coords);
  std::shared_ptr<const std::unordered_map<HyperPoint, std::uint32_t, HyperPointHash>> cindex = index;
  opt.locator = [base_space, cindex, shared_coords, d](Coords p) {
    std::vector<std::uint32_t> ids;
    for (std::size_t i = 0; i + d <= p.size(); i += d)
      if (!std::isnan(p[i])) ids.push_back(base_space->nearest(p.subspan(i, d)).id.value);
    HyperPoint hp = HyperPoint::canonical(std::move(ids));
    std::uint32_t id = cindex->at(hp);
    return Snap{PointId{id}, hausdorff_coords(*base_space, p, (*shared_coords)[id])};
  };
  auto space = std::make_shared<const MetricSpaceModel>(std::move(coords), std::move(opt));

  h.points_ = points;
  h.index_ = index;
  std::string name = base.name() + "/hyper" + std::to_string(k);
  ParamMap params = base.params();
  params["max_card"] = std::to_string(k);

  if (base.finite_exact()) {
    std::vector<std::uint32_t> table(points->size());
    for (std::size_t i = 0; i < points->size(); ++i) table[i] = index->at(h.induced_step((*points)[i]));
    h.model_ = std::make_shared<const CascadeModel>(
        CascadeModel::finite(std::move(name), std::move(params), std::move(space), std::move(table)));
    return h;
  }
  auto elementwise = [base_model, d](long long power) {
    return [base_model, d, power](Coords in, std::span<double> out) {
      for (std::size_t i = 0; i + d <= in.size(); i += d) {
        if (std::isnan(in[i])) {
          std::copy(in.begin() + static_cast<long>(i), in.begin() + static_cast<long>(i + d),
                    out.begin() + static_cast<long>(i));
          continue;
        }
        base_model->apply(in.subspan(i, d), power, out.subspan(i, d));
      }
    };
  };
  MapFn inv;
  if (base.invertible()) inv = elementwise(-1);
  h.model_ = std::make_shared<const CascadeModel>(
      CascadeModel::sampled(std::move(name), std::move(params), std::move(space), elementwise(1), inv));
  return h;
}

}  // namespace ellis

#pragma once

// Finite-subset hyperspace of a model with the Hausdorff metric and the induced map.

#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ellis/spaces.hpp"

namespace ellis {

/// Canonical finite nonempty subset: strictly increasing point indices.
struct HyperPoint {
  std::vector<std::uint32_t> members;

  static HyperPoint canonical(std::vector<std::uint32_t> ids);
  bool subset_of(const HyperPoint& other) const;
  friend bool operator==(const HyperPoint&, const HyperPoint&) = default;
};

struct HyperPointHash {
  std::size_t operator()(const HyperPoint& p) const noexcept;
};

double hausdorff_distance(const MetricSpaceModel& space, const HyperPoint& a, const HyperPoint& b);

/// Hausdorff distance between two padded coordinate blocks (NaN marks unused slots).
double hausdorff_coords(const MetricSpaceModel& space, Coords a, Coords b);

struct Ball {
  PointId center;
  double radius = 0.0;
};

/// A lies in the basic open set <V_1..V_k>: A inside their union and meeting each.
bool vietoris_member(const MetricSpaceModel& space, const HyperPoint& a, const std::vector<Ball>& basis);

/// All subsets of cardinality <= k with the induced map, as a model in its own right.
class HyperCascadeModel {
 public:
  const CascadeModel& base() const noexcept { return *base_; }
  std::size_t max_cardinality() const noexcept { return k_; }
  const CascadeModel& model() const noexcept { return *model_; }
  std::shared_ptr<const CascadeModel> model_ptr() const noexcept { return model_; }
  const std::vector<HyperPoint>& points() const noexcept { return *points_; }
  std::size_t size() const noexcept { return points_->size(); }

  std::optional<std::uint32_t> find(const HyperPoint& a) const;
  /// Canonical form of {f(a) : a in A}, images snapped to the base sample.
  HyperPoint induced_step(const HyperPoint& a) const;
  /// Id of the hyperpoint {x}.
  std::uint32_t singleton(std::uint32_t x) const { return x; }

  Json to_json() const;

  friend HyperCascadeModel build_hyper_model(const CascadeModel& base, std::size_t k, std::size_t budget);

 private:
  std::shared_ptr<const CascadeModel> base_;
  std::size_t k_ = 0;
  std::shared_ptr<const std::vector<HyperPoint>> points_;
  std::shared_ptr<const std::unordered_map<HyperPoint, std::uint32_t, HyperPointHash>> index_;
  std::shared_ptr<const CascadeModel> model_;
};

/// Enumerates singletons first (id = base id), then larger sets by size and lexicographically.
HyperCascadeModel build_hyper_model(const CascadeModel& base, std::size_t k, std::size_t budget = 250000);

/// Number of subsets with 1..k elements of an n-set.
std::size_t bounded_subset_count(std::size_t n, std::size_t k);

}  // namespace ellis

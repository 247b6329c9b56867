#pragma once

// Phase-space models: finite and sampled compact metric spaces together with a
// self-map (a cascade when invertible, a semicascade otherwise).

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace ellis {

using Json = nlohmann::json;

/// Index into the point table of a MetricSpaceModel.
struct PointId {
  std::uint32_t value = 0;
  friend auto operator<=>(PointId, PointId) = default;
};

using Coords = std::span<const double>;
using Point = std::vector<double>;

/// Flat row-major storage of equal-dimension points.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::size_t dim, std::size_t count = 0) : dim_(dim), data_(dim * count) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const noexcept { return data_.empty(); }

  Coords operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<double> operator[](std::size_t i) { return {data_.data() + i * dim_, dim_}; }

  void push_back(Coords p);
  void reserve(std::size_t count) { data_.reserve(count * dim_); }
  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

enum class SpaceKind { finite_exact, sampled };

enum class MetricKind {
  euclidean,          // R^d
  circle_arc,         // coords {theta}, arc length on the unit circle
  polar_plane,        // coords {r, theta}, Euclidean distance in the plane
  shift,              // coords {seed, offset, flip}, 2^{-(k+1)} window metric
  isolated_ones,      // coords {position or +inf}: single-one sequences and 0-bar
  star_compactified,  // coords {n, k or +inf, l}: Z u {inf} fibres over a finite set
  discrete,           // 0/1 metric on coords {i}
  table,              // dense matrix indexed by coords {i}
  hausdorff,          // finite sets of base points, padded with NaN
};

std::string_view to_string(MetricKind kind) noexcept;

using MetricFn = std::function<double(Coords, Coords)>;

struct Snap {
  PointId id;
  double error = 0.0;
};

using LocatorFn = std::function<Snap(Coords)>;
using NeighborFn = std::function<PointCloud(PointId)>;

/// A finite carrier for a compact metric space. Finite-exact models are the space
/// itself; sampled models are an epsilon-net of a continuum and carry its resolution.
class MetricSpaceModel {
 public:
  struct Options {
    SpaceKind kind = SpaceKind::finite_exact;
    double resolution = 0.0;
    MetricKind metric_kind = MetricKind::euclidean;
    Json metric_params = Json::object();
    MetricFn metric;
    LocatorFn locator;    // optional; linear scan otherwise
    NeighborFn neighbors; // optional; nearest sample points otherwise
    PointCloud probes;    // optional extra points of the true space
  };

  MetricSpaceModel(PointCloud points, Options options);

  std::size_t size() const noexcept { return points_.size(); }
  std::size_t dim() const noexcept { return points_.dim(); }
  SpaceKind kind() const noexcept { return kind_; }
  bool finite_exact() const noexcept { return kind_ == SpaceKind::finite_exact; }
  double resolution() const noexcept { return resolution_; }
  MetricKind metric_kind() const noexcept { return metric_kind_; }
  const Json& metric_params() const noexcept { return metric_params_; }

  const PointCloud& points() const noexcept { return points_; }
  Coords point(PointId id) const;
  void check(PointId id) const;

  double distance(PointId a, PointId b) const;
  double distance(Coords a, Coords b) const { return metric_(a, b); }
  const MetricFn& metric() const noexcept { return metric_; }

  /// Nearest sample point and the distance to it.
  Snap nearest(Coords p) const;
  bool has_locator() const noexcept { return static_cast<bool>(locator_); }

  /// Points of the underlying space close to a sample point (smallest usable ball).
  PointCloud neighbors(PointId id) const;

  /// Points of the underlying space outside the sample, used for sup-norm estimates.
  const PointCloud& probes() const noexcept { return probes_; }

  /// Smallest positive distance from id to another sample point.
  double nearest_neighbor_distance(PointId id) const;

  /// A copy of this space with a different kind tag (used by discretization).
  MetricSpaceModel with_kind(SpaceKind kind) const;

 private:
  PointCloud points_;
  SpaceKind kind_;
  double resolution_;
  MetricKind metric_kind_;
  Json metric_params_;
  MetricFn metric_;
  LocatorFn locator_;
  NeighborFn neighbors_;
  PointCloud probes_;
};

using MapFn = std::function<void(Coords in, std::span<double> out)>;

struct StepResult {
  Point raw;
  PointId snapped;
  double snap_error = 0.0;
};

using ParamMap = std::map<std::string, std::string>;

/// A phase space with a self-map. Immutable after construction.
class CascadeModel {
 public:
  /// Finite-exact model from an index table. Invertibility is derived from the table.
  static CascadeModel finite(std::string name, ParamMap params,
                             std::shared_ptr<const MetricSpaceModel> space,
                             std::vector<std::uint32_t> table);

  /// Sampled model with coordinate-level evaluators; `inverse` may be empty.
  static CascadeModel sampled(std::string name, ParamMap params,
                              std::shared_ptr<const MetricSpaceModel> space, MapFn forward,
                              MapFn inverse);

  const std::string& name() const noexcept { return name_; }
  const ParamMap& params() const noexcept { return params_; }
  const MetricSpaceModel& space() const noexcept { return *space_; }
  std::shared_ptr<const MetricSpaceModel> space_ptr() const noexcept { return space_; }
  std::size_t size() const noexcept { return space_->size(); }
  bool finite_exact() const noexcept { return space_->finite_exact(); }
  bool invertible() const noexcept { return invertible_; }

  /// Exact image table (finite-exact) or the snapped image table (sampled).
  const std::vector<std::uint32_t>& table() const noexcept { return table_; }
  const std::vector<std::uint32_t>* inverse_table() const noexcept {
    return inverse_table_ ? &*inverse_table_ : nullptr;
  }

  double metric(PointId a, PointId b) const { return space_->distance(a, b); }
  StepResult step(PointId x) const;

  /// Raw coordinate image of p under f^power; negative powers need an inverse.
  void apply(Coords p, long long power, std::span<double> out) const;
  Point apply(Coords p, long long power) const;

  /// f^{n_from}(x), ..., f^{n_to}(x), each snapped with its snap error.
  std::vector<StepResult> orbit_segment(PointId x, long long n_from, long long n_to) const;

  /// Sample points visited at least twice, within tol, in the tail half of the orbit.
  std::vector<PointId> omega_limit_estimate(PointId x, std::size_t horizon, double tol) const;

  /// Preimage lists for finite-exact models.
  std::vector<std::vector<std::uint32_t>> preimages() const;

 private:
  CascadeModel() = default;

  std::string name_;
  ParamMap params_;
  std::shared_ptr<const MetricSpaceModel> space_;
  MapFn forward_;
  MapFn inverse_;
  bool invertible_ = false;
  std::vector<std::uint32_t> table_;
  std::optional<std::vector<std::uint32_t>> inverse_table_;
};

/// The snapped finite-exact model x -> nearest(f(x)) of a sampled model.
CascadeModel discretize(const CascadeModel& model);

/// A finite-exact model on {0..n-1} with the discrete metric.
CascadeModel finite_map_model(std::string name, std::vector<std::uint32_t> table);

Json to_json(const CascadeModel& model);

// Catalog ------------------------------------------------------------------

struct CatalogEntry {
  std::string name;
  std::string summary;
  std::vector<std::pair<std::string, std::string>> params;  // name, default
};

const std::vector<CatalogEntry>& catalog();

/// Builds a catalog model; unspecified parameters take their defaults.
CascadeModel load_example(std::string_view name, const ParamMap& params = {});

// Parameter helpers shared with the experiment runner.
long long param_int(const ParamMap& params, const std::string& key, long long fallback);
double param_double(const ParamMap& params, const std::string& key, double fallback);
std::string param_string(const ParamMap& params, const std::string& key, std::string fallback);
ParamMap params_from_json(const Json& j);

/// Bit at position i of the pseudo-random sequence with the given seed.
int sequence_symbol(std::uint64_t seed, long long position, int symbols);

}  // namespace ellis

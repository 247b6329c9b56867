// Concrete models: interval maps, circle stacks, the periodic star family and
// subshift window models.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "ellis/error.hpp"
#include "ellis/spaces.hpp"

namespace ellis {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Parameters ----------------------------------------------------------------

const std::string* find_param(const ParamMap& params, const std::string& key) {
  auto it = params.find(key);
  return it == params.end() ? nullptr : &it->second;
}

double parse_alpha(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return std::stod(s);
  double p = std::stod(s.substr(0, slash));
  double q = std::stod(s.substr(slash + 1));
  if (q == 0.0) throw Error(ErrorCode::invalid_parameter, "alpha has zero denominator");
  return p / q;
}

double wrap_angle(double t) {
  t = std::fmod(t, kTwoPi);
  if (t < 0) t += kTwoPi;
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

double arc_distance(double a, double b) {
  double d = std::fabs(wrap_angle(a) - wrap_angle(b));
  return std::min(d, kTwoPi - d);
}

std::shared_ptr<const MetricSpaceModel> share(PointCloud pts, MetricSpaceModel::Options opt) {
  return std::make_shared<const MetricSpaceModel>(std::move(pts), std::move(opt));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::invalid_parameter, what);
}

// Interval grids --------------------------------------------------------------

CascadeModel interval_model(std::string name, ParamMap params, double lo, double hi,
                            long long n, std::function<double(double)> f,
                            std::function<double(double)> finv) {
  require(n >= 2, "grid must be >= 2");
  PointCloud pts(1);
  pts.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    double v = i == n - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    pts.push_back(Coords(&v, 1));
  }
  const double h = (hi - lo) / static_cast<double>(n - 1);
  MetricSpaceModel::Options opt;
  opt.kind = SpaceKind::sampled;
  opt.resolution = h;
  opt.metric_kind = MetricKind::euclidean;
  opt.metric_params = {{"interval", {lo, hi}}};
  opt.metric = [](Coords a, Coords b) { return std::fabs(a[0] - b[0]); };
  auto values = std::make_shared<std::vector<double>>(pts.data());
  opt.locator = [values, lo, h, n](Coords p) {
    long long i = std::llround((p[0] - lo) / h);
    i = std::clamp(i, 0LL, n - 1);
    Snap best{PointId{static_cast<std::uint32_t>(i)}, std::fabs(p[0] - (*values)[i])};
    for (long long j : {i - 1, i + 1}) {
      if (j < 0 || j >= n) continue;
      double d = std::fabs(p[0] - (*values)[j]);
      if (d < best.error) best = {PointId{static_cast<std::uint32_t>(j)}, d};
    }
    return best;
  };
  opt.neighbors = [values, n](PointId id) {
    PointCloud out(1);
    long long i = id.value;
    if (i > 0) out.push_back(Coords(&(*values)[i - 1], 1));
    if (i + 1 < n) out.push_back(Coords(&(*values)[i + 1], 1));
    return out;
  };
  auto space = share(std::move(pts), std::move(opt));
  MapFn fwd = [f](Coords in, std::span<double> out) { out[0] = f(in[0]); };
  MapFn inv;
  if (finv) inv = [finv](Coords in, std::span<double> out) { out[0] = finv(in[0]); };
  return CascadeModel::sampled(std::move(name), std::move(params), std::move(space), fwd, inv);
}

// Circle models ---------------------------------------------------------------

CascadeModel rotation_model(std::string name, ParamMap params, long long n, double alpha) {
  require(n >= 2, "grid must be >= 2");
  PointCloud pts(1);
  for (long long i = 0; i < n; ++i) {
    double t = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    pts.push_back(Coords(&t, 1));
  }
  const double h = kTwoPi / static_cast<double>(n);
  MetricSpaceModel::Options opt;
  opt.kind = SpaceKind::sampled;
  opt.resolution = h;
  opt.metric_kind = MetricKind::circle_arc;
  opt.metric = [](Coords a, Coords b) { return arc_distance(a[0], b[0]); };
  opt.locator = [h, n](Coords p) {
    double t = wrap_angle(p[0]);
    long long i = std::llround(t / h) % n;
    double c = h * static_cast<double>(i);
    return Snap{PointId{static_cast<std::uint32_t>(i)}, arc_distance(t, c)};
  };
  opt.neighbors = [h, n](PointId id) {
    PointCloud out(1);
    for (long long j : {static_cast<long long>(id.value) + n - 1, static_cast<long long>(id.value) + 1}) {
      double t = h * static_cast<double>(j % n);
      out.push_back(Coords(&t, 1));
    }
    return out;
  };
  auto space = share(std::move(pts), std::move(opt));
  const double step = kTwoPi * alpha;
  MapFn fwd = [step](Coords in, std::span<double> out) { out[0] = wrap_angle(in[0] + step); };
  MapFn inv = [step](Coords in, std::span<double> out) { out[0] = wrap_angle(in[0] - step); };
  return CascadeModel::sampled(std::move(name), std::move(params), std::move(space), fwd, inv);
}

double polar_distance(Coords a, Coords b) {
  double ax = a[0] * std::cos(a[1]), ay = a[0] * std::sin(a[1]);
  double bx = b[0] * std::cos(b[1]), by = b[0] * std::sin(b[1]);
  return std::hypot(ax - bx, ay - by);
}

/// Concentric rings with a shared angular grid; a zero radius is one point.
struct Rings {
  std::vector<double> radii;  // strictly increasing
  long long angles = 0;
};

struct RingLayout {
  Rings rings;
  std::vector<std::size_t> offset;

  PointCloud build() {
    PointCloud pts(2);
    for (double r : rings.radii) {
      offset.push_back(pts.size());
      long long count = r == 0.0 ? 1 : rings.angles;
      for (long long a = 0; a < count; ++a) {
        double c[2] = {r, kTwoPi * static_cast<double>(a) / static_cast<double>(rings.angles)};
        pts.push_back(c);
      }
    }
    return pts;
  }

  Snap locate(Coords p) const {
    const auto& rs = rings.radii;
    auto it = std::lower_bound(rs.begin(), rs.end(), p[0]);
    long long k = it - rs.begin();
    Snap best{PointId{0}, kInf};
    const double h = kTwoPi / static_cast<double>(rings.angles);
    for (long long j = k - 1; j <= k; ++j) {
      if (j < 0 || j >= static_cast<long long>(rs.size())) continue;
      long long a = 0;
      double c[2] = {rs[j], 0.0};
      if (rs[j] != 0.0) {
        a = std::llround(wrap_angle(p[1]) / h) % rings.angles;
        c[1] = h * static_cast<double>(a);
      }
      double d = polar_distance(p, c);
      if (d < best.error) best = {PointId{static_cast<std::uint32_t>(offset[j] + a)}, d};
    }
    return best;
  }
};

CascadeModel ring_model(std::string name, ParamMap params, Rings rings, Rings probe_rings,
                        std::function<double(double)> angular_step, bool invertible) {
  require(rings.angles >= 2, "angular grid must be >= 2");
  auto layout = std::make_shared<RingLayout>();
  layout->rings = rings;
  PointCloud pts = layout->build();
  double h = 0.0;
  for (std::size_t i = 1; i < rings.radii.size(); ++i)
    h = std::max(h, rings.radii[i] - rings.radii[i - 1]);
  h = std::max(h, rings.radii.back() * kTwoPi / static_cast<double>(rings.angles));

  MetricSpaceModel::Options opt;
  opt.kind = SpaceKind::sampled;
  opt.resolution = h;
  opt.metric_kind = MetricKind::polar_plane;
  opt.metric_params = {{"radii", rings.radii}, {"angles", rings.angles}};
  opt.metric = polar_distance;
  opt.locator = [layout](Coords p) { return layout->locate(p); };
  if (!probe_rings.radii.empty()) {
    RingLayout pl;
    pl.rings = probe_rings;
    opt.probes = pl.build();
  }
  auto space = share(std::move(pts), std::move(opt));
  MapFn fwd = [angular_step](Coords in, std::span<double> out) {
    out[0] = in[0];
    out[1] = wrap_angle(in[1] + angular_step(in[0]));
  };
  MapFn inv;
  if (invertible)
    inv = [angular_step](Coords in, std::span<double> out) {
      out[0] = in[0];
      out[1] = wrap_angle(in[1] - angular_step(in[0]));
    };
  return CascadeModel::sampled(std::move(name), std::move(params), std::move(space), fwd, inv);
}

/// Radii 1 - base^{-j} for j in [first, last], optionally with 0 and 1.
std::vector<double> geometric_radii(double base, long long first, long long last, bool ends) {
  std::set<double> rs;
  if (ends) {
    rs.insert(0.0);
    rs.insert(1.0);
  }
  for (long long j = first; j <= last; ++j) rs.insert(1.0 - std::pow(base, -static_cast<double>(j)));
  return {rs.begin(), rs.end()};
}

long long ipow(long long b, long long e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

CascadeModel circle_stack(std::string name, ParamMap params, long long base, bool inward) {
  long long levels = param_int(params, "levels", base == 2 ? 8 : 5);
  require(levels >= 1 && levels <= (base == 2 ? 16 : 10), "levels out of range");
  long long period = ipow(base, levels);
  long long angles = param_int(params, "angles", period);
  require(angles >= 2 && angles % period == 0, "angles must be a multiple of base^levels");
  params["levels"] = std::to_string(levels);
  params["angles"] = std::to_string(angles);
  Rings rings{geometric_radii(static_cast<double>(base), 1, levels, true), angles};
  Rings probes{geometric_radii(static_cast<double>(base), levels + 1, levels + (base == 2 ? 12 : 6), false),
               angles};
  std::function<double(double)> step;
  if (inward)
    step = [](double r) { return r == 1.0 ? 0.0 : kTwoPi * (1.0 - r); };
  else
    step = [](double r) { return kTwoPi * r; };
  return ring_model(std::move(name), std::move(params), rings, probes, step, true);
}

// Star-compactified periodic family -----------------------------------------------

/// Distance on Z u {inf} realising k -> inf.
double star_distance(double a, double b) {
  if (a == b) return 0.0;
  double da = std::isinf(a) ? 0.0 : 1.0 / (1.0 + std::fabs(a));
  double db = std::isinf(b) ? 0.0 : 1.0 / (1.0 + std::fabs(b));
  return da + db;
}

double star_metric(Coords a, Coords b) {
  double d = star_distance(a[1], b[1]);
  if (a[0] != b[0] || a[2] != b[2]) d = std::max(d, 1.0);
  return d;
}

/// Union of X_m for m in `fibres`, each {m} x {-T..T, inf} x {1..m}.
CascadeModel star_family(std::string name, ParamMap params, std::vector<long long> fibres,
                         long long truncate) {
  require(truncate >= 1 && truncate <= 100000, "truncate out of range");
  PointCloud pts(3);
  std::vector<std::size_t> offset;
  const long long ks = 2 * truncate + 2;  // -T..T then inf
  auto kvalue = [truncate](long long ki) {
    return ki == 2 * truncate + 1 ? kInf : static_cast<double>(ki - truncate);
  };
  for (long long m : fibres) {
    offset.push_back(pts.size());
    for (long long ki = 0; ki < ks; ++ki)
      for (long long l = 1; l <= m; ++l) {
        double c[3] = {static_cast<double>(m), kvalue(ki), static_cast<double>(l)};
        pts.push_back(c);
      }
  }
  auto index = [fibres, offset, truncate, ks](double m, double k, double l) -> std::size_t {
    auto it = std::find(fibres.begin(), fibres.end(), std::llround(m));
    if (it == fibres.end()) return std::numeric_limits<std::size_t>::max();
    long long mi = it - fibres.begin();
    long long ki = std::isinf(k) ? ks - 1 : std::clamp(std::llround(k) + truncate, 0LL, ks - 2);
    long long li = std::clamp(std::llround(l), 1LL, *it) - 1;
    return offset[mi] + ki * (*it) + li;
  };

  std::vector<std::uint32_t> table(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Coords c = pts[i];
    long long m = std::llround(c[0]);
    double k = c[1];
    double nk = (std::isinf(k) || k + 1 > static_cast<double>(truncate)) ? kInf : k + 1;
    double nl = static_cast<double>(std::llround(c[2]) % m + 1);
    table[i] = static_cast<std::uint32_t>(index(c[0], nk, nl));
  }

  MetricSpaceModel::Options opt;
  opt.kind = SpaceKind::finite_exact;
  opt.metric_kind = MetricKind::star_compactified;
  opt.metric_params = {{"truncate", truncate}, {"fibres", fibres}};
  opt.metric = star_metric;
  auto shared_pts = std::make_shared<PointCloud>(pts);
  opt.locator = [index, shared_pts](Coords p) {
    std::size_t i = index(p[0], p[1], p[2]);
    if (i >= shared_pts->size()) return Snap{PointId{0}, kInf};
    return Snap{PointId{static_cast<std::uint32_t>(i)}, star_metric(p, (*shared_pts)[i])};
  };
  return CascadeModel::finite(std::move(name), std::move(params), share(std::move(pts), std::move(opt)),
                              std::move(table));
}

// Single-one sequences ------------------------------------------------------------

double isolated_ones_metric(Coords a, Coords b) {
  if (a[0] == b[0]) return 0.0;
  if (std::isinf(a[0])) return std::ldexp(1.0, -static_cast<int>(std::fabs(b[0])));
  if (std::isinf(b[0])) return std::ldexp(1.0, -static_cast<int>(std::fabs(a[0])));
  return std::ldexp(1.0, -static_cast<int>(std::min(std::fabs(a[0]), std::fabs(b[0]))));
}

CascadeModel isolated_ones(ParamMap params) {
  long long t = param_int(params, "truncate", 20);
  require(t >= 1 && t <= 1000, "truncate out of range");
  params["truncate"] = std::to_string(t);
  PointCloud pts(1);
  for (long long a = -t; a <= t; ++a) {
    double v = static_cast<double>(a);
    pts.push_back(Coords(&v, 1));
  }
  double inf = kInf;
  pts.push_back(Coords(&inf, 1));
  const std::uint32_t zero = static_cast<std::uint32_t>(2 * t + 1);
  std::vector<std::uint32_t> table(pts.size());
  // left shift moves the one from position a to a-1; x^{-T} leaves the window
  for (long long a = -t; a <= t; ++a)
    table[a + t] = a == -t ? zero : static_cast<std::uint32_t>(a - 1 + t);
  table[zero] = zero;

  MetricSpaceModel::Options opt;
  opt.kind = SpaceKind::finite_exact;
  opt.metric_kind = MetricKind::isolated_ones;
  opt.metric_params = {{"truncate", t}};
  opt.metric = isolated_ones_metric;
  opt.locator = [t, zero](Coords p) {
    if (std::isinf(p[0])) return Snap{PointId{zero}, 0.0};
    long long a = std::clamp(std::llround(p[0]), -t, t);
    double v = static_cast<double>(a);
    return Snap{PointId{static_cast<std::uint32_t>(a + t)}, isolated_ones_metric(p, Coords(&v, 1))};
  };
  return CascadeModel::finite("isolated-ones-subshift", std::move(params),
                              share(std::move(pts), std::move(opt)), std::move(table));
}

// Full shift on a random sample ---------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Coordinates {seed, offset, flip}: symbol i is base(seed, offset+i), bumped at `flip`.
int window_symbol(Coords c, long long i, int symbols) {
  long long pos = static_cast<long long>(c[1]) + i;
  int s = sequence_symbol(static_cast<std::uint64_t>(c[0]), pos, symbols);
  if (!std::isnan(c[2]) && static_cast<long long>(c[2]) == pos) s = (s + 1) % symbols;
  return s;
}

constexpr int kShiftDepth = 62;

double shift_metric(Coords a, Coords b, int symbols) {
  if (a[0] == b[0] && a[1] == b[1] && (a[2] == b[2] || (std::isnan(a[2]) && std::isnan(b[2]))))
    return 0.0;
  if (window_symbol(a, 0, symbols) != window_symbol(b, 0, symbols)) return 1.0;
  for (int m = 1; m <= kShiftDepth; ++m)
    if (window_symbol(a, m, symbols) != window_symbol(b, m, symbols) ||
        window_symbol(a, -m, symbols) != window_symbol(b, -m, symbols))
      return std::ldexp(1.0, -m);
  return std::ldexp(1.0, -(kShiftDepth + 1));
}

CascadeModel full_shift(ParamMap params) {
  long long samples = param_int(params, "samples", 2000);
  long long seed = param_int(params, "seed", 1);
  long long symbols = param_int(params, "symbols", 2);
  long long window = param_int(params, "window", 6);
  require(samples >= 2 && samples <= 100000, "samples out of range");
  require(seed >= 0 && seed < (1LL << 30), "seed out of range");
  require(symbols >= 2 && symbols <= 16, "symbols out of range");
  require(window >= 0 && window < kShiftDepth, "window out of range");
  for (auto [k, v] : std::initializer_list<std::pair<const char*, long long>>{
           {"samples", samples}, {"seed", seed}, {"symbols", symbols}, {"window", window}})
    params[k] = std::to_string(v);

  PointCloud pts(3);
  for (long long i = 0; i < samples; ++i) {
    double c[3] = {static_cast<double>(seed * 1000003LL + i), 0.0, std::nan("")};
    pts.push_back(c);
  }
  const int sym = static_cast<int>(symbols);
  MetricSpaceModel::Options opt;
  opt.kind = SpaceKind::sampled;
  opt.resolution = std::ldexp(1.0, -static_cast<int>(window + 1));
  opt.metric_kind = MetricKind::shift;
  opt.metric_params = {{"symbols", symbols}, {"depth", kShiftDepth}};
  opt.metric = [sym](Coords a, Coords b) { return shift_metric(a, b, sym); };
  auto shared_pts = std::make_shared<PointCloud>(pts);
  opt.neighbors = [shared_pts, window](PointId id) {
    PointCloud out(3);
    Coords c = (*shared_pts)[id.value];
    for (long long side : {1LL, -1LL}) {
      double n[3] = {c[0], c[1], c[1] + static_cast<double>(side * (window + 1))};
      out.push_back(n);
    }
    return out;
  };
  auto space = share(std::move(pts), std::move(opt));
  MapFn fwd = [](Coords in, std::span<double> out) {
    out[0] = in[0];
    out[1] = in[1] + 1;
    out[2] = in[2];
  };
  MapFn inv = [](Coords in, std::span<double> out) {
    out[0] = in[0];
    out[1] = in[1] - 1;
    out[2] = in[2];
  };
  return CascadeModel::sampled("full-shift", std::move(params), std::move(space), fwd, inv);
}

// Registry ----------------------------------------------------------------------

const std::vector<CatalogEntry> kCatalog = {
    {"square-map", "f(x)=x^2 on [0,1]; two limit maps, 0 off 1 and 1 off 0", {{"grid", "1001"}}},
    {"neg-cube", "f(x)=-x^3 on [-1,1]; four limit maps from even/odd forward and backward powers",
     {{"grid", "2001"}}},
    {"identity", "identity on n points", {{"n", "5"}}},
    {"irrational-rotation", "rotation by 2*pi*alpha on the unit circle, arc-length metric",
     {{"grid", "360"}, {"alpha", "0.6180339887498949"}}},
    {"double-circle-rotation", "the same rotation on two circles r=1 and r=2",
     {{"grid", "360"}, {"alpha", "0.6180339887498949"}}},
    {"dyadic-circle-stack", "f(r,t)=(r,t+2*pi*r) on circles r=1-2^-j, r=0, r=1; envelope is 2-adic",
     {{"levels", "8"}, {"angles", "256"}}},
    {"dyadic-circle-stack-inward", "f(r,t)=(r,t+2*pi*(1-r)), identity on r=1; rigid, not uniformly rigid",
     {{"levels", "8"}, {"angles", "256"}}},
    {"triadic-circle-stack", "f(r,t)=(r,t+2*pi*r) on circles r=1-3^-j, r=0, r=1; envelope is 3-adic",
     {{"levels", "5"}, {"angles", "243"}}},
    {"periodic-stack", "f(n,k,l)=(n,k+1,l mod n + 1) on {n} x (Z u inf) x {1..n}; idempotent of period n",
     {{"n", "3"}, {"truncate", "50"}}},
    {"periodic-union", "disjoint union of the periodic stacks for m=1..n", {{"n", "3"}, {"truncate", "20"}}},
    {"isolated-ones-subshift", "left shift on single-one sequences plus the zero sequence",
     {{"truncate", "20"}}},
    {"annulus-skew", "f(r,t)=(r,t+2*pi*r) on a radial grid of the disc; variant=two-circle uses r in {1,2}",
     {{"rings", "11"}, {"angles", "64"}, {"variant", "annulus"}}},
    {"full-shift", "shift on a seeded random sample of bi-infinite sequences, window metric",
     {{"samples", "2000"}, {"seed", "1"}, {"symbols", "2"}, {"window", "6"}}},
};

void check_keys(const CatalogEntry& entry, const ParamMap& params) {
  for (const auto& [k, v] : params) {
    bool known = std::any_of(entry.params.begin(), entry.params.end(),
                             [&](const auto& p) { return p.first == k; });
    if (!known)
      throw Error(ErrorCode::invalid_parameter, "'" + entry.name + "' has no parameter '" + k + "'");
  }
}

}  // namespace

long long param_int(const ParamMap& params, const std::string& key, long long fallback) {
  const std::string* s = find_param(params, key);
  if (!s) return fallback;
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
  if (ec != std::errc() || ptr != s->data() + s->size())
    throw Error(ErrorCode::invalid_parameter, key + "=" + *s + " is not an integer");
  return v;
}

double param_double(const ParamMap& params, const std::string& key, double fallback) {
  const std::string* s = find_param(params, key);
  if (!s) return fallback;
  try {
    std::size_t used = 0;
    double v = std::stod(*s, &used);
    if (used != s->size()) throw std::invalid_argument(*s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::invalid_parameter, key + "=" + *s + " is not a number");
  }
}

std::string param_string(const ParamMap& params, const std::string& key, std::string fallback) {
  const std::string* s = find_param(params, key);
  return s ? *s : fallback;
}

ParamMap params_from_json(const Json& j) {
  ParamMap out;
  if (j.is_null()) return out;
  if (!j.is_object()) throw Error(ErrorCode::invalid_config, "params must be an object");
  for (const auto& [k, v] : j.items()) {
    if (v.is_string())
      out[k] = v.get<std::string>();
    else if (v.is_number() || v.is_boolean())
      out[k] = v.dump();
    else
      throw Error(ErrorCode::invalid_config, "param '" + k + "' must be a scalar");
  }
  return out;
}

int sequence_symbol(std::uint64_t seed, long long position, int symbols) {
  std::uint64_t h = splitmix64(seed * 0x100000001b3ULL ^ splitmix64(static_cast<std::uint64_t>(position)));
  return static_cast<int>(h % static_cast<std::uint64_t>(symbols));
}

const std::vector<CatalogEntry>& catalog() { return kCatalog; }

CascadeModel load_example(std::string_view name, const ParamMap& given) {
  auto it = std::find_if(kCatalog.begin(), kCatalog.end(), [&](const auto& e) { return e.name == name; });
  if (it == kCatalog.end()) throw Error(ErrorCode::unknown_name, "no catalog model '" + std::string(name) + "'");
  check_keys(*it, given);
  ParamMap params = given;
  for (const auto& [k, v] : it->params) params.emplace(k, v);
  const std::string n(name);

  if (n == "square-map") {
    return interval_model(n, params, 0.0, 1.0, param_int(params, "grid", 1001),
                          [](double x) { return x * x; }, [](double x) { return std::sqrt(std::max(x, 0.0)); });
  }
  if (n == "neg-cube") {
    return interval_model(n, params, -1.0, 1.0, param_int(params, "grid", 2001),
                          [](double x) { return -x * x * x; }, [](double x) { return -std::cbrt(x); });
  }
  if (n == "identity") {
    long long k = param_int(params, "n", 5);
    require(k >= 1 && k <= 1000000, "n out of range");
    std::vector<std::uint32_t> table(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < table.size(); ++i) table[i] = static_cast<std::uint32_t>(i);
    CascadeModel m = finite_map_model("identity", std::move(table));
    return m;
  }
  if (n == "irrational-rotation") {
    double alpha = parse_alpha(param_string(params, "alpha", ""));
    return rotation_model(n, params, param_int(params, "grid", 360), alpha);
  }
  if (n == "double-circle-rotation") {
    double alpha = parse_alpha(param_string(params, "alpha", ""));
    long long grid = param_int(params, "grid", 360);
    require(grid >= 2, "grid must be >= 2");
    const double step = kTwoPi * alpha;
    return ring_model(n, params, Rings{{1.0, 2.0}, grid}, {}, [step](double) { return step; }, true);
  }
  if (n == "dyadic-circle-stack") return circle_stack(n, params, 2, false);
  if (n == "dyadic-circle-stack-inward") return circle_stack(n, params, 2, true);
  if (n == "triadic-circle-stack") return circle_stack(n, params, 3, false);
  if (n == "periodic-stack") {
    long long k = param_int(params, "n", 3);
    require(k >= 1 && k <= 64, "n out of range");
    return star_family(n, params, {k}, param_int(params, "truncate", 50));
  }
  if (n == "periodic-union") {
    long long k = param_int(params, "n", 3);
    require(k >= 1 && k <= 16, "n out of range");
    std::vector<long long> fibres;
    for (long long m = 1; m <= k; ++m) fibres.push_back(m);
    return star_family(n, params, fibres, param_int(params, "truncate", 20));
  }
  if (n == "isolated-ones-subshift") return isolated_ones(params);
  if (n == "annulus-skew") {
    std::string variant = param_string(params, "variant", "annulus");
    long long angles = param_int(params, "angles", 64);
    Rings rings;
    rings.angles = angles;
    if (variant == "two-circle") {
      rings.radii = {1.0, 2.0};
    } else if (variant == "annulus") {
      long long count = param_int(params, "rings", 11);
      require(count >= 2, "rings must be >= 2");
      for (long long i = 0; i < count; ++i) rings.radii.push_back(static_cast<double>(i) / static_cast<double>(count - 1));
    } else {
      throw Error(ErrorCode::invalid_parameter, "variant must be annulus or two-circle");
    }
    return ring_model(n, params, rings, {}, [](double r) { return kTwoPi * r; }, true);
  }
  return full_shift(params);
}

}  // namespace ellis

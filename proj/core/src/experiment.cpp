#include "ellis/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include "ellis/algebra.hpp"
#include "ellis/corpus.hpp"
#include "ellis/envelope.hpp"
#include "ellis/error.hpp"
#include "ellis/hyperspace.hpp"
#include "ellis/properties.hpp"
#include "ellis/symbolic.hpp"

namespace ellis {

namespace fs = std::filesystem;

namespace {

enum class P { integer, number, boolean, string, int_list, num_list, object, any };

std::string_view type_name(P p) {
  switch (p) {
    case P::integer: return "integer";
    case P::number: return "number";
    case P::boolean: return "boolean";
    case P::string: return "string";
    case P::int_list: return "array of integers";
    case P::num_list: return "array of numbers";
    case P::object: return "object";
    case P::any: return "any";
  }
  return "?";
}

bool type_ok(P p, const Json& v) {
  switch (p) {
    case P::integer: return v.is_number_integer();
    case P::number: return v.is_number();
    case P::boolean: return v.is_boolean();
    case P::string: return v.is_string();
    case P::int_list:
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_number_integer(); });
    case P::num_list:
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_number(); });
    case P::object: return v.is_object();
    case P::any: return true;
  }
  return false;
}

struct OpResult {
  Json result = Json::object();
  Json invariants = Json::object();
  std::optional<CsvTable> table;
  std::string text;
};

struct DependencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json count_json(Count c) {
  if (c >= 0 && c <= static_cast<Count>(std::numeric_limits<std::int64_t>::max()))
    return static_cast<std::int64_t>(c);
  return count_to_string(c);
}

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_failure, "cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::invalid_config, path.string() + ": " + e.what());
  }
}

Json names_of(const FiniteSemigroup& s, const std::vector<std::uint32_t>& ids) {
  Json out = Json::array();
  for (auto a : ids) out.push_back(s.name(a));
  return out;
}

// Runner state ---------------------------------------------------------------------

struct State {
  const ExperimentConfig& cfg;
  std::shared_ptr<const CascadeModel> model;
  std::optional<Subshift> shift;
  std::optional<Envelope> env;
  std::optional<FiniteSemigroup> sg;
  bool sg_from_exact = false;
  std::optional<HyperCascadeModel> hyper;
  std::optional<Envelope> hyper_env;
  std::map<std::string, std::uint32_t> aliases;  // reference name -> envelope element
  std::string load_error;

  const CascadeModel& need_model() const {
    if (!model) throw DependencyError(load_error.empty() ? "no cascade model in this config" : load_error);
    return *model;
  }
  const Subshift& need_shift() const {
    if (!shift) throw DependencyError(load_error.empty() ? "no shift in this config" : load_error);
    return *shift;
  }
  const Envelope& need_env() const {
    if (!env) throw DependencyError("no envelope computed yet (run exact_envelope or approx_envelope first)");
    return *env;
  }
  const FiniteSemigroup& need_semigroup() {
    if (!sg) {
      if (!env) throw DependencyError(load_error.empty() ? "no semigroup: compute an envelope first" : load_error);
      sg = FiniteSemigroup::from_envelope(*env);
      sg_from_exact = env->exact;
    }
    return *sg;
  }
  const HyperCascadeModel& need_hyper() const {
    if (!hyper) throw DependencyError("no hyperspace model (run hyper_model first)");
    return *hyper;
  }
  const Envelope& need_hyper_env() const {
    if (!hyper_env) throw DependencyError("no hyperspace envelope (run hyper_envelope first)");
    return *hyper_env;
  }
  void set_env(Envelope e) {
    env = std::move(e);
    sg.reset();
    aliases.clear();
  }
  std::uint32_t element(const std::string& name) const {
    const auto& e = need_env();
    if (auto it = aliases.find(name); it != aliases.end()) return it->second;
    if (name == "f") return e.generator;
    for (std::uint32_t i = 0; i < e.size(); ++i)
      if (e.elements[i].name == name) return i;
    throw Error(ErrorCode::unknown_name, "no envelope element named " + name);
  }
  std::string display(std::uint32_t a) const {
    for (const auto& [alias, id] : aliases)
      if (id == a) return alias;
    return need_env().elements[a].name;
  }
  /// Theorem-backed invariants are asserted only on exact, associative semigroups.
  bool rigorous() {
    const auto& s = need_semigroup();
    return sg_from_exact && s.associativity().violations == 0;
  }

  fs::path resolve(const std::string& p) const {
    fs::path path(p);
    return path.is_absolute() ? path : cfg.base_dir / path;
  }
  Subshift shift_from(const Json& spec) const {
    if (spec.is_string()) return build_subshift(read_json_file(resolve(spec.get<std::string>())));
    return build_subshift(spec);
  }
};

template <class T>
T get(const Json& params, const char* key, T fallback) {
  return params.contains(key) ? params.at(key).get<T>() : fallback;
}

// Result builders ------------------------------------------------------------------

CsvTable composition_csv(const Envelope& env) {
  CsvTable t;
  t.name = "table";
  t.columns.push_back("o");
  for (const auto& e : env.elements) t.columns.push_back(e.name);
  for (std::size_t a = 0; a < env.size(); ++a) {
    std::vector<Json> row{env.elements[a].name};
    for (std::size_t b = 0; b < env.size(); ++b) row.push_back(env.elements[env.table[a][b]].name);
    t.rows.push_back(std::move(row));
  }
  return t;
}

OpResult envelope_result(const Envelope& env, bool with_images) {
  OpResult r;
  r.result = env.to_json(with_images);
  Json limits = Json::array();
  for (auto id : env.non_iterates())
    if (env.elements[id].provenance == Provenance::limit) limits.push_back(env.elements[id].name);
  r.result["limits"] = std::move(limits);
  r.result["non_iterates"] = env.non_iterates().size();
  if (env.exact) r.invariants["associative"] = check_associativity(env.table).violations == 0;
  if (env.size() <= 512) {
    r.table = composition_csv(env);
    if (env.size() <= 64) r.text = render_table(env);
  }
  return r;
}

Json to_json(const TransitivityReport& t) {
  Json j;
  j["horizon"] = t.horizon;
  j["cover_size"] = t.cover_size;
  j["run_length"] = t.run_length;
  j["transitive"] = to_json(t.transitive);
  j["weakly_mixing"] = to_json(t.weakly_mixing);
  j["mixing"] = to_json(t.mixing);
  j["chain_ok"] = t.chain_ok;
  if (t.labels.size() <= 64) j["cover"] = t.labels;
  return j;
}

Json to_json(const EquicontinuityReport& e) {
  Json j;
  j["eps"] = e.eps;
  j["horizon"] = e.horizon;
  Json per = Json::array();
  for (const auto& pts : e.eq_points) per.push_back(pts.size());
  j["eq_point_counts"] = std::move(per);
  j["equicontinuity_points"] = e.equicontinuity_points.size();
  j["sensitivity"] = e.sensitivity;
  j["almost_equicontinuous"] = to_json(e.almost_equicontinuous);
  j["sensitive"] = to_json(e.sensitive);
  j["equicontinuous"] = to_json(e.equicontinuous);
  return j;
}

Json to_json(const ThetaReport& t, const Envelope& base_env, const Envelope& hyper_env) {
  Json j;
  j["well_defined"] = t.well_defined;
  j["surjective"] = t.surjective;
  j["injective"] = t.injective;
  j["homomorphism_violations"] = t.homomorphism_violations;
  j["singleton_escapes"] = t.singleton_escapes;
  j["unmatched"] = t.unmatched;
  Json map = Json::object();
  for (std::size_t a = 0; a < t.theta.size(); ++a)
    map[hyper_env.elements[a].name] = t.theta[a] ? Json(base_env.elements[*t.theta[a]].name) : Json(nullptr);
  j["theta"] = std::move(map);
  Json bad = Json::array();
  for (auto [a, b] : t.violating_pairs) bad.push_back({hyper_env.elements[a].name, hyper_env.elements[b].name});
  j["violating_pairs"] = std::move(bad);
  return j;
}

Json to_json(const InducibilityReport& r) {
  return {{"singletons_ok", r.singletons_ok},
          {"monotone_ok", r.monotone_ok},
          {"minimal_ok", r.minimal_ok},
          {"smaller", r.smaller ? Json(*r.smaller) : Json(nullptr)},
          {"inducible", r.singletons_ok && r.monotone_ok && r.minimal_ok}};
}

OpenSet open_set_from(const Json& j) {
  if (j.contains("ball")) {
    const auto& b = j.at("ball");
    return OpenSet::ball(PointId{b.at("center").get<std::uint32_t>()}, b.at("radius").get<double>());
  }
  if (j.contains("points")) return OpenSet::points(j.at("points").get<std::vector<std::uint32_t>>());
  if (j.contains("cylinder")) return OpenSet::cylinder(j.at("cylinder").get<std::string>());
  throw Error(ErrorCode::invalid_parameter, "open set needs ball, points or cylinder");
}

SlidingBlockCode code_from(const Json& j, const Subshift& domain) {
  if (j.is_string()) {
    std::string name = j.get<std::string>();
    if (name == "golden-to-even") return golden_to_even_code();
    if (name == "identity") return identity_code(domain.alphabet());
    throw Error(ErrorCode::unknown_name, "block code " + name);
  }
  SlidingBlockCode c;
  c.memory = j.value("memory", std::size_t{0});
  c.anticipation = j.value("anticipation", std::size_t{0});
  for (const auto& [w, s] : j.at("rule").items()) {
    std::string sym = s.get<std::string>();
    if (sym.size() != 1) throw Error(ErrorCode::bad_spec, "rule images must be single symbols");
    if (w.size() != c.window()) throw Error(ErrorCode::bad_spec, "rule block " + w + " does not match the window");
    c.rule[w] = sym[0];
  }
  return c;
}

/// Words of length n over the alphabet avoiding every forbidden block (or every match of
/// `pattern` when given), by enumeration.
Count brute_force_count(const Subshift& shift, std::size_t n, const std::optional<std::regex>& pattern) {
  const std::string& alpha = shift.alphabet();
  const std::size_t q = alpha.size();
  std::vector<std::size_t> digits(n, 0);
  Count total = 0;
  Word w(n, alpha.empty() ? '0' : alpha[0]);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) w[i] = alpha[digits[i]];
    bool ok = !(pattern && std::regex_search(w, *pattern));
    if (!pattern)
      for (const auto& f : shift.forbidden())
        if (w.find(f) != Word::npos) {
          ok = false;
          break;
        }
    if (ok) ++total;
    std::size_t i = 0;
    while (i < n && ++digits[i] == q) digits[i++] = 0;
    if (i == n) break;
  }
  return total;
}

/// Closed-form limit maps of the interval examples, keyed by the usual letters.
std::vector<std::pair<std::string, std::function<double(double)>>> reference_maps(const std::string& model) {
  if (model == "square-map")
    return {{"g1", [](double x) { return x >= 1.0 ? 1.0 : 0.0; }},
            {"g2", [](double x) { return x <= 0.0 ? 0.0 : 1.0; }}};
  if (model == "neg-cube") {
    auto sgn = [](double x) { return x > 0 ? 1.0 : x < 0 ? -1.0 : 0.0; };
    return {{"g", [](double x) { return std::fabs(x) >= 1.0 ? x : 0.0; }},
            {"h", [](double x) { return std::fabs(x) >= 1.0 ? -x : 0.0; }},
            {"m", [sgn](double x) { return sgn(x); }},
            {"n", [sgn](double x) { return -sgn(x); }}};
  }
  throw Error(ErrorCode::unknown_name, "no reference limit maps for model " + model);
}

// Operations -----------------------------------------------------------------------

using Handler = std::function<OpResult(State&, const Json&)>;

struct OpSpec {
  std::map<std::string, P> params;
  Handler run;
};

const std::map<std::string, OpSpec>& registry() {
  static const std::map<std::string, OpSpec> ops = [] {
    std::map<std::string, OpSpec> m;

    // Models and envelopes
    m["describe"] = {{}, [](State& s, const Json&) {
      OpResult r;
      if (s.model) {
        r.result = to_json(*s.model);
        r.result["size"] = s.model->size();
        if (s.model->size() > 256) {
          r.result.erase("points");
          r.result.erase("map");
        }
      } else if (s.shift) {
        r.result = s.shift->to_json();
      } else {
        r.result = {{"semigroup_size", s.need_semigroup().size()}};
      }
      return r;
    }};
    m["discretize"] = {{}, [](State& s, const Json&) {
      s.model = std::make_shared<const CascadeModel>(discretize(s.need_model()));
      s.env.reset();
      s.sg.reset();
      s.hyper.reset();
      s.hyper_env.reset();
      OpResult r;
      r.result = {{"size", s.model->size()}, {"invertible", s.model->invertible()}};
      return r;
    }};
    m["exact_envelope"] = {{{"with_images", P::boolean}}, [](State& s, const Json& p) {
      s.need_model();
      s.set_env(exact_envelope(s.model));
      return envelope_result(*s.env, get(p, "with_images", false));
    }};
    m["approx_envelope"] = {{{"horizon", P::integer},
                             {"tau", P::number},
                             {"two_sided", P::boolean},
                             {"max_elements", P::integer},
                             {"min_witnesses", P::integer},
                             {"with_images", P::boolean}},
                            [](State& s, const Json& p) {
                              s.need_model();
                              ApproxOptions o;
                              o.horizon = get(p, "horizon", o.horizon);
                              o.tau = get(p, "tau", o.tau);
                              o.range = get(p, "two_sided", false) ? PowerRange::two_sided : PowerRange::forward;
                              o.max_elements = get(p, "max_elements", o.max_elements);
                              o.min_witnesses = get(p, "min_witnesses", o.min_witnesses);
                              s.set_env(approx_envelope(s.model, o));
                              return envelope_result(*s.env, get(p, "with_images", false));
                            }};
    m["identity_isolated"] = {{{"tau", P::number}, {"horizon", P::integer}}, [](State& s, const Json& p) {
      const auto& env = s.need_env();
      std::optional<long long> h;
      if (p.contains("horizon")) h = p.at("horizon").get<long long>();
      auto iso = identity_isolated(env, get(p, "tau", env.tau), h);
      OpResult r;
      r.result = {{"isolated", iso.isolated},
                  {"witness", iso.witness ? Json(*iso.witness) : Json(nullptr)},
                  {"closest", iso.closest}};
      return r;
    }};
    m["match_references"] = {{}, [](State& s, const Json&) {
      const auto& env = s.need_env();
      const auto& space = env.model->space();
      if (space.dim() != 1) throw Error(ErrorCode::invalid_parameter, "reference maps are one-dimensional");
      OpResult r;
      Json matches = Json::object(), errors = Json::object();
      bool all = true;
      std::map<std::string, std::uint32_t> found;
      for (const auto& [name, g] : reference_maps(env.model->name())) {
        std::optional<std::uint32_t> best;
        double best_err = std::numeric_limits<double>::infinity();
        for (auto a : env.non_iterates()) {
          double err = 0.0;
          for (std::uint32_t x = 0; x < space.size() && err < best_err; ++x) {
            const double want = g(space.point(PointId{x})[0]);
            err = std::max(err, std::fabs(env.image(a, x)[0] - want));
          }
          if (err < best_err) {
            best_err = err;
            best = a;
          }
        }
        const bool ok = best && best_err < env.tau;
        all = all && ok;
        matches[name] = ok ? Json(env.elements[*best].name) : Json(nullptr);
        errors[name] = best ? Json(best_err) : Json(nullptr);
        if (ok) found[name] = *best;
      }
      s.aliases = std::move(found);
      r.result = {{"matches", matches}, {"sup_error", errors}, {"all_matched", all}, {"tau", env.tau}};
      return r;
    }};
    m["compose"] = {{{"products", P::any}}, [](State& s, const Json& p) {
      if (!p.contains("products") || !p.at("products").is_array())
        throw Error(ErrorCode::invalid_parameter, "products must list [left, right] name pairs");
      const auto& env = s.need_env();
      OpResult r;
      Json out = Json::object();
      for (const auto& pr : p.at("products")) {
        if (!pr.is_array() || pr.size() != 2)
          throw Error(ErrorCode::invalid_parameter, "each product is a [left, right] pair");
        const std::string a = pr[0].get<std::string>(), b = pr[1].get<std::string>();
        out[a + "*" + b] = s.display(env.compose(s.element(a), s.element(b)));
      }
      r.result = {{"products", out}};
      return r;
    }};
    m["stabilization"] = {{{"horizons", P::int_list}, {"tau", P::number}, {"two_sided", P::boolean},
                           {"max_elements", P::integer}},
                          [](State& s, const Json& p) {
                            s.need_model();
                            auto hs = get(p, "horizons", std::vector<long long>{100, 500, 1000, 2000});
                            auto range = get(p, "two_sided", false) ? PowerRange::two_sided : PowerRange::forward;
                            auto st = stabilization_diagnostic(s.model, hs, get(p, "tau", 1e-3), range,
                                                               get(p, "max_elements", std::size_t{4096}));
                            OpResult r;
                            r.result = {{"horizons", st.horizons},
                                        {"counts", st.counts},
                                        {"stabilized", st.stabilized},
                                        {"verdict", st.verdict}};
                            CsvTable t{"stabilization", {"horizon", "elements"}, {}};
                            for (std::size_t i = 0; i < st.horizons.size(); ++i)
                              t.rows.push_back({st.horizons[i], st.counts[i]});
                            r.table = std::move(t);
                            return r;
                          }};
    m["power_decomposition"] = {{{"powers", P::int_list}}, [](State& s, const Json& p) {
      const auto& model = s.need_model();
      OpResult r;
      Json rows = Json::array();
      bool all = true;
      for (long long n : get(p, "powers", std::vector<long long>{2, 3})) {
        auto d = envelope_power_decomposition(model, n);
        all = all && d.equal;
        rows.push_back({{"n", d.n},
                        {"lhs_size", d.lhs_size},
                        {"rhs_size", d.rhs_size},
                        {"power_envelope_size", d.power_envelope_size},
                        {"equal", d.equal}});
      }
      r.result = {{"rows", rows}, {"all_equal", all}};
      r.invariants["decomposition_equal"] = all;
      return r;
    }};

    // Hyperspace
    m["hyper_model"] = {{{"k", P::integer}, {"budget", P::integer}}, [](State& s, const Json& p) {
      const auto& model = s.need_model();
      s.hyper = build_hyper_model(model, get(p, "k", std::size_t{2}), get(p, "budget", std::size_t{250000}));
      s.hyper_env.reset();
      OpResult r;
      r.result = {{"base", model.name()},
                  {"base_size", model.size()},
                  {"k", s.hyper->max_cardinality()},
                  {"size", s.hyper->size()},
                  {"finite_exact", s.hyper->model().finite_exact()},
                  {"invertible", s.hyper->model().invertible()}};
      return r;
    }};
    m["hyper_envelope"] = {{{"horizon", P::integer}, {"tau", P::number}, {"two_sided", P::boolean},
                            {"max_elements", P::integer}},
                           [](State& s, const Json& p) {
                             const auto& hyper = s.need_hyper();
                             if (hyper.model().finite_exact()) {
                               s.hyper_env = exact_envelope(hyper.model_ptr());
                             } else {
                               ApproxOptions o;
                               o.horizon = get(p, "horizon", o.horizon);
                               o.tau = get(p, "tau", o.tau);
                               o.range = get(p, "two_sided", false) ? PowerRange::two_sided : PowerRange::forward;
                               o.max_elements = get(p, "max_elements", o.max_elements);
                               s.hyper_env = approx_envelope(hyper.model_ptr(), o);
                             }
                             OpResult r = envelope_result(*s.hyper_env, false);
                             r.table.reset();
                             r.text.clear();
                             return r;
                           }};
    m["theta"] = {{}, [](State& s, const Json&) {
      const auto& base_env = s.need_env();
      const auto& hyper_env = s.need_hyper_env();
      auto th = theta_check(base_env, hyper_env, s.need_hyper());
      OpResult r;
      r.result = to_json(th, base_env, hyper_env);
      r.invariants["well_defined"] = th.well_defined;
      r.invariants["homomorphism"] = th.homomorphism_violations == 0;
      return r;
    }};
    m["inducibility"] = {{}, [](State& s, const Json&) {
      const auto& hyper = s.need_hyper();
      OpResult r;
      auto induced = inducibility_check(hyper, hyper.model().table());
      r.result["induced_map"] = to_json(induced);
      bool all = induced.singletons_ok && induced.monotone_ok && induced.minimal_ok;
      Json els = Json::object();
      if (s.hyper_env) {
        for (auto id : s.hyper_env->non_iterates()) {
          const auto& e = s.hyper_env->elements[id];
          auto rep = inducibility_check(hyper, e.ids);
          all = all && rep.singletons_ok && rep.monotone_ok && rep.minimal_ok;
          els[e.name] = to_json(rep);
        }
      }
      r.result["elements"] = std::move(els);
      r.result["all_inducible"] = all;
      r.invariants["inducible"] = all;
      return r;
    }};

    // Algebra
    m["associativity"] = {{{"exhaustive_limit", P::integer}, {"samples", P::integer}}, [](State& s, const Json& p) {
      const auto& sg = s.need_semigroup();
      auto a = check_associativity(sg.table(), get(p, "exhaustive_limit", std::size_t{64}),
                                   get(p, "samples", std::size_t{200000}), s.cfg.seed);
      OpResult r;
      r.result = {{"exhaustive", a.exhaustive},
                  {"triples_checked", a.triples_checked},
                  {"violations", a.violations},
                  {"example", a.example ? Json(*a.example) : Json(nullptr)}};
      if (s.sg_from_exact || !s.env) r.invariants["associative"] = a.violations == 0;
      return r;
    }};
    m["idempotents"] = {{}, [](State& s, const Json&) {
      const auto& sg = s.need_semigroup();
      auto ids = idempotents(sg);
      OpResult r;
      r.result = {{"count", ids.size()}, {"elements", names_of(sg, ids)}};
      r.invariants["nonempty"] = !ids.empty();
      return r;
    }};
    m["minimal_left_ideals"] = {{}, [](State& s, const Json&) {
      const auto& sg = s.need_semigroup();
      auto ideals = minimal_left_ideals(sg);
      Json list = Json::array();
      for (const auto& i : ideals) list.push_back(names_of(sg, i));
      OpResult r;
      r.result = {{"count", ideals.size()}, {"ideals", list}};
      return r;
    }};
    m["kernel_and_groups"] = {{}, [](State& s, const Json&) {
      const auto& sg = s.need_semigroup();
      auto d = kernel_and_groups(sg);
      OpResult r;
      Json ideals = Json::array();
      for (std::size_t i = 0; i < d.ideals.size(); ++i) {
        Json groups = Json::array();
        for (const auto& g : d.groups[i])
          groups.push_back({{"idempotent", sg.name(g.idempotent)},
                            {"members", names_of(sg, g.members)},
                            {"is_group", g.is_group}});
        ideals.push_back({{"members", names_of(sg, d.ideals[i])},
                          {"idempotents", names_of(sg, d.idempotents_per_ideal[i])},
                          {"groups", groups}});
      }
      r.result = {{"ideals", ideals},
                  {"kernel", names_of(sg, d.kernel)},
                  {"ideals_disjoint", d.ideals_disjoint},
                  {"every_ideal_has_idempotent", d.every_ideal_has_idempotent},
                  {"groups_partition_ideals", d.groups_partition_ideals},
                  {"group_axioms_hold", d.group_axioms_hold}};
      if (sg.associativity().violations == 0) {
        r.invariants["ideals_disjoint"] = d.ideals_disjoint;
        r.invariants["every_ideal_has_idempotent"] = d.every_ideal_has_idempotent;
        r.invariants["groups_partition_ideals"] = d.groups_partition_ideals;
        r.invariants["group_axioms_hold"] = d.group_axioms_hold;
      }
      return r;
    }};
    m["ideal_isomorphism"] = {{}, [](State& s, const Json&) {
      const auto& sg = s.need_semigroup();
      auto ideals = minimal_left_ideals(sg);
      OpResult r;
      Json pairs = Json::array();
      bool all = true;
      for (std::size_t a = 0; a < ideals.size(); ++a)
        for (std::size_t b = 0; b < ideals.size(); ++b) {
          auto iso = ideal_isomorphism_check(sg, ideals[a], ideals[b]);
          all = all && iso.isomorphic;
          pairs.push_back({{"from", a},
                           {"to", b},
                           {"pairing_found", iso.pairing_found},
                           {"isomorphic", iso.isomorphic},
                           {"u", iso.pairing_found ? Json(sg.name(iso.u)) : Json(nullptr)},
                           {"v", iso.pairing_found ? Json(sg.name(iso.v)) : Json(nullptr)},
                           {"orientation", iso.orientation},
                           {"bijective", iso.bijective},
                           {"intertwines", iso.intertwines},
                           {"violations", iso.violations}});
        }
      r.result = {{"ideal_count", ideals.size()}, {"pairs", pairs}, {"all_isomorphic", all}};
      if (sg.associativity().violations == 0) r.invariants["all_isomorphic"] = all;
      return r;
    }};
    m["group_distal"] = {{}, [](State& s, const Json&) {
      auto g = is_group_distal(s.need_semigroup());
      OpResult r;
      r.result = {{"is_group", g.is_group},
                  {"unique_idempotent_is_identity", g.unique_idempotent_is_identity},
                  {"agree", g.agree}};
      if (s.rigorous()) r.invariants["agree"] = g.agree;
      return r;
    }};
    m["proximal_structure"] = {{}, [](State& s, const Json&) {
      const auto& env = s.need_env();
      const auto& sg = s.need_semigroup();
      auto p = proximal_structure(env, sg);
      OpResult r;
      r.result = {{"sample_size", p.sample_size},
                  {"proximal_pairs", p.proximal_pairs},
                  {"examples", p.examples},
                  {"ideal_relation_pairs", p.ideal_relation_pairs},
                  {"is_equivalence", p.is_equivalence},
                  {"transitivity_failure", p.transitivity_failure ? Json(*p.transitivity_failure) : Json(nullptr)},
                  {"ideal_count", p.ideal_count},
                  {"unique_ideal", p.unique_ideal},
                  {"consistent", p.consistent},
                  {"union_covers", p.union_covers}};
      if (s.rigorous()) r.invariants["unique_ideal_iff_equivalence"] = p.consistent;
      return r;
    }};
    m["periodic_elements"] = {{}, [](State& s, const Json&) {
      const auto& sg = s.need_semigroup();
      auto a = periodic_element_analysis(sg);
      OpResult r;
      Json list = Json::array();
      for (const auto& e : a.periodic)
        list.push_back({{"element", sg.name(e.element)},
                        {"period", e.period},
                        {"orbit", names_of(sg, e.orbit)},
                        {"orbit_is_minimal_ideal", e.orbit_is_minimal_ideal}});
      Json idem = Json::array();
      for (const auto& e : a.periodic)
        if (sg.mul(e.element, e.element) == e.element) idem.push_back({{"element", sg.name(e.element)}, {"period", e.period}});
      r.result = {{"count", a.periodic.size()},
                  {"periodic", list},
                  {"idempotent_periodic", idem},
                  {"common_period", a.common_period},
                  {"periods_equal", a.periods_equal},
                  {"orbits_are_minimal_ideals", a.orbits_are_minimal_ideals},
                  {"count_bound_ok", a.count_bound_ok}};
      if (s.rigorous()) {
        r.invariants["periods_equal"] = a.periods_equal;
        r.invariants["orbits_are_minimal_ideals"] = a.orbits_are_minimal_ideals;
        r.invariants["count_bound_ok"] = a.count_bound_ok;
      }
      return r;
    }};
    m["recurrent_idempotents"] = {{}, [](State& s, const Json&) {
      const auto& sg = s.need_semigroup();
      auto c = recurrent_idempotent_check(sg);
      OpResult r;
      Json list = Json::array();
      for (const auto& u : c.idempotents)
        list.push_back({{"element", sg.name(u.element)},
                        {"witness", u.witness ? Json(*u.witness) : Json(nullptr)},
                        {"identity", u.identity}});
      r.result = {{"idempotents", list}, {"violations", c.violations}};
      if (s.rigorous()) r.invariants["recurrent"] = c.violations == 0;
      return r;
    }};
    m["export_semigroup"] = {{}, [](State& s, const Json&) {
      OpResult r;
      r.result = s.need_semigroup().to_json();
      return r;
    }};

    // Properties
    m["hitting_set"] = {{{"u", P::object}, {"v", P::object}, {"horizon", P::integer}}, [](State& s, const Json& p) {
      OpenSet u = open_set_from(p.at("u"));
      OpenSet v = open_set_from(p.at("v"));
      long long h = get(p, "horizon", 50LL);
      auto hits = s.shift ? hitting_set(*s.shift, u, v, h) : hitting_set(s.need_model(), u, v, h);
      OpResult r;
      r.result = {{"u", u.label()}, {"v", v.label()}, {"horizon", h}, {"hits", hits}, {"count", hits.size()}};
      CsvTable t{"hits", {"n"}, {}};
      for (long long n : hits) t.rows.push_back({n});
      r.table = std::move(t);
      return r;
    }};
    m["transitivity"] = {{{"horizon", P::integer}, {"radius", P::number}, {"max_len", P::integer},
                          {"run_length", P::integer}},
                         [](State& s, const Json& p) {
                           long long h = get(p, "horizon", 50LL);
                           std::size_t run = get(p, "run_length", std::size_t{10});
                           TransitivityReport t;
                           if (s.shift) {
                             t = classify_transitivity(*s.shift, h, get(p, "max_len", std::size_t{3}), run);
                           } else {
                             const auto& model = s.need_model();
                             std::optional<double> radius;
                             if (p.contains("radius")) radius = p.at("radius").get<double>();
                             t = classify_transitivity(model, h, default_cover(model, radius), run);
                           }
                           OpResult r;
                           r.result = to_json(t);
                           r.invariants["chain_ok"] = t.chain_ok;
                           CsvTable tab{"hits", {"u", "v", "count", "first", "last"}, {}};
                           for (std::size_t u = 0; u < t.hits.size(); ++u)
                             for (std::size_t v = 0; v < t.hits[u].size(); ++v) {
                               const auto& h = t.hits[u][v];
                               tab.rows.push_back({t.labels[u], t.labels[v], h.size(),
                                                   h.empty() ? Json(nullptr) : Json(h.front()),
                                                   h.empty() ? Json(nullptr) : Json(h.back())});
                             }
                           r.table = std::move(tab);
                           return r;
                         }};
    m["strong_transitivity"] = {{{"horizon", P::integer}, {"radius", P::number}}, [](State& s, const Json& p) {
      const auto& model = s.need_model();
      std::optional<double> radius;
      if (p.contains("radius")) radius = p.at("radius").get<double>();
      auto st = strong_transitivity_check(model, get(p, "horizon", 50LL), default_cover(model, radius));
      OpResult r;
      r.result = {{"strongly_transitive", to_json(st.strongly_transitive)},
                  {"minimal", to_json(st.minimal)},
                  {"transitive", to_json(st.transitive)},
                  {"theorem_consistent", st.theorem_consistent},
                  {"chain_ok", st.chain_ok}};
      r.invariants["theorem_consistent"] = st.theorem_consistent;
      r.invariants["chain_ok"] = st.chain_ok;
      return r;
    }};
    m["equicontinuity"] = {{{"eps", P::num_list}, {"horizon", P::integer}}, [](State& s, const Json& p) {
      auto e = equicontinuity_scan(s.need_model(), get(p, "eps", std::vector<double>{0.1}),
                                   get(p, "horizon", 100LL));
      OpResult r;
      r.result = to_json(e);
      return r;
    }};
    m["hyper_equicontinuity"] = {{{"k", P::integer}, {"eps", P::num_list}, {"horizon", P::integer},
                                  {"budget", P::integer}},
                                 [](State& s, const Json& p) {
                                   auto x = hyper_equicontinuity_crosscheck(
                                       s.need_model(), get(p, "k", std::size_t{2}),
                                       get(p, "eps", std::vector<double>{0.25, 0.5}), get(p, "horizon", 100LL),
                                       get(p, "budget", std::size_t{250000}));
                                   OpResult r;
                                   r.result = {{"base", to_json(x.base)},
                                               {"hyper", to_json(x.hyper)},
                                               {"hyper_size", x.hyper_size},
                                               {"agree", x.agree}};
                                   r.invariants["agree"] = x.agree;
                                   return r;
                                 }};
    m["rigidity"] = {{{"horizon", P::integer}, {"tau", P::number}, {"tuple_size", P::integer},
                      {"tuples", P::integer}},
                     [](State& s, const Json& p) {
                       auto g = rigidity_battery(s.need_model(), get(p, "horizon", 512LL), get(p, "tau", 0.02),
                                                 get(p, "tuple_size", std::size_t{0}),
                                                 get(p, "tuples", std::size_t{64}), s.cfg.seed);
                       OpResult r;
                       r.result = {{"horizon", g.horizon},
                                   {"tau", g.tau},
                                   {"tuple_size", g.tuple_size},
                                   {"weakly_rigid", to_json(g.weakly_rigid)},
                                   {"rigid", to_json(g.rigid)},
                                   {"uniformly_rigid", to_json(g.uniformly_rigid)},
                                   {"chain_ok", g.chain_ok},
                                   {"best_sample_sup", g.best_sample_sup},
                                   {"best_uniform_sup", g.best_uniform_sup}};
                       r.invariants["chain_ok"] = g.chain_ok;
                       return r;
                     }};
    m["recurrence"] = {{{"horizon", P::integer}, {"tau", P::number}}, [](State& s, const Json& p) {
      auto rep = recurrence_report(s.need_model(), get(p, "horizon", 200LL), get(p, "tau", 1e-3));
      OpResult r;
      r.result = {{"horizon", rep.horizon},
                  {"tau", rep.tau},
                  {"points", rep.points.size()},
                  {"recurrent", rep.recurrent},
                  {"nonwandering", rep.nonwandering},
                  {"essentially_nonwandering", rep.essentially_nonwandering},
                  {"almost_periodic", rep.almost_periodic}};
      CsvTable t{"recurrence", {"point", "recurrent", "nonwandering", "essentially_nonwandering", "almost_periodic",
                                "hits", "gap"},
                 {}};
      for (std::size_t i = 0; i < rep.points.size(); ++i) {
        const auto& q = rep.points[i];
        t.rows.push_back({i, q.recurrent, q.nonwandering, q.essentially_nonwandering, q.almost_periodic, q.hits,
                          q.gap ? Json(*q.gap) : Json(nullptr)});
      }
      r.table = std::move(t);
      return r;
    }};
    m["wap_proxy"] = {{{"eps", P::num_list}}, [](State& s, const Json& p) {
      const auto& env = s.need_env();
      auto w = wap_proxy_check(env, get(p, "eps", std::vector<double>{0.1}));
      OpResult r;
      Json els = Json::array();
      for (const auto& e : w.elements) {
        Json j = {{"element", env.elements[e.element].name}, {"continuous", e.continuous}, {"jump_size", e.jump_size}};
        if (e.jump) j["jump"] = {e.jump->first, e.jump->second};
        els.push_back(std::move(j));
      }
      r.result = {{"eps", w.eps},
                  {"elements", els},
                  {"all_elements_continuous", w.all_elements_continuous},
                  {"worst_modulus", w.worst_modulus},
                  {"stabilized", w.stabilized}};
      return r;
    }};
    m["distal_semiflow"] = {{}, [](State& s, const Json&) {
      auto d = distal_semiflow_check(s.need_model());
      OpResult r;
      r.result = {{"distal", d.distal},
                  {"pointwise_almost_periodic", d.pointwise_almost_periodic},
                  {"surjective", d.surjective},
                  {"consequences_hold", d.consequences_hold},
                  {"proximal_pair", d.proximal_pair ? Json({d.proximal_pair->first, d.proximal_pair->second})
                                                    : Json(nullptr)}};
      r.invariants["consequences_hold"] = d.consequences_hold;
      return r;
    }};

    // Shifts
    m["language"] = {{{"n", P::integer}, {"limit", P::integer}}, [](State& s, const Json& p) {
      auto words = language(s.need_shift(), get(p, "n", std::size_t{4}));
      std::size_t limit = get(p, "limit", std::size_t{256});
      OpResult r;
      r.result["count"] = words.size();
      r.result["truncated"] = words.size() > limit;
      if (words.size() > limit) words.resize(limit);
      r.result["words"] = words;
      return r;
    }};
    m["language_counts"] = {{{"n_max", P::integer}, {"brute_force_max", P::integer}, {"forbidden_pattern", P::string}},
                            [](State& s, const Json& p) {
      const auto& sh = s.need_shift();
      std::size_t n_max = get(p, "n_max", std::size_t{16});
      std::size_t brute_max = get(p, "brute_force_max", std::size_t{0});
      std::optional<std::regex> pattern;
      if (p.contains("forbidden_pattern")) {
        try {
          pattern.emplace(p.at("forbidden_pattern").get<std::string>());
        } catch (const std::regex_error& e) {
          throw Error(ErrorCode::invalid_parameter, std::string("forbidden_pattern: ") + e.what());
        }
      }
      if (brute_max && !pattern && sh.kind() != ShiftKind::forbidden_blocks)
        throw Error(ErrorCode::invalid_parameter, "brute force counting needs forbidden blocks or a forbidden_pattern");
      OpResult r;
      Json rows = Json::array();
      CsvTable t{"counts", {"n", "words"}, {}};
      bool transfer_ok = true, brute_ok = true;
      for (std::size_t n = 1; n <= n_max; ++n) {
        Count c = count_words(sh, n);
        Json row = {{"n", n}, {"words", count_json(c)}};
        if (sh.is_finite_type() && n + 1 >= sh.block_length()) {
          Count tc = transfer_count(sh, n);
          row["transfer"] = count_json(tc);
          transfer_ok = transfer_ok && tc == c;
        }
        if (n <= brute_max) {
          Count bc = brute_force_count(sh, n, pattern);
          row["brute_force"] = count_json(bc);
          brute_ok = brute_ok && bc == c;
        }
        t.rows.push_back({n, count_json(c)});
        rows.push_back(std::move(row));
      }
      r.result = {{"rows", rows}, {"transfer_agrees", transfer_ok}, {"brute_force_agrees", brute_ok}};
      r.invariants["transfer_agrees"] = transfer_ok;
      r.invariants["brute_force_agrees"] = brute_ok;
      r.table = std::move(t);
      return r;
    }};
    m["entropy"] = {{{"n_max", P::integer}}, [](State& s, const Json& p) {
      auto e = entropy_estimates(s.need_shift(), get(p, "n_max", std::size_t{20}));
      OpResult r;
      Json rows = Json::array();
      CsvTable t{"entropy", {"n", "per_symbol"}, {}};
      for (const auto& row : e.rows) {
        rows.push_back({{"n", row.n}, {"words", count_json(row.words)}, {"per_symbol", row.per_symbol}});
        t.rows.push_back({row.n, row.per_symbol});
      }
      r.result = {{"rows", rows},
                  {"spectral", e.spectral},
                  {"limit_estimate", e.limit_estimate},
                  {"gap", std::fabs(e.spectral - e.limit_estimate)},
                  {"spectral_bounds", {e.estimate.lower, e.estimate.upper}},
                  {"converged", e.estimate.converged},
                  {"per_symbol_nonincreasing", e.per_symbol_nonincreasing},
                  {"reducible_warning", e.reducible_warning}};
      r.table = std::move(t);
      return r;
    }};
    m["classify"] = {{}, [](State& s, const Json&) {
      auto c = classify_sft(s.need_shift());
      OpResult r;
      r.result = {{"irreducible", c.irreducible},
                  {"mixing", c.mixing},
                  {"period", c.period},
                  {"components", c.components}};
      return r;
    }};
    m["periodic_spectrum"] = {{{"n_max", P::integer}}, [](State& s, const Json& p) {
      auto ps = periodic_spectrum(s.need_shift(), get(p, "n_max", std::size_t{8}));
      OpResult r;
      Json rows = Json::array();
      CsvTable t{"periodic", {"n", "fixed_by", "least", "orbits"}, {}};
      for (const auto& [n, c] : ps.fixed_by) {
        rows.push_back({{"n", n},
                        {"fixed_by", count_json(c)},
                        {"least", count_json(ps.least.at(n))},
                        {"orbits", count_json(ps.orbits.at(n))}});
        t.rows.push_back({n, count_json(c), count_json(ps.least.at(n)), count_json(ps.orbits.at(n))});
      }
      r.result = {{"rows", rows}, {"method", ps.method}};
      r.table = std::move(t);
      return r;
    }};
    m["boyle"] = {{{"target", P::any}, {"n_max", P::integer}}, [](State& s, const Json& p) {
      if (!p.contains("target")) throw Error(ErrorCode::invalid_parameter, "boyle needs a target shift");
      Subshift y = s.shift_from(p.at("target"));
      auto b = boyle_precondition(s.need_shift(), y, get(p, "n_max", std::size_t{12}));
      OpResult r;
      r.result = {{"per_divides", b.per_divides},
                  {"entropy_gap", b.entropy_gap},
                  {"hypotheses_hold", b.hypotheses_hold},
                  {"x_periods", b.x_periods},
                  {"y_periods", b.y_periods},
                  {"undivided", b.undivided}};
      return r;
    }};
    m["verify_factor"] = {{{"code", P::any}, {"codomain", P::any}, {"n_max", P::integer}},
                          [](State& s, const Json& p) {
                            const auto& x = s.need_shift();
                            Subshift y = p.contains("codomain") ? s.shift_from(p.at("codomain")) : x;
                            SlidingBlockCode code = code_from(p.value("code", Json("identity")), x);
                            std::size_t n_max = get(p, "n_max", std::size_t{16});
                            OpResult r;
                            Json rows = Json::array();
                            bool all = true;
                            for (std::size_t n = code.window(); n <= n_max; ++n) {
                              bool ok = verify_factor(code, x, y, n);
                              all = all && ok;
                              rows.push_back({{"n", n}, {"maps_into", ok}});
                            }
                            r.result = {{"window", code.window()}, {"rows", rows}, {"holds", all}};
                            return r;
                          }};

    // Suites
    m["theorem_suite"] = {{{"count", P::integer}, {"max_points", P::integer}}, [](State& s, const Json& p) {
      auto t = theorem_equivalence_suite(get(p, "count", std::size_t{500}), get(p, "max_points", std::size_t{8}),
                                         s.cfg.seed);
      OpResult r;
      r.result = {{"models", t.models},
                  {"invertible", t.invertible},
                  {"groups", t.groups},
                  {"multi_ideal", t.multi_ideal},
                  {"violations",
                   {{"group_equivalence", t.group_equivalence},
                    {"unique_ideal_vs_proximal", t.unique_ideal_vs_proximal},
                    {"ideal_isomorphism", t.ideal_isomorphism},
                    {"power_decomposition", t.power_decomposition},
                    {"nakamura", t.nakamura},
                    {"distal_consequences", t.distal_consequences},
                    {"associativity", t.associativity}}},
                  {"total_violations", t.violations()},
                  {"failures", t.failures}};
      r.invariants["no_violations"] = t.violations() == 0;
      return r;
    }};
    m["rigidity_sweep"] = {{{"horizon", P::integer}, {"tau", P::number}}, [](State&, const Json& p) {
      auto rows = catalog_rigidity_sweep(get(p, "horizon", 100LL), get(p, "tau", 0.05));
      OpResult r;
      Json list = Json::array();
      CsvTable t{"rigidity", {"model", "weakly_rigid", "identity_isolated", "agree", "chain_ok"}, {}};
      bool agree = true, chain = true;
      for (const auto& row : rows) {
        agree = agree && row.agree;
        chain = chain && row.chain_ok;
        list.push_back({{"model", row.model},
                        {"weakly_rigid", row.weakly_rigid},
                        {"identity_isolated", row.identity_isolated},
                        {"agree", row.agree},
                        {"chain_ok", row.chain_ok}});
        t.rows.push_back({row.model, row.weakly_rigid, row.identity_isolated, row.agree, row.chain_ok});
      }
      r.result = {{"rows", list}, {"all_agree", agree}, {"all_chains_ok", chain}};
      r.invariants["all_agree"] = agree;
      r.invariants["all_chains_ok"] = chain;
      r.table = std::move(t);
      return r;
    }};
    m["theta_sweep"] = {{{"k", P::integer}, {"budget", P::integer}}, [](State&, const Json& p) {
      auto rows = catalog_theta_sweep(get(p, "k", std::size_t{2}), get(p, "budget", std::size_t{250000}));
      OpResult r;
      Json list = Json::array();
      CsvTable t{"theta",
                 {"model", "base_size", "hyper_size", "hyper_envelope_size", "well_defined", "surjective",
                  "injective", "homomorphism_violations", "induced_map_inducible"},
                 {}};
      bool ok = true;
      for (const auto& row : rows) {
        ok = ok && row.well_defined && row.homomorphism_violations == 0 && row.induced_map_inducible;
        list.push_back({{"model", row.model},
                        {"base_size", row.base_size},
                        {"hyper_size", row.hyper_size},
                        {"hyper_envelope_size", row.hyper_envelope_size},
                        {"well_defined", row.well_defined},
                        {"surjective", row.surjective},
                        {"injective", row.injective},
                        {"homomorphism_violations", row.homomorphism_violations},
                        {"induced_map_inducible", row.induced_map_inducible}});
        t.rows.push_back({row.model, row.base_size, row.hyper_size, row.hyper_envelope_size, row.well_defined,
                          row.surjective, row.injective, row.homomorphism_violations, row.induced_map_inducible});
      }
      r.result = {{"rows", list}, {"all_ok", ok}};
      r.invariants["theta_homomorphism_and_inducible"] = ok;
      r.table = std::move(t);
      return r;
    }};
    return m;
  }();
  return ops;
}

// Model loading --------------------------------------------------------------------

const std::set<std::string> kModelKinds{"catalog", "file", "finite_map", "shift", "semigroup"};

void validate_model_spec(const Json& m, bool allow_file) {
  if (m.is_null()) return;
  auto bad = [](const std::string& why) { throw Error(ErrorCode::invalid_config, "model: " + why); };
  if (!m.is_object()) bad("must be an object");
  std::size_t kinds = 0;
  for (const auto& [k, v] : m.items()) {
    if (kModelKinds.count(k)) {
      ++kinds;
    } else if (k != "params") {
      bad("unknown key '" + k + "'");
    }
  }
  if (kinds != 1) bad("exactly one of catalog, file, finite_map, shift, semigroup is required");
  if (m.contains("params") && !m.contains("catalog")) bad("params only apply to catalog models");
  if (m.contains("catalog")) {
    if (!m.at("catalog").is_string()) bad("catalog must be a string");
    const std::string name = m.at("catalog").get<std::string>();
    const auto& cat = catalog();
    auto it = std::find_if(cat.begin(), cat.end(), [&](const CatalogEntry& e) { return e.name == name; });
    if (it == cat.end()) bad("unknown catalog model '" + name + "'");
    if (m.contains("params")) {
      const auto& p = m.at("params");
      if (!p.is_object()) bad("params must be an object");
      for (const auto& [k, v] : p.items()) {
        if (!(v.is_primitive() && !v.is_null())) bad("param '" + k + "' must be a scalar");
        bool known = std::any_of(it->params.begin(), it->params.end(), [&](const auto& d) { return d.first == k; });
        if (!known) bad("unknown param '" + k + "' for " + name);
      }
    }
  }
  if (m.contains("file") && (!allow_file || !m.at("file").is_string())) bad("file must be a path string");
  if (m.contains("finite_map") && !type_ok(P::int_list, m.at("finite_map"))) bad("finite_map must list integers");
  if (m.contains("shift") && !(m.at("shift").is_object() || m.at("shift").is_string()))
    bad("shift must be a spec object or a path");
  if (m.contains("semigroup") && !(m.at("semigroup").is_object() || m.at("semigroup").is_string()))
    bad("semigroup must be a table object or a path");
}

void load_model(State& s, const Json& spec, const fs::path& base_dir) {
  if (spec.is_null()) return;
  if (spec.contains("file")) {
    fs::path p = spec.at("file").get<std::string>();
    if (!p.is_absolute()) p = base_dir / p;
    Json inner = read_json_file(p);
    validate_model_spec(inner, false);
    load_model(s, inner, p.parent_path());
    return;
  }
  if (spec.contains("catalog")) {
    ParamMap params = spec.contains("params") ? params_from_json(spec.at("params")) : ParamMap{};
    s.model = std::make_shared<const CascadeModel>(load_example(spec.at("catalog").get<std::string>(), params));
  } else if (spec.contains("finite_map")) {
    s.model = std::make_shared<const CascadeModel>(
        finite_map_model("finite-map", spec.at("finite_map").get<std::vector<std::uint32_t>>()));
  } else if (spec.contains("shift")) {
    const Json& sh = spec.at("shift");
    s.shift = sh.is_string() ? build_subshift(read_json_file(base_dir / sh.get<std::string>())) : build_subshift(sh);
  } else if (spec.contains("semigroup")) {
    const Json& sg = spec.at("semigroup");
    s.sg = FiniteSemigroup::from_json(sg.is_string() ? read_json_file(base_dir / sg.get<std::string>()) : sg);
  }
}

Json error_json(const std::string& code, const std::string& message) {
  return {{"code", code}, {"message", message}};
}

bool numbers_close(double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(b)); }

bool json_equal(const Json& a, const Json& b) {
  if (a.is_number() && b.is_number()) return numbers_close(a.get<double>(), b.get<double>());
  if (a.is_array() && b.is_array()) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!json_equal(a[i], b[i])) return false;
    return true;
  }
  if (a.is_object() && b.is_object()) {
    if (a.size() != b.size()) return false;
    for (const auto& [k, v] : b.items())
      if (!a.contains(k) || !json_equal(a.at(k), v)) return false;
    return true;
  }
  return a == b;
}

const std::set<std::string> kComparisons{"approx", "tol", "lt", "le", "gt", "ge", "contains"};

bool is_comparison(const Json& e) {
  if (!e.is_object() || e.empty()) return false;
  return std::all_of(e.items().begin(), e.items().end(),
                     [](const auto& kv) { return kComparisons.count(kv.key()) > 0; });
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_failure, "cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw Error(ErrorCode::io_failure, "write failed for " + path.string());
}

std::string csv_cell(const Json& v) {
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  if (v.is_null()) return "";
  return v.dump();
}

std::string scalar_text(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

/// Scalar leaves as "path = value", skipping long arrays.
void flatten_text(const Json& v, const std::string& path, std::ostringstream& out) {
  if (v.is_object()) {
    for (const auto& [k, x] : v.items()) flatten_text(x, path.empty() ? k : path + "." + k, out);
  } else if (v.is_array()) {
    bool scalars = std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_primitive(); });
    if (scalars && v.size() <= 16) {
      out << "  " << path << " = " << v.dump() << '\n';
    } else if (v.size() <= 16) {
      for (std::size_t i = 0; i < v.size(); ++i) flatten_text(v[i], path + "." + std::to_string(i), out);
    } else {
      out << "  " << path << " = [" << v.size() << " entries]\n";
    }
  } else {
    out << "  " << path << " = " << scalar_text(v) << '\n';
  }
}

std::string render_csv_text(const CsvTable& t) {
  std::vector<std::size_t> width(t.columns.size());
  for (std::size_t c = 0; c < t.columns.size(); ++c) width[c] = t.columns[c].size();
  std::vector<std::vector<std::string>> cells;
  for (const auto& row : t.rows) {
    std::vector<std::string> r;
    for (std::size_t c = 0; c < row.size(); ++c) {
      r.push_back(row[c].is_null() ? "-" : scalar_text(row[c]));
      if (c < width.size()) width[c] = std::max(width[c], r.back().size());
    }
    cells.push_back(std::move(r));
  }
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t c = 0; c < r.size(); ++c)
      out << (c ? "  " : "") << std::setw(static_cast<int>(c < width.size() ? width[c] : 0)) << r[c];
    out << '\n';
  };
  line(t.columns);
  for (const auto& r : cells) line(r);
  return out.str();
}

}  // namespace

// Public API -----------------------------------------------------------------------

std::vector<std::string> operation_names() {
  std::vector<std::string> out;
  for (const auto& [name, spec] : registry()) out.push_back(name);
  return out;
}

ExperimentConfig parse_config(const Json& j, fs::path base_dir) {
  auto bad = [](const std::string& why) { throw Error(ErrorCode::invalid_config, why); };
  if (!j.is_object()) bad("config must be a JSON object");
  static const std::set<std::string> top{"schema", "name", "model", "seed", "pipeline", "output"};
  for (const auto& [k, v] : j.items())
    if (!top.count(k)) bad("unknown top-level key '" + k + "'");
  if (j.contains("schema") && j.at("schema") != kConfigSchema)
    bad("unsupported schema " + j.at("schema").dump() + ", expected " + kConfigSchema);

  ExperimentConfig c;
  c.source = j;
  c.base_dir = std::move(base_dir);
  if (j.contains("name")) {
    if (!j.at("name").is_string()) bad("name must be a string");
    c.name = j.at("name").get<std::string>();
  }
  if (j.contains("seed")) {
    const Json& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      bad("seed must be a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("model")) {
    c.model = j.at("model");
    validate_model_spec(c.model, true);
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    if (!o.is_object()) bad("output must be an object");
    for (const auto& [k, v] : o.items())
      if (k != "dir" && k != "formats") bad("unknown output key '" + k + "'");
    if (o.contains("dir")) {
      if (!o.at("dir").is_string()) bad("output.dir must be a string");
      c.output_dir = o.at("dir").get<std::string>();
    }
    if (o.contains("formats")) {
      if (!o.at("formats").is_array()) bad("output.formats must be an array");
      c.formats.clear();
      for (const auto& f : o.at("formats")) {
        if (!f.is_string() || (f != "json" && f != "csv" && f != "text"))
          bad("output format must be json, csv or text, got " + f.dump());
        c.formats.push_back(f.get<std::string>());
      }
    }
  }

  const auto& ops = registry();
  std::set<std::string> ids;
  if (j.contains("pipeline")) {
    if (!j.at("pipeline").is_array()) bad("pipeline must be an array");
    std::size_t index = 0;
    for (const auto& st : j.at("pipeline")) {
      ++index;
      const std::string where = "pipeline step " + std::to_string(index);
      if (!st.is_object() || !st.contains("op") || !st.at("op").is_string()) bad(where + ": needs an op name");
      for (const auto& [k, v] : st.items())
        if (k != "op" && k != "id" && k != "params" && k != "expect") bad(where + ": unknown key '" + k + "'");
      PipelineStep step;
      step.op = st.at("op").get<std::string>();
      auto it = ops.find(step.op);
      if (it == ops.end()) bad(where + ": unknown operation '" + step.op + "'");
      if (st.contains("params")) {
        step.params = st.at("params");
        if (!step.params.is_object()) bad(where + ": params must be an object");
        for (const auto& [k, v] : step.params.items()) {
          auto p = it->second.params.find(k);
          if (p == it->second.params.end()) bad(where + " (" + step.op + "): unknown param '" + k + "'");
          if (!type_ok(p->second, v))
            bad(where + " (" + step.op + "): param '" + k + "' must be " + std::string(type_name(p->second)));
        }
      }
      if (st.contains("expect")) {
        step.expect = st.at("expect");
        if (!step.expect.is_object()) bad(where + ": expect must map result paths to values");
      }
      std::string id = st.contains("id") ? st.at("id").get<std::string>() : step.op;
      if (id.empty() || id.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-") !=
                            std::string::npos)
        bad(where + ": id must be non-empty and use [A-Za-z0-9_-]");
      if (!st.contains("id")) {
        std::string base = id;
        for (int k = 2; ids.count(id); ++k) id = base + "-" + std::to_string(k);
      } else if (ids.count(id)) {
        bad(where + ": duplicate id '" + id + "'");
      }
      ids.insert(id);
      step.id = id;
      c.pipeline.push_back(std::move(step));
    }
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  Json j = read_json_file(path);
  return parse_config(j, path.parent_path());
}

const Json* json_path(const Json& root, const std::string& path) {
  const Json* cur = &root;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    std::size_t dot = path.find('.', pos);
    std::string key = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (cur->is_object()) {
      auto it = cur->find(key);
      if (it == cur->end()) return nullptr;
      cur = &*it;
    } else if (cur->is_array()) {
      if (key == "length") {
        static thread_local Json len;
        len = cur->size();
        return &len;
      }
      if (key.empty() || key.find_first_not_of("0123456789") != std::string::npos) return nullptr;
      std::size_t i = std::stoul(key);
      if (i >= cur->size()) return nullptr;
      cur = &(*cur)[i];
    } else {
      return nullptr;
    }
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return cur;
}

bool expectation_holds(const Json& actual, const Json& expected) {
  if (!is_comparison(expected)) return json_equal(actual, expected);
  for (const auto& [k, v] : expected.items()) {
    if (k == "contains") {
      if (actual.is_array()) {
        if (std::none_of(actual.begin(), actual.end(), [&](const Json& x) { return json_equal(x, v); })) return false;
      } else if (actual.is_string() && v.is_string()) {
        if (actual.get<std::string>().find(v.get<std::string>()) == std::string::npos) return false;
      } else {
        return false;
      }
      continue;
    }
    if (k == "tol") continue;
    if (!actual.is_number() || !v.is_number()) return false;
    const double a = actual.get<double>(), b = v.get<double>();
    if (k == "approx" && !(std::fabs(a - b) <= expected.value("tol", 1e-9))) return false;
    if (k == "lt" && !(a < b)) return false;
    if (k == "le" && !(a <= b)) return false;
    if (k == "gt" && !(a > b)) return false;
    if (k == "ge" && !(a >= b)) return false;
  }
  return true;
}

Report run_experiment(const ExperimentConfig& config) {
  using Clock = std::chrono::steady_clock;
  Report rep;
  State state{config, {}, {}, {}, {}, false, {}, {}, {}, {}};
  Json steps = Json::array();
  Json timings = Json::object();
  std::size_t expect_failed = 0, invariant_failed = 0, ok_steps = 0;

  const auto t0 = Clock::now();
  try {
    load_model(state, config.model, config.base_dir);
  } catch (const Error& e) {
    state.load_error = std::string("model failed to load: ") + e.what();
  }
  timings["model"] = std::chrono::duration<double>(Clock::now() - t0).count();

  const auto& ops = registry();
  for (const auto& step : config.pipeline) {
    Json rec;
    rec["id"] = step.id;
    rec["op"] = step.op;
    rec["params"] = step.params;
    const auto start = Clock::now();
    try {
      OpResult r = ops.at(step.op).run(state, step.params);
      rec["status"] = "ok";
      ++ok_steps;
      if (!r.invariants.empty()) {
        rec["invariants"] = r.invariants;
        for (const auto& [name, held] : r.invariants.items())
          if (!held.get<bool>()) ++invariant_failed;
      }
      if (!step.expect.empty()) {
        Json checks = Json::array();
        for (const auto& [path, want] : step.expect.items()) {
          const Json* got = json_path(r.result, path);
          bool pass = got && expectation_holds(*got, want);
          if (!pass) ++expect_failed;
          checks.push_back({{"path", path}, {"expected", want}, {"actual", got ? *got : Json(nullptr)}, {"pass", pass}});
        }
        rec["expectations"] = std::move(checks);
      }
      rec["result"] = std::move(r.result);
      if (r.table) {
        r.table->name = step.id;
        rep.tables.push_back(std::move(*r.table));
      }
      if (!r.text.empty()) rep.text_blocks.emplace_back(step.id, std::move(r.text));
    } catch (const DependencyError& e) {
      rec["status"] = "error";
      rec["error"] = error_json("dependency", e.what());
      ++rep.step_errors;
    } catch (const Error& e) {
      rec["status"] = "error";
      rec["error"] = error_json(std::string(to_string(e.code())), e.what());
      ++rep.step_errors;
    } catch (const Json::exception& e) {
      rec["status"] = "error";
      rec["error"] = error_json("invalid_parameter", e.what());
      ++rep.step_errors;
    } catch (const std::exception& e) {
      rec["status"] = "error";
      rec["error"] = error_json("internal", e.what());
      ++rep.step_errors;
    }
    timings[step.id] = std::chrono::duration<double>(Clock::now() - start).count();
    steps.push_back(std::move(rec));
  }

  rep.verdict_failures = expect_failed + invariant_failed;
  Json summary = {{"steps", config.pipeline.size()},
                  {"ok", ok_steps},
                  {"errors", rep.step_errors},
                  {"expectations_failed", expect_failed},
                  {"invariants_failed", invariant_failed},
                  {"verdict", rep.step_errors ? "error" : rep.verdict_failures ? "fail" : "pass"}};
  if (!state.load_error.empty()) summary["model_error"] = state.load_error;

  rep.document = {{"schema", kReportSchema},
                  {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                  {"config", config.source},
                  {"steps", std::move(steps)},
                  {"summary", std::move(summary)}};
  timings["total"] = std::chrono::duration<double>(Clock::now() - t0).count();
  rep.timings = std::move(timings);
  return rep;
}

std::string dump_report(const Json& document) { return document.dump(2) + "\n"; }

std::string render_csv(const CsvTable& t) {
  std::ostringstream out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << csv_cell(t.columns[c]);
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_cell(row[c]);
    out << '\n';
  }
  return out.str();
}

std::string render_text(const Report& report) {
  std::ostringstream out;
  const Json& doc = report.document;
  out << "ellis report";
  if (doc.at("config").contains("name")) out << ": " << scalar_text(doc.at("config").at("name"));
  out << '\n';
  for (const auto& st : doc.at("steps")) {
    const std::string id = st.at("id").get<std::string>();
    out << "\n[" << id << "] " << st.at("op").get<std::string>() << " - " << st.at("status").get<std::string>()
        << '\n';
    if (st.contains("error")) out << "  error: " << st.at("error").at("message").get<std::string>() << '\n';
    if (st.contains("result")) {
      Json brief = st.at("result");
      if (brief.contains("table") && brief.contains("limit_count")) {
        brief.erase("table");
        brief.erase("elements");
      }
      flatten_text(brief, "", out);
    }
    if (st.contains("invariants")) flatten_text(st.at("invariants"), "invariant", out);
    if (st.contains("expectations"))
      for (const auto& e : st.at("expectations"))
        out << "  expect " << e.at("path").get<std::string>() << ": " << (e.at("pass").get<bool>() ? "ok" : "FAILED")
            << '\n';
    for (const auto& [sid, block] : report.text_blocks)
      if (sid == id) out << '\n' << block;
    for (const auto& t : report.tables)
      if (t.name == id && st.at("op") != "exact_envelope" && st.at("op") != "approx_envelope")
        out << '\n' << render_csv_text(t);
  }
  const auto& s = doc.at("summary");
  out << "\nsummary: " << s.at("verdict").get<std::string>() << " (" << s.at("ok") << " ok, " << s.at("errors")
      << " errors, " << s.at("expectations_failed") << " failed expectations, " << s.at("invariants_failed")
      << " failed invariants)\n";
  return out.str();
}

std::vector<fs::path> emit_report(const Report& report, const fs::path& dir, const std::vector<std::string>& formats) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io_failure, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<fs::path> written;
  for (const auto& f : formats) {
    if (f == "json") {
      write_file(dir / "report.json", dump_report(report.document));
      write_file(dir / "timings.json", report.timings.dump(2) + "\n");
      written.push_back(dir / "report.json");
      written.push_back(dir / "timings.json");
    } else if (f == "csv") {
      for (const auto& t : report.tables) {
        write_file(dir / (t.name + ".csv"), render_csv(t));
        written.push_back(dir / (t.name + ".csv"));
      }
    } else if (f == "text") {
      write_file(dir / "report.txt", render_text(report));
      written.push_back(dir / "report.txt");
    } else {
      throw Error(ErrorCode::invalid_parameter, "unsupported format " + f);
    }
  }
  return written;
}

Json catalog_listing() {
  Json out = Json::array();
  for (const auto& e : catalog()) {
    Json params = Json::object();
    for (const auto& [k, v] : e.params) params[k] = v;
    out.push_back({{"name", e.name}, {"summary", e.summary}, {"params", params}});
  }
  return out;
}

std::string render_catalog() {
  std::ostringstream out;
  std::size_t w = 0;
  for (const auto& e : catalog()) w = std::max(w, e.name.size());
  for (const auto& e : catalog()) {
    out << std::left << std::setw(static_cast<int>(w)) << e.name << "  " << e.summary;
    if (!e.params.empty()) {
      out << "  [";
      for (std::size_t i = 0; i < e.params.size(); ++i)
        out << (i ? " " : "") << e.params[i].first << '=' << e.params[i].second;
      out << ']';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace ellis

#include "ellis/corpus.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "ellis/algebra.hpp"
#include "ellis/envelope.hpp"
#include "ellis/hyperspace.hpp"
#include "ellis/properties.hpp"

namespace ellis {

CascadeModel random_finite_model(std::mt19937_64& rng, std::size_t max_points, bool invertible) {
  std::uniform_int_distribution<std::size_t> size(1, std::max<std::size_t>(1, max_points));
  const std::size_t n = size(rng);
  std::vector<std::uint32_t> table(n);
  if (invertible) {
    std::iota(table.begin(), table.end(), 0U);
    std::shuffle(table.begin(), table.end(), rng);
  } else {
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
    for (auto& v : table) v = pick(rng);
  }
  return finite_map_model("random", std::move(table));
}

TheoremSuiteReport theorem_equivalence_suite(std::size_t count, std::size_t max_points, std::uint64_t seed) {
  TheoremSuiteReport r;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < count; ++i) {
    auto model = std::make_shared<const CascadeModel>(random_finite_model(rng, max_points, coin(rng)));
    ++r.models;
    if (model->invertible()) ++r.invertible;
    auto fail = [&](std::size_t& counter, const std::string& what) {
      ++counter;
      if (r.failures.size() < 16) {
        std::ostringstream s;
        s << what << " on map";
        for (std::uint32_t v : model->table()) s << ' ' << v;
        r.failures.push_back(s.str());
      }
    };
    Envelope env = exact_envelope(model);
    auto assoc = check_associativity(env.table);
    if (assoc.violations) fail(r.associativity, "associativity");
    auto s = FiniteSemigroup::from_table(env.table, env.identity, env.generator, Validation::report, env.names());

    auto gd = is_group_distal(s);
    auto prox = proximal_structure(env, s);
    if (gd.is_group) ++r.groups;
    if (!(gd.is_group == gd.unique_idempotent_is_identity && gd.is_group == (prox.proximal_pairs == 0)))
      fail(r.group_equivalence, "group / idempotent / proximal equivalence");

    auto ideals = minimal_left_ideals(s);
    if (ideals.size() > 1) ++r.multi_ideal;
    if ((ideals.size() == 1) != prox.is_equivalence) fail(r.unique_ideal_vs_proximal, "unique ideal vs proximal");

    for (const auto& a : ideals)
      for (const auto& b : ideals)
        if (!ideal_isomorphism_check(s, a, b).isomorphic) fail(r.ideal_isomorphism, "ideal isomorphism");

    for (long long n : {2LL, 3LL})
      if (!envelope_power_decomposition(*model, n).equal) fail(r.power_decomposition, "power decomposition");

    if (idempotents(s).empty()) fail(r.nakamura, "no idempotent");

    auto ds = distal_semiflow_check(*model);
    if (!ds.consequences_hold) fail(r.distal_consequences, "distal consequences");
  }
  return r;
}

std::vector<RigiditySweepRow> catalog_rigidity_sweep(long long horizon, double tau) {
  std::vector<RigiditySweepRow> rows;
  for (const auto& entry : catalog()) {
    auto model = std::make_shared<const CascadeModel>(load_example(entry.name));
    RigiditySweepRow row;
    row.model = entry.name;
    row.horizon = horizon;
    auto rig = rigidity_battery(*model, horizon, tau, 0);
    row.weakly_rigid = rig.weakly_rigid.holds();
    row.chain_ok = rig.chain_ok;
    Envelope env;
    if (model->finite_exact()) {
      env = exact_envelope(model);
    } else {
      ApproxOptions o;
      o.horizon = horizon;
      o.tau = tau;
      env = approx_envelope(model, o);
    }
    row.identity_isolated = identity_isolated(env, tau, horizon).isolated;
    row.agree = row.weakly_rigid == !row.identity_isolated;
    rows.push_back(row);
  }
  return rows;
}

std::vector<ThetaSweepRow> catalog_theta_sweep(std::size_t k, std::size_t budget) {
  std::vector<ThetaSweepRow> rows;
  for (const auto& entry : catalog()) {
    auto base = std::make_shared<const CascadeModel>(load_example(entry.name));
    if (!base->finite_exact()) continue;
    ThetaSweepRow row;
    row.model = entry.name;
    row.base_size = base->size();
    HyperCascadeModel hyper = build_hyper_model(*base, k, budget);
    row.hyper_size = hyper.size();
    Envelope base_env = exact_envelope(base);
    Envelope hyper_env = exact_envelope(hyper.model_ptr());
    row.hyper_envelope_size = hyper_env.size();
    auto th = theta_check(base_env, hyper_env, hyper);
    row.well_defined = th.well_defined;
    row.surjective = th.surjective;
    row.injective = th.injective;
    row.homomorphism_violations = th.homomorphism_violations;
    auto ind = inducibility_check(hyper, hyper.model().table());
    row.induced_map_inducible = ind.singletons_ok && ind.monotone_ok && ind.minimal_ok;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ellis

// Command-line front end for the experiment runner.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ellis/error.hpp"
#include "ellis/experiment.hpp"

namespace {

using ellis::Json;

struct Output {
  std::string dir;
  std::string format = "text";
};

/// "k=v" pairs; values parse as JSON when they can, otherwise stay strings.
Json parse_assignments(const std::vector<std::string>& items) {
  Json out = Json::object();
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ellis::Error(ellis::ErrorCode::invalid_config, "expected key=value, got '" + item + "'");
    std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    Json v = Json::parse(value, nullptr, false);
    out[key] = v.is_discarded() ? Json(value) : v;
  }
  return out;
}

/// Catalog params are strings in the library; keep the text the user typed.
Json string_params(const std::vector<std::string>& items) {
  Json out = Json::object();
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ellis::Error(ellis::ErrorCode::invalid_config, "expected key=value, got '" + item + "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

Json model_ref(const std::string& name, const std::vector<std::string>& params) {
  Json m = {{"catalog", name}};
  if (!params.empty()) m["params"] = string_params(params);
  return m;
}

int finish(const ellis::Report& report, const Output& out) {
  if (!out.dir.empty()) {
    std::vector<std::string> formats{out.format};
    if (out.format != "json") formats.push_back("json");
    for (const auto& p : ellis::emit_report(report, out.dir, formats)) std::cerr << "wrote " << p.string() << '\n';
  } else if (out.format == "json") {
    std::cout << ellis::dump_report(report.document);
  } else if (out.format == "csv") {
    for (const auto& t : report.tables) std::cout << "# " << t.name << '\n' << ellis::render_csv(t);
  } else {
    std::cout << ellis::render_text(report);
  }
  return report.exit_code();
}

int run_inline(Json config, const Output& out, const std::filesystem::path& base = {}) {
  config["schema"] = ellis::kConfigSchema;
  return finish(ellis::run_experiment(ellis::parse_config(config, base)), out);
}

void add_output(CLI::App* cmd, Output& out) {
  cmd->add_option("--out", out.dir, "directory for report files (stdout when omitted)");
  cmd->add_option("--format", out.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Enveloping semigroups, hyperspaces and shift spaces of finite and sampled cascades"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ellis::kToolVersion));

  Output out;

  auto* cat = app.add_subcommand("catalog", "list the example models and their parameters");
  add_output(cat, out);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out.dir, "directory for report files (overrides output.dir)");
  run->add_option("--format", out.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));

  std::string model;
  std::vector<std::string> model_params, op_params;
  long long horizon = 60;
  double tau = 1e-3;
  bool two_sided = false, exact = false;
  std::size_t max_elements = 4096, max_card = 0;
  auto* env = app.add_subcommand("envelope", "envelope of a catalog model with its ideal structure");
  env->add_option("model", model, "catalog name")->required();
  env->add_option("--horizon", horizon, "largest power sampled");
  env->add_option("--tau", tau, "sup-distance tolerance");
  env->add_flag("--two-sided", two_sided, "also sample negative powers");
  env->add_flag("--exact", exact, "exact iterate monoid (finite-exact models; sampled ones are discretized)");
  env->add_option("--max-elements", max_elements, "cap on the number of envelope elements");
  env->add_option("--max-card", max_card, "work on the hyperspace of subsets with at most k points");
  env->add_option("--param", model_params, "model parameter key=value")->take_all();
  add_output(env, out);

  std::string table_path, analysis;
  auto* sg = app.add_subcommand("semigroup", "analyse a composition table");
  sg->add_option("table", table_path, "JSON {size, table, identity, generator, names}")
      ->required()
      ->check(CLI::ExistingFile);
  sg->add_option("analysis", analysis, "algebra operation, or 'all'")->required();
  add_output(sg, out);

  std::string spec_path, shift_op;
  auto* sh = app.add_subcommand("shift", "shift-space operations");
  sh->add_option("spec", spec_path, "shift spec JSON")->required()->check(CLI::ExistingFile);
  sh->add_option("op", shift_op, "language, language_counts, entropy, classify, periodic_spectrum, boyle, verify_factor")
      ->required();
  sh->add_option("--set", op_params, "operation parameter key=value")->take_all();
  add_output(sh, out);

  std::string property;
  auto* props = app.add_subcommand("props", "property checks on a catalog model");
  props->add_option("model", model, "catalog name")->required();
  props->add_option("property", property, "transitivity, rigidity, equicontinuity, recurrence, ...")->required();
  props->add_option("--param", model_params, "model parameter key=value")->take_all();
  props->add_option("--set", op_params, "operation parameter key=value")->take_all();
  add_output(props, out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cat->parsed()) {
      if (out.format == "json") {
        std::cout << ellis::catalog_listing().dump(2) << '\n';
      } else {
        std::cout << ellis::render_catalog();
      }
      return 0;
    }
    if (run->parsed()) {
      auto config = ellis::load_config(config_path);
      auto report = ellis::run_experiment(config);
      std::string dir = out.dir;
      if (dir.empty() && !config.output_dir.empty())
        dir = config.output_dir.is_absolute() ? config.output_dir.string()
                                              : (config.base_dir / config.output_dir).string();
      const bool format_given = run->count("--format") > 0;
      if (dir.empty()) return finish(report, {"", format_given ? out.format : "json"});
      auto formats = format_given ? std::vector<std::string>{out.format} : config.formats;
      for (const auto& p : ellis::emit_report(report, dir, formats)) std::cerr << "wrote " << p.string() << '\n';
      std::cerr << "verdict: " << report.document.at("summary").at("verdict").get<std::string>() << '\n';
      return report.exit_code();
    }
    if (env->parsed()) {
      Json pipeline = Json::array();
      Json approx = {{"horizon", horizon}, {"tau", tau}, {"two_sided", two_sided}, {"max_elements", max_elements}};
      if (max_card > 0) {
        pipeline.push_back({{"op", "hyper_model"}, {"params", {{"k", max_card}}}});
        pipeline.push_back({{"op", "hyper_envelope"}, {"params", exact ? Json::object() : approx}});
        pipeline.push_back({{"op", "inducibility"}});
      } else {
        pipeline.push_back(exact ? Json{{"op", "exact_envelope"}} : Json{{"op", "approx_envelope"}, {"params", approx}});
        for (const char* op : {"idempotents", "minimal_left_ideals", "ideal_isomorphism"})
          pipeline.push_back({{"op", op}});
      }
      Json config = {{"name", "envelope " + model}, {"model", model_ref(model, model_params)}};
      if (exact) {
        // sampled models need their snapped finite version first
        Json probe = {{"schema", ellis::kConfigSchema},
                      {"model", config["model"]},
                      {"pipeline", Json::array({{{"op", "describe"}}})}};
        auto d = ellis::run_experiment(ellis::parse_config(probe));
        const Json* kind = ellis::json_path(d.document, "steps.0.result.kind");
        if (kind && *kind == "sampled") pipeline.insert(pipeline.begin(), Json{{"op", "discretize"}});
      }
      config["pipeline"] = pipeline;
      return run_inline(config, out);
    }
    if (sg->parsed()) {
      std::filesystem::path p = std::filesystem::absolute(table_path);
      Json pipeline = Json::array();
      if (analysis == "all") {
        for (const char* op : {"associativity", "idempotents", "minimal_left_ideals", "kernel_and_groups",
                               "ideal_isomorphism", "group_distal", "periodic_elements", "recurrent_idempotents"})
          pipeline.push_back({{"op", op}});
      } else {
        pipeline.push_back({{"op", analysis}});
      }
      Json config = {{"name", "semigroup " + p.filename().string()},
                     {"model", {{"semigroup", p.filename().string()}}},
                     {"pipeline", pipeline}};
      return run_inline(config, out, p.parent_path());
    }
    if (sh->parsed()) {
      std::filesystem::path p = std::filesystem::absolute(spec_path);
      Json step = {{"op", shift_op}, {"params", parse_assignments(op_params)}};
      Json config = {{"name", "shift " + p.filename().string()},
                     {"model", {{"shift", p.filename().string()}}},
                     {"pipeline", Json::array({step})}};
      return run_inline(config, out, p.parent_path());
    }
    if (props->parsed()) {
      Json pipeline = Json::array();
      if (property == "wap_proxy") {
        pipeline.push_back({{"op", "approx_envelope"}});
      }
      pipeline.push_back({{"op", property}, {"params", parse_assignments(op_params)}});
      Json config = {{"name", "props " + model}, {"model", model_ref(model, model_params)}, {"pipeline", pipeline}};
      return run_inline(config, out);
    }
  } catch (const ellis::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

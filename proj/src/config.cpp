#include "sdenet/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sdenet/error.hpp"

namespace sdenet {

using nlohmann::json;

const char* sweep_mode_name(SweepMode mode) {
  return mode == SweepMode::Discrete ? "discrete" : "continuous";
}

int ExperimentConfig::cell_count() const {
  std::size_t cells = p_grid.size() * k_grid.size() * eta_grid.size() * horizon_grid.size() *
                      ensemble_grid.size() * std::max<std::size_t>(1, m_grid.size());
  return static_cast<int>(cells);
}

void ExperimentConfig::validate() const {
  auto need_list = [](bool ok, const char* what) {
    if (!ok) throw Error("bad-config", std::string(what) + " grid must be nonempty and positive");
  };
  auto all_pos = [](const auto& v) {
    for (auto x : v)
      if (!(x > 0)) return false;
    return !v.empty();
  };
  need_list(all_pos(p_grid), "p");
  need_list(!k_grid.empty(), "k");
  for (int k : k_grid)
    if (k < 0) throw Error("bad-config", "k grid must be nonnegative");
  need_list(all_pos(eta_grid), "eta");
  need_list(all_pos(horizon_grid), "horizon");
  if (ensemble_grid.empty()) throw Error("bad-config", "ensemble grid must be nonempty");
  bool has_laplacian = false;
  for (EnsembleKind e : ensemble_grid) has_laplacian = has_laplacian || e == EnsembleKind::Laplacian;
  if (has_laplacian && !all_pos(m_grid))
    throw Error("bad-config", "laplacian ensembles need a positive m grid");
  if (trials < 1) throw Error("bad-config", "trials must be >= 1");
  if (!(success_threshold > 0.0 && success_threshold < 1.0))
    throw Error("bad-config", "success_threshold must lie in (0,1)");
  if (output_dir.empty()) throw Error("bad-config", "output_dir is required");
  if (mode == SweepMode::Continuous && delta_ratio < 1)
    throw Error("bad-config", "delta_ratio must be >= 1");
  if (noiseless && mode == SweepMode::Continuous)
    throw Error("bad-config", "noiseless runs only make sense in discrete mode");
  if (lambda_strategy.kind == LambdaStrategyKind::Fixed && lambda_strategy.lambda < 0.0)
    throw Error("bad-config", "fixed lambda must be >= 0");
}

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const char* where) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      throw Error("bad-config",
                  std::string("unknown key \"") + item.key() + "\" in " + where);
}

template <typename T>
std::vector<T> as_list(const json& v, const char* what) {
  std::vector<T> out;
  if (v.is_array())
    for (const auto& x : v) out.push_back(x.get<T>());
  else
    out.push_back(v.get<T>());
  if (out.empty()) throw Error("bad-config", std::string(what) + " list is empty");
  return out;
}

EnsembleKind parse_ensemble(const std::string& name) {
  for (EnsembleKind e : {EnsembleKind::BinaryLiteral, EnsembleKind::StabilizedBinary,
                         EnsembleKind::Laplacian, EnsembleKind::Explicit})
    if (name == ensemble_name(e)) return e;
  throw Error("bad-config", "unknown ensemble \"" + name + "\"");
}

GuaranteeRule parse_rule_name(const std::string& name) {
  for (GuaranteeRule r :
       {GuaranteeRule::Continuous, GuaranteeRule::Laplacian, GuaranteeRule::Discrete})
    if (name == guarantee_rule_name(r)) return r;
  throw Error("bad-config", "unknown guarantee rule \"" + name + "\"");
}

LambdaStrategy parse_strategy(const json& v) {
  if (!v.is_object()) throw Error("bad-config", "lambda_strategy must be an object");
  check_keys(v, {"kind", "lambda", "rule", "failure_prob", "grid"}, "lambda_strategy");
  std::string kind = v.at("kind").get<std::string>();
  if (kind == "fixed") {
    check_keys(v, {"kind", "lambda"}, "fixed lambda_strategy");
    return LambdaStrategy::fixed(v.at("lambda").get<double>());
  }
  if (kind == "rule") {
    check_keys(v, {"kind", "rule", "failure_prob"}, "rule lambda_strategy");
    double fp = v.value("failure_prob", 0.1);
    return LambdaStrategy::from_rule(parse_rule_name(v.at("rule").get<std::string>()), fp);
  }
  if (kind == "oracle-grid") {
    check_keys(v, {"kind", "grid"}, "oracle-grid lambda_strategy");
    std::vector<double> grid;
    if (v.contains("grid")) grid = as_list<double>(v.at("grid"), "lambda grid");
    return LambdaStrategy::oracle_grid(std::move(grid));
  }
  throw Error("bad-config", "unknown lambda_strategy kind \"" + kind + "\"");
}

json strategy_json(const LambdaStrategy& s) {
  json v;
  switch (s.kind) {
    case LambdaStrategyKind::Fixed:
      v["kind"] = "fixed";
      v["lambda"] = s.lambda;
      break;
    case LambdaStrategyKind::Rule:
      v["kind"] = "rule";
      v["rule"] = guarantee_rule_name(s.rule);
      v["failure_prob"] = s.failure_prob;
      break;
    case LambdaStrategyKind::OracleGrid:
      v["kind"] = "oracle-grid";
      if (!s.grid.empty()) v["grid"] = s.grid;
      break;
  }
  return v;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error("bad-config", std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw Error("bad-config", "config root must be an object");
  check_keys(root,
             {"p", "k", "eta", "horizon", "ensemble", "m", "trials", "lambda_strategy",
              "success_threshold", "base_seed", "output_dir", "mode", "delta_ratio",
              "noiseless"},
             "config");

  ExperimentConfig cfg;
  cfg.p_grid = as_list<int>(root.at("p"), "p");
  cfg.k_grid = as_list<int>(root.at("k"), "k");
  cfg.eta_grid = as_list<double>(root.at("eta"), "eta");
  cfg.horizon_grid = as_list<double>(root.at("horizon"), "horizon");
  cfg.ensemble_grid.clear();
  for (const std::string& name : as_list<std::string>(root.at("ensemble"), "ensemble"))
    cfg.ensemble_grid.push_back(parse_ensemble(name));
  if (root.contains("m")) cfg.m_grid = as_list<double>(root.at("m"), "m");
  if (root.contains("trials")) cfg.trials = root.at("trials").get<int>();
  if (root.contains("lambda_strategy")) cfg.lambda_strategy = parse_strategy(root.at("lambda_strategy"));
  if (root.contains("success_threshold"))
    cfg.success_threshold = root.at("success_threshold").get<double>();
  if (root.contains("base_seed")) cfg.base_seed = root.at("base_seed").get<std::uint64_t>();
  cfg.output_dir = root.at("output_dir").get<std::string>();
  if (root.contains("mode")) {
    std::string mode = root.at("mode").get<std::string>();
    if (mode == "discrete") cfg.mode = SweepMode::Discrete;
    else if (mode == "continuous") cfg.mode = SweepMode::Continuous;
    else throw Error("bad-config", "mode must be discrete or continuous");
  }
  if (root.contains("delta_ratio")) {
    if (cfg.mode != SweepMode::Continuous)
      throw Error("bad-config", "delta_ratio only applies to continuous mode");
    cfg.delta_ratio = root.at("delta_ratio").get<int>();
  }
  if (root.contains("noiseless")) cfg.noiseless = root.at("noiseless").get<bool>();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("bad-file", "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

std::string experiment_config_json(const ExperimentConfig& config) {
  json root;
  root["p"] = config.p_grid;
  root["k"] = config.k_grid;
  root["eta"] = config.eta_grid;
  root["horizon"] = config.horizon_grid;
  std::vector<std::string> ens;
  for (EnsembleKind e : config.ensemble_grid) ens.emplace_back(ensemble_name(e));
  root["ensemble"] = ens;
  if (!config.m_grid.empty()) root["m"] = config.m_grid;
  root["trials"] = config.trials;
  root["lambda_strategy"] = strategy_json(config.lambda_strategy);
  root["success_threshold"] = config.success_threshold;
  root["base_seed"] = config.base_seed;
  root["output_dir"] = config.output_dir;
  root["mode"] = sweep_mode_name(config.mode);
  if (config.mode == SweepMode::Continuous) root["delta_ratio"] = config.delta_ratio;
  if (config.noiseless) root["noiseless"] = true;
  return root.dump(2);
}

ExperimentConfig reproduce_config(const std::string& name, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.k_grid = {5};
  cfg.eta_grid = {0.1};
  cfg.ensemble_grid = {EnsembleKind::StabilizedBinary};
  cfg.trials = 256;
  cfg.lambda_strategy = LambdaStrategy::oracle_grid();
  cfg.base_seed = seed;
  cfg.mode = SweepMode::Discrete;

  if (name == "fig1-left") {
    cfg.p_grid = {8, 16, 32};
    cfg.horizon_grid = {10, 20, 40, 80, 160, 320};
    cfg.output_dir = "fig1-left";
  } else if (name == "fig1-right") {
    cfg.p_grid = {8, 16, 32, 64};
    cfg.horizon_grid = {40, 80, 120, 160, 200, 240, 280, 320};
    cfg.output_dir = "fig1-right";
  } else if (name == "fig2") {
    cfg.p_grid = {16};
    cfg.k_grid = {4};
    cfg.eta_grid = {0.2, 0.1, 0.05};
    cfg.horizon_grid = {1500};
    cfg.mode = SweepMode::Continuous;
    cfg.delta_ratio = 16;
    cfg.output_dir = "fig2";
  } else {
    throw Error("bad-input", "unknown reproduction \"" + name +
                                 "\" (expected fig1-left, fig1-right, or fig2)");
  }
  return cfg;
}

}  // namespace sdenet

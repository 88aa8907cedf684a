#include "esclab/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "esclab/analysis.hpp"
#include "esclab/generators.hpp"

namespace esclab {

namespace {

std::string trim(const std::string &s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_flat_kv(const std::string &text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

ExperimentConfig ExperimentConfig::parse_text(const std::string &text) {
  auto kv = parse_flat_kv(text);
  ExperimentConfig cfg;
  auto take = [&](const std::string &key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto take_d = [&](const std::string &key, double fallback) {
    auto v = take(key);
    return v ? std::stod(*v) : fallback;
  };

  cfg.cost_name = take("cost.name").value_or("quadratic_shifted");
  for (const char *p : {"center", "curvature", "offset", "dim", "radius", "b"}) {
    auto v = take(std::string("cost.") + p);
    if (v) cfg.cost_params[p] = std::stod(*v);
  }
  cfg.a1_m = take_d("cost.m", 1.0);

  cfg.pair_family = take("pair.family").value_or("suttner_dashkovskiy");
  cfg.pair_param = take_d("pair.r", 0.0);

  cfg.omega = take_d("dither.omega", 2.0);
  if (auto v = take("dither.multipliers")) {
    for (const auto &tok : split_list(*v)) cfg.multipliers.push_back(std::stoi(tok));
  } else {
    cfg.multipliers = {1};
  }

  if (auto v = take("init.x")) {
    for (const auto &tok : split_list(*v)) cfg.x0.push_back(std::stod(tok));
  }
  cfg.z0_init = take_d("init.z", 0.0);
  cfg.omega0_init = take_d("init.Omega", 0.0);

  cfg.J0 = take_d("set.J0", 3.0);
  cfg.z0 = take_d("set.z0", 5.0);
  cfg.epsilon = take_d("set.epsilon", 0.5);
  if (auto v = take("set.y0"); v && *v != "auto") {
    cfg.y0_auto = false;
    cfg.y0 = std::stod(*v);
  }
  if (auto v = take("set.delta"); v && *v != "auto") {
    cfg.delta_auto = false;
    cfg.delta = std::stod(*v);
  }

  cfg.t_end = take_d("integration.t_end", 40.0);
  cfg.steps_per_period = static_cast<int>(take_d("integration.steps_per_period", 64));

  if (auto v = take("systems")) cfg.systems = split_list(*v);
  cfg.grushkovskaya_offset = take_d("grushkovskaya.offset", 2019.0);

  cfg.output_dir = take("output.dir").value_or("out");
  cfg.seed = static_cast<std::uint64_t>(take_d("seed", 1));

  if (!kv.empty()) {
    std::string unknown;
    for (const auto &[k, v] : kv) unknown += k + " ";
    throw std::invalid_argument("config: unknown keys: " + unknown);
  }
  return cfg;
}

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> errs;
  CostModel const *cost = nullptr;
  std::optional<CostModel> cost_holder;
  try {
    cost_holder.emplace(make_cost(cost_name, cost_params));
    cost = &*cost_holder;
  } catch (const std::exception &e) {
    errs.push_back(std::string("cost: ") + e.what());
  }
  try {
    make_pair(pair_family, pair_param);
  } catch (const std::exception &e) {
    errs.push_back(std::string("pair: ") + e.what());
  }
  if (omega <= 0) errs.push_back("dither.omega must be positive");
  if (multipliers.empty()) errs.push_back("dither.multipliers must be nonempty");
  for (std::size_t i = 0; i < multipliers.size(); ++i) {
    if (multipliers[i] <= 0) errs.push_back("dither.multipliers must be positive");
    for (std::size_t k = 0; k < i; ++k)
      if (multipliers[i] == multipliers[k])
        errs.push_back("dither.multipliers must be pairwise distinct");
  }
  if (systems.empty()) errs.push_back("systems list must not be empty");
  for (const auto &s : systems)
    if (s != "proposed" && s != "lie_approx" && s != "grushkovskaya" && s != "suttner")
      errs.push_back("unknown system '" + s + "'");
  if (cost) {
    if (static_cast<int>(x0.size()) != cost->dim())
      errs.push_back("init.x dimension does not match the cost");
    else {
      bool needs_z = false;
      for (const auto &s : systems)
        if (s != "grushkovskaya") needs_z = true;
      if (needs_z && !(z0_init > cost->eval(x0)))
        errs.push_back("init.z must be strictly above J(init.x)");
    }
    if (static_cast<int>(multipliers.size()) != cost->dim())
      errs.push_back("dither.multipliers count must match the cost dimension");
  }
  if (epsilon <= 0) errs.push_back("set.epsilon must be positive");
  if (!delta_auto && !(delta > 0 && delta < epsilon))
    errs.push_back("set.delta must lie in (0, epsilon)");
  if (t_end <= 0) errs.push_back("integration.t_end must be positive");
  if (steps_per_period < 32) errs.push_back("integration.steps_per_period must be >= 32");
  if (!y0_auto && y0 <= 0) errs.push_back("set.y0 must be positive or 'auto'");
  return errs;
}

}  // namespace esclab

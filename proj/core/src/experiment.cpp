#include "blackwell/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "blackwell/estimation.hpp"
#include "blackwell/stats.hpp"
#include "blackwell/svg.hpp"

namespace blackwell {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Config numerics are decimal strings; plain JSON numbers are accepted on
// input for convenience.
double j_num(const json& v, const char* what) {
  if (v.is_string()) return parse_decimal(v.get<std::string>());
  if (v.is_number()) return v.get<double>();
  throw ConfigError(std::string(what) + ": expected a number or decimal string");
}

json num_str(double v) { return json(format_decimal(v)); }

RewardTensor parse_reward(const json& j, int na, int nb, int nx, int ns,
                          const std::string& name) {
  if (!j.is_array() || static_cast<int>(j.size()) != na) {
    throw ConfigError("reward '" + name + "': expected " + std::to_string(na) + " action rows");
  }
  std::vector<double> values(static_cast<size_t>(na) * nb * nx * ns);
  for (int a = 0; a < na; ++a) {
    const json& ja = j[a];
    if (!ja.is_array() || static_cast<int>(ja.size()) != nb) {
      throw ConfigError("reward '" + name + "': bad outcome axis");
    }
    for (int b = 0; b < nb; ++b) {
      const json& jb = ja[b];
      if (!jb.is_array() || static_cast<int>(jb.size()) != nx) {
        throw ConfigError("reward '" + name + "': bad context axis");
      }
      for (int x = 0; x < nx; ++x) {
        const json& jx = jb[x];
        if (!jx.is_array() || static_cast<int>(jx.size()) != ns) {
          throw ConfigError("reward '" + name + "': bad group axis");
        }
        for (int s = 0; s < ns; ++s) {
          values[((static_cast<size_t>(a) * nb + b) * nx + x) * ns + s] =
              j_num(jx[s], "reward entry");
        }
      }
    }
  }
  return RewardTensor(na, nb, nx, ns, std::move(values));
}

json serialize_reward(const RewardTensor& r) {
  json out = json::array();
  for (int a = 0; a < r.n_a; ++a) {
    json ja = json::array();
    for (int b = 0; b < r.n_b; ++b) {
      json jb = json::array();
      for (int x = 0; x < r.n_x; ++x) {
        json jx = json::array();
        for (int s = 0; s < r.n_s; ++s) jx.push_back(num_str(r.at(a, b, x, s)));
        jb.push_back(std::move(jx));
      }
      ja.push_back(std::move(jb));
    }
    out.push_back(std::move(ja));
  }
  return out;
}

StrategyBlock parse_strategy(const json& j, const char* role) {
  if (!j.is_object() || !j.contains("type")) {
    throw ConfigError(std::string(role) + ": expected an object with a 'type'");
  }
  StrategyBlock blk;
  blk.type = j.at("type").get<std::string>();
  if (j.contains("tau")) blk.tau = j_num(j.at("tau"), "tau");
  if (j.contains("epsilon")) blk.epsilon = j_num(j.at("epsilon"), "epsilon");
  if (j.contains("level")) blk.level = j.at("level").get<int>();
  if (j.contains("family")) {
    const json& fam = j.at("family");
    const std::string mode = fam.at("mode").get<std::string>();
    if (mode == "aware") blk.family_mode = Monitoring::aware;
    else if (mode == "unaware") blk.family_mode = Monitoring::unaware;
    else throw ConfigError("family mode must be 'aware' or 'unaware'");
    for (const json& row : fam.at("actions")) {
      std::vector<double> w;
      for (const json& v : row) w.push_back(j_num(v, "family weight"));
      blk.family_actions.push_back(std::move(w));
    }
  }
  return blk;
}

json serialize_strategy(const StrategyBlock& blk) {
  json out;
  out["type"] = blk.type;
  if (blk.tau) out["tau"] = num_str(*blk.tau);
  if (blk.epsilon) out["epsilon"] = num_str(*blk.epsilon);
  if (blk.level) out["level"] = *blk.level;
  if (blk.family_mode) {
    json fam;
    fam["mode"] = *blk.family_mode == Monitoring::aware ? "aware" : "unaware";
    json actions = json::array();
    for (const auto& row : blk.family_actions) {
      json jr = json::array();
      for (double v : row) jr.push_back(num_str(v));
      actions.push_back(std::move(jr));
    }
    fam["actions"] = std::move(actions);
    out["family"] = std::move(fam);
  }
  return out;
}

bool is_gamma_dependent(const std::string& type) {
  return type == "group_calibration" || type == "demographic_parity" ||
         type == "equalized_payoffs";
}

bool is_stationary_nature(const std::string& type) {
  return type == "stationary" || type == "counterexample1" || type == "counterexample2" ||
         type == "pareto_lower_aware" || type == "pareto_lower_unaware" ||
         type == "equalized_impossibility";
}

void parallel_for(int n_tasks, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, n_tasks));
  if (workers == 1) {
    for (int i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_tasks) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct StatsCollector {
  std::mutex mutex;
  long long lp_calls = 0;
  long long dykstra_sweeps = 0;

  void harvest() {
    const SolverStats s = drain_solver_stats();
    std::lock_guard<std::mutex> lock(mutex);
    lp_calls += s.lp_calls;
    dykstra_sweeps += s.dykstra_sweeps;
  }
};

std::string out_dir_for(const ExperimentSpec& spec, const CliOptions& opts) {
  if (opts.out_dir) return *opts.out_dir;
  if (const char* env = std::getenv("BLACKWELL_OUT_DIR")) return env;
  return spec.output_dir;
}

std::vector<std::uint64_t> seeds_for(const ExperimentSpec& spec, const CliOptions& opts) {
  if (opts.seed_override) return {*opts.seed_override};
  return spec.seeds;
}

}  // namespace

ExperimentSpec parse_spec(const json& j) {
  try {
    ExperimentSpec spec;
    spec.name = j.at("name").get<std::string>();
    const json& inst = j.at("instance");
    spec.x_labels = inst.at("x_labels").get<std::vector<std::string>>();
    spec.n_sensitive = inst.at("n_sensitive").get<int>();
    for (const json& triple : inst.at("q")) {
      if (!triple.is_array() || triple.size() != 3) {
        throw ConfigError("instance.q: entries must be [x_label, s, probability]");
      }
      JointTriple t;
      t.x_label = triple[0].get<std::string>();
      t.s_index = triple[1].get<int>();
      t.probability = triple[2].is_string() ? triple[2].get<std::string>()
                                            : format_decimal(triple[2].get<double>());
      spec.q_triples.push_back(std::move(t));
    }
    if (inst.contains("forecast_levels")) {
      spec.forecast_levels = inst.at("forecast_levels").get<int>();
    }
    if (inst.contains("n_actions")) spec.n_actions = inst.at("n_actions").get<int>();
    if (inst.contains("n_outcomes")) spec.n_outcomes = inst.at("n_outcomes").get<int>();
    const int na = spec.forecast_levels ? *spec.forecast_levels : spec.n_actions.value_or(0);
    const int nb = spec.forecast_levels ? 2 : spec.n_outcomes.value_or(0);
    if (inst.contains("rewards")) {
      for (const auto& [name, body] : inst.at("rewards").items()) {
        spec.rewards.emplace(name,
                             parse_reward(body, na, nb, static_cast<int>(spec.x_labels.size()),
                                          spec.n_sensitive, name));
      }
    }
    for (const json& obj : j.at("objectives")) {
      ObjectiveEntry e;
      e.type = obj.at("type").get<std::string>();
      if (obj.contains("reward")) e.reward = obj.at("reward").get<std::string>();
      if (obj.contains("delta")) e.delta = j_num(obj.at("delta"), "delta");
      if (obj.contains("epsilon")) e.epsilon = j_num(obj.at("epsilon"), "epsilon");
      if (obj.contains("tau")) e.tau = j_num(obj.at("tau"), "tau");
      spec.objectives.push_back(std::move(e));
    }
    spec.player = parse_strategy(j.at("player"), "player");
    spec.nature = parse_strategy(j.at("nature"), "nature");
    const std::string mon = j.at("monitoring").get<std::string>();
    if (mon == "aware") spec.monitoring = Monitoring::aware;
    else if (mon == "unaware") spec.monitoring = Monitoring::unaware;
    else throw ConfigError("monitoring must be 'aware' or 'unaware'");
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "known_q") spec.mode = KnowledgeMode::known_q;
    else if (mode == "estimated_q") spec.mode = KnowledgeMode::estimated_q;
    else if (mode == "unknown_target") spec.mode = KnowledgeMode::unknown_target;
    else throw ConfigError("mode must be known_q, estimated_q, or unknown_target");
    spec.horizon = j.at("horizon").get<long>();
    spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("tau_grid")) {
      for (const json& v : j.at("tau_grid")) spec.tau_grid.push_back(j_num(v, "tau_grid"));
    }
    if (j.contains("check")) {
      const json& c = j.at("check");
      if (c.contains("resolutions")) {
        spec.check.resolutions = c.at("resolutions").get<std::vector<int>>();
      }
      if (c.contains("tolerance")) spec.check.tolerance = j_num(c.at("tolerance"), "tolerance");
    }
    if (j.contains("output_dir")) spec.output_dir = j.at("output_dir").get<std::string>();
    return spec;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

json serialize_spec(const ExperimentSpec& spec) {
  json j;
  j["name"] = spec.name;
  json inst;
  inst["x_labels"] = spec.x_labels;
  inst["n_sensitive"] = spec.n_sensitive;
  json q = json::array();
  for (const auto& t : spec.q_triples) {
    q.push_back(json::array({t.x_label, t.s_index, t.probability}));
  }
  inst["q"] = std::move(q);
  if (spec.forecast_levels) inst["forecast_levels"] = *spec.forecast_levels;
  if (spec.n_actions) inst["n_actions"] = *spec.n_actions;
  if (spec.n_outcomes) inst["n_outcomes"] = *spec.n_outcomes;
  if (!spec.rewards.empty()) {
    json rewards;
    for (const auto& [name, r] : spec.rewards) rewards[name] = serialize_reward(r);
    inst["rewards"] = std::move(rewards);
  }
  j["instance"] = std::move(inst);
  json objectives = json::array();
  for (const auto& e : spec.objectives) {
    json o;
    o["type"] = e.type;
    if (!e.reward.empty()) o["reward"] = e.reward;
    if (e.delta) o["delta"] = num_str(*e.delta);
    if (e.epsilon) o["epsilon"] = num_str(*e.epsilon);
    if (e.tau) o["tau"] = num_str(*e.tau);
    objectives.push_back(std::move(o));
  }
  j["objectives"] = std::move(objectives);
  j["player"] = serialize_strategy(spec.player);
  j["nature"] = serialize_strategy(spec.nature);
  j["monitoring"] = spec.monitoring == Monitoring::aware ? "aware" : "unaware";
  j["mode"] = spec.mode == KnowledgeMode::known_q
                  ? "known_q"
                  : (spec.mode == KnowledgeMode::estimated_q ? "estimated_q" : "unknown_target");
  j["horizon"] = spec.horizon;
  j["seeds"] = spec.seeds;
  if (!spec.tau_grid.empty()) {
    json taus = json::array();
    for (double t : spec.tau_grid) taus.push_back(num_str(t));
    j["tau_grid"] = std::move(taus);
  }
  json check;
  check["resolutions"] = spec.check.resolutions;
  check["tolerance"] = num_str(spec.check.tolerance);
  j["check"] = std::move(check);
  j["output_dir"] = spec.output_dir;
  return j;
}

ExperimentSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spec file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
  return parse_spec(j);
}

void validate_spec(const ExperimentSpec& spec) {
  if (spec.name.empty()) throw ConfigError("name must not be empty");
  if (spec.horizon < 1) throw ConfigError("horizon must be >= 1");
  if (spec.seeds.empty()) throw ConfigError("need at least one seed");
  if (spec.objectives.empty()) throw ConfigError("need at least one objective");
  if (!spec.forecast_levels && !(spec.n_actions && spec.n_outcomes)) {
    throw ConfigError("instance needs forecast_levels or explicit n_actions/n_outcomes");
  }
  for (const auto& e : spec.objectives) {
    if (is_gamma_dependent(e.type) && spec.mode != KnowledgeMode::known_q) {
      throw ConfigError("objective '" + e.type +
                        "' embeds 1/gamma factors in its payoff and requires mode known_q; "
                        "use tilde_tradeoff when the context distribution is unknown");
    }
    const bool needs_reward = e.type == "no_regret" || e.type == "group_no_regret" ||
                              e.type == "equalized_payoffs";
    if (needs_reward && spec.rewards.find(e.reward) == spec.rewards.end()) {
      throw ConfigError("objective '" + e.type + "' references unknown reward '" + e.reward +
                        "'");
    }
  }
  const bool unknown_mode = spec.mode == KnowledgeMode::unknown_target;
  const bool doubling = spec.player.type == "doubling_unknown_target";
  if (unknown_mode != doubling) {
    throw ConfigError("mode unknown_target and player doubling_unknown_target go together");
  }
  if (unknown_mode) {
    if (spec.objectives.size() != 1 || spec.objectives[0].type != "tilde_tradeoff") {
      throw ConfigError("unknown_target mode expects the single objective tilde_tradeoff");
    }
  }
  if ((spec.player.type == "pareto_oracle_aware" ||
       spec.player.type == "pareto_oracle_unaware") &&
      !is_stationary_nature(spec.nature.type)) {
    throw ConfigError("oracle players need a stationary nature to read the family from");
  }
  const bool aware_nature = spec.nature.type == "counterexample2" ||
                            spec.nature.type == "pareto_lower_aware" ||
                            (spec.nature.type == "stationary" &&
                             spec.nature.family_mode == Monitoring::aware);
  if (aware_nature && spec.monitoring != Monitoring::aware) {
    throw ConfigError("an aware nature family requires monitoring 'aware'");
  }
}

BuiltInstance build_instance(const ExperimentSpec& spec) {
  BuiltInstance inst{ContextSpace(spec.x_labels, spec.n_sensitive),
                     joint_from_triples(ContextSpace(spec.x_labels, spec.n_sensitive),
                                        spec.q_triples)};
  inst.gammas = inst.q.marginal_gamma();
  if (spec.forecast_levels) {
    inst.grid = CalibrationGrid(*spec.forecast_levels);
    inst.n_actions = *spec.forecast_levels;
    inst.n_outcomes = 2;
  } else {
    inst.n_actions = *spec.n_actions;
    inst.n_outcomes = *spec.n_outcomes;
  }
  inst.rewards = spec.rewards;
  if (inst.q.n_s() == 2 && inst.gammas[0] > 0.0 && inst.gammas[1] > 0.0) {
    inst.tv_between_groups =
        tv_distance(inst.q.conditional_given_s(0), inst.q.conditional_given_s(1));
  }
  return inst;
}

namespace {
const CalibrationGrid& require_grid(const BuiltInstance& inst, const std::string& what) {
  if (!inst.grid) {
    throw ConfigError(what + " needs a forecast grid; set instance.forecast_levels");
  }
  return *inst.grid;
}
}  // namespace

ObjectivePair build_pair(const ExperimentSpec& spec, const BuiltInstance& inst,
                         std::optional<double> tau_override) {
  std::vector<ObjectivePair> pairs;
  for (const auto& e : spec.objectives) {
    if (e.type == "calibration") {
      pairs.push_back(build_calibration(inst.space, require_grid(inst, e.type).n_levels));
    } else if (e.type == "group_calibration") {
      pairs.push_back(build_group_calibration(inst.space, require_grid(inst, e.type).n_levels,
                                              inst.gammas));
    } else if (e.type == "no_regret") {
      pairs.push_back(build_no_regret(inst.space, inst.rewards.at(e.reward)));
    } else if (e.type == "group_no_regret") {
      pairs.push_back(build_group_no_regret(inst.space, inst.rewards.at(e.reward)));
    } else if (e.type == "demographic_parity") {
      const int n_levels = require_grid(inst, e.type).n_levels;
      const double delta = e.delta.value_or(1.0 / n_levels);
      pairs.push_back(build_demographic_parity(inst.space, n_levels, inst.gammas, delta));
    } else if (e.type == "equalized_payoffs") {
      if (!e.epsilon) throw ConfigError("equalized_payoffs needs an epsilon");
      pairs.push_back(
          build_equalized_payoffs(inst.space, inst.rewards.at(e.reward), inst.gammas,
                                  *e.epsilon));
    } else if (e.type == "tilde_tradeoff") {
      const double tau = tau_override ? *tau_override
                                      : (e.tau ? *e.tau
                                               : throw ConfigError("tilde_tradeoff needs tau"));
      pairs.push_back(build_tilde_tradeoff(inst.space, require_grid(inst, e.type).n_levels,
                                           inst.gammas, inst.tv_between_groups, tau));
    } else {
      throw ConfigError("unknown objective type '" + e.type + "'");
    }
  }
  return combine(std::move(pairs));
}

NatureFamily nature_family_for(const ExperimentSpec& spec, const BuiltInstance& inst) {
  const StrategyBlock& n = spec.nature;
  const int nx = inst.space.n_x();
  if (n.type == "stationary") {
    if (!n.family_mode) throw ConfigError("stationary nature needs an explicit family");
    std::vector<MixedAction> actions;
    for (const auto& row : n.family_actions) actions.emplace_back(row);
    if (*n.family_mode == Monitoring::aware) {
      return make_aware_family(nx, inst.space.n_s(), std::move(actions));
    }
    return make_unaware_family(nx, inst.space.n_s(), std::move(actions));
  }
  if (n.type == "counterexample1") return counterexample1_family(nx);
  if (n.type == "counterexample2") return counterexample2_family(nx);
  if (n.type == "pareto_lower_aware") return pareto_lower_aware_family(nx);
  if (n.type == "pareto_lower_unaware") return pareto_lower_unaware_family(inst.q);
  if (n.type == "equalized_impossibility") {
    if (!n.epsilon) throw ConfigError("equalized_impossibility nature needs epsilon");
    return equalized_impossibility_family(inst.q, *n.epsilon);
  }
  throw ConfigError("nature '" + n.type + "' has no stationary family");
}

std::unique_ptr<Player> make_player(const ExperimentSpec& spec, const BuiltInstance& inst,
                                    const ObjectivePair& pair,
                                    std::optional<double> tau_override) {
  const StrategyBlock& p = spec.player;
  if (p.type == "blackwell") {
    std::optional<JointDistribution> known;
    if (spec.mode == KnowledgeMode::known_q) known = inst.q;
    return std::make_unique<BlackwellPlayer>(pair, spec.monitoring, std::move(known),
                                             inst.space);
  }
  if (p.type == "doubling_unknown_target") {
    const double tau =
        tau_override ? *tau_override
                     : (p.tau ? *p.tau : throw ConfigError("doubling player needs tau"));
    return std::make_unique<DoublingPlayer>(inst.space,
                                            require_grid(inst, p.type).n_levels, tau,
                                            spec.monitoring);
  }
  if (p.type == "constant") {
    if (!p.level) throw ConfigError("constant player needs a level");
    return std::make_unique<ConstantForecastPlayer>(*p.level, inst.n_actions);
  }
  if (p.type == "pareto_oracle_aware" || p.type == "pareto_oracle_unaware") {
    const double tau = tau_override ? *tau_override
                                    : (p.tau ? *p.tau
                                             : throw ConfigError("oracle player needs tau"));
    const NatureFamily family = nature_family_for(spec, inst);
    const int n_levels = require_grid(inst, p.type).n_levels;
    if (p.type == "pareto_oracle_aware") {
      return std::make_unique<ParetoOracleAwarePlayer>(tau, family, inst.q, n_levels);
    }
    return std::make_unique<ParetoOracleUnawarePlayer>(tau, family, inst.q, n_levels);
  }
  throw ConfigError("unknown player type '" + p.type + "'");
}

std::unique_ptr<Nature> make_nature(const ExperimentSpec& spec, const BuiltInstance& inst,
                                    const ObjectivePair& pair) {
  if (spec.nature.type == "best_response") {
    return std::make_unique<BestResponseNature>(pair, inst.q, spec.monitoring);
  }
  return std::make_unique<StationaryNature>(nature_family_for(spec, inst));
}

MetricSetup metric_setup_for(const ExperimentSpec& spec, const BuiltInstance& inst,
                             const ObjectivePair& pair) {
  MetricSetup setup;
  setup.grid = inst.grid;
  setup.gammas = inst.gammas;
  setup.target = &pair.target;
  for (const auto& e : spec.objectives) {
    if ((e.type == "no_regret" || e.type == "group_no_regret") && !setup.rewards) {
      setup.rewards = inst.rewards.at(e.reward);
    }
    if (e.type == "equalized_payoffs" && !setup.eq_rewards) {
      setup.eq_rewards = inst.rewards.at(e.reward);
    }
  }
  return setup;
}

Trajectory run_single(const ExperimentSpec& spec, const BuiltInstance& inst,
                      const ObjectivePair& pair, std::uint64_t seed,
                      std::optional<double> tau_override) {
  std::unique_ptr<Player> player = make_player(spec, inst, pair, tau_override);
  std::unique_ptr<Nature> nature = make_nature(spec, inst, pair);
  RunConfig config{inst.q, spec.monitoring, spec.horizon, seed, {}};
  return run(config, pair, *player, *nature);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / values.size();
  if (values.size() > 1) {
    double var = 0.0;
    for (double v : values) var += (v - s.mean) * (v - s.mean);
    var /= (values.size() - 1);
    s.std_error = std::sqrt(var / values.size());
  }
  return s;
}

namespace {

json summary_json(const Summary& s) {
  json j;
  j["mean"] = s.mean;
  j["stderr"] = s.std_error;
  j["min"] = s.min;
  j["max"] = s.max;
  return j;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const GuardError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitGuard;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const DimensionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return kExitSolver;
  }
}

}  // namespace

int cmd_run(const ExperimentSpec& spec, const CliOptions& opts) {
  return guarded([&]() {
    validate_spec(spec);
    const BuiltInstance inst = build_instance(spec);
    const ObjectivePair pair = build_pair(spec, inst);
    const MetricSetup setup = metric_setup_for(spec, inst, pair);
    const std::vector<std::uint64_t> seeds = seeds_for(spec, opts);
    const std::string out_dir = out_dir_for(spec, opts);

    struct SeedResult {
      std::map<std::string, double> metrics;
      std::string csv;
    };
    std::vector<SeedResult> results(seeds.size());
    StatsCollector stats;

    parallel_for(static_cast<int>(seeds.size()), opts.workers, [&](int i) {
      const Trajectory traj = run_single(spec, inst, pair, seeds[i]);
      SeedResult& r = results[i];
      r.csv = trajectory_csv(traj, setup);
      r.metrics["d_T"] = pair.target.distance(traj.final_average);
      if (setup.grid) {
        r.metrics["C_T"] = metric_calibration(traj, *setup.grid);
        r.metrics["Cgr_T"] = metric_group_calibration(traj, *setup.grid, inst.gammas);
        if (inst.gammas.size() == 2) {
          const Flagged dp = metric_dp(traj, *setup.grid, inst.gammas);
          if (dp.value) r.metrics["D_T"] = *dp.value;
        }
      }
      if (setup.rewards) {
        r.metrics["R_T"] = metric_regret(traj, *setup.rewards);
        r.metrics["Rgr_T"] = metric_group_regret(traj, *setup.rewards);
      }
      if (setup.eq_rewards && inst.gammas.size() == 2) {
        const Flagged p = metric_equalized_payoffs(traj, *setup.eq_rewards, inst.gammas);
        if (p.value) r.metrics["P_T"] = *p.value;
      }
      stats.harvest();
    });

    for (size_t i = 0; i < seeds.size(); ++i) {
      write_file_atomic(out_dir + "/" + spec.name + "_seed" + std::to_string(seeds[i]) +
                            ".csv",
                        results[i].csv);
    }

    json summary;
    summary["instance"] = spec.name;
    summary["mode"] = serialize_spec(spec)["mode"];
    summary["horizon"] = spec.horizon;
    summary["seeds"] = seeds;
    json metrics;
    std::vector<std::string> names;
    for (const auto& [k, v] : results.front().metrics) names.push_back(k);
    for (const auto& name : names) {
      std::vector<double> vals;
      for (const auto& r : results) {
        auto it = r.metrics.find(name);
        if (it != r.metrics.end()) vals.push_back(it->second);
      }
      metrics[name] = summary_json(summarize(vals));
    }
    summary["metrics"] = std::move(metrics);
    json solver;
    solver["lp_calls"] = stats.lp_calls;
    solver["dykstra_sweeps"] = stats.dykstra_sweeps;
    summary["solver"] = std::move(solver);
    write_file_atomic(out_dir + "/" + spec.name + "_summary.json", summary.dump(2) + "\n");
    std::printf("%s: %zu seed(s), horizon %ld -> %s\n", spec.name.c_str(), seeds.size(),
                spec.horizon, out_dir.c_str());
    return kExitOk;
  });
}

int cmd_pareto(const ExperimentSpec& spec, const CliOptions& opts) {
  return guarded([&]() {
    validate_spec(spec);
    if (spec.tau_grid.empty()) throw ConfigError("pareto needs a tau_grid");
    if (spec.player.type != "pareto_oracle_aware" &&
        spec.player.type != "pareto_oracle_unaware") {
      throw ConfigError("pareto needs a pareto_oracle_* player");
    }
    const BuiltInstance inst = build_instance(spec);
    const ObjectivePair pair = build_pair(spec, inst);
    const std::vector<std::uint64_t> seeds = seeds_for(spec, opts);
    const std::string out_dir = out_dir_for(spec, opts);
    const double tv = inst.tv_between_groups;
    const int n_levels = require_grid(inst, "pareto").n_levels;
    const bool aware = spec.player.type == "pareto_oracle_aware";

    const int n_tau = static_cast<int>(spec.tau_grid.size());
    const int n_seeds = static_cast<int>(seeds.size());
    std::vector<double> gc(static_cast<size_t>(n_tau) * n_seeds);
    std::vector<double> dp(static_cast<size_t>(n_tau) * n_seeds);
    StatsCollector stats;

    parallel_for(n_tau * n_seeds, opts.workers, [&](int task) {
      const int ti = task / n_seeds;
      const int si = task % n_seeds;
      const double tau = spec.tau_grid[ti];
      const Trajectory traj = run_single(spec, inst, pair, seeds[si], tau);
      gc[task] = metric_group_calibration(traj, *inst.grid, inst.gammas);
      const Flagged d = metric_dp(traj, *inst.grid, inst.gammas);
      dp[task] = d.value.value_or(std::nan(""));
      stats.harvest();
    });

    std::string csv =
        "tau,delta,gc_mean,gc_stderr,gc_min,gc_max,dp_mean,dp_stderr,dp_min,dp_max,"
        "band_lo,band_hi\n";
    ChartSeries measured{"measured GC", "#1f77b4", {}, false};
    ChartBand band{"#ff7f0e", {}, {}, {}};
    ChartSeries dp_series{"measured DP", "#2ca02c", {}, true};
    for (int ti = 0; ti < n_tau; ++ti) {
      std::vector<double> gcs(gc.begin() + static_cast<size_t>(ti) * n_seeds,
                              gc.begin() + static_cast<size_t>(ti + 1) * n_seeds);
      std::vector<double> dps(dp.begin() + static_cast<size_t>(ti) * n_seeds,
                              dp.begin() + static_cast<size_t>(ti + 1) * n_seeds);
      const Summary sg = summarize(gcs);
      const Summary sd = summarize(dps);
      const double tau = spec.tau_grid[ti];
      const double delta = tau * tv;
      const double lo = aware ? 1.0 - tau * tv : (1.0 - tau) * tv;
      const double hi = lo + 1.0 / n_levels;
      csv += format_decimal(tau) + "," + format_decimal(delta) + "," +
             format_decimal(sg.mean) + "," + format_decimal(sg.std_error) + "," +
             format_decimal(sg.min) + "," + format_decimal(sg.max) + "," +
             format_decimal(sd.mean) + "," + format_decimal(sd.std_error) + "," +
             format_decimal(sd.min) + "," + format_decimal(sd.max) + "," +
             format_decimal(lo) + "," + format_decimal(hi) + "\n";
      measured.points.emplace_back(delta, sg.mean);
      dp_series.points.emplace_back(delta, sd.mean);
      band.x.push_back(delta);
      band.lower.push_back(lo);
      band.upper.push_back(hi);
    }
    write_file_atomic(out_dir + "/" + spec.name + "_frontier.csv", csv);

    LineChart chart;
    chart.title = spec.name + " trade-off frontier";
    chart.x_label = "parity budget delta";
    chart.y_label = "group calibration error";
    chart.series = {measured, dp_series};
    chart.bands = {band};
    write_file_atomic(out_dir + "/" + spec.name + "_frontier.svg", render_line_chart(chart));
    std::printf("%s: frontier over %d tau values -> %s\n", spec.name.c_str(), n_tau,
                out_dir.c_str());
    return kExitOk;
  });
}

int cmd_check(const ExperimentSpec& spec, const CliOptions& opts) {
  return guarded([&]() {
    validate_spec(spec);
    if (spec.check.resolutions.size() < 2) {
      throw ConfigError("check needs two grid resolutions");
    }
    const BuiltInstance inst = build_instance(spec);
    const ObjectivePair pair = build_pair(spec, inst);
    const std::string out_dir = out_dir_for(spec, opts);

    json report;
    report["instance"] = spec.name;
    report["tolerance"] = spec.check.tolerance;
    json entries = json::array();
    std::vector<bool> verdicts;
    for (int res : spec.check.resolutions) {
      const ConditionCheckResult r =
          check_condition_bruteforce(pair.payoff, inst.q, pair.target, spec.monitoring, res,
                                     spec.check.tolerance, opts.workers);
      json e;
      e["resolution"] = res;
      e["satisfied"] = r.satisfied;
      e["inner_distance"] = r.inner_distance;
      e["certified_lower_bound"] = r.certified_lower_bound;
      e["families_checked"] = r.families_checked;
      json fam = json::array();
      for (const auto& action : r.worst_family.actions) {
        json row = json::array();
        for (double w : action.weights()) row.push_back(num_str(w));
        fam.push_back(std::move(row));
      }
      e["worst_family"] = std::move(fam);
      entries.push_back(std::move(e));
      verdicts.push_back(r.satisfied);
      std::printf("%s: resolution %d -> %s (inner distance %.6g)\n", spec.name.c_str(), res,
                  r.satisfied ? "satisfied" : "violated", r.inner_distance);
    }
    report["results"] = std::move(entries);
    const bool agree = std::all_of(verdicts.begin(), verdicts.end(),
                                   [&](bool v) { return v == verdicts.front(); });
    report["resolutions_agree"] = agree;
    report["satisfied"] = agree && verdicts.front();
    write_file_atomic(out_dir + "/" + spec.name + "_check.json", report.dump(2) + "\n");
    return kExitOk;
  });
}

int cmd_plot(const std::vector<std::string>& csv_paths, const std::string& column,
             const std::string& out_svg) {
  return guarded([&]() {
    if (csv_paths.empty()) throw ConfigError("plot: no input files");
    const std::vector<std::string> header = {"t",   "d_t", "C_t", "Cgr_t",
                                             "D_t", "P_t", "R_t", "Rgr_t"};
    int col = -1;
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] == column) col = static_cast<int>(i);
    }
    if (col < 1) throw ConfigError("plot: unknown column '" + column + "'");

    std::vector<std::map<long, double>> files;
    for (const auto& path : csv_paths) {
      std::ifstream in(path);
      if (!in) throw ConfigError("plot: cannot open " + path);
      std::string line;
      if (!std::getline(in, line) || line != "t,d_t,C_t,Cgr_t,D_t,P_t,R_t,Rgr_t") {
        throw ConfigError("plot: " + path + " does not have the trajectory schema");
      }
      std::map<long, double> series;
      while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        cells.resize(header.size());
        if (cells[0].empty() || cells[col].empty()) continue;
        series[std::stol(cells[0])] = parse_decimal(cells[col]);
      }
      if (series.empty()) throw ConfigError("plot: " + path + " has no rows for " + column);
      files.push_back(std::move(series));
    }

    LineChart chart;
    chart.title = column + " over rounds";
    chart.x_label = "round";
    chart.y_label = column;
    chart.log_x = true;
    if (files.size() == 1) {
      ChartSeries s{column, "#1f77b4", {}, false};
      for (const auto& [t, v] : files[0]) s.points.emplace_back(static_cast<double>(t), v);
      chart.series.push_back(std::move(s));
    } else {
      // Mean line with a min/max band over the rounds common to all files.
      ChartSeries mean{"mean of " + std::to_string(files.size()) + " runs", "#1f77b4", {},
                       false};
      ChartBand band{"#1f77b4", {}, {}, {}};
      for (const auto& [t, v] : files[0]) {
        double lo = v, hi = v, sum = v;
        bool shared = true;
        for (size_t f = 1; f < files.size(); ++f) {
          auto it = files[f].find(t);
          if (it == files[f].end()) {
            shared = false;
            break;
          }
          lo = std::min(lo, it->second);
          hi = std::max(hi, it->second);
          sum += it->second;
        }
        if (!shared) continue;
        mean.points.emplace_back(static_cast<double>(t), sum / files.size());
        band.x.push_back(static_cast<double>(t));
        band.lower.push_back(lo);
        band.upper.push_back(hi);
      }
      if (mean.points.empty()) throw ConfigError("plot: no rounds shared by all inputs");
      chart.series.push_back(std::move(mean));
      chart.bands.push_back(std::move(band));
    }
    write_file_atomic(out_svg, render_line_chart(chart));
    return kExitOk;
  });
}

}  // namespace blackwell

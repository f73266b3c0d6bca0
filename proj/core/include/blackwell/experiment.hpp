#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "blackwell/engine.hpp"
#include "blackwell/games.hpp"
#include "blackwell/objectives.hpp"
#include "blackwell/strategies.hpp"

namespace blackwell {

// Exit codes shared by the CLI subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitGuard = 4;

enum class KnowledgeMode { known_q, estimated_q, unknown_target };

struct ObjectiveEntry {
  std::string type;  // calibration, group_calibration, no_regret, group_no_regret,
                     // demographic_parity, equalized_payoffs, tilde_tradeoff
  std::string reward;              // reward tensor name where applicable
  std::optional<double> delta;     // demographic parity slack
  std::optional<double> epsilon;   // equalized payoffs slack
  std::optional<double> tau;       // tilde trade-off parameter
};

struct StrategyBlock {
  std::string type;
  std::optional<double> tau;
  std::optional<double> epsilon;
  std::optional<int> level;
  // Explicit stationary family: outcome distributions indexed by x, or by
  // (x, s) in x-major order when `family_mode` is aware.
  std::optional<Monitoring> family_mode;
  std::vector<std::vector<double>> family_actions;
};

struct CheckSettings {
  std::vector<int> resolutions = {20, 40};
  double tolerance = 1e-3;
};

// Parsed experiment configuration; mirrors the JSON schema one to one.
struct ExperimentSpec {
  std::string name;
  std::vector<std::string> x_labels;
  int n_sensitive = 2;
  std::vector<JointTriple> q_triples;
  std::optional<int> forecast_levels;   // calibration instances: A = grid, B = {0,1}
  std::optional<int> n_actions;         // otherwise explicit action spaces
  std::optional<int> n_outcomes;
  std::map<std::string, RewardTensor> rewards;
  std::vector<ObjectiveEntry> objectives;
  StrategyBlock player;
  StrategyBlock nature;
  Monitoring monitoring = Monitoring::unaware;
  KnowledgeMode mode = KnowledgeMode::known_q;
  long horizon = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> tau_grid;
  CheckSettings check;
  std::string output_dir = "out";
};

ExperimentSpec parse_spec(const nlohmann::json& j);
nlohmann::json serialize_spec(const ExperimentSpec& spec);
ExperimentSpec load_spec_file(const std::string& path);

// Cross-field validation (throws ConfigError). Notably: objectives whose
// payoff embeds 1/gamma_s are rejected outside known_q mode, and the
// unknown-target player is required in unknown_target mode.
void validate_spec(const ExperimentSpec& spec);

// Resolved instance pieces shared by the drivers and the test suites.
struct BuiltInstance {
  ContextSpace space;
  JointDistribution q;
  std::vector<double> gammas;
  std::optional<CalibrationGrid> grid;
  int n_actions = 0;
  int n_outcomes = 0;
  std::map<std::string, RewardTensor> rewards;
  double tv_between_groups = 0.0;  // TV(Q^0, Q^1) for two-group instances
};
BuiltInstance build_instance(const ExperimentSpec& spec);

// Combined objective pair per the spec's objective list. `tau_override`
// replaces the tilde entry's tau (used by the trade-off sweep).
ObjectivePair build_pair(const ExperimentSpec& spec, const BuiltInstance& inst,
                         std::optional<double> tau_override = std::nullopt);

// Stationary family implied by the nature block (error for best_response).
NatureFamily nature_family_for(const ExperimentSpec& spec, const BuiltInstance& inst);

std::unique_ptr<Player> make_player(const ExperimentSpec& spec, const BuiltInstance& inst,
                                    const ObjectivePair& pair,
                                    std::optional<double> tau_override = std::nullopt);
std::unique_ptr<Nature> make_nature(const ExperimentSpec& spec, const BuiltInstance& inst,
                                    const ObjectivePair& pair);

MetricSetup metric_setup_for(const ExperimentSpec& spec, const BuiltInstance& inst,
                             const ObjectivePair& pair);

struct CliOptions {
  std::optional<std::uint64_t> seed_override;
  int workers = 1;
  std::optional<std::string> out_dir;
};

// Subcommand drivers; they return process exit codes and write their
// artifacts (CSV, JSON summary, SVG) under the output directory.
int cmd_run(const ExperimentSpec& spec, const CliOptions& opts);
int cmd_pareto(const ExperimentSpec& spec, const CliOptions& opts);
int cmd_check(const ExperimentSpec& spec, const CliOptions& opts);
int cmd_plot(const std::vector<std::string>& csv_paths, const std::string& column,
             const std::string& out_svg);

// Single-run helper shared with the acceptance suite: builds strategies for
// one seed, runs the engine, and returns the trajectory.
Trajectory run_single(const ExperimentSpec& spec, const BuiltInstance& inst,
                      const ObjectivePair& pair, std::uint64_t seed,
                      std::optional<double> tau_override = std::nullopt);

// Atomic file write (temp file + rename in the target directory).
void write_file_atomic(const std::string& path, const std::string& content);

// Mean / standard error / min / max across seeds.
struct Summary {
  double mean = 0.0, std_error = 0.0, min = 0.0, max = 0.0;
};
Summary summarize(const std::vector<double>& values);

}  // namespace blackwell

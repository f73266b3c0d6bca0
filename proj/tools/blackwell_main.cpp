#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blackwell/experiment.hpp"

namespace {

blackwell::CliOptions make_options(const std::string& out_dir, int workers,
                                   std::uint64_t seed_override, bool has_seed) {
  blackwell::CliOptions opts;
  if (!out_dir.empty()) opts.out_dir = out_dir;
  opts.workers = workers;
  if (has_seed) opts.seed_override = seed_override;
  return opts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approachability-based fair online learning simulator"};
  app.require_subcommand(1);

  std::string spec_path, out_dir, column = "d_t", out_svg;
  std::vector<std::string> csv_paths;
  int workers = 1;
  std::uint64_t seed_override = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("spec", spec_path, "experiment spec (JSON)")->required();
    cmd->add_option("--out-dir", out_dir, "output directory (overrides spec and env)");
    cmd->add_option("--workers", workers, "worker threads for sweeps")
        ->check(CLI::PositiveNumber);
    return cmd->add_option("--seed-override", seed_override, "run a single seed instead");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "single experiment over the spec's seeds");
  CLI::Option* run_seed = add_common(run_cmd);
  CLI::App* pareto_cmd = app.add_subcommand("pareto", "trade-off sweep over the tau grid");
  CLI::Option* pareto_seed = add_common(pareto_cmd);
  CLI::App* check_cmd =
      app.add_subcommand("check", "brute-force approachability condition check");
  CLI::Option* check_seed = add_common(check_cmd);

  CLI::App* plot_cmd = app.add_subcommand("plot", "render trajectory CSVs as an SVG chart");
  plot_cmd->add_option("csv", csv_paths, "trajectory CSV files")->required();
  plot_cmd->add_option("--column", column, "metric column (default d_t)");
  plot_cmd->add_option("--out", out_svg, "output SVG path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (plot_cmd->parsed()) {
      return blackwell::cmd_plot(csv_paths, column, out_svg);
    }
    const blackwell::ExperimentSpec spec = blackwell::load_spec_file(spec_path);
    if (run_cmd->parsed()) {
      return blackwell::cmd_run(spec,
                                make_options(out_dir, workers, seed_override, run_seed->count() > 0));
    }
    if (pareto_cmd->parsed()) {
      return blackwell::cmd_pareto(
          spec, make_options(out_dir, workers, seed_override, pareto_seed->count() > 0));
    }
    if (check_cmd->parsed()) {
      return blackwell::cmd_check(
          spec, make_options(out_dir, workers, seed_override, check_seed->count() > 0));
    }
  } catch (const blackwell::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return blackwell::kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return blackwell::kExitSolver;
  }
  return 0;
}

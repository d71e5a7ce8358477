#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "svolterra/errors.hpp"
#include "svolterra/experiments.hpp"
#include "svolterra/parallel.hpp"
#include "svolterra/run_config.hpp"

namespace {

struct Flags {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths, modes, steps;
  std::optional<double> t_end;
};

void apply_flags(svolterra::RunConfig& config, const Flags& flags) {
  if (flags.out) config.output_dir = *flags.out;
  if (flags.seed) config.noise.seed = *flags.seed;
  if (flags.paths) config.noise.paths = *flags.paths;
  if (flags.modes) config.noise.modes = *flags.modes;
  if (flags.steps) config.grid.steps = *flags.steps;
  if (flags.t_end) config.grid.t_end = *flags.t_end;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic Volterra equations: resolvent families, Monte Carlo convolutions and "
               "verification experiments"};
  app.fallthrough();
  std::optional<std::string> config_path;
  Flags flags;
  std::size_t threads = 1;
  bool verbose = false;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", flags.out, "Output directory (overrides output.dir)");
  app.add_option("--seed", flags.seed, "Base seed (overrides noise.seed)");
  app.add_option("--paths", flags.paths, "Monte Carlo paths (overrides noise.paths)");
  app.add_option("--modes", flags.modes, "Noise modes (overrides noise.modes)");
  app.add_option("--steps", flags.steps, "Grid steps (overrides grid.steps)");
  app.add_option("--t-end", flags.t_end, "Time horizon (overrides grid.t_end)");
  app.add_option("--threads", threads, "Worker threads for path loops")->check(CLI::PositiveNumber);
  app.add_flag("--verbose", verbose, "Print report lines and timings");

  app.require_subcommand(0, 1);
  app.add_subcommand("run", "Run the experiment list of the configuration (default)");
  for (const auto& name : svolterra::experiment_names()) {
    app.add_subcommand(name, "Run the " + name + " experiment");
  }
  CLI11_PARSE(app, argc, argv);

  try {
    svolterra::parallel::set_threads(threads);
    const auto tree = config_path ? svolterra::read_config_tree(*config_path)
                                  : boost::property_tree::ptree{};
    svolterra::RunConfig base = svolterra::parse_config(tree);
    apply_flags(base, flags);

    std::vector<std::string> names = base.experiments;
    const auto subs = app.get_subcommands();
    if (!subs.empty() && subs.front()->get_name() != "run") {
      names = {subs.front()->get_name()};
      base.experiments = names;
    }

    std::vector<svolterra::RunConfig> configs;
    for (const auto& name : names) {
      svolterra::RunConfig c = svolterra::experiment_config(tree, name);
      apply_flags(c, flags);
      c.experiments = {name};
      svolterra::validate(c, name);
      configs.push_back(std::move(c));
    }

    const std::filesystem::path dir = base.output_dir;
    std::filesystem::create_directories(dir);
    {
      std::ofstream echo(dir / "config.ini");
      svolterra::write_config(base, echo);
    }
    std::vector<svolterra::ExperimentResult> results;
    bool all_pass = true;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (tree.find(names[i]) != tree.not_found()) {
        std::ofstream echo(dir / (names[i] + ".config.ini"));
        svolterra::write_config(configs[i], echo);
      }
      results.push_back(svolterra::run_experiment(names[i], configs[i], dir, std::cout, verbose));
      all_pass = all_pass && results.back().pass;
    }
    if (!results.empty()) svolterra::write_plot_script(results, base, dir);
    return all_pass ? 0 : 1;
  } catch (const svolterra::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

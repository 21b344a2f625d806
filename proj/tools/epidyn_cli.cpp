// epidyn: run a preset or a JSON-configured experiment and write its traces.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "epidyn/experiments.hpp"

namespace {

std::string preset_list() {
  std::ostringstream os;
  for (auto name : epidyn::preset_names()) os << "\n  " << name;
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic social-learning simulator"};
  app.require_subcommand(1);

  epidyn::CliOptions opts;
  double alpha = 0, tau = 0;
  std::size_t replicates = 0, horizon = 0, sample_size = 0;
  std::uint64_t seed = 0;
  std::string metric, likelihood, out_dir = opts.out_dir.string();

  auto* run = app.add_subcommand("run", "Run an experiment");
  run->add_option("source", opts.source, "Preset name or path to a JSON config" + preset_list())->required();
  auto* o_alpha = run->add_option("--alpha", alpha, "Self-inertia for test1-self-inertia");
  auto* o_tau = run->add_option("--tau", tau, "Proportion of individual learning");
  auto* o_rep = run->add_option("--replicates", replicates, "Number of independent replicates");
  auto* o_hor = run->add_option("--horizon", horizon, "Number of steps T");
  auto* o_seed = run->add_option("--seed", seed, "Master seed");
  auto* o_m = run->add_option("--sample-size", sample_size, "Sample size m per agent and step");
  auto* o_metric = run->add_option("--metric", metric, "Distance plotted in the summary")
                       ->check(CLI::IsMember({"consensus", "nearest"}));
  auto* o_lik = run->add_option("--likelihood", likelihood, "Landscape for test2-professor")
                    ->check(CLI::IsMember({"concave", "constant"}));
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*o_alpha) opts.alpha = alpha;
  if (*o_tau) opts.tau = tau;
  if (*o_rep) opts.replicates = replicates;
  if (*o_hor) opts.horizon = horizon;
  if (*o_seed) opts.seed = seed;
  if (*o_m) opts.sample_size = sample_size;
  if (*o_metric) opts.metric = metric;
  if (*o_lik) opts.likelihood = likelihood;
  opts.out_dir = out_dir;

  return epidyn::run_experiment(opts, std::cerr);
}

#pragma once

// Experiment presets, JSON configuration files and the run driver behind the CLI.
//
// Config file keys (unknown keys are rejected):
//   name, tau, sample_size, sigma_e, sigma_c, c_min, horizon, seed, replicates,
//   metric ("consensus" | "nearest"), filter_zero_social, parameters (object),
//   setting {experiences, concepts}, gamma (row-major matrix),
//   likelihood {variant: constant|gaussian_peak|tabular, ...},
//   initial (one values table per agent), target (optional values table),
//   notes (optional list of strings)

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "epidyn/dynamics.hpp"
#include "epidyn/influence.hpp"
#include "epidyn/knowledge.hpp"
#include "epidyn/likelihood.hpp"
#include "epidyn/serialization.hpp"

namespace epidyn {

/// Invalid or unparsable configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kTest1 = "test1-self-inertia";
inline constexpr std::string_view kTest2 = "test2-professor";
inline constexpr std::string_view kTest3 = "test3-creation";
inline constexpr std::string_view kTest4 = "test4-language";

std::vector<std::string_view> preset_names();
bool is_preset(std::string_view name);

struct PresetOverrides {
  std::optional<double> alpha;             // test1 self-inertia
  std::optional<std::string> likelihood;   // test2: "concave" | "constant"
};

/// Fully resolved experiment description; round-trips through JSON.
struct ExperimentSpec {
  std::string name = "custom";
  SimulationConfig config;
  std::shared_ptr<const KnowledgeSetting> setting;
  Matrix gamma;
  LikelihoodLandscape::Variant likelihood = ConstantLikelihood{1.0};
  std::vector<KnowledgeFunction> initial;
  std::optional<KnowledgeFunction> target;
  std::map<std::string, double> parameters;
  std::vector<std::string> notes;

  /// Throws ConfigError listing every violated invariant.
  RunInputs to_inputs() const;
};

ExperimentSpec make_preset(std::string_view name, const PresetOverrides& overrides = {});

Json spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const Json& j);

/// Parses and validates a JSON config file. Parse errors report line and column.
ExperimentSpec load_config(const std::filesystem::path& path);
ExperimentSpec load_config_text(std::string_view text);

/// Per-step contraction estimate exp(slope) of a least-squares fit of ln d(t)
/// over the longest prefix with d > 1e-6. Throws std::invalid_argument with
/// fewer than three usable points.
double fit_decay_rate(std::span<const double> series);

struct CliOptions {
  std::string source;  // preset name or config path
  std::optional<double> alpha;
  std::optional<double> tau;
  std::optional<std::size_t> replicates;
  std::optional<std::size_t> horizon;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> sample_size;
  std::optional<std::string> metric;
  std::optional<std::string> likelihood;
  std::filesystem::path out_dir = "epidyn-out";
};

/// Resolves the preset or config and applies the command-line overrides.
ExperimentSpec resolve_experiment(const CliOptions& options);

struct DeltaRow {
  std::size_t agent = 0;
  double mean_delta = 0.0;
};

/// Mean over replicates of d_C(k_i^0, k_eq), k_eq being the final agent
/// closest (in aggregate) to all others.
std::vector<DeltaRow> delta_table(const ExperimentSpec& spec, const RunResult& result);

/// Writes trace.csv, mean.csv, gamma.csv, lambda0.csv, config.json,
/// manifest.json and summary.txt into options.out_dir. Returns the exit code:
/// 0 success, 2 validation error, 3 runtime failure.
int run_experiment(const CliOptions& options, std::ostream& log);

}  // namespace epidyn

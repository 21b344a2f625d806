#include "epidyn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "epidyn/kernels.hpp"
#include "epidyn/metrics.hpp"
#include "epidyn/spectral.hpp"

namespace epidyn {

namespace {

constexpr double kDecayFloor = 1e-6;

std::shared_ptr<const KnowledgeSetting> line_setting(std::size_t count) {
  return KnowledgeSetting::integer_line(count, BoxConcepts{{-10.0}, {10.0}});
}

std::vector<KnowledgeFunction> constants(const std::shared_ptr<const KnowledgeSetting>& s,
                                         std::initializer_list<double> values) {
  std::vector<KnowledgeFunction> out;
  for (double v : values) out.push_back(KnowledgeFunction::constant(s, v));
  return out;
}

ExperimentSpec preset_test1(const PresetOverrides& o) {
  const double alpha = o.alpha.value_or(0.5);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  ExperimentSpec s;
  s.name = std::string(kTest1);
  s.setting = line_setting(5);
  s.gamma = Matrix{{alpha, 1.0 - alpha}, {1.0 - alpha, alpha}};
  s.likelihood = ConstantLikelihood{1.0};
  s.initial = constants(s.setting, {2.0, 6.0});
  s.config.tau = 0.0;
  s.config.c_min = 0.1;
  s.config.sample_size = 50;
  s.config.horizon = 25;
  s.config.replicates = 100;
  s.parameters["alpha"] = alpha;
  return s;
}

ExperimentSpec preset_test2(const PresetOverrides& o) {
  const std::string variant = o.likelihood.value_or("concave");
  ExperimentSpec s;
  s.name = std::string(kTest2);
  s.setting = line_setting(5);
  s.gamma = Matrix{{1, 0.01, 0.01, 0.01, 0.01},
                   {1, 0.1, 0.1, 0.1, 0.1},
                   {1, 0.1, 0.1, 0.1, 0.1},
                   {1, 0.1, 0.1, 0.1, 0.1},
                   {1, 0.1, 0.1, 0.1, 0.1}};
  if (variant == "concave") {
    s.likelihood = GaussianPeakLikelihood{{6.0}, 10.0};
    s.notes.push_back(
        "concave landscape L(e,c) = exp(-(c-6)^2/10), peaked at concept 6");
  } else if (variant == "constant") {
    s.likelihood = ConstantLikelihood{1.0};
  } else {
    throw ConfigError("test2 likelihood must be 'concave' or 'constant'");
  }
  s.initial = constants(s.setting, {5.0, 1.0, 1.0, 1.0, 1.0});
  s.config.tau = 0.0;
  s.config.c_min = 0.1;
  s.config.sample_size = 50;
  s.config.horizon = 25;
  s.config.replicates = 100;
  return s;
}

ExperimentSpec preset_test3(const PresetOverrides&) {
  ExperimentSpec s;
  s.name = std::string(kTest3);
  s.setting = line_setting(25);
  s.gamma = Matrix::Ones(10, 10);
  s.likelihood = GaussianPeakLikelihood{{1.0}, 1.0};
  s.initial.assign(10, KnowledgeFunction::zero(s.setting));
  s.target = KnowledgeFunction::constant(s.setting, 1.0);
  s.config.tau = 0.02;
  s.config.c_min = 0.0;
  s.config.sample_size = 20;
  s.config.sigma_e = 1.0;
  s.config.sigma_c = 0.1;
  s.config.horizon = 25000;
  s.config.replicates = 100;
  s.notes.push_back("landscape exp(-(c-1)^2) for nonzero concepts; concept box [-10, 10] stands in for the real line");
  s.notes.push_back("relative-entropy target is the constant function 1");
  return s;
}

ExperimentSpec preset_test4(const PresetOverrides&) {
  ExperimentSpec s;
  s.name = std::string(kTest4);
  s.setting = line_setting(5);
  s.gamma = Matrix{{1, 1, 0.01, 0.01}, {1, 1, 0.01, 0.01}, {0.01, 0.01, 1, 1}, {0.01, 0.01, 1, 1}};
  s.likelihood = ConstantLikelihood{1.0};
  s.initial = constants(s.setting, {5.0, 5.0, 7.0, 7.0});
  s.config.tau = 0.0;
  s.config.c_min = 0.1;
  s.config.sample_size = 50;
  s.config.horizon = 400;
  s.config.replicates = 20;
  return s;
}

Json likelihood_to_json(const LikelihoodLandscape::Variant& v) {
  Json j;
  if (const auto* c = std::get_if<ConstantLikelihood>(&v)) {
    j["variant"] = "constant";
    j["value"] = c->value;
  } else if (const auto* g = std::get_if<GaussianPeakLikelihood>(&v)) {
    j["variant"] = "gaussian_peak";
    j["center"] = g->center;
    j["width"] = g->width;
  } else {
    j["variant"] = "tabular";
    j["table"] = std::get<TabularLikelihood>(v).table;
  }
  return j;
}

void reject_unknown(const Json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

LikelihoodLandscape::Variant likelihood_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("variant")) throw ConfigError("likelihood needs a 'variant'");
  const auto variant = j.at("variant").get<std::string>();
  if (variant == "constant") {
    reject_unknown(j, {"variant", "value"}, "likelihood");
    return ConstantLikelihood{j.value("value", 1.0)};
  }
  if (variant == "gaussian_peak") {
    reject_unknown(j, {"variant", "center", "width"}, "likelihood");
    return GaussianPeakLikelihood{j.at("center").get<std::vector<double>>(), j.at("width").get<double>()};
  }
  if (variant == "tabular") {
    reject_unknown(j, {"variant", "table"}, "likelihood");
    return TabularLikelihood{j.at("table").get<std::vector<std::vector<double>>>()};
  }
  throw ConfigError("likelihood.variant must be constant, gaussian_peak or tabular");
}

template <typename T>
T get_nonnegative_integer(const Json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(std::string(key) + " must be a nonnegative integer");
  }
  return v.get<T>();
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << content;
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

std::size_t closest_agent(std::span<const KnowledgeFunction> functions) {
  std::size_t best = 0;
  double best_total = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < functions.size(); ++j) {
    double total = 0.0;
    for (const auto& f : functions) total += kernels::squared_distance(f.values(), functions[j].values());
    if (total < best_total) {
      best_total = total;
      best = j;
    }
  }
  return best;
}

}  // namespace

std::vector<std::string_view> preset_names() { return {kTest1, kTest2, kTest3, kTest4}; }

bool is_preset(std::string_view name) {
  const auto names = preset_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

ExperimentSpec make_preset(std::string_view name, const PresetOverrides& overrides) {
  if (overrides.alpha && name != kTest1) throw ConfigError("--alpha applies to " + std::string(kTest1) + " only");
  if (overrides.likelihood && name != kTest2) {
    throw ConfigError("--likelihood applies to " + std::string(kTest2) + " only");
  }
  if (name == kTest1) return preset_test1(overrides);
  if (name == kTest2) return preset_test2(overrides);
  if (name == kTest3) return preset_test3(overrides);
  if (name == kTest4) return preset_test4(overrides);
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

RunInputs ExperimentSpec::to_inputs() const {
  std::vector<std::string> errors;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    errors.emplace_back(e.what());
  }
  if (!setting) throw ConfigError("experiment has no knowledge setting");
  if (initial.empty()) errors.emplace_back("initial population is empty");
  if (static_cast<std::size_t>(gamma.rows()) != initial.size() || gamma.rows() != gamma.cols()) {
    errors.emplace_back("gamma must be N x N with N = number of initial functions");
  }
  std::optional<StructureMatrix> structure;
  try {
    structure.emplace(gamma);
  } catch (const std::invalid_argument& e) {
    errors.emplace_back(e.what());
  }
  std::optional<LikelihoodLandscape> landscape;
  try {
    landscape.emplace(likelihood, *setting);
  } catch (const std::invalid_argument& e) {
    errors.emplace_back(e.what());
  }
  if (!errors.empty()) {
    std::ostringstream os;
    os << "invalid experiment '" << name << "':";
    for (const auto& e : errors) os << "\n  - " << e;
    throw ConfigError(os.str());
  }
  PopulationState state;
  state.functions = initial;
  return RunInputs{config, std::move(*structure), std::move(*landscape), std::move(state), target};
}

Json spec_to_json(const ExperimentSpec& spec) {
  Json j;
  j["name"] = spec.name;
  j["tau"] = spec.config.tau;
  j["sample_size"] = spec.config.sample_size;
  j["sigma_e"] = spec.config.sigma_e;
  j["sigma_c"] = spec.config.sigma_c;
  j["c_min"] = spec.config.c_min;
  j["horizon"] = spec.config.horizon;
  j["seed"] = spec.config.seed;
  j["replicates"] = spec.config.replicates;
  j["metric"] = std::string(metric_name(spec.config.metric));
  j["filter_zero_social"] = spec.config.filter_zero_social;
  j["parameters"] = Json::object();
  for (const auto& [k, v] : spec.parameters) j["parameters"][k] = v;
  j["setting"] = setting_to_json(*spec.setting);
  j["gamma"] = matrix_to_json(spec.gamma);
  j["likelihood"] = likelihood_to_json(spec.likelihood);
  j["initial"] = Json::array();
  for (const auto& k : spec.initial) j["initial"].push_back(values_to_json(k));
  if (spec.target) j["target"] = values_to_json(*spec.target);
  if (!spec.notes.empty()) j["notes"] = spec.notes;
  return j;
}

ExperimentSpec spec_from_json(const Json& j) {
  try {
    reject_unknown(j,
                   {"name", "tau", "sample_size", "sigma_e", "sigma_c", "c_min", "horizon", "seed", "replicates",
                    "metric", "filter_zero_social", "parameters", "setting", "gamma", "likelihood", "initial",
                    "target", "notes"},
                   "config");
    for (const char* key : {"setting", "gamma", "likelihood", "initial"}) {
      if (!j.contains(key)) throw ConfigError(std::string("config is missing '") + key + "'");
    }
    ExperimentSpec s;
    s.name = j.value("name", std::string("custom"));
    auto& c = s.config;
    if (j.contains("tau")) c.tau = j.at("tau").get<double>();
    if (j.contains("sample_size")) c.sample_size = get_nonnegative_integer<std::size_t>(j, "sample_size");
    if (j.contains("sigma_e")) c.sigma_e = j.at("sigma_e").get<double>();
    if (j.contains("sigma_c")) c.sigma_c = j.at("sigma_c").get<double>();
    if (j.contains("c_min")) c.c_min = j.at("c_min").get<double>();
    if (j.contains("horizon")) c.horizon = get_nonnegative_integer<std::size_t>(j, "horizon");
    if (j.contains("seed")) c.seed = get_nonnegative_integer<std::uint64_t>(j, "seed");
    if (j.contains("replicates")) c.replicates = get_nonnegative_integer<std::size_t>(j, "replicates");
    if (j.contains("metric")) c.metric = parse_metric(j.at("metric").get<std::string>());
    if (j.contains("filter_zero_social")) c.filter_zero_social = j.at("filter_zero_social").get<bool>();
    if (j.contains("parameters")) {
      for (const auto& [k, v] : j.at("parameters").items()) s.parameters[k] = v.get<double>();
    }
    if (j.contains("notes")) s.notes = j.at("notes").get<std::vector<std::string>>();
    s.setting = setting_from_json(j.at("setting"));
    s.gamma = matrix_from_json(j.at("gamma"));
    s.likelihood = likelihood_from_json(j.at("likelihood"));
    for (const auto& table : j.at("initial")) s.initial.push_back(values_from_json(s.setting, table));
    if (j.contains("target")) s.target = values_from_json(s.setting, j.at("target"));
    s.to_inputs();  // full validation
    return s;
  } catch (const ConfigError&) {
    throw;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(e.what());
  }
}

ExperimentSpec load_config_text(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // Translate the byte offset into a line/column pair.
    std::size_t line = 1, column = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("parse error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                      e.what());
  }
  return spec_from_json(j);
}

ExperimentSpec load_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return load_config_text(buf.str());
}

double fit_decay_rate(std::span<const double> series) {
  std::size_t usable = 0;
  while (usable < series.size() && series[usable] > kDecayFloor) ++usable;
  if (usable < 3) throw std::invalid_argument("fit_decay_rate needs at least 3 points above 1e-6");
  // Centre on the first point so a constant trace gives a slope of exactly 0.
  const double y0 = std::log(series[0]);
  const double t_mean = static_cast<double>(usable - 1) / 2.0;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t t = 0; t < usable; ++t) {
    const double dt = static_cast<double>(t) - t_mean;
    sxy += dt * (std::log(series[t]) - y0);
    sxx += dt * dt;
  }
  return std::exp(sxy / sxx);
}

ExperimentSpec resolve_experiment(const CliOptions& options) {
  ExperimentSpec spec;
  if (is_preset(options.source)) {
    spec = make_preset(options.source, PresetOverrides{options.alpha, options.likelihood});
  } else {
    if (options.alpha || options.likelihood) {
      throw ConfigError("--alpha and --likelihood apply to presets only");
    }
    if (!std::filesystem::exists(options.source)) {
      throw ConfigError("'" + options.source + "' is neither a preset nor a readable config file");
    }
    spec = load_config(options.source);
  }
  if (options.tau) spec.config.tau = *options.tau;
  if (options.replicates) spec.config.replicates = *options.replicates;
  if (options.horizon) spec.config.horizon = *options.horizon;
  if (options.seed) spec.config.seed = *options.seed;
  if (options.sample_size) spec.config.sample_size = *options.sample_size;
  if (options.metric) {
    try {
      spec.config.metric = parse_metric(*options.metric);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  spec.to_inputs();
  return spec;
}

std::vector<DeltaRow> delta_table(const ExperimentSpec& spec, const RunResult& result) {
  const std::size_t n = spec.initial.size();
  std::vector<DeltaRow> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i].agent = i;
  if (result.final_states.empty()) return rows;
  for (const auto& final_state : result.final_states) {
    const auto& eq = final_state.functions[closest_agent(final_state.functions)];
    for (std::size_t i = 0; i < n; ++i) rows[i].mean_delta += delta_i(spec.initial[i], eq);
  }
  for (auto& r : rows) r.mean_delta /= static_cast<double>(result.final_states.size());
  return rows;
}

int run_experiment(const CliOptions& options, std::ostream& log) {
  ExperimentSpec spec;
  RunInputs inputs{SimulationConfig{}, StructureMatrix(Matrix::Identity(1, 1)),
                   LikelihoodLandscape(ConstantLikelihood{1.0}, *line_setting(1)), PopulationState{}, std::nullopt};
  try {
    spec = resolve_experiment(options);
    inputs = spec.to_inputs();
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    const std::size_t threads = default_thread_count();
    const RunResult result = run(inputs, {}, threads);
    const auto& config = spec.config;

    const auto c0 = compute_credibility(inputs.initial.functions, inputs.likelihood, config.c_min);
    const auto lambda0 = compute_social_learning(inputs.gamma, c0);

    std::filesystem::create_directories(options.out_dir);
    const Json resolved = spec_to_json(spec);
    const std::string resolved_text = resolved.dump(2) + "\n";

    std::ostringstream trace_csv, mean_csv, gamma_csv, lambda_csv;
    write_trace_csv(trace_csv, result.trace);
    write_mean_csv(mean_csv, result.trace);
    write_matrix_csv(gamma_csv, spec.gamma);
    write_matrix_csv(lambda_csv, lambda0.entries());
    write_file(options.out_dir / "trace.csv", trace_csv.str());
    write_file(options.out_dir / "mean.csv", mean_csv.str());
    write_file(options.out_dir / "gamma.csv", gamma_csv.str());
    write_file(options.out_dir / "lambda0.csv", lambda_csv.str());
    write_file(options.out_dir / "config.json", resolved_text);

    Json manifest;
    manifest["tool"] = "epidyn";
    manifest["created_utc"] = utc_timestamp();
    manifest["input_hash"] = git_blob_hash(resolved_text);
    manifest["config"] = resolved;
    manifest["gamma"] = matrix_to_json(spec.gamma);
    manifest["likelihood"] = LikelihoodLandscape(spec.likelihood, *spec.setting).describe();
    Json spectral;
    const Primitivity gp = is_primitive(spec.gamma);
    spectral["gamma_primitive"] = gp.primitive;
    spectral["gamma_primitivity_exponent"] = gp.exponent ? Json(*gp.exponent) : Json(nullptr);
    spectral["lambda0"] = spectral_to_json(analyze(lambda0.entries()));
    manifest["spectral"] = spectral;
    manifest["kernel_isa"] = std::string(kernels::isa_name(kernels::active().isa));
    manifest["threads"] = threads;
    manifest["outputs"] = {"trace.csv", "mean.csv", "gamma.csv", "lambda0.csv", "config.json", "summary.txt"};
    write_file(options.out_dir / "manifest.json", manifest.dump(2) + "\n");

    std::ostringstream summary;
    const auto& first = result.trace.means.front();
    const auto& last = result.trace.means.back();
    summary << "experiment: " << spec.name << '\n';
    summary << "replicates: " << config.replicates << "  horizon: " << config.horizon
            << "  sample_size: " << config.sample_size << "  tau: " << config.tau
            << "  c_min: " << config.c_min << "  seed: " << config.seed << '\n';
    for (const auto& [k, v] : spec.parameters) summary << "parameter " << k << ": " << v << '\n';
    summary << "plotted metric: " << metric_name(config.metric) << '\n';
    summary << "initial mean distance: consensus " << format_real(first.d_consensus) << ", nearest "
            << format_real(first.d_nearest) << '\n';
    summary << "final mean distance (t=" << last.t << "): consensus " << format_real(last.d_consensus)
            << ", nearest " << format_real(last.d_nearest) << '\n';
    std::string rate = "n/a (fewer than 3 points above 1e-6)";
    try {
      rate = format_real(fit_decay_rate(result.trace.mean_series(config.metric)));
    } catch (const std::invalid_argument&) {
    }
    summary << "fitted per-step contraction: " << rate << '\n';
    if (spec.target) {
      summary << "relative entropy: t=0 " << format_real(first.relative_entropy) << ", final "
              << format_real(last.relative_entropy) << '\n';
    }
    summary << "delta_i = d_C(k_i^0, k_eq), mean over replicates:\n";
    for (const auto& row : delta_table(spec, result)) {
      summary << "  agent " << (row.agent + 1) << ": " << format_real(row.mean_delta) << '\n';
    }
    for (const auto& note : spec.notes) summary << "note: " << note << '\n';
    write_file(options.out_dir / "summary.txt", summary.str());
    log << summary.str();
    return 0;
  } catch (const std::exception& e) {
    log << "runtime failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace epidyn

#include "epidyn/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "epidyn/kernels.hpp"

namespace epidyn {

namespace {

constexpr int kMaxTruncationAttempts = 64;

std::size_t uniform_index(SplitMix64& rng, std::size_t n) {
  return std::min(static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)), n - 1);
}

// Inverse-CDF draw from nonnegative weights with a positive total.
std::size_t categorical(SplitMix64& rng, std::span<const double> weights, double total) {
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    acc += weights[k];
    last_positive = k;
    if (u < acc) return k;
  }
  return last_positive;
}

void append_social(std::size_t i, std::span<const KnowledgeFunction> functions, const SocialLearningMatrix& lambda,
                   SplitMix64& rng, Sample& out, bool filter_zero) {
  const auto& m = lambda.entries();
  const std::span<const double> row{m.data() + static_cast<Eigen::Index>(i) * m.cols(),
                                    static_cast<std::size_t>(m.cols())};
  const std::size_t j = categorical(rng, row, kernels::sum(row));
  const std::size_t e = uniform_index(rng, functions[j].size());
  const auto c = functions[j].evaluate(e);
  if (filter_zero && is_zero_concept(c)) return;
  out.add(e, c);
}

// Draws a concept around `center` following the individual-learning conditional.
void perturb_concept(const KnowledgeSetting& setting, std::span<const double> center, double sigma_c,
                     SplitMix64& rng, std::vector<double>& c) {
  const std::size_t dim = setting.concept_dim();
  c.assign(center.begin(), center.end());
  if (setting.is_box()) {
    const BoxConcepts& box = setting.box();
    std::normal_distribution<double> normal(0.0, sigma_c);
    for (int attempt = 0; attempt < kMaxTruncationAttempts; ++attempt) {
      for (std::size_t k = 0; k < dim; ++k) c[k] = center[k] + normal(rng);
      if (setting.contains(c)) return;
    }
    for (std::size_t k = 0; k < dim; ++k) c[k] = std::clamp(c[k], box.lo[k], box.hi[k]);
    return;
  }
  const auto& points = setting.discrete().points;
  std::vector<double> sq(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) sq[p] = kernels::squared_distance(points[p], center);
  const double nearest = *std::min_element(sq.begin(), sq.end());
  double total = 0.0;
  for (double& w : sq) {
    w = std::exp(-(w - nearest) / (2.0 * sigma_c * sigma_c));
    total += w;
  }
  const auto& chosen = points[categorical(rng, sq, total)];
  c.assign(chosen.begin(), chosen.end());
}

// Draws one agent's sample; caches the experience kernel across calls.
class SampleDrawer {
 public:
  explicit SampleDrawer(const SimulationConfig& config) : config_(config) {}

  void fill(std::size_t i, std::span<const KnowledgeFunction> functions, const SocialLearningMatrix& lambda,
            SplitMix64& rng, Sample& sample) {
    sample.clear();
    sample.reserve(config_.sample_size);
    weights_ready_ = false;
    for (std::size_t k = 0; k < config_.sample_size; ++k) {
      const bool individual = config_.tau > 0.0 && (config_.tau >= 1.0 || rng.uniform() < config_.tau);
      if (individual) {
        append_individual(functions[i], rng, sample);
      } else {
        append_social(i, functions, lambda, rng, sample, config_.filter_zero_social);
      }
    }
  }

 private:
  void append_individual(const KnowledgeFunction& k, SplitMix64& rng, Sample& out) {
    if (!kernel_) kernel_.emplace(k.setting(), config_.sigma_e);
    if (!weights_ready_) {
      kernel_->marginal_weights(k, weights_);
      weights_total_ = kernels::sum(weights_);
      weights_ready_ = true;
    }
    // Newborn agents have no conceptualized experience: explore uniformly.
    const std::size_t e = weights_total_ > 0.0 ? categorical(rng, weights_, weights_total_)
                                               : uniform_index(rng, k.size());
    perturb_concept(k.setting(), k.evaluate(e), config_.sigma_c, rng, concept_);
    out.add(e, concept_);
  }

  const SimulationConfig& config_;
  std::optional<ExperienceKernel> kernel_;
  std::vector<double> weights_;
  double weights_total_ = 0.0;
  bool weights_ready_ = false;
  std::vector<double> concept_;
};

class Stepper {
 public:
  Stepper(const SimulationConfig& config, const StructureMatrix& gamma, const LikelihoodLandscape& likelihood)
      : config_(config), gamma_(gamma), likelihood_(likelihood), drawer_(config) {}

  PopulationState step(const PopulationState& state, const RngStreams& streams) {
    const std::size_t n = state.agents();
    if (gamma_.size() != n) throw std::invalid_argument("structure matrix size does not match the population");
    const auto credibility = compute_credibility(state.functions, likelihood_, config_.c_min);
    const auto lambda = compute_social_learning(gamma_, credibility);

    PopulationState next;
    next.t = state.t + 1;
    next.functions.reserve(n);
    Sample sample(state.functions.front().concept_dim());
    for (std::size_t i = 0; i < n; ++i) {
      SplitMix64 rng = streams.for_agent(i, state.t);
      drawer_.fill(i, state.functions, lambda, rng, sample);
      next.functions.push_back(least_squares_update(state.functions[i], sample));
    }
    return next;
  }

 private:
  const SimulationConfig& config_;
  const StructureMatrix& gamma_;
  const LikelihoodLandscape& likelihood_;
  SampleDrawer drawer_;
};

}  // namespace

void SimulationConfig::validate() const {
  std::vector<std::string> errors;
  if (!(tau >= 0.0 && tau <= 1.0)) errors.emplace_back("tau must lie in [0, 1]");
  if (sample_size < 1) errors.emplace_back("sample_size must be >= 1");
  if (!(sigma_e > 0.0)) errors.emplace_back("sigma_e must be > 0");
  if (!(sigma_c > 0.0)) errors.emplace_back("sigma_c must be > 0");
  if (!(c_min >= 0.0 && c_min <= 1.0)) errors.emplace_back("c_min must lie in [0, 1]");
  if (horizon < 1) errors.emplace_back("horizon must be >= 1");
  if (replicates < 1) errors.emplace_back("replicates must be >= 1");
  if (errors.empty()) return;
  std::ostringstream os;
  os << "invalid simulation config:";
  for (const auto& e : errors) os << "\n  - " << e;
  throw std::invalid_argument(os.str());
}

void Sample::add(std::size_t experience, std::span<const double> point) {
  if (point.size() != dim_) throw std::invalid_argument("sample concept has the wrong dimension");
  experiences_.push_back(experience);
  concepts_.insert(concepts_.end(), point.begin(), point.end());
}

ExperienceKernel::ExperienceKernel(const KnowledgeSetting& setting, double sigma_e)
    : n_(setting.num_experiences()), k_(n_ * n_) {
  if (!(sigma_e > 0.0)) throw std::invalid_argument("sigma_e must be > 0");
  const double denom = 2.0 * sigma_e * sigma_e;
  for (std::size_t a = 0; a < n_; ++a) {
    for (std::size_t b = 0; b < n_; ++b) {
      k_[a * n_ + b] = std::exp(-kernels::squared_distance(setting.experience(a), setting.experience(b)) / denom);
    }
  }
}

void ExperienceKernel::marginal_weights(const KnowledgeFunction& k, std::vector<double>& out) const {
  std::vector<double> mask(n_);
  for (std::size_t e = 0; e < n_; ++e) mask[e] = k.conceptualizes(e) ? 1.0 : 0.0;
  out.assign(n_, 0.0);
  for (std::size_t e = 0; e < n_; ++e) out[e] = kernels::dot({k_.data() + e * n_, n_}, mask);
}

Draw draw_social(std::size_t i, const PopulationState& state, const SocialLearningMatrix& lambda, SplitMix64& rng) {
  if (i >= state.agents() || lambda.size() != state.agents()) throw std::out_of_range("draw_social: bad agent index");
  Sample s(state.functions.front().concept_dim());
  append_social(i, state.functions, lambda, rng, s, false);
  const auto c = s.concept_at(0);
  return {s.experience(0), {c.begin(), c.end()}};
}

Draw draw_individual(std::size_t i, const PopulationState& state, double sigma_e, double sigma_c, SplitMix64& rng) {
  if (i >= state.agents()) throw std::out_of_range("draw_individual: bad agent index");
  if (!(sigma_e > 0.0) || !(sigma_c > 0.0)) throw std::invalid_argument("sigma_e and sigma_c must be > 0");
  const KnowledgeFunction& k = state.functions[i];
  const ExperienceKernel kernel(k.setting(), sigma_e);
  std::vector<double> weights;
  kernel.marginal_weights(k, weights);
  const double total = kernels::sum(weights);
  const std::size_t e = total > 0.0 ? categorical(rng, weights, total) : uniform_index(rng, k.size());
  Draw d;
  d.experience = e;
  perturb_concept(k.setting(), k.evaluate(e), sigma_c, rng, d.point);
  return d;
}

Sample draw_sample(std::size_t i, const PopulationState& state, const SimulationConfig& config,
                   const SocialLearningMatrix& lambda, SplitMix64& rng) {
  if (i >= state.agents() || lambda.size() != state.agents()) throw std::out_of_range("draw_sample: bad agent index");
  config.validate();
  SampleDrawer drawer(config);
  Sample sample(state.functions.front().concept_dim());
  drawer.fill(i, state.functions, lambda, rng, sample);
  return sample;
}

KnowledgeFunction least_squares_update(const KnowledgeFunction& previous, const Sample& sample) {
  if (sample.empty()) return previous;
  const KnowledgeSetting& setting = previous.setting();
  const std::size_t dim = setting.concept_dim();
  if (sample.concept_dim() != dim) throw std::invalid_argument("sample concept dimension does not match");
  const std::size_t num_e = previous.size();

  std::vector<std::vector<std::size_t>> by_e(num_e);
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const std::size_t e = sample.experience(k);
    if (e >= num_e) throw std::out_of_range("sample experience index out of range");
    by_e[e].push_back(k);
  }

  std::vector<double> values(previous.values().begin(), previous.values().end());
  for (std::size_t e = 0; e < num_e; ++e) {
    const auto& obs = by_e[e];
    if (obs.empty()) continue;
    double* out = values.data() + e * dim;
    if (setting.is_box()) {
      const BoxConcepts& box = setting.box();
      for (std::size_t d = 0; d < dim; ++d) {
        // Running mean: exact when all observations agree.
        double mean = 0.0, lo = 0.0, hi = 0.0;
        for (std::size_t r = 0; r < obs.size(); ++r) {
          const double x = sample.concept_at(obs[r])[d];
          if (r == 0) {
            mean = lo = hi = x;
            continue;
          }
          mean += (x - mean) / static_cast<double>(r + 1);
          lo = std::min(lo, x);
          hi = std::max(hi, x);
        }
        out[d] = std::clamp(std::clamp(mean, lo, hi), box.lo[d], box.hi[d]);
      }
    } else {
      const auto& points = setting.discrete().points;
      std::size_t best = 0;
      double best_cost = std::numeric_limits<double>::infinity();
      for (std::size_t p = 0; p < points.size(); ++p) {
        double cost = 0.0;
        for (std::size_t r : obs) cost += kernels::squared_distance(points[p], sample.concept_at(r));
        if (cost < best_cost) {
          best_cost = cost;
          best = p;
        }
      }
      std::copy(points[best].begin(), points[best].end(), out);
    }
  }
  return KnowledgeFunction(previous.setting_ptr(), std::move(values));
}

PopulationState step(const PopulationState& state, const SimulationConfig& config, const StructureMatrix& gamma,
                     const LikelihoodLandscape& likelihood, const RngStreams& streams) {
  config.validate();
  state.validate();
  Stepper stepper(config, gamma, likelihood);
  return stepper.step(state, streams);
}

std::size_t default_thread_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("EPIDYN_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) n = static_cast<std::size_t>(v);
  }
  return n;
}

RunResult run(const RunInputs& inputs, const StepObserver& observer, std::size_t threads) {
  const SimulationConfig& config = inputs.config;
  config.validate();
  inputs.initial.validate();
  if (inputs.gamma.size() != inputs.initial.agents()) {
    throw std::invalid_argument("structure matrix size does not match the population");
  }
  if (inputs.target && inputs.target->values().size() != inputs.initial.functions.front().values().size()) {
    throw std::invalid_argument("relative-entropy target does not match the setting");
  }

  const std::size_t replicates = config.replicates;
  std::vector<std::vector<MetricRow>> rows(replicates);
  std::vector<PopulationState> finals(replicates);
  const KnowledgeFunction* target = inputs.target ? &*inputs.target : nullptr;

  auto run_replicate = [&](std::size_t r) {
    const RngStreams streams(config.seed, r);
    Stepper stepper(config, inputs.gamma, inputs.likelihood);
    PopulationState state = inputs.initial;
    auto& out = rows[r];
    out.reserve(config.horizon + 1);
    out.push_back(measure(state, r, target));
    if (observer) observer(r, state);
    for (std::size_t t = 0; t < config.horizon; ++t) {
      state = stepper.step(state, streams);
      out.push_back(measure(state, r, target));
      if (observer) observer(r, state);
    }
    finals[r] = std::move(state);
  };

  if (threads == 0) threads = default_thread_count();
  threads = std::min(threads, replicates);
  if (threads <= 1) {
    for (std::size_t r = 0; r < replicates; ++r) run_replicate(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < replicates; r = next++) {
          try {
            run_replicate(r);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  RunResult result;
  result.trace.rows.reserve(replicates * (config.horizon + 1));
  for (auto& r : rows) result.trace.rows.insert(result.trace.rows.end(), r.begin(), r.end());
  result.trace.compute_means();
  result.final_states = std::move(finals);
  return result;
}

}  // namespace epidyn

#pragma once

// Stochastic learning dynamics.
//
// Each step, every agent i draws a sample of m (experience, concept) pairs:
// with probability 1 - tau from the social measure (pick j ~ row i of Lambda,
// e uniform, concept k_j(e)), with probability tau from the individual
// measure (e near already-conceptualized experiences, concept perturbed
// around k_i(e)). The next function is the least-squares fit of the sample:
// the per-experience mean (box concepts) or the closest listed point
// (discrete concepts). Experiences absent from the sample keep their value.
//
// All agents are updated from the same time-t snapshot. Credibility and
// Lambda are recomputed from that snapshot every step.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "epidyn/influence.hpp"
#include "epidyn/knowledge.hpp"
#include "epidyn/likelihood.hpp"
#include "epidyn/metrics.hpp"
#include "epidyn/population.hpp"
#include "epidyn/rng.hpp"

namespace epidyn {

struct SimulationConfig {
  double tau = 0.0;               // proportion of individual learning, [0, 1]
  std::size_t sample_size = 50;   // m
  double sigma_e = 1.0;           // experience exploration width
  double sigma_c = 0.1;           // concept perturbation width
  double c_min = 0.1;             // credibility floor
  std::size_t horizon = 25;       // T
  std::uint64_t seed = 0;
  std::size_t replicates = 1;
  MetricVariant metric = MetricVariant::nearest_individual;
  bool filter_zero_social = false;  // drop socially drawn zero concepts from samples

  /// Throws std::invalid_argument listing every violated invariant.
  void validate() const;
};

/// m observed (experience index, concept) pairs, concepts stored row-major.
class Sample {
 public:
  explicit Sample(std::size_t concept_dim) : dim_(concept_dim) {}

  void add(std::size_t experience, std::span<const double> point);
  void clear() {
    experiences_.clear();
    concepts_.clear();
  }
  void reserve(std::size_t n) {
    experiences_.reserve(n);
    concepts_.reserve(n * dim_);
  }

  std::size_t size() const { return experiences_.size(); }
  bool empty() const { return experiences_.empty(); }
  std::size_t concept_dim() const { return dim_; }
  std::size_t experience(std::size_t k) const { return experiences_[k]; }
  std::span<const double> concept_at(std::size_t k) const { return {concepts_.data() + k * dim_, dim_}; }

 private:
  std::size_t dim_;
  std::vector<std::size_t> experiences_;
  std::vector<double> concepts_;
};

struct Draw {
  std::size_t experience = 0;
  std::vector<double> point;
};

/// Gaussian affinities exp(-||e - e'||^2 / (2 sigma_E^2)) between experiences.
class ExperienceKernel {
 public:
  ExperienceKernel(const KnowledgeSetting& setting, double sigma_e);

  /// weight(e) = sum_{e' conceptualized by k} K(e, e'). All-zero when k is the zero function.
  void marginal_weights(const KnowledgeFunction& k, std::vector<double>& out) const;

 private:
  std::size_t n_;
  std::vector<double> k_;  // n x n, row-major
};

Draw draw_social(std::size_t i, const PopulationState& state, const SocialLearningMatrix& lambda, SplitMix64& rng);

Draw draw_individual(std::size_t i, const PopulationState& state, double sigma_e, double sigma_c, SplitMix64& rng);

/// One agent's sample: each pair is individual with probability tau, social otherwise.
Sample draw_sample(std::size_t i, const PopulationState& state, const SimulationConfig& config,
                   const SocialLearningMatrix& lambda, SplitMix64& rng);

KnowledgeFunction least_squares_update(const KnowledgeFunction& previous, const Sample& sample);

/// Synchronous update k^t -> k^{t+1}; agent i's draws come from
/// streams.for_agent(i, state.t).
PopulationState step(const PopulationState& state, const SimulationConfig& config, const StructureMatrix& gamma,
                     const LikelihoodLandscape& likelihood, const RngStreams& streams);

struct RunInputs {
  SimulationConfig config;
  StructureMatrix gamma;
  LikelihoodLandscape likelihood;
  PopulationState initial;
  std::optional<KnowledgeFunction> target;  // relative-entropy target, if any
};

struct RunResult {
  MetricTrace trace;
  std::vector<PopulationState> final_states;  // one per replicate
};

/// Called with (replicate, state) for t = 0..T. May be invoked concurrently
/// from different replicates.
using StepObserver = std::function<void(std::size_t, const PopulationState&)>;

/// Worker threads: EPIDYN_THREADS if set, else hardware concurrency.
std::size_t default_thread_count();

/// Runs `replicates` independent trajectories of T steps each and records
/// metrics at t = 0..T. Replicate r uses RngStreams(seed, r). Results do not
/// depend on `threads`.
RunResult run(const RunInputs& inputs, const StepObserver& observer = {}, std::size_t threads = 0);

}  // namespace epidyn

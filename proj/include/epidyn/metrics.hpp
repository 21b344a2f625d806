#pragma once

// Convergence functionals over a population of knowledge functions.
//
// Two distances to the consensus manifold M = {(g, ..., g)} are recorded:
//   consensus   exact Euclidean distance, i.e. to the projection (g_bar, ..., g_bar)
//   nearest     min_j sqrt(sum_i d_C(k_i, k_j)^2), distance to the closest
//               consensus state built from an existing agent
// consensus <= nearest always holds.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "epidyn/knowledge.hpp"
#include "epidyn/population.hpp"

namespace epidyn {

enum class MetricVariant { consensus_projection, nearest_individual };

std::string_view metric_name(MetricVariant v);
MetricVariant parse_metric(std::string_view name);

double consensus_distance(std::span<const KnowledgeFunction> functions);
inline double consensus_distance(const PopulationState& s) { return consensus_distance(s.functions); }

/// Same quantity for raw tables (all of one length).
double consensus_distance(const std::vector<std::vector<double>>& tables);

double nearest_individual_distance(std::span<const KnowledgeFunction> functions);
inline double nearest_individual_distance(const PopulationState& s) { return nearest_individual_distance(s.functions); }

/// Distance from an agent's initial function to the shared equilibrium function.
double delta_i(const KnowledgeFunction& initial, const KnowledgeFunction& equilibrium);

/// RE = -(1/N) sum_i sqrt(sum_e ||k_i(e) - target(e)||^2 / |E|). Nonpositive, 0 iff every agent equals target.
double relative_entropy(std::span<const KnowledgeFunction> functions, const KnowledgeFunction& target);
inline double relative_entropy(const PopulationState& s, const KnowledgeFunction& target) {
  return relative_entropy(s.functions, target);
}

struct MetricRow {
  std::uint64_t t = 0;
  std::size_t replicate = 0;
  double d_consensus = 0.0;
  double d_nearest = 0.0;
  double relative_entropy = 0.0;  // NaN when the run has no target

  double distance(MetricVariant v) const {
    return v == MetricVariant::consensus_projection ? d_consensus : d_nearest;
  }
};

struct MeanRow {
  std::uint64_t t = 0;
  double d_consensus = 0.0;
  double d_nearest = 0.0;
  double relative_entropy = 0.0;

  double distance(MetricVariant v) const {
    return v == MetricVariant::consensus_projection ? d_consensus : d_nearest;
  }
};

/// Per-replicate rows (grouped by replicate, t increasing) and per-t means.
struct MetricTrace {
  std::vector<MetricRow> rows;
  std::vector<MeanRow> means;

  /// Rebuilds `means` from `rows`.
  void compute_means();

  std::vector<MetricRow> replicate_rows(std::size_t replicate) const;
  std::vector<double> mean_series(MetricVariant v) const;
};

MetricRow measure(const PopulationState& state, std::size_t replicate, const KnowledgeFunction* target);

}  // namespace epidyn

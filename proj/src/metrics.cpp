#include "epidyn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "epidyn/kernels.hpp"

namespace epidyn {

namespace {

template <typename Tables>
double consensus_distance_impl(const Tables& tables, std::size_t len) {
  const std::size_t n = tables.size();
  std::vector<double> mean(len, 0.0);
  for (const auto& t : tables) kernels::axpy(1.0, t, mean);
  kernels::scale(1.0 / static_cast<double>(n), mean);
  double total = 0.0;
  for (const auto& t : tables) total += kernels::squared_distance(t, mean);
  return std::sqrt(total);
}

void require_nonempty(std::span<const KnowledgeFunction> functions) {
  if (functions.empty()) throw std::invalid_argument("population must be nonempty");
  const std::size_t len = functions.front().values().size();
  for (const auto& f : functions) {
    if (f.values().size() != len) throw std::invalid_argument("population functions differ in shape");
  }
}

}  // namespace

std::string_view metric_name(MetricVariant v) {
  return v == MetricVariant::consensus_projection ? "consensus" : "nearest";
}

MetricVariant parse_metric(std::string_view name) {
  if (name == "consensus" || name == "consensus-projection") return MetricVariant::consensus_projection;
  if (name == "nearest" || name == "nearest-individual") return MetricVariant::nearest_individual;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "' (expected consensus|nearest)");
}

double consensus_distance(std::span<const KnowledgeFunction> functions) {
  require_nonempty(functions);
  std::vector<std::span<const double>> tables;
  tables.reserve(functions.size());
  for (const auto& f : functions) tables.push_back(f.values());
  return consensus_distance_impl(tables, functions.front().values().size());
}

double consensus_distance(const std::vector<std::vector<double>>& tables) {
  if (tables.empty()) throw std::invalid_argument("population must be nonempty");
  std::vector<std::span<const double>> views(tables.begin(), tables.end());
  return consensus_distance_impl(views, tables.front().size());
}

double nearest_individual_distance(std::span<const KnowledgeFunction> functions) {
  require_nonempty(functions);
  const std::size_t n = functions.size();
  std::vector<double> sq(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = kernels::squared_distance(functions[i].values(), functions[j].values());
      sq[i * n + j] = d;
      sq[j * n + i] = d;
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += sq[i * n + j];
    best = std::min(best, total);
  }
  return std::sqrt(best);
}

double delta_i(const KnowledgeFunction& initial, const KnowledgeFunction& equilibrium) {
  return distance_C(initial, equilibrium);
}

double relative_entropy(std::span<const KnowledgeFunction> functions, const KnowledgeFunction& target) {
  require_nonempty(functions);
  if (target.values().size() != functions.front().values().size()) {
    throw std::invalid_argument("relative_entropy: target shape does not match the population");
  }
  const auto num_e = static_cast<double>(target.size());
  double total = 0.0;
  for (const auto& f : functions) total += std::sqrt(kernels::squared_distance(f.values(), target.values()) / num_e);
  return -total / static_cast<double>(functions.size());
}

void MetricTrace::compute_means() {
  struct Acc {
    double c = 0, n = 0, re = 0;
    std::size_t count = 0;
  };
  std::map<std::uint64_t, Acc> by_t;
  for (const auto& r : rows) {
    auto& a = by_t[r.t];
    a.c += r.d_consensus;
    a.n += r.d_nearest;
    a.re += r.relative_entropy;
    ++a.count;
  }
  means.clear();
  means.reserve(by_t.size());
  for (const auto& [t, a] : by_t) {
    const auto k = static_cast<double>(a.count);
    means.push_back({t, a.c / k, a.n / k, a.re / k});
  }
}

std::vector<MetricRow> MetricTrace::replicate_rows(std::size_t replicate) const {
  std::vector<MetricRow> out;
  std::copy_if(rows.begin(), rows.end(), std::back_inserter(out),
               [replicate](const MetricRow& r) { return r.replicate == replicate; });
  return out;
}

std::vector<double> MetricTrace::mean_series(MetricVariant v) const {
  std::vector<double> out;
  out.reserve(means.size());
  for (const auto& m : means) out.push_back(m.distance(v));
  return out;
}

MetricRow measure(const PopulationState& state, std::size_t replicate, const KnowledgeFunction* target) {
  MetricRow row;
  row.t = state.t;
  row.replicate = replicate;
  row.d_consensus = consensus_distance(state);
  row.d_nearest = nearest_individual_distance(state);
  row.relative_entropy = target != nullptr ? relative_entropy(state, *target)
                                           : std::numeric_limits<double>::quiet_NaN();
  return row;
}

}  // namespace epidyn

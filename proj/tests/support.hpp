#pragma once

// Shared fixtures and random generators for the test binaries.

#include <memory>
#include <random>
#include <vector>

#include "epidyn/influence.hpp"
#include "epidyn/knowledge.hpp"
#include "epidyn/likelihood.hpp"

namespace epidyn::testing {

// Flat vs round earth: E = {f1, f2, f3, r1, r2}, C = {0, F, R}.
struct EarthExample {
  std::shared_ptr<const KnowledgeSetting> setting;
  LikelihoodLandscape likelihood;
  std::vector<KnowledgeFunction> population;
};

inline EarthExample earth_example() {
  auto setting = std::make_shared<const KnowledgeSetting>(
      std::vector<std::vector<double>>{{1}, {2}, {3}, {4}, {5}},
      DiscreteConcepts{{"0", "F", "R"}, {{0.0}, {1.0}, {2.0}}});
  // columns: zero, F, R
  TabularLikelihood table{{{0.5, 1, 1}, {0.5, 1, 1}, {0.5, 1, 1}, {0.5, 0, 1}, {0.5, 0, 1}}};
  LikelihoodLandscape likelihood(table, *setting);
  constexpr double F = 1.0, R = 2.0;
  std::vector<KnowledgeFunction> pop{
      KnowledgeFunction(setting, {F, 0, 0, 0, 0}),
      KnowledgeFunction(setting, {F, 0, 0, F, 0}),
      KnowledgeFunction(setting, {R, 0, 0, R, 0}),
      KnowledgeFunction(setting, {F, 0, 0, R, 0}),
  };
  return {setting, likelihood, pop};
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = u(rng);
  return m;
}

inline Matrix random_stochastic(std::mt19937_64& rng, Eigen::Index n) {
  return normalize_rows(random_matrix(rng, n, 0.0, 1.0));
}

inline std::vector<KnowledgeFunction> random_population(std::mt19937_64& rng,
                                                        const std::shared_ptr<const KnowledgeSetting>& s,
                                                        std::size_t agents, double zero_prob = 0.0) {
  const auto& box = s->box();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<KnowledgeFunction> pop;
  for (std::size_t i = 0; i < agents; ++i) {
    std::vector<double> v;
    for (std::size_t e = 0; e < s->num_experiences(); ++e) {
      const bool zero = u(rng) < zero_prob;
      for (std::size_t k = 0; k < s->concept_dim(); ++k) {
        v.push_back(zero ? 0.0 : box.lo[k] + (box.hi[k] - box.lo[k]) * u(rng));
      }
    }
    pop.emplace_back(s, std::move(v));
  }
  return pop;
}

}  // namespace epidyn::testing

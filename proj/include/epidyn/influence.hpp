#pragma once

// Structure, credibility and social-learning matrices.
//
//   c~_ij = [1 / (1 + 1{i != j} * penalty_i(k_j))] * prod_{e : k_i(e) != 0} L(e, k_j(e))
//   c_ij  = max(c~_ij, c_min)
//   lambda_ij = gamma_ij c_ij / sum_l gamma_il c_il   (row of 1/N when the sum vanishes)
//
// penalty_i(k_j) is the parsimony measure of the concepts k_j uses on the
// experiences agent i has conceptualized. Experiences agent i has not
// conceptualized do not enter the product.

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "epidyn/knowledge.hpp"
#include "epidyn/likelihood.hpp"

namespace epidyn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kRowSumTolerance = 1e-12;
// Row sums at or below this are treated as zero (products of many likelihoods underflow).
inline constexpr double kZeroRowThreshold = 1e-300;

/// gamma_ij: structural influence of j on i. Square and nonnegative.
class StructureMatrix {
 public:
  explicit StructureMatrix(Matrix entries);
  const Matrix& entries() const { return entries_; }
  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }

 private:
  Matrix entries_;
};

/// c_ij in [c_min, 1].
class CredibilityMatrix {
 public:
  CredibilityMatrix(Matrix entries, double c_min);
  const Matrix& entries() const { return entries_; }
  double c_min() const { return c_min_; }
  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }

 private:
  Matrix entries_;
  double c_min_;
};

/// Row-stochastic lambda_ij.
class SocialLearningMatrix {
 public:
  explicit SocialLearningMatrix(Matrix entries);
  const Matrix& entries() const { return entries_; }
  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

 private:
  Matrix entries_;
};

CredibilityMatrix compute_credibility(std::span<const KnowledgeFunction> population,
                                      const LikelihoodLandscape& likelihood, double c_min);

SocialLearningMatrix compute_social_learning(const StructureMatrix& gamma, const CredibilityMatrix& credibility);

/// Divides each nonzero row by its sum; zero rows become uniform. Requires
/// nonnegative entries.
Matrix normalize_rows(const Matrix& m);

bool is_row_stochastic(const Matrix& m, double tolerance = kRowSumTolerance);

/// Exact action of an influence matrix on a population of tabular functions:
/// result_i = sum_j a_ij f_j. Values may leave a discrete concept set, so the
/// result is returned as raw tables.
std::vector<std::vector<double>> apply_influence(const Matrix& a, std::span<const KnowledgeFunction> population);

}  // namespace epidyn

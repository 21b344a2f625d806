#include "epidyn/influence.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "epidyn/kernels.hpp"

namespace epidyn {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument(std::string(what) + " must be a nonempty square matrix");
  }
}

std::span<const double> row_span(const Matrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

}  // namespace

StructureMatrix::StructureMatrix(Matrix entries) : entries_(std::move(entries)) {
  require_square(entries_, "structure matrix");
  if ((entries_.array() < 0.0).any() || !entries_.allFinite()) {
    throw std::invalid_argument("structure matrix entries must be finite and >= 0");
  }
}

CredibilityMatrix::CredibilityMatrix(Matrix entries, double c_min) : entries_(std::move(entries)), c_min_(c_min) {
  require_square(entries_, "credibility matrix");
  if (!(c_min_ >= 0.0 && c_min_ <= 1.0)) throw std::invalid_argument("c_min must lie in [0, 1]");
  if ((entries_.array() < c_min_).any() || (entries_.array() > 1.0).any()) {
    throw std::invalid_argument("credibility entries must lie in [c_min, 1]");
  }
}

SocialLearningMatrix::SocialLearningMatrix(Matrix entries) : entries_(std::move(entries)) {
  require_square(entries_, "social learning matrix");
  if (!is_row_stochastic(entries_)) throw std::invalid_argument("social learning matrix must be row-stochastic");
}

bool is_row_stochastic(const Matrix& m, double tolerance) {
  if ((m.array() < 0.0).any() || !m.allFinite()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (std::abs(kernels::sum(row_span(m, i)) - 1.0) > tolerance) return false;
  }
  return true;
}

CredibilityMatrix compute_credibility(std::span<const KnowledgeFunction> population,
                                      const LikelihoodLandscape& likelihood, double c_min) {
  const std::size_t n = population.size();
  if (n == 0) throw std::invalid_argument("population must be nonempty");
  if (!(c_min >= 0.0 && c_min <= 1.0)) throw std::invalid_argument("c_min must lie in [0, 1]");
  const std::size_t num_e = population.front().size();
  for (const auto& k : population) {
    if (k.size() != num_e) throw std::invalid_argument("population functions differ in |E|");
  }

  // log L(e, k_j(e)), computed once per (j, e).
  std::vector<double> log_l(n * num_e);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t e = 0; e < num_e; ++e) log_l[j * num_e + e] = likelihood.log_eval(e, population[j].evaluate(e));
  }

  Matrix c(n, n);
  std::vector<std::size_t> support;
  support.reserve(num_e);
  for (std::size_t i = 0; i < n; ++i) {
    support.clear();
    for (std::size_t e = 0; e < num_e; ++e) {
      if (population[i].conceptualizes(e)) support.push_back(e);
    }
    for (std::size_t j = 0; j < n; ++j) {
      double log_product = 0.0;
      for (std::size_t e : support) {
        log_product += log_l[j * num_e + e];
        if (log_product == -std::numeric_limits<double>::infinity()) break;
      }
      const double product = std::exp(log_product);
      const double penalty = (i == j || support.empty()) ? 0.0 : distinct_nonzero_concepts(population[j], population[i]);
      const double raw = product / (1.0 + penalty);
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::max(std::min(raw, 1.0), c_min);
    }
  }
  return CredibilityMatrix(std::move(c), c_min);
}

SocialLearningMatrix compute_social_learning(const StructureMatrix& gamma, const CredibilityMatrix& credibility) {
  if (gamma.size() != credibility.size()) {
    throw std::invalid_argument("structure and credibility matrices differ in size");
  }
  const Matrix weighted = gamma.entries().cwiseProduct(credibility.entries());
  return SocialLearningMatrix(normalize_rows(weighted));
}

Matrix normalize_rows(const Matrix& m) {
  require_square(m, "matrix");
  if ((m.array() < 0.0).any()) throw std::invalid_argument("normalize_rows requires nonnegative entries");
  const auto n = m.rows();
  Matrix out = m;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::span<double> row{out.data() + i * n, static_cast<std::size_t>(n)};
    const double s = kernels::sum(row);
    if (s > kZeroRowThreshold) {
      for (double& v : row) v /= s;
    } else {
      out.row(i).setConstant(1.0 / static_cast<double>(n));
    }
  }
  return out;
}

std::vector<std::vector<double>> apply_influence(const Matrix& a, std::span<const KnowledgeFunction> population) {
  const auto n = static_cast<std::size_t>(a.rows());
  if (a.rows() != a.cols() || n != population.size()) {
    throw std::invalid_argument("apply_influence: matrix size does not match population");
  }
  const std::size_t len = population.front().values().size();
  std::vector<std::vector<double>> out(n, std::vector<double>(len, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (w != 0.0) kernels::axpy(w, population[j].values(), out[i]);
    }
  }
  return out;
}

}  // namespace epidyn

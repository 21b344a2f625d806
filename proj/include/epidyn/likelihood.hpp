#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "epidyn/knowledge.hpp"

namespace epidyn {

/// L(e, c) = value for every nonzero concept.
struct ConstantLikelihood {
  double value = 1.0;
};

/// L(e, c) = exp(-||c - center||^2 / width), independent of e.
struct GaussianPeakLikelihood {
  std::vector<double> center;
  double width = 1.0;
};

/// L(e, c) = table[e][index of c] over a discrete concept set. Column 0 (the
/// zero concept) is ignored.
struct TabularLikelihood {
  std::vector<std::vector<double>> table;
};

/// How well a concept explains an experience, in [0, 1]. The zero concept
/// always evaluates to exactly 1/2.
class LikelihoodLandscape {
 public:
  using Variant = std::variant<ConstantLikelihood, GaussianPeakLikelihood, TabularLikelihood>;

  /// Validates the variant against the setting. Throws std::invalid_argument.
  LikelihoodLandscape(Variant variant, const KnowledgeSetting& setting);

  static constexpr double kZeroConceptLikelihood = 0.5;

  double eval(std::size_t e, std::span<const double> point) const;

  /// ln L(e, c); -infinity for exact zeros.
  double log_eval(std::size_t e, std::span<const double> point) const;

  const Variant& variant() const { return variant_; }
  std::string describe() const;

 private:
  Variant variant_;
  // Discrete points, copied for tabular lookups.
  std::vector<std::vector<double>> discrete_points_;
};

}  // namespace epidyn

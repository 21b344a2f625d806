#pragma once

// Experience and concept spaces, tabular knowledge-like functions and the
// base concept-space distance.
//
// Concept points are real vectors of dimension l. The zero concept (the
// origin) marks an experience the agent has not conceptualized. Discrete
// concept sets map each label to a fixed point, label 0 being the origin, so
// one distance implementation serves both discrete and box-valued concepts.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace epidyn {

/// Finite list of labelled concept points. Index 0 is the zero concept.
struct DiscreteConcepts {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> points;
};

/// Axis-aligned box [lo, hi] containing the origin.
struct BoxConcepts {
  std::vector<double> lo;
  std::vector<double> hi;
};

using ConceptSpace = std::variant<DiscreteConcepts, BoxConcepts>;

class KnowledgeSetting {
 public:
  /// Throws std::invalid_argument when the experience list is empty, holds
  /// duplicates or ragged points, or the concept space does not contain 0.
  KnowledgeSetting(std::vector<std::vector<double>> experiences, ConceptSpace concepts);

  /// E = {1, ..., count} as one-dimensional points.
  static std::shared_ptr<const KnowledgeSetting> integer_line(std::size_t count, ConceptSpace concepts);

  std::size_t num_experiences() const { return experiences_.size(); }
  std::size_t experience_dim() const { return experience_dim_; }
  std::size_t concept_dim() const { return concept_dim_; }

  std::span<const double> experience(std::size_t e) const;
  const std::vector<std::vector<double>>& experiences() const { return experiences_; }

  const ConceptSpace& concepts() const { return concepts_; }
  bool is_box() const { return std::holds_alternative<BoxConcepts>(concepts_); }
  const BoxConcepts& box() const;
  const DiscreteConcepts& discrete() const;

  /// Membership in C; discrete membership is exact equality with a listed point.
  bool contains(std::span<const double> point) const;

  /// Index of a discrete concept point, or npos.
  std::size_t discrete_index(std::span<const double> point) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  friend bool operator==(const KnowledgeSetting& a, const KnowledgeSetting& b);

 private:
  std::vector<std::vector<double>> experiences_;
  ConceptSpace concepts_;
  std::size_t experience_dim_ = 0;
  std::size_t concept_dim_ = 0;
};

bool operator==(const DiscreteConcepts& a, const DiscreteConcepts& b);
bool operator==(const BoxConcepts& a, const BoxConcepts& b);

bool is_zero_concept(std::span<const double> point);

/// Tabular map from experience indices to concept points, stored row-major
/// (one row of concept_dim values per experience).
class KnowledgeFunction {
 public:
  /// Throws std::invalid_argument when the table has the wrong length or a
  /// value lies outside the concept space.
  KnowledgeFunction(std::shared_ptr<const KnowledgeSetting> setting, std::vector<double> values);

  static KnowledgeFunction zero(std::shared_ptr<const KnowledgeSetting> setting);
  static KnowledgeFunction constant(std::shared_ptr<const KnowledgeSetting> setting,
                                    std::span<const double> point);
  static KnowledgeFunction constant(std::shared_ptr<const KnowledgeSetting> setting, double value);

  const KnowledgeSetting& setting() const { return *setting_; }
  const std::shared_ptr<const KnowledgeSetting>& setting_ptr() const { return setting_; }

  std::size_t size() const { return setting_->num_experiences(); }
  std::size_t concept_dim() const { return setting_->concept_dim(); }
  std::span<const double> values() const { return values_; }

  /// Concept assigned to experience e. Throws std::out_of_range.
  std::span<const double> evaluate(std::size_t e) const;

  /// True iff k(e) is not the zero concept. Throws std::out_of_range.
  bool conceptualizes(std::size_t e) const;

  friend bool operator==(const KnowledgeFunction& a, const KnowledgeFunction& b) {
    return a.values_ == b.values_;
  }

 private:
  std::shared_ptr<const KnowledgeSetting> setting_;
  std::vector<double> values_;
};

/// Parsimony measure of the concepts k uses.
///
/// Discrete concepts: (number of distinct nonzero concepts - 1), floored at 0.
/// Box concepts: Lebesgue measure of the convex hull of the distinct nonzero
/// values (0 with at most one distinct value). Exact for l = 1 and l = 2;
/// throws std::domain_error for l >= 3.
double distinct_nonzero_concepts(const KnowledgeFunction& k);

/// Same measure, restricted to the experiences `observer` conceptualizes.
double distinct_nonzero_concepts(const KnowledgeFunction& k, const KnowledgeFunction& observer);

/// sqrt(sum_e ||f(e) - g(e)||^2). Throws std::invalid_argument on mismatched shapes.
double distance_C(const KnowledgeFunction& f, const KnowledgeFunction& g);

}  // namespace epidyn

#include "epidyn/knowledge.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "epidyn/kernels.hpp"

namespace epidyn {

namespace {

std::size_t validate_concepts(const ConceptSpace& concepts) {
  if (const auto* d = std::get_if<DiscreteConcepts>(&concepts)) {
    if (d->points.empty()) throw std::invalid_argument("discrete concept set is empty");
    if (d->labels.size() != d->points.size()) {
      throw std::invalid_argument("discrete concepts: label count does not match point count");
    }
    const std::size_t dim = d->points.front().size();
    if (dim == 0) throw std::invalid_argument("concept dimension must be >= 1");
    for (const auto& p : d->points) {
      if (p.size() != dim) throw std::invalid_argument("discrete concepts: ragged concept points");
    }
    if (!is_zero_concept(d->points.front())) {
      throw std::invalid_argument("discrete concepts: index 0 must be the zero concept (origin)");
    }
    for (std::size_t a = 0; a < d->points.size(); ++a) {
      for (std::size_t b = a + 1; b < d->points.size(); ++b) {
        if (d->points[a] == d->points[b]) {
          throw std::invalid_argument("discrete concepts: duplicate concept point '" + d->labels[b] + "'");
        }
      }
    }
    return dim;
  }
  const auto& box = std::get<BoxConcepts>(concepts);
  if (box.lo.empty() || box.lo.size() != box.hi.size()) {
    throw std::invalid_argument("box concepts: lo/hi must be nonempty and of equal length");
  }
  for (std::size_t k = 0; k < box.lo.size(); ++k) {
    if (!(box.lo[k] <= 0.0 && 0.0 <= box.hi[k])) {
      throw std::invalid_argument("box concepts: the box must contain the zero concept (lo <= 0 <= hi)");
    }
  }
  return box.lo.size();
}

double cross(const std::vector<double>& o, const std::vector<double>& a, const std::vector<double>& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Area of the convex hull of planar points (monotone chain + shoelace).
double hull_area(std::vector<std::vector<double>> pts) {
  if (pts.size() < 3) return 0.0;
  std::sort(pts.begin(), pts.end());
  std::vector<std::vector<double>> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  double twice = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    twice += a[0] * b[1] - a[1] * b[0];
  }
  return std::abs(twice) / 2.0;
}

double concept_measure(const KnowledgeFunction& k, const KnowledgeFunction* observer) {
  const std::size_t dim = k.concept_dim();
  std::vector<std::vector<double>> used;
  for (std::size_t e = 0; e < k.size(); ++e) {
    if (observer != nullptr && !observer->conceptualizes(e)) continue;
    const auto c = k.evaluate(e);
    if (is_zero_concept(c)) continue;
    std::vector<double> point(c.begin(), c.end());
    if (std::find(used.begin(), used.end(), point) == used.end()) used.push_back(std::move(point));
  }
  if (!k.setting().is_box()) {
    return used.empty() ? 0.0 : static_cast<double>(used.size() - 1);
  }
  if (used.size() <= 1) return 0.0;
  if (dim == 1) {
    const auto [lo, hi] = std::minmax_element(used.begin(), used.end());
    return (*hi)[0] - (*lo)[0];
  }
  if (dim == 2) return hull_area(std::move(used));
  throw std::domain_error("concept-range measure is implemented for concept dimension 1 and 2 only");
}

}  // namespace

bool is_zero_concept(std::span<const double> point) {
  return std::all_of(point.begin(), point.end(), [](double v) { return v == 0.0; });
}

bool operator==(const DiscreteConcepts& a, const DiscreteConcepts& b) {
  return a.labels == b.labels && a.points == b.points;
}

bool operator==(const BoxConcepts& a, const BoxConcepts& b) { return a.lo == b.lo && a.hi == b.hi; }

bool operator==(const KnowledgeSetting& a, const KnowledgeSetting& b) {
  return a.experiences_ == b.experiences_ && a.concepts_ == b.concepts_;
}

KnowledgeSetting::KnowledgeSetting(std::vector<std::vector<double>> experiences, ConceptSpace concepts)
    : experiences_(std::move(experiences)), concepts_(std::move(concepts)) {
  if (experiences_.empty()) throw std::invalid_argument("experience list must be nonempty");
  experience_dim_ = experiences_.front().size();
  if (experience_dim_ == 0) throw std::invalid_argument("experience dimension must be >= 1");
  for (const auto& e : experiences_) {
    if (e.size() != experience_dim_) throw std::invalid_argument("ragged experience points");
  }
  auto sorted = experiences_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("duplicate experience points");
  }
  concept_dim_ = validate_concepts(concepts_);
}

std::shared_ptr<const KnowledgeSetting> KnowledgeSetting::integer_line(std::size_t count,
                                                                       ConceptSpace concepts) {
  std::vector<std::vector<double>> exps;
  exps.reserve(count);
  for (std::size_t e = 1; e <= count; ++e) exps.push_back({static_cast<double>(e)});
  return std::make_shared<const KnowledgeSetting>(std::move(exps), std::move(concepts));
}

std::span<const double> KnowledgeSetting::experience(std::size_t e) const {
  if (e >= experiences_.size()) throw std::out_of_range("experience index out of range");
  return experiences_[e];
}

const BoxConcepts& KnowledgeSetting::box() const {
  const auto* b = std::get_if<BoxConcepts>(&concepts_);
  if (b == nullptr) throw std::logic_error("setting has discrete concepts, not a box");
  return *b;
}

const DiscreteConcepts& KnowledgeSetting::discrete() const {
  const auto* d = std::get_if<DiscreteConcepts>(&concepts_);
  if (d == nullptr) throw std::logic_error("setting has box concepts, not a discrete set");
  return *d;
}

bool KnowledgeSetting::contains(std::span<const double> point) const {
  if (point.size() != concept_dim_) return false;
  if (const auto* b = std::get_if<BoxConcepts>(&concepts_)) {
    for (std::size_t k = 0; k < concept_dim_; ++k) {
      if (!(b->lo[k] <= point[k] && point[k] <= b->hi[k])) return false;
    }
    return true;
  }
  return discrete_index(point) != npos;
}

std::size_t KnowledgeSetting::discrete_index(std::span<const double> point) const {
  const auto& pts = discrete().points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (std::equal(pts[i].begin(), pts[i].end(), point.begin(), point.end())) return i;
  }
  return npos;
}

KnowledgeFunction::KnowledgeFunction(std::shared_ptr<const KnowledgeSetting> setting,
                                     std::vector<double> values)
    : setting_(std::move(setting)), values_(std::move(values)) {
  if (!setting_) throw std::invalid_argument("knowledge function needs a setting");
  const std::size_t dim = setting_->concept_dim();
  if (values_.size() != setting_->num_experiences() * dim) {
    throw std::invalid_argument("knowledge function table length " + std::to_string(values_.size()) +
                                " does not match |E| * l = " +
                                std::to_string(setting_->num_experiences() * dim));
  }
  for (std::size_t e = 0; e < setting_->num_experiences(); ++e) {
    if (!setting_->contains(evaluate(e))) {
      throw std::invalid_argument("knowledge function value at experience " + std::to_string(e) +
                                  " lies outside the concept space");
    }
  }
}

KnowledgeFunction KnowledgeFunction::zero(std::shared_ptr<const KnowledgeSetting> setting) {
  const std::size_t n = setting->num_experiences() * setting->concept_dim();
  return KnowledgeFunction(std::move(setting), std::vector<double>(n, 0.0));
}

KnowledgeFunction KnowledgeFunction::constant(std::shared_ptr<const KnowledgeSetting> setting,
                                              std::span<const double> point) {
  std::vector<double> values;
  values.reserve(setting->num_experiences() * point.size());
  for (std::size_t e = 0; e < setting->num_experiences(); ++e) {
    values.insert(values.end(), point.begin(), point.end());
  }
  return KnowledgeFunction(std::move(setting), std::move(values));
}

KnowledgeFunction KnowledgeFunction::constant(std::shared_ptr<const KnowledgeSetting> setting, double value) {
  const double v[1] = {value};
  return constant(std::move(setting), std::span<const double>(v, 1));
}

std::span<const double> KnowledgeFunction::evaluate(std::size_t e) const {
  if (e >= setting_->num_experiences()) throw std::out_of_range("experience index out of range");
  const std::size_t dim = setting_->concept_dim();
  return std::span<const double>(values_).subspan(e * dim, dim);
}

bool KnowledgeFunction::conceptualizes(std::size_t e) const { return !is_zero_concept(evaluate(e)); }

double distinct_nonzero_concepts(const KnowledgeFunction& k) { return concept_measure(k, nullptr); }

double distinct_nonzero_concepts(const KnowledgeFunction& k, const KnowledgeFunction& observer) {
  if (observer.size() != k.size()) throw std::invalid_argument("observer and function differ in |E|");
  return concept_measure(k, &observer);
}

double distance_C(const KnowledgeFunction& f, const KnowledgeFunction& g) {
  if (f.values().size() != g.values().size()) {
    throw std::invalid_argument("distance_C: functions have mismatched lengths");
  }
  return std::sqrt(kernels::squared_distance(f.values(), g.values()));
}

}  // namespace epidyn

#include "epidyn/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace epidyn {

namespace {

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

LikelihoodLandscape::LikelihoodLandscape(Variant variant, const KnowledgeSetting& setting)
    : variant_(std::move(variant)) {
  if (const auto* c = std::get_if<ConstantLikelihood>(&variant_)) {
    if (!in_unit_interval(c->value)) throw std::invalid_argument("constant likelihood must lie in [0, 1]");
  } else if (const auto* g = std::get_if<GaussianPeakLikelihood>(&variant_)) {
    if (g->center.size() != setting.concept_dim()) {
      throw std::invalid_argument("gaussian likelihood center has the wrong dimension");
    }
    if (!(g->width > 0.0)) throw std::invalid_argument("gaussian likelihood width must be > 0");
  } else {
    const auto& t = std::get<TabularLikelihood>(variant_);
    if (setting.is_box()) throw std::invalid_argument("tabular likelihood needs discrete concepts");
    discrete_points_ = setting.discrete().points;
    if (t.table.size() != setting.num_experiences()) {
      throw std::invalid_argument("tabular likelihood needs one row per experience");
    }
    for (const auto& row : t.table) {
      if (row.size() != discrete_points_.size()) {
        throw std::invalid_argument("tabular likelihood needs one column per concept");
      }
      if (!std::all_of(row.begin(), row.end(), in_unit_interval)) {
        throw std::invalid_argument("tabular likelihood entries must lie in [0, 1]");
      }
    }
  }
}

double LikelihoodLandscape::eval(std::size_t e, std::span<const double> point) const {
  if (is_zero_concept(point)) return kZeroConceptLikelihood;
  if (const auto* c = std::get_if<ConstantLikelihood>(&variant_)) return c->value;
  if (const auto* g = std::get_if<GaussianPeakLikelihood>(&variant_)) {
    double sq = 0.0;
    for (std::size_t k = 0; k < point.size(); ++k) {
      const double d = point[k] - g->center[k];
      sq += d * d;
    }
    return std::exp(-sq / g->width);
  }
  const auto& t = std::get<TabularLikelihood>(variant_);
  for (std::size_t i = 0; i < discrete_points_.size(); ++i) {
    const auto& p = discrete_points_[i];
    if (std::equal(p.begin(), p.end(), point.begin(), point.end())) return t.table.at(e)[i];
  }
  throw std::invalid_argument("tabular likelihood: concept is not a listed point");
}

double LikelihoodLandscape::log_eval(std::size_t e, std::span<const double> point) const {
  if (!is_zero_concept(point)) {
    if (const auto* g = std::get_if<GaussianPeakLikelihood>(&variant_)) {
      double sq = 0.0;
      for (std::size_t k = 0; k < point.size(); ++k) {
        const double d = point[k] - g->center[k];
        sq += d * d;
      }
      return -sq / g->width;
    }
  }
  const double v = eval(e, point);
  return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
}

std::string LikelihoodLandscape::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (const auto* c = std::get_if<ConstantLikelihood>(&variant_)) {
    os << "constant(" << c->value << ")";
  } else if (const auto* g = std::get_if<GaussianPeakLikelihood>(&variant_)) {
    os << "gaussian_peak(center=[";
    for (std::size_t k = 0; k < g->center.size(); ++k) os << (k ? "," : "") << g->center[k];
    os << "], width=" << g->width << ")";
  } else {
    os << "tabular";
  }
  return os.str();
}

}  // namespace epidyn

#include "epidyn/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

namespace epidyn {

namespace {

using BoolMatrix = std::vector<std::vector<char>>;

void require_square(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw std::invalid_argument("expected a nonempty square matrix");
}

BoolMatrix positivity(const Matrix& a) {
  const auto n = static_cast<std::size_t>(a.rows());
  BoolMatrix p(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) p[i][j] = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.0;
  }
  return p;
}

BoolMatrix boolean_product(const BoolMatrix& x, const BoolMatrix& y) {
  const std::size_t n = x.size();
  BoolMatrix out(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < n; ++l) {
      if (!x[i][l]) continue;
      for (std::size_t j = 0; j < n; ++j) out[i][j] |= y[l][j];
    }
  }
  return out;
}

}  // namespace

bool communicates(const Matrix& a, std::size_t i, std::size_t j) {
  require_square(a);
  const auto n = static_cast<std::size_t>(a.rows());
  if (i >= n || j >= n) throw std::out_of_range("communicates: index out of range");
  const BoolMatrix p = positivity(a);
  // BFS over paths of length >= 1: seed with the direct successors of i.
  std::vector<char> seen(n, 0);
  std::deque<std::size_t> queue;
  for (std::size_t v = 0; v < n; ++v) {
    if (p[i][v]) {
      seen[v] = 1;
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    if (u == j) return true;
    for (std::size_t v = 0; v < n; ++v) {
      if (p[u][v] && !seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
  }
  return false;
}

Primitivity is_primitive(const Matrix& a) {
  require_square(a);
  if ((a.array() < 0.0).any()) throw std::invalid_argument("is_primitive: matrix has negative entries");
  const auto n = static_cast<std::size_t>(a.rows());
  const BoolMatrix base = positivity(a);
  BoolMatrix power = base;
  const std::size_t cutoff = (n - 1) * (n - 1) + 1;
  for (std::size_t k = 1; k <= cutoff; ++k) {
    const bool all_positive = std::all_of(power.begin(), power.end(), [](const std::vector<char>& row) {
      return std::all_of(row.begin(), row.end(), [](char v) { return v != 0; });
    });
    if (all_positive) return {true, k};
    if (k < cutoff) power = boolean_product(power, base);
  }
  return {false, std::nullopt};
}

double entry_lower_bound(const StructureMatrix& gamma, double c_min) {
  const auto n = static_cast<double>(gamma.size());
  const double m = gamma.entries().minCoeff();
  if (!(m > 0.0)) throw BoundInapplicable("entry lower bound requires a strictly positive structure matrix");
  if (!(c_min > 0.0)) throw BoundInapplicable("entry lower bound requires c_min > 0");
  if (!(n * m < 1.0)) {
    throw BoundInapplicable("entry lower bound requires N * min(gamma) < 1 (got " + std::to_string(n * m) + ")");
  }
  return std::min(1.0 / n, m * c_min / (n * (1.0 - n * m)));
}

double dobrushin_coefficient(const Matrix& a) {
  require_square(a);
  if (!is_row_stochastic(a, 1e-9)) throw std::invalid_argument("dobrushin_coefficient: matrix is not row-stochastic");
  const auto n = a.rows();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = i + 1; k < n; ++k) worst = std::max(worst, (a.row(i) - a.row(k)).cwiseAbs().sum());
  }
  return std::clamp(worst / 2.0, 0.0, 1.0);
}

std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
  require_square(a);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(a), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed to converge");
  const auto& ev = solver.eigenvalues();
  std::vector<std::complex<double>> out(ev.data(), ev.data() + ev.size());
  std::stable_sort(out.begin(), out.end(),
                   [](const std::complex<double>& x, const std::complex<double>& y) { return std::abs(x) > std::abs(y); });
  return out;
}

double second_modulus(const Matrix& a) {
  const auto ev = eigenvalues(a);
  return ev.size() < 2 ? 0.0 : std::abs(ev[1]);
}

SpectralReport analyze(const Matrix& a) {
  SpectralReport r;
  const Primitivity p = is_primitive(a);
  r.is_primitive = p.primitive;
  r.primitivity_exponent = p.exponent;
  r.second_modulus = second_modulus(a);
  r.dobrushin = dobrushin_coefficient(a);
  r.min_entry = a.minCoeff();
  return r;
}

double covering_number_log_bound(const KnowledgeSetting& setting, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("covering_number_log_bound: eps must be > 0");
  const BoxConcepts& box = setting.box();
  double per_experience = 0.0;
  for (std::size_t k = 0; k < box.lo.size(); ++k) {
    const double balls = std::max(1.0, std::ceil((box.hi[k] - box.lo[k]) / (2.0 * eps)));
    per_experience += std::log(balls);
  }
  return static_cast<double>(setting.num_experiences()) * per_experience;
}

std::uint64_t required_sample_size(const SampleSizeInputs& in, const KnowledgeSetting& setting) {
  if (!(in.alpha_star > 0.0 && in.alpha_star < 1.0)) throw std::invalid_argument("alpha_star must lie in (0, 1)");
  if (!(in.delta > 0.0 && in.delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(in.initial_distance > 0.0)) throw std::invalid_argument("initial distance must be > 0");
  if (!(in.bound_m > 0.0)) throw std::invalid_argument("M must be > 0");
  if (in.agents == 0) throw std::invalid_argument("N must be >= 1");
  const double n = static_cast<double>(in.agents);
  const double t = static_cast<double>(std::max<std::uint64_t>(in.t, 1));
  // ln eta kept separately so large t does not underflow eta before the check.
  const double log_eta = 2.0 * static_cast<double>(in.t) * std::log(in.alpha_star) +
                         2.0 * std::log(in.initial_distance) - std::log(n);
  const double eta = std::exp(log_eta);
  if (!(eta > 0.0)) throw std::overflow_error("required sample size overflows (eta underflowed)");
  const double log_terms = covering_number_log_bound(setting, eta / (24.0 * in.bound_m)) + std::log(t * n) +
                           std::log(1.0 / in.delta);
  const double m = std::ceil(288.0 * in.bound_m * in.bound_m / eta * log_terms);
  if (!(m < 9.2e18)) throw std::overflow_error("required sample size does not fit in 64 bits");
  return static_cast<std::uint64_t>(std::max(m, 1.0));
}

}  // namespace epidyn

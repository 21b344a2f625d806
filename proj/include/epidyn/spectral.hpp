#pragma once

// Graph and spectral analysis of influence matrices, plus the sample-size
// calculator for the high-probability convergence bound.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "epidyn/influence.hpp"
#include "epidyn/knowledge.hpp"

namespace epidyn {

/// Raised when the entry lower bound's preconditions fail; callers fall back
/// to the exact minimum entry.
class BoundInapplicable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Primitivity {
  bool primitive = false;
  std::optional<std::size_t> exponent;
};

struct SpectralReport {
  bool is_primitive = false;
  std::optional<std::size_t> primitivity_exponent;
  double second_modulus = 0.0;
  double dobrushin = 0.0;
  double min_entry = 0.0;
};

/// Directed path of length >= 1 from i to j through strictly positive entries.
bool communicates(const Matrix& a, std::size_t i, std::size_t j);

/// Tests A^k > 0 for k = 1 .. (N-1)^2 + 1 (Wielandt). Throws on negative entries.
Primitivity is_primitive(const Matrix& a);

/// min(1/N, m c_min / (N (1 - N m))) with m the minimum entry of gamma.
/// Throws BoundInapplicable unless gamma > 0, c_min > 0 and N m < 1.
double entry_lower_bound(const StructureMatrix& gamma, double c_min);

/// delta(A) = 1/2 max_{i,i'} sum_j |a_ij - a_i'j|. Throws std::invalid_argument
/// for matrices that are not row-stochastic (tolerance 1e-9).
double dobrushin_coefficient(const Matrix& a);

/// All eigenvalues, sorted by nonincreasing modulus.
std::vector<std::complex<double>> eigenvalues(const Matrix& a);

/// Modulus of the second eigenvalue in nonincreasing-modulus order (0 for N = 1).
double second_modulus(const Matrix& a);

SpectralReport analyze(const Matrix& a);

/// Sup-norm covering bound for box-valued tables:
/// ln N(F, eps) <= |E| * sum_k ln ceil((hi_k - lo_k) / (2 eps)).
double covering_number_log_bound(const KnowledgeSetting& setting, double eps);

struct SampleSizeInputs {
  std::uint64_t t = 0;
  std::size_t agents = 1;
  double bound_m = 1.0;       // sup ||f(e) - c||
  double alpha_star = 0.5;    // contraction rate, in (0, 1)
  double delta = 0.1;         // failure probability, in (0, 1)
  double initial_distance = 1.0;
};

/// eta = alpha*^{2t} d0^2 / N;
/// m = ceil(288 M^2 / eta * (ln N(F, eta / 24M) + ln(max(t,1) N) + ln(1/delta))).
/// Throws std::invalid_argument on parameter-range violations and
/// std::overflow_error when m does not fit in 64 bits.
std::uint64_t required_sample_size(const SampleSizeInputs& in, const KnowledgeSetting& setting);

}  // namespace epidyn

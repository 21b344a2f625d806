#include <doctest.h>

#include <cmath>
#include <random>

#include "epidyn/spectral.hpp"
#include "support.hpp"

using namespace epidyn;

namespace {

using Bool = std::vector<std::vector<int>>;

Bool boolean(const Matrix& a) {
  const auto n = static_cast<std::size_t>(a.rows());
  Bool b(n, std::vector<int>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b[i][j] = a(i, j) > 0;
  return b;
}

Bool multiply(const Bool& x, const Bool& y) {
  const auto n = x.size();
  Bool z(n, std::vector<int>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (x[i][k])
        for (std::size_t j = 0; j < n; ++j) z[i][j] |= y[k][j];
  return z;
}

bool all_positive(const Bool& x) {
  for (const auto& r : x)
    for (int v : r)
      if (!v) return false;
  return true;
}

// Brute force: A^k > 0 for some k <= (N-1)^2 + 1.
std::optional<std::size_t> oracle_exponent(const Matrix& a) {
  const auto base = boolean(a);
  auto p = base;
  const std::size_t n = base.size(), limit = (n - 1) * (n - 1) + 1;
  for (std::size_t k = 1; k <= limit; ++k) {
    if (all_positive(p)) return k;
    p = multiply(p, base);
  }
  return std::nullopt;
}

// Positivity of sum_{k=1..N} A^k.
Bool oracle_reach(const Matrix& a) {
  const auto base = boolean(a);
  auto p = base, acc = base;
  for (std::size_t k = 2; k <= base.size(); ++k) {
    p = multiply(p, base);
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < p.size(); ++j) acc[i][j] |= p[i][j];
  }
  return acc;
}

void check_against_oracles(const Matrix& a) {
  const auto got = is_primitive(a);
  const auto want = oracle_exponent(a);
  CHECK(got.primitive == want.has_value());
  CHECK(got.exponent == want);
  const auto reach = oracle_reach(a);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.rows(); ++j)
      CHECK(communicates(a, static_cast<std::size_t>(i), static_cast<std::size_t>(j)) == static_cast<bool>(reach[i][j]));
}

const Matrix kA{{1, 1, 0, 0}, {1, 1, 1, 0}, {0, 1, 1, 1}, {0, 0, 1, 1}};
const Matrix kB{{0, 1}, {1, 0}};

}  // namespace

TEST_CASE("primitivity examples") {
  const auto a = is_primitive(kA);
  CHECK(a.primitive);
  CHECK(a.exponent == std::optional<std::size_t>(3));
  const auto b = is_primitive(kB);
  CHECK_FALSE(b.primitive);
  CHECK_FALSE(b.exponent.has_value());
  CHECK(is_primitive(Matrix::Ones(1, 1)).exponent == std::optional<std::size_t>(1));
  CHECK_THROWS_AS(is_primitive(Matrix{{1, -1}, {1, 1}}), std::invalid_argument);
}

TEST_CASE("communication examples") {
  CHECK(communicates(kA, 0, 3));
  CHECK(communicates(kB, 0, 1));
  CHECK(communicates(kB, 0, 0));
  CHECK_FALSE(communicates(Matrix::Zero(3, 3), 1, 1));
  CHECK_THROWS_AS(communicates(kB, 0, 2), std::out_of_range);
}

TEST_CASE("primitivity and communication agree with brute force on all 0/1 matrices up to N=3") {
  for (int n = 1; n <= 3; ++n) {
    const int cells = n * n;
    for (int mask = 0; mask < (1 << cells); ++mask) {
      Matrix a(n, n);
      for (int c = 0; c < cells; ++c) a(c / n, c % n) = (mask >> c) & 1;
      check_against_oracles(a);
    }
  }
}

TEST_CASE("primitivity and communication agree with brute force on random instances up to N=6") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> size(1, 6);
  std::uniform_real_distribution<double> density(0.1, 0.6);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = size(rng);
    std::bernoulli_distribution on(density(rng));
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = on(rng) ? 0.5 : 0.0;
    check_against_oracles(a);
  }
}

TEST_CASE("Wielandt extremal matrix reaches the bound") {
  // Cycle 1->2->...->n->1 plus the chord n->2: exponent (n-1)^2 + 1.
  for (int n = 2; n <= 7; ++n) {
    Matrix a = Matrix::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = 1;
    a(n - 1, 0) = 1;
    a(n - 1, 1) = 1;
    CHECK(is_primitive(a).exponent == std::optional<std::size_t>((n - 1) * (n - 1) + 1));
  }
}

TEST_CASE("Dobrushin coefficient") {
  CHECK(dobrushin_coefficient(Matrix::Constant(3, 3, 1.0 / 3.0)) == doctest::Approx(0.0));
  CHECK(dobrushin_coefficient(Matrix::Identity(2, 2)) == 1.0);
  CHECK_THROWS_AS(dobrushin_coefficient(Matrix{{0.5, 0.4}, {0.5, 0.5}}), std::invalid_argument);
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + trial % 6;
    const Matrix a = testing::random_stochastic(rng, n);
    const double d = dobrushin_coefficient(a);
    CHECK(d >= 0.0);
    CHECK(d <= 1.0 - n * a.minCoeff() + 1e-12);
    CHECK(second_modulus(a) <= d + 1e-9);
  }
}

TEST_CASE("second modulus examples") {
  CHECK(second_modulus(Matrix::Constant(2, 2, 0.5)) == doctest::Approx(0.0));
  CHECK(second_modulus(kB) == doctest::Approx(1.0));
  CHECK(second_modulus(Matrix{{0.9, 0.1}, {0.1, 0.9}}) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(second_modulus(Matrix::Ones(1, 1)) == 0.0);
}

TEST_CASE("stochastic matrix with the three-cycle pattern has complex eigenvalues") {
  const Matrix a{{0, 0.5, 0.5}, {0.75, 0, 0.25}, {0.125, 0.875, 0}};
  const auto ev = eigenvalues(a);
  bool complex_pair = false;
  for (const auto& z : ev) complex_pair = complex_pair || std::abs(z.imag()) > 1e-6;
  CHECK(complex_pair);
  CHECK(std::abs(ev.front() - std::complex<double>(1.0, 0.0)) < 1e-12);
}

TEST_CASE("eigenvalue 1 is simple when every pair communicates one way") {
  std::mt19937_64 rng(29);
  std::bernoulli_distribution on(0.5);
  int tested = 0;
  while (tested < 200) {
    const int n = 2 + tested % 5;
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = on(rng) ? std::uniform_real_distribution<double>(0.1, 1)(rng) : 0.0;
    a.diagonal().array() += 0.1;  // aperiodic
    bool hypothesis = true;
    for (int i = 0; i < n && hypothesis; ++i)
      for (int j = 0; j < n && hypothesis; ++j)
        hypothesis = communicates(a, i, j) || communicates(a, j, i);
    if (!hypothesis) continue;
    const Matrix s = normalize_rows(a);
    const auto ev = eigenvalues(s);
    int near_one = 0;
    for (const auto& z : ev) near_one += std::abs(z - 1.0) < 1e-8;
    CHECK(near_one == 1);
    ++tested;
  }
}

TEST_CASE("analyze fills the report") {
  const Matrix a = normalize_rows(kA);
  const auto r = analyze(a);
  CHECK(r.is_primitive);
  CHECK(r.primitivity_exponent == std::optional<std::size_t>(3));
  CHECK(r.second_modulus < 1.0);
  CHECK(r.dobrushin >= 0.0);
  CHECK(r.dobrushin <= 1.0);
  CHECK(r.min_entry == 0.0);
}

TEST_CASE("entry lower bound") {
  CHECK(entry_lower_bound(StructureMatrix(Matrix{{0.1, 0.9}, {0.9, 0.1}}), 0.1) == doctest::Approx(0.00625));
  CHECK_THROWS_AS(entry_lower_bound(StructureMatrix(Matrix::Constant(2, 2, 0.5)), 0.1), BoundInapplicable);
  CHECK_THROWS_AS(entry_lower_bound(StructureMatrix(Matrix{{0.1, 0.9}, {0.9, 0.1}}), 0.0), BoundInapplicable);
  CHECK_THROWS_AS(entry_lower_bound(StructureMatrix(Matrix{{0.0, 1.0}, {0.9, 0.1}}), 0.1), BoundInapplicable);
}

TEST_CASE("covering number bound") {
  auto s5 = KnowledgeSetting::integer_line(5, BoxConcepts{{-10}, {10}});
  auto s10 = KnowledgeSetting::integer_line(10, BoxConcepts{{-10}, {10}});
  CHECK(covering_number_log_bound(*s5, 1.0) == doctest::Approx(5.0 * std::log(10.0)));
  CHECK(covering_number_log_bound(*s5, 10.0) == 0.0);
  CHECK(covering_number_log_bound(*s5, 50.0) == 0.0);
  CHECK(covering_number_log_bound(*s10, 0.3) == doctest::Approx(2.0 * covering_number_log_bound(*s5, 0.3)));
  double prev = INFINITY;
  for (double eps = 0.01; eps < 20; eps *= 1.3) {
    const double v = covering_number_log_bound(*s5, eps);
    CHECK(v <= prev);
    prev = v;
  }
  CHECK_THROWS_AS(covering_number_log_bound(*s5, 0.0), std::invalid_argument);
}

TEST_CASE("required sample size") {
  auto s = KnowledgeSetting::integer_line(5, BoxConcepts{{-10}, {10}});
  SampleSizeInputs in{1, 2, 20.0, 0.9, 0.1, 8.944};
  // Independent plug-in evaluation of the same formula.
  CHECK(required_sample_size(in, *s) == 99617);
  in.t = 0;
  CHECK(required_sample_size(in, *s) == 77692);
  in.t = 5;
  CHECK(required_sample_size(in, *s) == 279386);
  in.t = 1;
  in.delta = 0.01;
  CHECK(required_sample_size(in, *s) == 107805);

  in.delta = 0.1;
  std::uint64_t prev = 0;
  for (std::uint64_t t = 0; t < 40; ++t) {
    in.t = t;
    const auto m = required_sample_size(in, *s);
    CHECK(m >= prev);
    prev = m;
  }
  in.t = 3;
  prev = 0;
  for (double d : {0.5, 0.2, 0.1, 0.01, 1e-4, 1e-8}) {
    in.delta = d;
    const auto m = required_sample_size(in, *s);
    CHECK(m >= prev);
    prev = m;
  }
  in.delta = 0.1;
  in.alpha_star = 1.0;
  CHECK_THROWS_AS(required_sample_size(in, *s), std::invalid_argument);
  in.alpha_star = 0.5;
  in.t = 2000;
  CHECK_THROWS_AS(required_sample_size(in, *s), std::overflow_error);
}

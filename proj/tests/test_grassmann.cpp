#include "supergeo/grassmann.hpp"

#include <bit>
#include <random>

#include "doctest.h"
#include "support/naive_grassmann.hpp"

using supergeo::GrassmannElement;
using supergeo::Parity;

namespace {

constexpr double kExact = 1e-12;

GrassmannElement g(int n, int i) { return GrassmannElement::generator(n, i); }
GrassmannElement c(int n, double v) { return GrassmannElement::scalar(n, v); }

// Bridge to the oracle representation.
naive::Element to_naive(const GrassmannElement& e) {
  naive::Element out;
  for (const auto& [mask, coeff] : e.terms()) {
    naive::Monomial m;
    std::uint64_t bits = mask;
    while (bits != 0) {
      m.push_back(std::countr_zero(bits));
      bits &= bits - 1;
    }
    out[m] = coeff;
  }
  return out;
}

double max_diff(const naive::Element& a, const naive::Element& b) {
  double worst = 0;
  for (const auto& [m, v] : a) {
    auto it = b.find(m);
    worst = std::max(worst, std::abs(v - (it == b.end() ? 0.0 : it->second)));
  }
  for (const auto& [m, v] : b) {
    if (a.find(m) == a.end()) worst = std::max(worst, std::abs(v));
  }
  return worst;
}

GrassmannElement random_element(std::mt19937& rng, int n, bool soul_only = false) {
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  std::uniform_int_distribution<int> pick(0, (1 << n) - 1);
  GrassmannElement out(n);
  for (int t = 0; t < 6; ++t) {
    const std::uint64_t mask = static_cast<std::uint64_t>(pick(rng));
    if (soul_only && mask == 0) continue;
    GrassmannElement term = c(n, coeff(rng));
    std::uint64_t bits = mask;
    while (bits != 0) {
      term = term * g(n, std::countr_zero(bits));
      bits &= bits - 1;
    }
    out = out + term;
  }
  return out;
}

}  // namespace

TEST_CASE("generator products anticommute and square to zero") {
  const int n = 3;
  CHECK(supergeo::approx_equal(g(n, 0) * g(n, 1), -(g(n, 1) * g(n, 0)), kExact));
  CHECK((g(n, 0) * g(n, 0)).is_zero());
  CHECK((g(n, 2) * g(n, 2)).is_zero());

  // xi1 * xi2 * xi1 = 0 through the triple product
  CHECK((g(n, 0) * g(n, 1) * g(n, 0)).is_zero());
}

TEST_CASE("product example (1 + xi1)(2 + xi2)") {
  const int n = 2;
  const GrassmannElement lhs = (c(n, 1) + g(n, 0)) * (c(n, 2) + g(n, 1));
  GrassmannElement want = c(n, 2) + g(n, 0) * 2.0 + g(n, 1) + g(n, 0) * g(n, 1);
  CHECK(supergeo::approx_equal(lhs, want, kExact));
}

TEST_CASE("square of 3 + xi1 xi2") {
  const int n = 2;
  const GrassmannElement a = c(n, 3) + g(n, 0) * g(n, 1);
  const GrassmannElement want = c(n, 9) + g(n, 0) * g(n, 1) * 6.0;
  CHECK(supergeo::approx_equal(a * a, want, kExact));
}

TEST_CASE("body, soul, parity") {
  const int n = 3;
  const GrassmannElement a = c(n, 5) + g(n, 0) + g(n, 0) * g(n, 1) * g(n, 2);
  CHECK(a.body() == doctest::Approx(5.0));
  CHECK(a.parity() == Parity::Mixed);
  CHECK((c(n, 1) + g(n, 0) * g(n, 1)).parity() == Parity::Even);
  CHECK((g(n, 0) + g(n, 0) * g(n, 1) * g(n, 2)).parity() == Parity::Odd);
  CHECK(GrassmannElement(n).parity() == Parity::Even);

  // soul of the mixed element is nilpotent: its square already vanishes here
  const GrassmannElement s = a.soul();
  CHECK(s.body() == 0.0);
  CHECK((s * s).is_zero());
  CHECK((s * s * s).is_zero());
}

TEST_CASE("invert: scalars, even soul, general soul") {
  const int n = 2;
  CHECK(supergeo::approx_equal(c(n, 2).invert(), c(n, 0.5), kExact));

  const GrassmannElement a = c(n, 1) + g(n, 0) * g(n, 1);
  CHECK(supergeo::approx_equal(a.invert(), c(n, 1) - g(n, 0) * g(n, 1), kExact));

  // 1/(2 + xi1 + xi2): the soul squares to zero, so the series stops early;
  // multiply-back is the ground truth for the frozen coefficients.
  const GrassmannElement b = c(n, 2) + g(n, 0) + g(n, 1);
  const GrassmannElement binv = b.invert();
  CHECK(supergeo::approx_equal(b * binv, c(n, 1), kExact));
  CHECK(binv.coefficient(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(binv.coefficient(1) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(binv.coefficient(2) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(binv.coefficient(3) == doctest::Approx(0.0).epsilon(1e-14));

  CHECK_THROWS_AS((g(n, 0) + g(n, 1)).invert(), supergeo::Error);
}

TEST_CASE("invert of random elements multiplies back to one") {
  std::mt19937 rng(20240601);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 4;
    GrassmannElement a = random_element(rng, n);
    if (std::abs(a.body()) < 0.1) a = a + c(n, 1.0);
    CHECK(supergeo::approx_equal(a * a.invert(), c(n, 1), 1e-9));
  }
}

TEST_CASE("multiplication agrees with the naive sorted-list oracle") {
  std::mt19937 rng(987123);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 5;
    const GrassmannElement a = random_element(rng, n);
    const GrassmannElement b = random_element(rng, n);
    const naive::Element want = naive::multiply(to_naive(a), to_naive(b));
    CHECK(max_diff(to_naive(a * b), want) < kExact);
  }
}

TEST_CASE("associativity and supercommutativity on random homogeneous elements") {
  std::mt19937 rng(7777);
  const int n = 5;
  for (int trial = 0; trial < 60; ++trial) {
    const GrassmannElement a = random_element(rng, n);
    const GrassmannElement b = random_element(rng, n);
    const GrassmannElement cc = random_element(rng, n);
    CHECK(supergeo::approx_equal((a * b) * cc, a * (b * cc), 1e-10));
  }
  // homogeneous supercommutativity: ab = (-1)^{|a||b|} ba
  for (int trial = 0; trial < 40; ++trial) {
    std::uniform_int_distribution<int> parity(0, 1);
    auto homogeneous = [&](int par) {
      GrassmannElement acc(n);
      std::uniform_real_distribution<double> coeff(-2.0, 2.0);
      for (int pick = 0; pick < 4; ++pick) {
        GrassmannElement term = c(n, coeff(rng));
        std::uniform_int_distribution<int> idx(0, n - 1);
        const int len = par == 1 ? 1 : 2;
        for (int k = 0; k < len; ++k) term = term * g(n, idx(rng));
        acc = acc + term;
      }
      return acc;
    };
    const int pa = parity(rng), pb = parity(rng);
    const GrassmannElement a = homogeneous(pa);
    const GrassmannElement b = homogeneous(pb);
    const double sign = (pa == 1 && pb == 1) ? -1.0 : 1.0;
    CHECK(supergeo::approx_equal(a * b, (b * a) * sign, 1e-10));
  }
}

TEST_CASE("soul nilpotency degree bound") {
  const int n = 4;
  std::mt19937 rng(5150);
  for (int trial = 0; trial < 20; ++trial) {
    const GrassmannElement s = random_element(rng, n, /*soul_only=*/true);
    GrassmannElement p = c(n, 1);
    for (int k = 0; k <= n; ++k) p = p * s;
    CHECK(p.is_zero());
  }
}

TEST_CASE("algebra mismatch and bad indices are dimension errors") {
  CHECK_THROWS_AS(c(2, 1) * c(3, 1), supergeo::Error);
  CHECK_THROWS_AS(c(2, 1) + c(4, 1), supergeo::Error);
  CHECK_THROWS_AS(GrassmannElement::generator(2, 2), supergeo::Error);
  CHECK_THROWS_AS(GrassmannElement::generator(2, -1), supergeo::Error);
  CHECK_THROWS_AS(GrassmannElement(-1), supergeo::Error);
  CHECK_THROWS_AS(GrassmannElement(63), supergeo::Error);
}

TEST_CASE("terms map iterates deterministically and stores no zeros") {
  const int n = 3;
  const GrassmannElement a = g(n, 1) + g(n, 0) - g(n, 1);
  CHECK(a.terms().size() == 1);
  CHECK(a.coefficient(1) == doctest::Approx(1.0));
  const GrassmannElement z = a - a;
  CHECK(z.is_zero());
  CHECK(z.terms().empty());
}

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "supergeo/errors.hpp"

namespace supergeo {

enum class Parity { Even, Odd, Mixed };

const char* parity_name(Parity p);

// Element of the real Grassmann algebra on a fixed number of anticommuting
// generators.  Terms are stored as {generator subset bitmask -> coefficient};
// bit i stands for the i-th generator (0-based).  Coefficients that are
// exactly 0.0 are never stored, so the zero element has an empty term map.
// Elements are immutable values: every operation returns a fresh element and
// mixing two different generator counts is a Dimension error.
class GrassmannElement {
public:
  static constexpr int kMaxGenerators = 62;

  explicit GrassmannElement(int num_generators);

  static GrassmannElement scalar(int num_generators, double value);
  static GrassmannElement generator(int num_generators, int index);

  int num_generators() const noexcept { return n_; }
  const std::map<std::uint64_t, double>& terms() const noexcept { return terms_; }

  double coefficient(std::uint64_t mask) const;
  bool is_zero() const noexcept { return terms_.empty(); }

  double body() const;
  GrassmannElement soul() const;
  Parity parity() const;

  GrassmannElement operator+(const GrassmannElement& rhs) const;
  GrassmannElement operator-(const GrassmannElement& rhs) const;
  GrassmannElement operator-() const;
  GrassmannElement operator*(const GrassmannElement& rhs) const;
  GrassmannElement operator*(double scale) const;

  // Multiplicative inverse via the terminating geometric series in the soul;
  // requires a nonzero body.
  GrassmannElement invert() const;

  // Integer power; negative exponents go through invert().
  GrassmannElement pow(int exponent) const;

  std::string str() const;

private:
  void prune(std::uint64_t mask);

  int n_;
  std::map<std::uint64_t, double> terms_;
};

inline GrassmannElement operator*(double scale, const GrassmannElement& g) {
  return g * scale;
}

// Sign (-1)^k picked up when moving the generators of `right` past those of
// `left` to reach the canonical ascending order.  Masks must be disjoint.
int reorder_sign(std::uint64_t left, std::uint64_t right);

double max_abs_coefficient_diff(const GrassmannElement& a, const GrassmannElement& b);
bool approx_equal(const GrassmannElement& a, const GrassmannElement& b, double tol);

}  // namespace supergeo

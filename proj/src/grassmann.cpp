#include "supergeo/grassmann.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace supergeo {

const char* parity_name(Parity p) {
  switch (p) {
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    case Parity::Mixed: return "mixed";
  }
  return "?";
}

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Degeneracy: return "degeneracy";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Io: return "io";
  }
  return "?";
}

namespace {

void require_same_algebra(const GrassmannElement& a, const GrassmannElement& b) {
  if (a.num_generators() != b.num_generators()) {
    fail(ErrorKind::Dimension,
         "Grassmann elements live in different algebras (" +
             std::to_string(a.num_generators()) + " vs " +
             std::to_string(b.num_generators()) + " generators)");
  }
}

}  // namespace

GrassmannElement::GrassmannElement(int num_generators) : n_(num_generators) {
  if (n_ < 0 || n_ > kMaxGenerators) {
    fail(ErrorKind::Dimension,
         "generator count " + std::to_string(num_generators) + " out of range [0, " +
             std::to_string(kMaxGenerators) + "]");
  }
}

GrassmannElement GrassmannElement::scalar(int num_generators, double value) {
  GrassmannElement out(num_generators);
  if (value != 0.0) out.terms_[0] = value;
  return out;
}

GrassmannElement GrassmannElement::generator(int num_generators, int index) {
  GrassmannElement out(num_generators);
  if (index < 0 || index >= num_generators) {
    fail(ErrorKind::Dimension, "generator index " + std::to_string(index) +
                                   " out of range for " + std::to_string(num_generators) +
                                   " generators");
  }
  out.terms_[std::uint64_t{1} << index] = 1.0;
  return out;
}

double GrassmannElement::coefficient(std::uint64_t mask) const {
  auto it = terms_.find(mask);
  return it == terms_.end() ? 0.0 : it->second;
}

double GrassmannElement::body() const { return coefficient(0); }

GrassmannElement GrassmannElement::soul() const {
  GrassmannElement out = *this;
  out.terms_.erase(0);
  return out;
}

Parity GrassmannElement::parity() const {
  bool has_even = false, has_odd = false;
  for (const auto& [mask, coeff] : terms_) {
    (std::popcount(mask) % 2 == 0 ? has_even : has_odd) = true;
  }
  if (has_even && has_odd) return Parity::Mixed;
  if (has_odd) return Parity::Odd;
  return Parity::Even;  // zero counts as even
}

void GrassmannElement::prune(std::uint64_t mask) {
  auto it = terms_.find(mask);
  if (it != terms_.end() && it->second == 0.0) terms_.erase(it);
}

GrassmannElement GrassmannElement::operator+(const GrassmannElement& rhs) const {
  require_same_algebra(*this, rhs);
  GrassmannElement out = *this;
  for (const auto& [mask, coeff] : rhs.terms_) {
    out.terms_[mask] += coeff;
    out.prune(mask);
  }
  return out;
}

GrassmannElement GrassmannElement::operator-(const GrassmannElement& rhs) const {
  return *this + (-rhs);
}

GrassmannElement GrassmannElement::operator-() const {
  GrassmannElement out = *this;
  for (auto& [mask, coeff] : out.terms_) coeff = -coeff;
  return out;
}

int reorder_sign(std::uint64_t left, std::uint64_t right) {
  // Each generator in `right` moves past the generators of `left` that sit
  // strictly above it; count those transpositions.
  int swaps = 0;
  std::uint64_t r = right;
  while (r != 0) {
    const int bit = std::countr_zero(r);
    r &= r - 1;
    const std::uint64_t above = (bit + 1 >= 64) ? 0 : (left >> (bit + 1));
    swaps += std::popcount(above);
  }
  return (swaps % 2 == 0) ? 1 : -1;
}

GrassmannElement GrassmannElement::operator*(const GrassmannElement& rhs) const {
  require_same_algebra(*this, rhs);
  GrassmannElement out(n_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : rhs.terms_) {
      if ((ma & mb) != 0) continue;  // repeated generator
      const double contrib = ca * cb * reorder_sign(ma, mb);
      const std::uint64_t mask = ma | mb;
      out.terms_[mask] += contrib;
      out.prune(mask);
    }
  }
  return out;
}

GrassmannElement GrassmannElement::operator*(double scale) const {
  GrassmannElement out(n_);
  if (scale == 0.0) return out;
  out.terms_ = terms_;
  for (auto& [mask, coeff] : out.terms_) coeff *= scale;
  return out;
}

GrassmannElement GrassmannElement::invert() const {
  const double b = body();
  if (b == 0.0 || !std::isfinite(1.0 / b)) {
    fail(ErrorKind::Domain, "Grassmann element with zero body is not invertible");
  }
  // 1/(b + s) = (1/b) sum_p (-s/b)^p; the series stops because s^(n+1) = 0.
  const GrassmannElement step = soul() * (-1.0 / b);
  GrassmannElement acc = scalar(n_, 1.0);
  GrassmannElement power = scalar(n_, 1.0);
  for (int p = 1; p <= n_; ++p) {
    power = power * step;
    if (power.is_zero()) break;
    acc = acc + power;
  }
  return acc * (1.0 / b);
}

GrassmannElement GrassmannElement::pow(int exponent) const {
  if (exponent < 0) return invert().pow(-exponent);
  GrassmannElement acc = scalar(n_, 1.0);
  for (int i = 0; i < exponent; ++i) acc = acc * *this;
  return acc;
}

std::string GrassmannElement::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [mask, coeff] : terms_) {
    if (!first) os << (coeff < 0 ? " - " : " + ");
    else if (coeff < 0) os << "-";
    first = false;
    os << std::abs(coeff);
    std::uint64_t m = mask;
    while (m != 0) {
      const int bit = std::countr_zero(m);
      m &= m - 1;
      os << " g" << (bit + 1);
    }
  }
  return os.str();
}

double max_abs_coefficient_diff(const GrassmannElement& a, const GrassmannElement& b) {
  require_same_algebra(a, b);
  double worst = 0.0;
  for (const auto& [mask, coeff] : a.terms()) {
    worst = std::max(worst, std::abs(coeff - b.coefficient(mask)));
  }
  for (const auto& [mask, coeff] : b.terms()) {
    worst = std::max(worst, std::abs(coeff - a.coefficient(mask)));
  }
  return worst;
}

bool approx_equal(const GrassmannElement& a, const GrassmannElement& b, double tol) {
  return max_abs_coefficient_diff(a, b) <= tol;
}

}  // namespace supergeo

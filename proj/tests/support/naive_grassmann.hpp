#pragma once

// Reference implementation of Grassmann multiplication used as an oracle in
// tests.  Terms are kept as explicit sorted index lists and products are
// normalized by bubble sort with sign counting, so it shares no code or
// representation with the bitmask implementation under test.

#include <algorithm>
#include <map>
#include <vector>

namespace naive {

using Monomial = std::vector<int>;  // strictly ascending generator indices
using Element = std::map<Monomial, double>;

// Sorts `indices`, counting transpositions; returns 0 if an index repeats.
inline int sort_sign(Monomial& indices) {
  int sign = 1;
  for (size_t i = 0; i + 1 < indices.size(); ++i) {
    for (size_t j = 0; j + 1 < indices.size() - i; ++j) {
      if (indices[j] == indices[j + 1]) return 0;
      if (indices[j] > indices[j + 1]) {
        std::swap(indices[j], indices[j + 1]);
        sign = -sign;
      }
    }
  }
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) return 0;
  return sign;
}

inline Element multiply(const Element& a, const Element& b) {
  Element out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      Monomial concat = ma;
      concat.insert(concat.end(), mb.begin(), mb.end());
      const int sign = sort_sign(concat);
      if (sign == 0) continue;
      out[concat] += sign * ca * cb;
      if (out[concat] == 0.0) out.erase(concat);
    }
  }
  return out;
}

inline Element add(const Element& a, const Element& b) {
  Element out = a;
  for (const auto& [m, c] : b) {
    out[m] += c;
    if (out[m] == 0.0) out.erase(m);
  }
  return out;
}

}  // namespace naive

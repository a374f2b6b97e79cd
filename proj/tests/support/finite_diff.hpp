#pragma once

// Central finite differences used as derivative oracles in tests.

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace fd {

inline double derivative(const std::function<double(const std::vector<double>&)>& f,
                         std::vector<double> at, int index, double h = 1e-6) {
  const double x0 = at[index];
  at[index] = x0 + h;
  const double hi = f(at);
  at[index] = x0 - h;
  const double lo = f(at);
  return (hi - lo) / (2 * h);
}

inline Eigen::MatrixXd jacobian(
    const std::function<std::vector<double>(const std::vector<double>&)>& f,
    const std::vector<double>& at, double h = 1e-6) {
  const std::vector<double> base = f(at);
  Eigen::MatrixXd out(base.size(), at.size());
  for (size_t j = 0; j < at.size(); ++j) {
    std::vector<double> hi = at, lo = at;
    hi[j] += h;
    lo[j] -= h;
    const std::vector<double> fh = f(hi), fl = f(lo);
    for (size_t i = 0; i < base.size(); ++i) out(i, j) = (fh[i] - fl[i]) / (2 * h);
  }
  return out;
}

inline double rel_err(double got, double want) {
  const double scale = std::max(1.0, std::abs(want));
  return std::abs(got - want) / scale;
}

}  // namespace fd

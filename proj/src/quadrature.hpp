#pragma once

#include <span>

#include "berrydet/linalg.hpp"

namespace berrydet::detail {

/// Composite Simpson on uniform samples f_0..f_n with spacing h. Falls back
/// to the trapezoid rule on the last interval when n is odd.
inline Complex integrate_uniform(std::span<const Complex> f, double h) {
  const std::size_t n = f.empty() ? 0 : f.size() - 1;
  if (n == 0) return 0.0;
  const std::size_t even = n - (n % 2);
  Complex sum = 0.0;
  for (std::size_t j = 0; j + 2 <= even; j += 2) {
    sum += (h / 3.0) * (f[j] + 4.0 * f[j + 1] + f[j + 2]);
  }
  if (even != n) sum += 0.5 * h * (f[n - 1] + f[n]);
  return sum;
}

}  // namespace berrydet::detail

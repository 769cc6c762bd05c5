#pragma once

// Brute-force reference computations used as independent oracles. Nothing
// here calls into the library under test.

#include <cstdint>
#include <cstdlib>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using u64 = std::uint64_t;

/// Walks the diagonals r + c = 2, 3, ... with c ascending and returns the
/// (row, column) of the n-th cell, 1-based.
inline std::vector<std::pair<u64, u64>> cantor_cells(u64 n) {
  std::vector<std::pair<u64, u64>> cells{{0, 0}};
  for (u64 s = 2; cells.size() <= n; ++s)
    for (u64 c = 1; c < s && cells.size() <= n; ++c)
      cells.push_back({s - c, c});
  return cells;
}

/// Piece index of n in D_1 = {1}, D_k = (2^(k-2), 2^(k-1)].
inline u64 dyadic_piece(u64 n) {
  u64 k = 1, hi = 1;
  while (n > hi) {
    hi *= 2;
    ++k;
  }
  return k;
}

inline u64 count_squares(u64 n) {
  u64 c = 0;
  for (u64 m = 1; m * m <= n; ++m)
    ++c;
  return c;
}

inline u64 count_powers(u64 n, unsigned k) {
  u64 c = 0;
  for (u64 m = 1;; ++m) {
    u64 p = 1;
    bool over = false;
    for (unsigned i = 0; i < k; ++i) {
      if (p > n / m) {
        over = true;
        break;
      }
      p *= m;
    }
    if (over || p > n)
      break;
    ++c;
  }
  return c;
}

/// Σ over every sign vector σ ∈ {±1}^d of |Σ_r a_r σ_r|, by explicit enumeration.
inline long long walsh_abs_sum(const std::vector<long long>& a) {
  const std::size_t d = a.size();
  long long total = 0;
  for (u64 mask = 0; mask < (u64{1} << d); ++mask) {
    long long s = 0;
    for (std::size_t r = 0; r < d; ++r)
      s += (mask >> r & 1) ? -a[r] : a[r];
    total += std::llabs(s);
  }
  return total;
}

/// Minimum of each dyadic piece meeting [1, n].
inline std::vector<u64> dyadic_minima(u64 n) {
  std::vector<u64> out;
  u64 last = 0;
  for (u64 m = 1; m <= n; ++m) {
    const u64 k = dyadic_piece(m);
    if (k != last)
      out.push_back(m);
    last = k;
  }
  return out;
}

} // namespace oracle

#pragma once

// Test-side oracles, deliberately independent of the library's
// implementation paths: plain matrix fixpoints and brute-force enumeration.

#include <cstdint>
#include <utility>
#include <vector>

namespace oracles {

using Nat = std::uint64_t;

/// Reflexive-symmetric-transitive closure over [0, n) as a boolean matrix,
/// computed by iterating pair propagation to a fixpoint.
inline std::vector<std::vector<bool>> closure_matrix(
    const std::vector<std::pair<Nat, Nat>>& pairs, Nat n) {
  std::vector<std::vector<bool>> m(n, std::vector<bool>(n, false));
  for (Nat i = 0; i < n; ++i) m[i][i] = true;
  for (const auto& [a, b] : pairs) {
    m[a][b] = true;
    m[b][a] = true;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (Nat i = 0; i < n; ++i)
      for (Nat j = 0; j < n; ++j) {
        if (!m[i][j]) continue;
        for (Nat k = 0; k < n; ++k)
          if (m[j][k] && !m[i][k]) {
            m[i][k] = true;
            m[k][i] = true;
            changed = true;
          }
      }
  }
  return m;
}

/// The diagonal enumeration of N^2: (0,0), (1,0), (0,1), (2,0), (1,1), ...
/// Returns the index of (x, y) by walking the enumeration.
inline Nat pair_index_by_enumeration(Nat x, Nat y) {
  Nat index = 0;
  for (Nat diag = 0;; ++diag) {
    for (Nat b = 0; b <= diag; ++b) {
      Nat a = diag - b;
      if (a == x && b == y) return index;
      ++index;
    }
  }
}

}  // namespace oracles

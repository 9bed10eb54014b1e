#pragma once

// Test-only oracles, kept independent of the library's implementation paths.

#include <cstdint>
#include <random>
#include <vector>

#include "tropbasis/matrix.hpp"
#include "tropbasis/rational.hpp"

namespace oracles {

using tropbasis::Rational;
using tropbasis::SubmatrixSelector;
using tropbasis::SymMatrix;
using tropbasis::TropMatrix;

// Min-cost assignment by bitmask DP over column subsets: rows are assigned in
// order, dp[mask] = cheapest assignment of the first popcount(mask) rows to
// the column set mask. Independent of the permutation-enumeration path it
// cross-checks.
inline Rational assignment_min_cost(const TropMatrix& a, const SubmatrixSelector& sel) {
    const auto& rows = sel.row_indices;
    const auto& cols = sel.col_indices;
    const int n = static_cast<int>(rows.size());
    const uint32_t full = (1u << n) - 1;
    std::vector<Rational> dp(full + 1);
    std::vector<bool> reach(full + 1, false);
    reach[0] = true;
    for (uint32_t mask = 0; mask < full; ++mask) {
        if (!reach[mask]) continue;
        int r = __builtin_popcount(mask);
        for (int c = 0; c < n; ++c) {
            if (mask & (1u << c)) continue;
            uint32_t next = mask | (1u << c);
            Rational cand = dp[mask] + a.at(rows[r], cols[c]);
            if (!reach[next] || cand < dp[next]) {
                dp[next] = cand;
                reach[next] = true;
            }
        }
    }
    return dp[full];
}

// Deterministic generators.
inline TropMatrix random_matrix(std::mt19937_64& rng, int rows, int cols, int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    TropMatrix m(rows, cols);
    for (int i = 1; i <= rows; ++i)
        for (int j = 1; j <= cols; ++j) m.at(i, j) = Rational(d(rng));
    return m;
}

inline SymMatrix random_sym_matrix(std::mt19937_64& rng, int n, int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    SymMatrix m(n);
    for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j) m.set(i, j, Rational(d(rng)));
    return m;
}

// The 5x5 symmetric matrix with the given upper-triangle bits (15 of them,
// row-major), entries in {0,1}. Enumerates the exhaustive cube.
inline SymMatrix sym_from_bits(uint32_t bits) {
    SymMatrix m(5);
    int b = 0;
    for (int i = 1; i <= 5; ++i)
        for (int j = i; j <= 5; ++j, ++b) m.set(i, j, Rational((bits >> b) & 1u));
    return m;
}

}  // namespace oracles

#pragma once

// Tropical determinants, minimizing monomials (plain and symmetric),
// singularity tests, and both rank functions.
//
// The tropical determinant of a square (sub)matrix is the minimum over all
// bijections from its row indices to its column indices of the entry sum; a
// bijection attaining the minimum "realizes" it. A submatrix is tropically
// singular when more than one monomial realizes the determinant, and
// symmetrically tropically singular when more than one remains after the
// identification X(i,j) = X(j,i) turns monomials into multisets of unordered
// pairs.
//
// Everything here is exhaustive permutation enumeration; supported submatrix
// sizes are small (<= 7, 5040 terms) so this is both trivial and exact.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "tropbasis/matrix.hpp"
#include "tropbasis/permutation.hpp"
#include "tropbasis/rational.hpp"

namespace tropbasis {

// A bijection row index -> column index (indices inherited from the parent
// matrix), stored as (i, rho(i)) sorted by i, plus the entry sum.
struct Monomial {
    std::vector<std::pair<int, int>> pairs;
    Rational weight;

    bool contains_position(int i, int j) const {
        for (const auto& p : pairs)
            if (p.first == i && p.second == j) return true;
        return false;
    }

    bool operator<(const Monomial& o) const { return pairs < o.pairs; }
    bool operator==(const Monomial& o) const { return pairs == o.pairs; }
};

// A monomial under X(i,j) = X(j,i): a multiset of unordered pairs {i,j},
// canonically sorted with i <= j. Diagonal pairs appear at most once per row
// index; off-diagonal pairs have multiplicity at most 2.
struct SymMonomial {
    std::vector<std::pair<int, int>> pairs;  // each (min, max), sorted
    Rational weight;

    static SymMonomial from_monomial(const Monomial& m) {
        SymMonomial s;
        s.weight = m.weight;
        s.pairs.reserve(m.pairs.size());
        for (const auto& p : m.pairs)
            s.pairs.emplace_back(std::min(p.first, p.second), std::max(p.first, p.second));
        std::sort(s.pairs.begin(), s.pairs.end());
        return s;
    }

    int multiplicity(int i, int j) const {
        std::pair<int, int> key{std::min(i, j), std::max(i, j)};
        return static_cast<int>(std::count(pairs.begin(), pairs.end(), key));
    }

    // The sub-multiset of pairs touching the given index.
    std::vector<std::pair<int, int>> pairs_involving(int idx) const {
        std::vector<std::pair<int, int>> out;
        for (const auto& p : pairs)
            if (p.first == idx || p.second == idx) out.push_back(p);
        return out;
    }

    bool operator<(const SymMonomial& o) const { return pairs < o.pairs; }
    bool operator==(const SymMonomial& o) const { return pairs == o.pairs; }
};

struct TropDetResult {
    Rational value;
    std::vector<Monomial> realizers;  // all of them, sorted
};

namespace detail {

template <typename Fn>
void for_each_bijection(const std::vector<int>& rows, const std::vector<int>& cols, Fn&& fn) {
    std::vector<int> perm(cols.size());
    for (size_t k = 0; k < perm.size(); ++k) perm[k] = static_cast<int>(k);
    do {
        fn(rows, cols, perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
}

}  // namespace detail

inline TropDetResult trop_det(const TropMatrix& a, const SubmatrixSelector& sel) {
    check_selector(a, sel);
    if (sel.size() == 0) throw DimensionError("empty selection");

    std::optional<Rational> best;
    std::vector<Monomial> realizers;
    detail::for_each_bijection(
        sel.row_indices, sel.col_indices,
        [&](const std::vector<int>& rows, const std::vector<int>& cols,
            const std::vector<int>& perm) {
            Rational w(0);
            for (size_t k = 0; k < rows.size(); ++k) w += a.at(rows[k], cols[perm[k]]);
            if (!best || w < *best) {
                best = w;
                realizers.clear();
            }
            if (w == *best) {
                Monomial m;
                m.weight = w;
                for (size_t k = 0; k < rows.size(); ++k)
                    m.pairs.emplace_back(rows[k], cols[perm[k]]);
                realizers.push_back(std::move(m));
            }
        });
    std::sort(realizers.begin(), realizers.end());
    return {*best, std::move(realizers)};
}

inline TropDetResult trop_det(const TropMatrix& a) {
    if (!a.is_square()) throw DimensionError("tropical determinant needs a square matrix");
    return trop_det(a, SubmatrixSelector::square(a.rows()));
}

inline std::vector<Monomial> minimizing_monomials(const TropMatrix& a,
                                                  const SubmatrixSelector& sel) {
    return trop_det(a, sel).realizers;
}

inline std::vector<SymMonomial> sym_minimizing_monomials(const SymMatrix& a,
                                                         const SubmatrixSelector& sel) {
    auto general = minimizing_monomials(a.as_matrix(), sel);
    std::set<SymMonomial> dedup;
    for (const auto& m : general) dedup.insert(SymMonomial::from_monomial(m));
    return {dedup.begin(), dedup.end()};
}

inline std::vector<SymMonomial> sym_minimizing_monomials(const SymMatrix& a) {
    return sym_minimizing_monomials(a, SubmatrixSelector::square(a.size()));
}

inline bool is_trop_singular(const TropMatrix& a, const SubmatrixSelector& sel) {
    return trop_det(a, sel).realizers.size() >= 2;
}

inline bool is_sym_trop_singular(const SymMatrix& a, const SubmatrixSelector& sel) {
    return sym_minimizing_monomials(a, sel).size() >= 2;
}

inline bool is_trop_singular(const TropMatrix& a) {
    return trop_det(a).realizers.size() >= 2;
}

inline bool is_sym_trop_singular(const SymMatrix& a) {
    return is_sym_trop_singular(a, SubmatrixSelector::square(a.size()));
}

// Realizers of a full square matrix viewed as permutations of {1..n}.
inline std::vector<Permutation> realizer_permutations(const TropMatrix& a) {
    auto res = trop_det(a);
    std::vector<Permutation> out;
    for (const auto& m : res.realizers) {
        std::vector<int> im(a.rows());
        for (const auto& p : m.pairs) im[p.first - 1] = p.second;
        out.emplace_back(std::move(im));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rank functions.
//
// Rank is the largest r such that some r x r submatrix is (symmetrically)
// tropically nonsingular. Singularity propagates upward in size: a realizer
// of an (r+1) x (r+1) submatrix restricts to a realizer of an r x r minor,
// and a second minimizing monomial of that minor extends back. So the scan
// below may stop at the first size r where every r x r submatrix is
// singular.

namespace detail {

// Exact integer fast path for the singularity tests driving the rank scans.
// Entries must already be verified to be small integers; sums of up to 13 of
// them stay far below the int64 range, so this is the same exact arithmetic.
struct IntGrid {
    int rows = 0, cols = 0;
    std::vector<int64_t> v;
    int64_t at(int i, int j) const { return v[static_cast<size_t>(i - 1) * cols + (j - 1)]; }
};

inline std::optional<IntGrid> to_int_grid(const TropMatrix& a) {
    IntGrid g;
    g.rows = a.rows();
    g.cols = a.cols();
    g.v.reserve(static_cast<size_t>(g.rows) * g.cols);
    for (int i = 1; i <= a.rows(); ++i)
        for (int j = 1; j <= a.cols(); ++j) {
            auto s = as_small_int(a.at(i, j));
            if (!s || *s > (1LL << 40) || *s < -(1LL << 40)) return std::nullopt;
            g.v.push_back(*s);
        }
    return g;
}

inline bool int_is_singular(const IntGrid& g, const std::vector<int>& rows,
                            const std::vector<int>& cols, bool symmetric) {
    const size_t r = rows.size();
    std::vector<int> perm(r);
    for (size_t k = 0; k < r; ++k) perm[k] = static_cast<int>(k);
    int64_t best = INT64_MAX;
    // Canonical encodings of the minimizing monomials seen so far (sym: the
    // sorted unordered-pair multiset; plain: the permutation word).
    std::vector<std::array<uint16_t, 8>> seen;
    bool two = false;
    do {
        int64_t w = 0;
        for (size_t k = 0; k < r; ++k) w += g.at(rows[k], cols[perm[k]]);
        if (w > best) continue;
        std::array<uint16_t, 8> code{};
        for (size_t k = 0; k < r; ++k) {
            int i = rows[k], j = cols[perm[k]];
            if (symmetric && i > j) std::swap(i, j);
            code[k] = static_cast<uint16_t>((i << 8) | j);
        }
        std::sort(code.begin(), code.begin() + r);
        if (w < best) {
            best = w;
            seen.assign(1, code);
            two = false;
        } else if (!two && std::find(seen.begin(), seen.end(), code) == seen.end()) {
            seen.push_back(code);
            two = true;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return two;
}

template <typename SingularFn>
int rank_scan(int rows, int cols, SingularFn&& singular) {
    int maxr = std::min(rows, cols);
    int rank = 0;
    for (int r = 1; r <= maxr; ++r) {
        bool found_nonsingular = false;
        std::vector<int> rsel(r), csel(r);
        // enumerate r-subsets of rows and cols
        std::vector<int> ridx(r);
        for (int k = 0; k < r; ++k) ridx[k] = k + 1;
        while (true) {
            std::vector<int> cidx(r);
            for (int k = 0; k < r; ++k) cidx[k] = k + 1;
            while (true) {
                if (!singular(ridx, cidx)) {
                    found_nonsingular = true;
                    break;
                }
                int k = r - 1;
                while (k >= 0 && cidx[k] == cols - (r - 1 - k)) --k;
                if (k < 0) break;
                ++cidx[k];
                for (int l = k + 1; l < r; ++l) cidx[l] = cidx[l - 1] + 1;
            }
            if (found_nonsingular) break;
            int k = r - 1;
            while (k >= 0 && ridx[k] == rows - (r - 1 - k)) --k;
            if (k < 0) break;
            ++ridx[k];
            for (int l = k + 1; l < r; ++l) ridx[l] = ridx[l - 1] + 1;
        }
        if (found_nonsingular)
            rank = r;
        else
            return rank;  // singularity propagates upward; no larger size can win
    }
    return rank;
}

}  // namespace detail

inline int tropical_rank(const TropMatrix& a) {
    if (auto g = detail::to_int_grid(a)) {
        return detail::rank_scan(a.rows(), a.cols(), [&](const std::vector<int>& r,
                                                         const std::vector<int>& c) {
            return detail::int_is_singular(*g, r, c, /*symmetric=*/false);
        });
    }
    return detail::rank_scan(a.rows(), a.cols(),
                             [&](const std::vector<int>& r, const std::vector<int>& c) {
                                 return is_trop_singular(a, SubmatrixSelector(r, c));
                             });
}

inline int symmetric_tropical_rank(const SymMatrix& a) {
    const TropMatrix& m = a.as_matrix();
    if (auto g = detail::to_int_grid(m)) {
        return detail::rank_scan(m.rows(), m.cols(), [&](const std::vector<int>& r,
                                                         const std::vector<int>& c) {
            return detail::int_is_singular(*g, r, c, /*symmetric=*/true);
        });
    }
    return detail::rank_scan(m.rows(), m.cols(),
                             [&](const std::vector<int>& r, const std::vector<int>& c) {
                                 return is_sym_trop_singular(a, SubmatrixSelector(r, c));
                             });
}

// All 4x4 submatrices symmetrically singular <=> symmetric tropical rank <= 3
// for a 5x5. Used as the corpus filter and the classifier's witness search.
inline std::optional<SubmatrixSelector> find_sym_nonsingular_4x4(const SymMatrix& a) {
    if (a.size() != 5) throw DimensionError("expected a 5x5 matrix");
    for (int ri = 1; ri <= 5; ++ri)
        for (int ci = 1; ci <= 5; ++ci) {
            auto sel = SubmatrixSelector::removing(5, ri, ci);
            if (!is_sym_trop_singular(a, sel)) return sel;
        }
    return std::nullopt;
}

}  // namespace tropbasis

#pragma once

// Symmetric-preserving transformations and the normalization procedure:
//
//  * diagonal permutation: permute rows and columns by the same permutation;
//  * symmetric scaling: tropically add a constant to row i and column i
//    (the diagonal entry moves by twice the constant);
//  * the 4-cycle realizer rewrite: a realizer containing (k1 k2 k3 k4) can be
//    replaced by (k1 k2)(k3 k4) or (k1 k4)(k2 k3);
//  * normalize: given a realizer of the tropical determinant of a symmetric
//    5x5, produce an equivalent matrix that is entrywise nonnegative with
//    zeros on the realizer positions, via one diagonal permutation plus a
//    replayable sequence of symmetric scalings;
//  * form-matrix pattern matching (blank / nonnegative constant / "+").
//
// Both transformations preserve symmetric tropical rank, and symmetric
// scaling preserves every submatrix's set of minimizing monomials (weights
// shift uniformly, argmins do not move).

#include <cassert>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <variant>
#include <vector>

#include "tropbasis/determinant.hpp"
#include "tropbasis/matrix.hpp"
#include "tropbasis/permutation.hpp"
#include "tropbasis/rational.hpp"

namespace tropbasis {

struct NotSingularError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotRealizerError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Elementary transformations.

inline SymMatrix diagonal_permute(const SymMatrix& a, const Permutation& sigma) {
    if (sigma.size() != a.size()) throw DimensionError("permutation size mismatch");
    Permutation inv = sigma.inverse();
    SymMatrix out(a.size());
    for (int i = 1; i <= a.size(); ++i)
        for (int j = i; j <= a.size(); ++j) out.set(i, j, a.at(inv(i), inv(j)));
    return out;
}

inline SymMatrix symmetric_scale(const SymMatrix& a, int index, const Rational& c) {
    if (index < 1 || index > a.size()) throw DimensionError("scale index out of range");
    SymMatrix out = a;
    for (int j = 1; j <= a.size(); ++j) out.set(index, j, a.at(index, j) + c);
    out.set(index, index, a.at(index, index) + c + c);
    return out;
}

struct ScalingStep {
    int index;
    Rational amount;
    bool operator==(const ScalingStep&) const = default;
};
using ScalingSequence = std::vector<ScalingStep>;

inline SymMatrix apply_scalings(SymMatrix a, const ScalingSequence& steps) {
    for (const auto& s : steps) a = symmetric_scale(a, s.index, s.amount);
    return a;
}

// ---------------------------------------------------------------------------
// Permutation utilities for realizers.

// Replaces the 4-cycle (k1 k2 k3 k4) in sigma's disjoint cycle decomposition
// by (k1 k2)(k3 k4) and by (k1 k4)(k2 k3); everything outside the cycle's
// support is untouched.
inline std::pair<Permutation, Permutation> lemma1_rewrite(const Permutation& sigma,
                                                          const std::vector<int>& cycle) {
    if (cycle.size() != 4) throw std::invalid_argument("expected a 4-cycle");
    for (size_t k = 0; k < 4; ++k)
        if (sigma(cycle[k]) != cycle[(k + 1) % 4])
            throw std::invalid_argument("cycle not present in permutation");
    auto im1 = sigma.images(), im2 = sigma.images();
    int k1 = cycle[0], k2 = cycle[1], k3 = cycle[2], k4 = cycle[3];
    im1[k1 - 1] = k2; im1[k2 - 1] = k1; im1[k3 - 1] = k4; im1[k4 - 1] = k3;
    im2[k1 - 1] = k4; im2[k4 - 1] = k1; im2[k2 - 1] = k3; im2[k3 - 1] = k2;
    return {Permutation(std::move(im1)), Permutation(std::move(im2))};
}

inline Rational permutation_weight(const SymMatrix& a, const Permutation& sigma) {
    Rational w(0);
    for (int i = 1; i <= a.size(); ++i) w += a.at(i, sigma(i));
    return w;
}

inline bool realizes(const SymMatrix& a, const Permutation& sigma) {
    return permutation_weight(a, sigma) == trop_det(a.as_matrix()).value;
}

// For a symmetrically singular 5x5 there is always a realizer containing a
// transposition in its disjoint cycle decomposition; returns the first such
// realizer in sorted order. NotSingular if the precondition fails.
inline Permutation find_transposition_realizer(const SymMatrix& a) {
    if (a.size() != 5) throw DimensionError("expected a 5x5 matrix");
    if (!is_sym_trop_singular(a))
        throw NotSingularError("matrix is not symmetrically tropically singular");
    for (const auto& sigma : realizer_permutations(a.as_matrix()))
        if (sigma.contains_transposition()) return sigma;
    throw std::logic_error(
        "no transposition-containing realizer found for a symmetrically singular 5x5");
}

// ---------------------------------------------------------------------------
// Normalization (5x5 only).

struct NormalizeResult {
    SymMatrix matrix;          // A', nonnegative, zeros on sigma' positions
    Permutation realizer;      // sigma' in A' labels (canonical cycle form)
    Permutation relabeling;    // pi: A' = scalings applied to diagonal_permute(A, pi)
    ScalingSequence scalings;  // indices refer to A' labels
};

namespace detail {

// Working state: matrix after the initial diagonal permutation plus the
// recorded scaling steps, all in canonical labels.
struct NormalizeState {
    SymMatrix a;
    Permutation pi;   // relabeling applied to the input
    Permutation tau;  // realizer in canonical labels
    ScalingSequence steps;

    void scale(int index, const Rational& amount) {
        if (amount == 0) return;
        a = symmetric_scale(a, index, amount);
        steps.push_back({index, amount});
    }

    void require(bool cond, const char* what) const {
        if (!cond)
            throw std::logic_error(std::string("normalize invariant violated: ") + what);
    }
};

// Exact feasibility interval [lo, hi], assembled from bounds; empty() means
// the realizer cannot be normalized within this scaling family, which
// contradicts the realizer precondition.
struct Interval {
    std::optional<Rational> lo, hi;
    void at_least(const Rational& v) {
        if (!lo || v > *lo) lo = v;
    }
    void at_most(const Rational& v) {
        if (!hi || v < *hi) hi = v;
    }
    bool feasible() const { return !lo || !hi || *lo <= *hi; }
    // The feasible point closest to zero, so re-normalizing a normalized
    // matrix is a no-op.
    Rational pick() const {
        Rational v(0);
        if (lo && v < *lo) v = *lo;
        if (hi && v > *hi) v = *hi;
        return v;
    }
};

// Relabeling that conjugates sigma to the canonical permutation of its cycle
// type: cycles sorted by length (descending) then smallest element, laid out
// consecutively from 1; fixed points fill the remaining slots in order.
inline Permutation canonicalizing_relabel(const Permutation& sigma) {
    int n = sigma.size();
    auto cycles = sigma.cycles();
    std::sort(cycles.begin(), cycles.end(), [](const auto& x, const auto& y) {
        if (x.size() != y.size()) return x.size() > y.size();
        return x.front() < y.front();
    });
    std::vector<int> image(n, 0);
    int next = 1;
    for (const auto& c : cycles)
        for (int el : c) image[el - 1] = next++;
    for (int i = 1; i <= n; ++i)
        if (image[i - 1] == 0) image[i - 1] = next++;
    return Permutation(std::move(image));
}

inline void zero_diagonal(NormalizeState& st, std::initializer_list<int> indices) {
    for (int i : indices) st.scale(i, -half(st.a.at(i, i)));
}

// Scalings of the (123) case, shared with (123)(45): zeros a12, a23, a13
// (the unique symmetric potential on an odd cycle).
inline void scale_three_cycle_head(NormalizeState& st) {
    st.scale(2, -st.a.at(1, 2));
    st.scale(3, -st.a.at(2, 3));
    Rational v13 = st.a.at(1, 3);
    st.scale(1, -half(v13));
    st.scale(3, -half(v13));
    st.scale(2, half(v13));
}

// Residual scaling freedom of a zeroed transposition (p q): scale p by +u and
// q by -u. This keeps a(p,q) = 0 and every position not meeting {p,q}.
// Feasibility of row p and row q alone (the caller checks coupled entries):
//   a(p,p) + 2u >= 0,  a(q,q) - 2u >= 0,  a(p,k) + u >= 0,  a(q,k) - u >= 0.
inline Interval transposition_freedom(const NormalizeState& st, int p, int q,
                                      const std::vector<int>& outside) {
    Interval iv;
    iv.at_least(-half(st.a.at(p, p)));
    iv.at_most(half(st.a.at(q, q)));
    for (int k : outside) {
        iv.at_least(-st.a.at(p, k));
        iv.at_most(st.a.at(q, k));
    }
    return iv;
}

inline void apply_transposition_freedom(NormalizeState& st, int p, int q, const Rational& u) {
    st.scale(p, u);
    st.scale(q, -u);
}

inline void require_nonnegative(const NormalizeState& st, const char* what) {
    for (int i = 1; i <= 5; ++i)
        for (int j = i; j <= 5; ++j) st.require(st.a.at(i, j) >= 0, what);
}

inline void normalize_identity(NormalizeState& st) {
    zero_diagonal(st, {1, 2, 3, 4, 5});
    require_nonnegative(st, "negative off-diagonal with identity realizer");
}

inline void normalize_two_cycle(NormalizeState& st) {
    Rational c = -half(st.a.at(1, 2));
    st.scale(1, c);
    st.scale(2, c);
    zero_diagonal(st, {3, 4, 5});
    for (int i = 3; i <= 5; ++i)
        for (int j = i + 1; j <= 5; ++j)
            st.require(st.a.at(i, j) >= 0, "negative entry in the fixed 3x3 block");
    auto iv = transposition_freedom(st, 1, 2, {3, 4, 5});
    st.require(iv.feasible(), "no feasible scaling for the (12) realizer");
    apply_transposition_freedom(st, 1, 2, iv.pick());
    require_nonnegative(st, "negativity after (12) normalization");
}

inline void normalize_three_cycle(NormalizeState& st) {
    scale_three_cycle_head(st);
    zero_diagonal(st, {4, 5});
    require_nonnegative(st, "negative entry with 3-cycle realizer");
}

// tau = (12)(34): after the head scalings the family is two-parametric,
//   scale 1 by +u / 2 by -u, and 3 by +v / 4 by -v,
// with the cross block coupling u and v:
//   a13 + u + v >= 0, a14 + u - v >= 0, a23 - u + v >= 0, a24 - u - v >= 0.
// Eliminating v exactly gives the feasible u-interval; both intervals are
// nonempty whenever (12)(34) really realizes the determinant.
inline void normalize_double_transposition(NormalizeState& st) {
    for (int p : {1, 3}) {
        Rational c = -half(st.a.at(p, p + 1));
        st.scale(p, c);
        st.scale(p + 1, c);
    }
    zero_diagonal(st, {5});

    const auto& a = st.a;
    // v-bounds as functions of u: v >= alpha + beta*u, v <= gamma + delta*u.
    struct Bound {
        Rational base;
        int slope;  // -1, 0, +1
    };
    std::vector<Bound> vlo = {{-half(a.at(3, 3)), 0},
                              {-a.at(3, 5), 0},
                              {-a.at(1, 3), -1},
                              {-a.at(2, 3), +1}};
    std::vector<Bound> vhi = {{half(a.at(4, 4)), 0},
                              {a.at(4, 5), 0},
                              {a.at(1, 4), +1},
                              {a.at(2, 4), -1}};
    Interval u_iv = transposition_freedom(st, 1, 2, {5});
    for (const auto& l : vlo)
        for (const auto& h : vhi) {
            // alpha + beta*u <= gamma + delta*u
            int ds = l.slope - h.slope;
            Rational diff = h.base - l.base;
            if (ds == 0)
                st.require(diff >= 0, "negative tropical determinant ((12)(34) coupling)");
            else if (ds > 0)
                u_iv.at_most(diff / ds);
            else
                u_iv.at_least(diff / ds);
        }
    st.require(u_iv.feasible(), "no feasible scaling for the (12)(34) realizer");
    Rational u = u_iv.pick();
    Interval v_iv;
    for (const auto& l : vlo) v_iv.at_least(l.base + l.slope * u);
    for (const auto& h : vhi) v_iv.at_most(h.base + h.slope * u);
    st.require(v_iv.feasible(), "empty v-interval for the (12)(34) realizer");
    apply_transposition_freedom(st, 1, 2, u);
    apply_transposition_freedom(st, 3, 4, v_iv.pick());
    require_nonnegative(st, "negativity after (12)(34) normalization");
}

inline void normalize_three_two(NormalizeState& st) {
    scale_three_cycle_head(st);
    Rational c = -half(st.a.at(4, 5));
    st.scale(4, c);
    st.scale(5, c);
    for (int i : {1, 2, 3})
        st.require(st.a.at(i, i) >= 0, "negative diagonal in the 3-cycle block");
    auto iv = transposition_freedom(st, 4, 5, {1, 2, 3});
    st.require(iv.feasible(), "no feasible scaling for the (123)(45) realizer");
    apply_transposition_freedom(st, 4, 5, iv.pick());
    require_nonnegative(st, "negativity after (123)(45) normalization");
}

inline void normalize_five_cycle(NormalizeState& st) {
    // The symmetric potential zeroing the cycle positions is unique for an
    // odd cycle; the proof's chain of scalings composes to exactly this.
    const SymMatrix& a = st.a;
    Rational c1 =
        -half(a.at(1, 2) - a.at(2, 3) + a.at(3, 4) - a.at(4, 5) + a.at(5, 1));
    Rational c2 = -a.at(1, 2) - c1;
    Rational c3 = -a.at(2, 3) - c2;
    Rational c4 = -a.at(3, 4) - c3;
    Rational c5 = -a.at(4, 5) - c4;
    int i = 1;
    for (const Rational& c : {c1, c2, c3, c4, c5}) {
        st.scale(i, c);
        ++i;
    }
    require_nonnegative(st, "negative entry with 5-cycle realizer");
}

}  // namespace detail

inline NormalizeResult normalize(const SymMatrix& a, const Permutation& sigma_in) {
    if (a.size() != 5) throw DimensionError("normalize expects a 5x5 matrix");
    if (sigma_in.size() != 5) throw DimensionError("realizer size mismatch");
    if (!realizes(a, sigma_in))
        throw NotRealizerError("permutation does not realize the tropical determinant");

    // 4-cycle realizers are first rewritten as a product of transpositions.
    Permutation sigma = sigma_in;
    for (const auto& cyc : sigma.cycles()) {
        if (cyc.size() == 4) {
            sigma = lemma1_rewrite(sigma, cyc).first;
            if (!realizes(a, sigma))
                throw std::logic_error("4-cycle rewrite is not a realizer");
            break;
        }
    }

    detail::NormalizeState st{a, detail::canonicalizing_relabel(sigma),
                              Permutation::identity(5), {}};
    st.tau = sigma.conjugate_by(st.pi);
    st.a = diagonal_permute(a, st.pi);

    auto type = st.tau.cycle_type();
    if (type.empty())
        detail::normalize_identity(st);
    else if (type == std::vector<int>{2})
        detail::normalize_two_cycle(st);
    else if (type == std::vector<int>{3})
        detail::normalize_three_cycle(st);
    else if (type == std::vector<int>{2, 2})
        detail::normalize_double_transposition(st);
    else if (type == std::vector<int>{3, 2})
        detail::normalize_three_two(st);
    else if (type == std::vector<int>{5})
        detail::normalize_five_cycle(st);
    else
        throw std::logic_error("unexpected cycle type after rewrite");

    for (int i = 1; i <= 5; ++i) {
        st.require(st.a.at(i, st.tau(i)) == 0, "realizer position not zero");
        for (int j = i; j <= 5; ++j) st.require(st.a.at(i, j) >= 0, "negative entry remains");
    }
    return {st.a, st.tau, st.pi, st.steps};
}

// ---------------------------------------------------------------------------
// Form matrices.

class FormMatrix {
  public:
    struct Blank {
        bool operator==(const Blank&) const = default;
    };
    struct Plus {
        bool operator==(const Plus&) const = default;
    };
    using Cell = std::variant<Blank, Rational, Plus>;

    explicit FormMatrix(int n) : n_(n), cells_(static_cast<size_t>(n) * n, Blank{}) {}

    int size() const { return n_; }
    const Cell& cell(int i, int j) const { return cells_[idx(i, j)]; }

    void set(int i, int j, Cell c) {
        if (std::holds_alternative<Rational>(c) && std::get<Rational>(c) < 0)
            throw std::invalid_argument("form constants must be nonnegative");
        cells_[idx(i, j)] = c;
        cells_[idx(j, i)] = std::move(c);
    }

    // All cells constrained: a concrete matrix with blanks filled by `blank`.
    SymMatrix instantiate(const Rational& blank, const Rational& plus) const {
        if (plus <= 0) throw std::invalid_argument("plus fill must be positive");
        SymMatrix out(n_);
        for (int i = 1; i <= n_; ++i)
            for (int j = i; j <= n_; ++j) {
                const Cell& c = cell(i, j);
                if (std::holds_alternative<Blank>(c))
                    out.set(i, j, blank);
                else if (std::holds_alternative<Plus>(c))
                    out.set(i, j, plus);
                else
                    out.set(i, j, std::get<Rational>(c));
            }
        return out;
    }

    static FormMatrix parse(std::istream& in) {
        int n = 0;
        in >> n;
        if (!in || n < 1) throw ParseError("form matrix: bad size header");
        FormMatrix f(n);
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j) {
                std::string tok;
                if (!(in >> tok)) throw ParseError("form matrix: not enough cells");
                Cell c;
                if (tok == ".")
                    c = Blank{};
                else if (tok == "+")
                    c = Plus{};
                else
                    c = parse_rational(tok);
                if (i <= j)
                    f.set(i, j, c);
                else if (!(f.cell(i, j) == c))
                    throw ParseError("form matrix: pattern is not symmetric");
            }
        return f;
    }

  private:
    size_t idx(int i, int j) const {
        if (i < 1 || i > n_ || j < 1 || j > n_)
            throw DimensionError("form index out of range");
        return static_cast<size_t>(i - 1) * n_ + (j - 1);
    }

    int n_;
    std::vector<Cell> cells_;
};

// True iff every constant cell matches exactly and every "+" cell is
// strictly positive; blanks are unconstrained. A must be nonnegative.
inline bool matches_form(const SymMatrix& a, const FormMatrix& f) {
    if (a.size() != f.size()) throw DimensionError("form size mismatch");
    for (int i = 1; i <= a.size(); ++i)
        for (int j = i; j <= a.size(); ++j) {
            if (a.at(i, j) < 0)
                throw std::invalid_argument("matches_form expects a nonnegative matrix");
            const auto& c = f.cell(i, j);
            if (std::holds_alternative<FormMatrix::Plus>(c)) {
                if (!(a.at(i, j) > 0)) return false;
            } else if (std::holds_alternative<Rational>(c)) {
                if (a.at(i, j) != std::get<Rational>(c)) return false;
            }
        }
    return true;
}

}  // namespace tropbasis

#pragma once

// Truncated Puiseux series with exact rational exponents and coefficients.
//
// A series is a sorted list of (exponent, nonzero coefficient) terms, all
// below a cutoff exponent; terms at or beyond the cutoff are unknown. An
// empty term list means "zero up to the cutoff", which is a first-class
// state distinct from exact zero. deg is the leading exponent (the
// valuation): deg(ab) = deg(a) + deg(b) always, and
// deg(a+b) = min(deg a, deg b) unless the leading coefficients cancel.
//
// Cutoff bookkeeping is honest: multiplication tightens the result cutoff to
// min(cutoff_a + deg b, cutoff_b + deg a) so unknown tails can never
// masquerade as known zeros.

#include <json.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "tropbasis/matrix.hpp"
#include "tropbasis/rational.hpp"

namespace tropbasis {

struct DivisionByZeroToCutoff : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CutoffExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class PuiseuxSeries {
  public:
    struct Term {
        Rational exponent;
        Rational coeff;
        bool operator==(const Term&) const = default;
    };

    PuiseuxSeries() : cutoff_(0) {}

    static PuiseuxSeries zero(const Rational& cutoff) {
        PuiseuxSeries s;
        s.cutoff_ = cutoff;
        return s;
    }

    static PuiseuxSeries monomial(const Rational& coeff, const Rational& exponent,
                                  const Rational& cutoff) {
        PuiseuxSeries s;
        s.cutoff_ = cutoff;
        if (coeff != 0 && exponent < cutoff) s.terms_.push_back({exponent, coeff});
        return s;
    }

    static PuiseuxSeries from_terms(std::vector<Term> terms, const Rational& cutoff) {
        std::sort(terms.begin(), terms.end(),
                  [](const Term& a, const Term& b) { return a.exponent < b.exponent; });
        PuiseuxSeries s;
        s.cutoff_ = cutoff;
        for (auto& t : terms) {
            if (t.coeff == 0) continue;
            if (!s.terms_.empty() && s.terms_.back().exponent == t.exponent)
                throw std::invalid_argument("duplicate exponent in series terms");
            if (t.exponent < cutoff) s.terms_.push_back(std::move(t));
        }
        return s;
    }

    const std::vector<Term>& terms() const { return terms_; }
    const Rational& cutoff() const { return cutoff_; }
    bool is_zero_to_cutoff() const { return terms_.empty(); }

    // Leading exponent; nullopt when zero up to the cutoff.
    std::optional<Rational> deg() const {
        if (terms_.empty()) return std::nullopt;
        return terms_.front().exponent;
    }

    const Rational& leading_coeff() const {
        if (terms_.empty()) throw std::logic_error("leading_coeff of zero-to-cutoff series");
        return terms_.front().coeff;
    }

    // Coefficient at an exact exponent (zero when the exponent is absent but
    // still below the cutoff).
    Rational coeff_at(const Rational& exponent) const {
        if (exponent >= cutoff_)
            throw CutoffExhausted("coefficient requested at or beyond the cutoff");
        for (const auto& t : terms_) {
            if (t.exponent == exponent) return t.coeff;
            if (t.exponent > exponent) break;
        }
        return Rational(0);
    }

    PuiseuxSeries truncated(const Rational& new_cutoff) const {
        PuiseuxSeries s;
        s.cutoff_ = std::min(cutoff_, new_cutoff);
        for (const auto& t : terms_)
            if (t.exponent < s.cutoff_) s.terms_.push_back(t);
        return s;
    }

    // Multiplication by t^delta: exact, cutoff shifts along.
    PuiseuxSeries shifted(const Rational& delta) const {
        PuiseuxSeries s = *this;
        s.cutoff_ += delta;
        for (auto& t : s.terms_) t.exponent += delta;
        return s;
    }

    // Multiplication by an exact nonzero rational constant.
    PuiseuxSeries scaled(const Rational& c) const {
        if (c == 0) throw std::invalid_argument("scaling a series by zero");
        PuiseuxSeries s = *this;
        for (auto& t : s.terms_) t.coeff *= c;
        return s;
    }

    PuiseuxSeries operator-() const {
        PuiseuxSeries s = *this;
        for (auto& t : s.terms_) t.coeff = -t.coeff;
        return s;
    }

    friend PuiseuxSeries operator+(const PuiseuxSeries& a, const PuiseuxSeries& b) {
        PuiseuxSeries s;
        s.cutoff_ = std::min(a.cutoff_, b.cutoff_);
        size_t i = 0, j = 0;
        while (i < a.terms_.size() || j < b.terms_.size()) {
            const Term* ta = i < a.terms_.size() ? &a.terms_[i] : nullptr;
            const Term* tb = j < b.terms_.size() ? &b.terms_[j] : nullptr;
            Term next;
            if (ta && tb && ta->exponent == tb->exponent) {
                next = {ta->exponent, ta->coeff + tb->coeff};
                ++i, ++j;
            } else if (tb == nullptr || (ta && ta->exponent < tb->exponent)) {
                next = *ta;
                ++i;
            } else {
                next = *tb;
                ++j;
            }
            if (next.exponent >= s.cutoff_) break;
            if (next.coeff != 0) s.terms_.push_back(std::move(next));
        }
        return s;
    }

    friend PuiseuxSeries operator-(const PuiseuxSeries& a, const PuiseuxSeries& b) {
        return a + (-b);
    }

    friend PuiseuxSeries operator*(const PuiseuxSeries& a, const PuiseuxSeries& b) {
        // Unknown-tail accounting: hidden terms of a start at cutoff_a, so the
        // product is known only below min(cutoff_a + deg b, cutoff_b + deg a);
        // for a zero-to-cutoff factor its cutoff bounds the hidden degree.
        Rational da = a.deg().value_or(a.cutoff_);
        Rational db = b.deg().value_or(b.cutoff_);
        Rational cut = std::min(Rational(a.cutoff_ + db), Rational(b.cutoff_ + da));
        PuiseuxSeries s;
        s.cutoff_ = cut;
        std::map<Rational, Rational> acc;
        for (const auto& ta : a.terms_)
            for (const auto& tb : b.terms_) {
                Rational e = ta.exponent + tb.exponent;
                if (e < cut) acc[e] += ta.coeff * tb.coeff;
            }
        for (auto& [e, c] : acc)
            if (c != 0) s.terms_.push_back({e, c});
        return s;
    }

    friend PuiseuxSeries operator/(const PuiseuxSeries& a, const PuiseuxSeries& b) {
        if (b.is_zero_to_cutoff())
            throw DivisionByZeroToCutoff("division by a series with no known terms");
        Rational db = *b.deg();
        Rational da = a.deg().value_or(a.cutoff_);
        // cutoff(a * b^-1): b^-1 is known mod (cutoff_b - 2 deg b).
        Rational cut = std::min(Rational(a.cutoff_ - db), Rational(b.cutoff_ - 2 * db + da));
        PuiseuxSeries q = zero(cut);
        PuiseuxSeries r = a;
        int guard = 0;
        while (!r.is_zero_to_cutoff()) {
            Rational e = *r.deg() - db;
            if (e >= cut) break;
            Rational c = r.leading_coeff() / b.leading_coeff();
            PuiseuxSeries t = monomial(c, e, cut);
            q.terms_.push_back({e, c});
            r = r - t * b;
            if (++guard > 100000)
                throw CutoffExhausted("series division did not reach the cutoff");
        }
        return q;
    }

    bool operator==(const PuiseuxSeries& o) const {
        return cutoff_ == o.cutoff_ && terms_ == o.terms_;
    }

  private:
    std::vector<Term> terms_;
    Rational cutoff_;
};

// Equality of the known parts below the common cutoff.
inline bool agree_mod_common_cutoff(const PuiseuxSeries& a, const PuiseuxSeries& b) {
    Rational cut = std::min(a.cutoff(), b.cutoff());
    return a.truncated(cut).terms() == b.truncated(cut).terms();
}

// ---------------------------------------------------------------------------
// Series matrices.

class SeriesMatrix {
  public:
    SeriesMatrix() = default;
    SeriesMatrix(int rows, int cols, const Rational& cutoff)
        : rows_(rows), cols_(cols), cutoff_(cutoff),
          entries_(static_cast<size_t>(rows) * cols, PuiseuxSeries::zero(cutoff)) {
        if (rows < 1 || cols < 1) throw DimensionError("matrix dimensions must be positive");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const Rational& cutoff() const { return cutoff_; }

    const PuiseuxSeries& at(int i, int j) const { return entries_[idx(i, j)]; }

    void set(int i, int j, const PuiseuxSeries& s) {
        if (s.cutoff() < cutoff_)
            throw std::invalid_argument("entry cutoff below the matrix cutoff");
        entries_[idx(i, j)] = s.truncated(cutoff_);
    }

    bool is_symmetric() const {
        if (rows_ != cols_) return false;
        for (int i = 1; i <= rows_; ++i)
            for (int j = i + 1; j <= cols_; ++j)
                if (!(at(i, j) == at(j, i))) return false;
        return true;
    }

  private:
    size_t idx(int i, int j) const {
        if (i < 1 || i > rows_ || j < 1 || j > cols_)
            throw DimensionError("matrix index out of range");
        return static_cast<size_t>(i - 1) * cols_ + (j - 1);
    }

    int rows_ = 0, cols_ = 0;
    Rational cutoff_;
    std::vector<PuiseuxSeries> entries_;
};

// Entrywise degree map; fails if some entry is zero up to the cutoff.
inline std::optional<TropMatrix> tropicalize(const SeriesMatrix& m) {
    TropMatrix out(m.rows(), m.cols());
    for (int i = 1; i <= m.rows(); ++i)
        for (int j = 1; j <= m.cols(); ++j) {
            auto d = m.at(i, j).deg();
            if (!d) return std::nullopt;
            out.at(i, j) = *d;
        }
    return out;
}

// Rank modulo t^cutoff: elimination pivoting on the entry of minimal degree;
// entries that are zero-to-cutoff count as zero provided their cutoff still
// clears min_confidence, otherwise the decision is ambiguous and the caller
// should rebuild with a larger cutoff.
inline int series_rank(const SeriesMatrix& m, const Rational& min_confidence) {
    std::vector<std::vector<PuiseuxSeries>> w(m.rows());
    for (int i = 1; i <= m.rows(); ++i)
        for (int j = 1; j <= m.cols(); ++j) w[i - 1].push_back(m.at(i, j));
    std::vector<bool> row_used(m.rows(), false), col_used(m.cols(), false);
    int rank = 0;
    for (;;) {
        int pi = -1, pj = -1;
        std::optional<Rational> best;
        for (int i = 0; i < m.rows(); ++i) {
            if (row_used[i]) continue;
            for (int j = 0; j < m.cols(); ++j) {
                if (col_used[j]) continue;
                auto d = w[i][j].deg();
                if (d && (!best || *d < *best)) {
                    best = *d;
                    pi = i;
                    pj = j;
                }
            }
        }
        if (pi < 0) {
            for (int i = 0; i < m.rows(); ++i) {
                if (row_used[i]) continue;
                for (int j = 0; j < m.cols(); ++j)
                    if (!col_used[j] && w[i][j].cutoff() < min_confidence)
                        throw CutoffExhausted("ambiguous zero entry during rank elimination");
            }
            return rank;
        }
        ++rank;
        row_used[pi] = true;
        col_used[pj] = true;
        for (int i = 0; i < m.rows(); ++i) {
            if (row_used[i]) continue;
            if (w[i][pj].is_zero_to_cutoff()) {
                if (w[i][pj].cutoff() < min_confidence)
                    throw CutoffExhausted("ambiguous zero entry during rank elimination");
                continue;
            }
            PuiseuxSeries factor = w[i][pj] / w[pi][pj];
            for (int j = 0; j < m.cols(); ++j) {
                if (col_used[j]) continue;
                w[i][j] = w[i][j] - factor * w[pi][j];
            }
        }
    }
}

inline int series_rank(const SeriesMatrix& m) {
    Rational max_deg(0);
    for (int i = 1; i <= m.rows(); ++i)
        for (int j = 1; j <= m.cols(); ++j)
            if (auto d = m.at(i, j).deg(); d && *d > max_deg) max_deg = *d;
    return series_rank(m, max_deg + 1);
}

// ---------------------------------------------------------------------------
// Generic coefficients.

// Uniform nonzero rational from {1, ..., 2^31}; two draws collide with
// probability below 1e-9.
inline Rational random_generic_coefficient(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> d(1, 2147483648L);
    return Rational(d(rng));
}

// ---------------------------------------------------------------------------
// JSON serialization: [[exponent, coefficient], ...] plus the cutoff.

inline nlohmann::json to_json(const PuiseuxSeries& s) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : s.terms())
        terms.push_back({to_string(t.exponent), to_string(t.coeff)});
    return {{"terms", std::move(terms)}, {"cutoff", to_string(s.cutoff())}};
}

inline PuiseuxSeries series_from_json(const nlohmann::json& j) {
    std::vector<PuiseuxSeries::Term> terms;
    for (const auto& t : j.at("terms"))
        terms.push_back({parse_rational(t[0].get<std::string>()),
                         parse_rational(t[1].get<std::string>())});
    return PuiseuxSeries::from_terms(std::move(terms),
                                     parse_rational(j.at("cutoff").get<std::string>()));
}

inline nlohmann::json to_json(const SeriesMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 1; i <= m.rows(); ++i) {
        nlohmann::json r = nlohmann::json::array();
        for (int j = 1; j <= m.cols(); ++j) r.push_back(to_json(m.at(i, j)));
        rows.push_back(std::move(r));
    }
    return {{"rows", m.rows()},
            {"cols", m.cols()},
            {"cutoff", to_string(m.cutoff())},
            {"entries", std::move(rows)}};
}

inline SeriesMatrix series_matrix_from_json(const nlohmann::json& j) {
    SeriesMatrix m(j.at("rows").get<int>(), j.at("cols").get<int>(),
                   parse_rational(j.at("cutoff").get<std::string>()));
    const auto& rows = j.at("entries");
    for (int i = 1; i <= m.rows(); ++i)
        for (int jj = 1; jj <= m.cols(); ++jj)
            m.set(i, jj, series_from_json(rows[i - 1][jj - 1]));
    return m;
}

}  // namespace tropbasis

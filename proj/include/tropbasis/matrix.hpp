#pragma once

// Matrices over the min-plus semiring with exact rational entries, submatrix
// selectors that inherit parent indices, and the shared text / JSON formats.
//
// Text format: first line "m n" (or "n sym"), then entries row-major,
// rationals as "p/q" or integers, whitespace separated.

#include <json.hpp>

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tropbasis/permutation.hpp"
#include "tropbasis/rational.hpp"

namespace tropbasis {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

class TropMatrix {
  public:
    TropMatrix() = default;
    TropMatrix(int rows, int cols, const Rational& fill = Rational(0))
        : rows_(rows), cols_(cols), entries_(static_cast<size_t>(rows) * cols, fill) {
        if (rows < 1 || cols < 1) throw DimensionError("matrix dimensions must be positive");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    // 1-based access.
    const Rational& at(int i, int j) const { return entries_[idx(i, j)]; }
    Rational& at(int i, int j) { return entries_[idx(i, j)]; }

    bool is_square() const { return rows_ == cols_; }

    bool is_symmetric() const {
        if (!is_square()) return false;
        for (int i = 1; i <= rows_; ++i)
            for (int j = i + 1; j <= cols_; ++j)
                if (at(i, j) != at(j, i)) return false;
        return true;
    }

    TropMatrix transposed() const {
        TropMatrix t(cols_, rows_);
        for (int i = 1; i <= rows_; ++i)
            for (int j = 1; j <= cols_; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    bool operator==(const TropMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && entries_ == o.entries_;
    }

  private:
    size_t idx(int i, int j) const {
        if (i < 1 || i > rows_ || j < 1 || j > cols_)
            throw DimensionError("matrix index out of range");
        return static_cast<size_t>(i - 1) * cols_ + (j - 1);
    }

    int rows_ = 0, cols_ = 0;
    std::vector<Rational> entries_;
};

// Symmetric n x n matrix; symmetry is checked on construction and writes go
// through set() which mirrors the entry.
class SymMatrix {
  public:
    SymMatrix() = default;
    explicit SymMatrix(int n, const Rational& fill = Rational(0)) : m_(n, n, fill) {}

    explicit SymMatrix(TropMatrix m) : m_(std::move(m)) {
        if (!m_.is_symmetric()) throw DimensionError("matrix is not symmetric");
    }

    int size() const { return m_.rows(); }
    const Rational& at(int i, int j) const { return m_.at(i, j); }

    void set(int i, int j, const Rational& v) {
        m_.at(i, j) = v;
        m_.at(j, i) = v;
    }

    const TropMatrix& as_matrix() const { return m_; }

    bool operator==(const SymMatrix& o) const { return m_ == o.m_; }

  private:
    TropMatrix m_;
};

// Sorted row/column index subsets of equal cardinality; indices are the
// parent matrix's (submatrices inherit their indices).
struct SubmatrixSelector {
    std::vector<int> row_indices;
    std::vector<int> col_indices;

    SubmatrixSelector() = default;
    SubmatrixSelector(std::vector<int> rows, std::vector<int> cols)
        : row_indices(std::move(rows)), col_indices(std::move(cols)) {
        std::sort(row_indices.begin(), row_indices.end());
        std::sort(col_indices.begin(), col_indices.end());
        if (row_indices.size() != col_indices.size())
            throw DimensionError("selector row/col cardinality mismatch");
    }

    static SubmatrixSelector full(int rows, int cols) {
        std::vector<int> r(rows), c(cols);
        std::iota(r.begin(), r.end(), 1);
        std::iota(c.begin(), c.end(), 1);
        return SubmatrixSelector(std::move(r), std::move(c));
    }

    static SubmatrixSelector square(int n) { return full(n, n); }

    // Principal submatrix of a symmetric n x n with row/col i removed (A_ii),
    // or the submatrix with row i and column j removed (A_ij).
    static SubmatrixSelector removing(int n, int row, int col) {
        std::vector<int> r, c;
        for (int k = 1; k <= n; ++k) {
            if (k != row) r.push_back(k);
            if (k != col) c.push_back(k);
        }
        return SubmatrixSelector(std::move(r), std::move(c));
    }

    int size() const { return static_cast<int>(row_indices.size()); }

    bool operator==(const SubmatrixSelector& o) const {
        return row_indices == o.row_indices && col_indices == o.col_indices;
    }
};

inline void check_selector(const TropMatrix& a, const SubmatrixSelector& sel) {
    for (int r : sel.row_indices)
        if (r < 1 || r > a.rows()) throw DimensionError("selector row index out of range");
    for (int c : sel.col_indices)
        if (c < 1 || c > a.cols()) throw DimensionError("selector col index out of range");
}

// ---------------------------------------------------------------------------
// Parsing and serialization.

namespace detail {
inline ParseError parse_error_at(int line, int col, const std::string& msg) {
    std::ostringstream os;
    os << "line " << line << ", column " << col << ": " << msg;
    return ParseError(os.str());
}
}  // namespace detail

struct ParsedMatrix {
    TropMatrix matrix;
    bool symmetric = false;
};

inline ParsedMatrix parse_matrix_text(std::istream& in) {
    std::string header;
    int line_no = 0;
    while (std::getline(in, header)) {
        ++line_no;
        auto pos = header.find('#');
        if (pos != std::string::npos) header.erase(pos);
        if (header.find_first_not_of(" \t\r\n") != std::string::npos) break;
    }
    std::istringstream hs(header);
    std::string tok1, tok2;
    if (!(hs >> tok1 >> tok2))
        throw detail::parse_error_at(line_no, 1, "expected header 'm n' or 'n sym'");
    int rows = 0, cols = 0;
    bool symmetric = false;
    try {
        if (tok2 == "sym") {
            rows = cols = std::stoi(tok1);
            symmetric = true;
        } else {
            rows = std::stoi(tok1);
            cols = std::stoi(tok2);
        }
    } catch (const std::exception&) {
        throw detail::parse_error_at(line_no, 1, "bad dimension token");
    }
    if (rows < 1 || cols < 1)
        throw detail::parse_error_at(line_no, 1, "dimensions must be positive");

    TropMatrix m(rows, cols);
    int i = 1, j = 1;
    std::string line;
    while (i <= rows && std::getline(in, line)) {
        ++line_no;
        auto pos = line.find('#');
        if (pos != std::string::npos) line.erase(pos);
        std::istringstream ls(line);
        std::string tok;
        int col_pos = 1;
        while (ls >> tok) {
            if (i > rows)
                throw detail::parse_error_at(line_no, col_pos, "too many entries");
            try {
                m.at(i, j) = parse_rational(tok);
            } catch (const ParseError& e) {
                throw detail::parse_error_at(line_no, col_pos, e.what());
            }
            if (++j > cols) {
                j = 1;
                ++i;
            }
            ++col_pos;
        }
    }
    if (i <= rows)
        throw detail::parse_error_at(line_no, 1, "not enough entries for declared dimensions");
    if (symmetric && !m.is_symmetric())
        throw detail::parse_error_at(1, 1, "matrix declared 'sym' is not symmetric");
    return {std::move(m), symmetric};
}

inline ParsedMatrix parse_matrix_json(const nlohmann::json& j) {
    if (!j.contains("rows") || !j.contains("cols") || !j.contains("entries"))
        throw ParseError("matrix JSON needs rows, cols, entries");
    int rows = j.at("rows").get<int>();
    int cols = j.at("cols").get<int>();
    bool symmetric = j.value("symmetric", false);
    TropMatrix m(rows, cols);
    const auto& rowsj = j.at("entries");
    if (static_cast<int>(rowsj.size()) != rows) throw ParseError("entries row count mismatch");
    for (int i = 1; i <= rows; ++i) {
        const auto& r = rowsj[i - 1];
        if (static_cast<int>(r.size()) != cols) throw ParseError("entries col count mismatch");
        for (int jj = 1; jj <= cols; ++jj) {
            const auto& cell = r[jj - 1];
            m.at(i, jj) = cell.is_number_integer()
                              ? Rational(cell.get<long>())
                              : parse_rational(cell.get<std::string>());
        }
    }
    if (symmetric && !m.is_symmetric()) throw ParseError("matrix declared symmetric is not");
    return {std::move(m), symmetric};
}

// Accepts either the text format or a JSON object (detected by leading '{').
inline ParsedMatrix parse_matrix(std::istream& in) {
    int c = in.peek();
    while (c == ' ' || c == '\n' || c == '\r' || c == '\t') {
        in.get();
        c = in.peek();
    }
    if (c == '{') {
        nlohmann::json j;
        in >> j;
        return parse_matrix_json(j);
    }
    return parse_matrix_text(in);
}

inline nlohmann::json matrix_to_json(const TropMatrix& m, bool symmetric) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 1; i <= m.rows(); ++i) {
        nlohmann::json r = nlohmann::json::array();
        for (int j = 1; j <= m.cols(); ++j) r.push_back(to_string(m.at(i, j)));
        rows.push_back(std::move(r));
    }
    return nlohmann::json{{"rows", m.rows()},
                          {"cols", m.cols()},
                          {"symmetric", symmetric},
                          {"entries", std::move(rows)}};
}

inline void write_matrix_text(std::ostream& os, const TropMatrix& m, bool symmetric) {
    if (symmetric)
        os << m.rows() << " sym\n";
    else
        os << m.rows() << ' ' << m.cols() << '\n';
    for (int i = 1; i <= m.rows(); ++i) {
        for (int j = 1; j <= m.cols(); ++j) os << (j > 1 ? " " : "") << to_string(m.at(i, j));
        os << '\n';
    }
}

}  // namespace tropbasis

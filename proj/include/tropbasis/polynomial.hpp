#pragma once

// Tropical polynomials as explicit monomial lists, their evaluation with
// exact tie detection, and the hypersurface (double-min locus) membership
// test: a point lies on V(F) iff at least two monomials of F are minimal
// there.

#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tropbasis/determinant.hpp"
#include "tropbasis/matrix.hpp"
#include "tropbasis/rational.hpp"

namespace tropbasis {

struct TropPolynomial {
    struct Mono {
        Rational coeff;
        std::vector<unsigned> exponents;
        std::string name;  // optional display label, e.g. "X" or "1X^3"
    };
    std::vector<Mono> monomials;

    int dimension() const {
        return monomials.empty() ? 0 : static_cast<int>(monomials.front().exponents.size());
    }

    void add(Rational coeff, std::vector<unsigned> exps, std::string name = "") {
        if (!monomials.empty() && exps.size() != monomials.front().exponents.size())
            throw DimensionError("exponent vector length mismatch");
        monomials.push_back({std::move(coeff), std::move(exps), std::move(name)});
    }
};

struct TropEvalResult {
    Rational value;
    std::vector<size_t> argmin;  // indices of all minimal monomials
};

inline TropEvalResult trop_eval(const TropPolynomial& f, const std::vector<Rational>& point) {
    if (f.monomials.empty()) throw std::invalid_argument("polynomial has no monomials");
    if (static_cast<int>(point.size()) != f.dimension())
        throw DimensionError("point dimension does not match polynomial");
    std::optional<Rational> best;
    std::vector<size_t> argmin;
    for (size_t k = 0; k < f.monomials.size(); ++k) {
        const auto& m = f.monomials[k];
        Rational v = m.coeff;
        for (size_t d = 0; d < point.size(); ++d)
            if (m.exponents[d] != 0) v += Rational(static_cast<long>(m.exponents[d])) * point[d];
        if (!best || v < *best) {
            best = v;
            argmin.clear();
        }
        if (v == *best) argmin.push_back(k);
    }
    return {*best, std::move(argmin)};
}

inline bool on_hypersurface(const TropPolynomial& f, const std::vector<Rational>& point) {
    return trop_eval(f, point).argmin.size() >= 2;
}

// The tropical determinantal polynomial of an n x n matrix of indeterminates
// X(i,j), in n^2 variables ordered row-major: one monomial per permutation.
inline TropPolynomial determinantal_polynomial(int n) {
    TropPolynomial f;
    Permutation::for_each(n, [&](const Permutation& sigma) {
        std::vector<unsigned> exps(static_cast<size_t>(n) * n, 0);
        std::ostringstream name;
        for (int i = 1; i <= n; ++i) {
            exps[static_cast<size_t>(i - 1) * n + (sigma(i) - 1)] += 1;
            name << "X" << i << "," << sigma(i);
        }
        f.add(Rational(0), std::move(exps), name.str());
    });
    return f;
}

inline std::vector<Rational> entry_vector(const TropMatrix& a) {
    std::vector<Rational> v;
    v.reserve(static_cast<size_t>(a.rows()) * a.cols());
    for (int i = 1; i <= a.rows(); ++i)
        for (int j = 1; j <= a.cols(); ++j) v.push_back(a.at(i, j));
    return v;
}

}  // namespace tropbasis

#pragma once

// Exact rational scalars for min-plus arithmetic. Tie detection is the core
// semantic of everything downstream, so all values are GMP rationals and
// equality is decidable.

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tropbasis {

using Rational = mpq_class;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parses "p", "-p", or "p/q" (q > 0 after canonicalization).
inline Rational parse_rational(std::string_view token) {
    std::string s(token);
    if (s.empty()) throw ParseError("empty rational token");
    mpq_class q;
    if (q.set_str(s, 10) != 0)
        throw ParseError("bad rational token '" + s + "'");
    if (q.get_den() == 0) throw ParseError("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rational& q) {
    return q.get_str();
}

// Exact conversion to a machine integer when the value is an integer that
// fits; used by integer fast paths that must stay exact.
inline std::optional<long> as_small_int(const Rational& q) {
    if (q.get_den() != 1) return std::nullopt;
    const mpz_class& num = q.get_num();
    if (!num.fits_slong_p()) return std::nullopt;
    return num.get_si();
}

inline Rational half(const Rational& q) { return q / 2; }

}  // namespace tropbasis

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "tropbasis/polynomial.hpp"

using namespace tropbasis;

namespace {

// X + Y + 0 with coefficients (c1, c2, c3): c1*X + c2*Y + c3.
TropPolynomial line(const Rational& cx, const Rational& cy, const Rational& c0) {
    TropPolynomial f;
    f.add(cx, {1, 0}, "X");
    f.add(cy, {0, 1}, "Y");
    f.add(c0, {0, 0}, "0");
    return f;
}

std::vector<Rational> pt(long x, long y) { return {Rational(x), Rational(y)}; }

}  // namespace

TEST_CASE("tropical line evaluation and hypersurface membership") {
    auto f = line(0, 0, 0);  // X + Y + 0
    SECTION("(1,0): Y and 0 tie") {
        auto r = trop_eval(f, pt(1, 0));
        CHECK(r.value == 0);
        CHECK(r.argmin == std::vector<size_t>{1, 2});
        CHECK(on_hypersurface(f, pt(1, 0)));
    }
    SECTION("(-1,0): X uniquely minimal") {
        auto r = trop_eval(f, pt(-1, 0));
        CHECK(r.value == -1);
        CHECK(r.argmin == std::vector<size_t>{0});
        CHECK_FALSE(on_hypersurface(f, pt(-1, 0)));
    }
}

TEST_CASE("1X + 1Y + 0 on the diagonal") {
    auto g = line(1, 1, 0);
    CHECK(on_hypersurface(g, pt(-1, -1)));
    CHECK_FALSE(on_hypersurface(g, pt(0, 0)));
    CHECK(on_hypersurface(g, pt(-2, -2)));
    std::vector<Rational> half{parse_rational("-1/2"), parse_rational("-1/2")};
    CHECK_FALSE(on_hypersurface(g, half));
}

TEST_CASE("tropicalization example 2XY + 1X^3") {
    TropPolynomial f;
    f.add(2, {1, 1}, "2XY");
    f.add(1, {3, 0}, "1X^3");
    auto r = trop_eval(f, pt(0, 0));
    CHECK(r.value == 1);
    REQUIRE(r.argmin.size() == 1);
    CHECK(f.monomials[r.argmin[0]].name == "1X^3");
}

TEST_CASE("dimension mismatch is rejected") {
    auto f = line(0, 0, 0);
    CHECK_THROWS_AS(trop_eval(f, {Rational(1)}), DimensionError);
}

TEST_CASE("determinantal polynomial membership matches tropical singularity") {
    std::mt19937_64 rng(2718);
    auto det3 = determinantal_polynomial(3);
    REQUIRE(det3.monomials.size() == 6);
    for (int iter = 0; iter < 200; ++iter) {
        auto a = oracles::random_matrix(rng, 3, 3, 0, 2);
        CHECK(on_hypersurface(det3, entry_vector(a)) == is_trop_singular(a));
    }
    auto det4 = determinantal_polynomial(4);
    for (int iter = 0; iter < 50; ++iter) {
        auto a = oracles::random_matrix(rng, 4, 4, 0, 1);
        CHECK(on_hypersurface(det4, entry_vector(a)) == is_trop_singular(a));
    }
}

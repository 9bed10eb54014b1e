#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <set>

#include "oracles.hpp"
#include "tropbasis/normal_form.hpp"

using namespace tropbasis;

namespace {

SymMatrix sym_from_rows(const std::vector<std::vector<long>>& rows) {
    TropMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j)
            m.at(static_cast<int>(i + 1), static_cast<int>(j + 1)) = Rational(rows[i][j]);
    return SymMatrix(m);
}

FormMatrix load_form(const std::string& name) {
    std::ifstream in(std::string(TROPBASIS_DATA_DIR) + "/forms/" + name);
    REQUIRE(in.good());
    return FormMatrix::parse(in);
}

using PairSet = std::set<std::vector<std::pair<int, int>>>;

PairSet sym_pair_sets(const SymMatrix& a, const SubmatrixSelector& sel) {
    PairSet out;
    for (const auto& m : sym_minimizing_monomials(a, sel)) out.insert(m.pairs);
    return out;
}

PairSet relabel(const PairSet& in, const Permutation& pi) {
    PairSet out;
    for (const auto& pairs : in) {
        std::vector<std::pair<int, int>> mapped;
        for (auto [i, j] : pairs)
            mapped.emplace_back(std::min(pi(i), pi(j)), std::max(pi(i), pi(j)));
        std::sort(mapped.begin(), mapped.end());
        out.insert(std::move(mapped));
    }
    return out;
}

std::vector<int> relabel_indices(const std::vector<int>& idx, const Permutation& pi) {
    std::vector<int> out;
    for (int i : idx) out.push_back(pi(i));
    std::sort(out.begin(), out.end());
    return out;
}

// Full postcondition oracle for normalize.
void check_normalized(const SymMatrix& a, const NormalizeResult& r) {
    for (int i = 1; i <= 5; ++i) {
        CHECK(r.matrix.at(i, r.realizer(i)) == 0);
        for (int j = i; j <= 5; ++j) CHECK(r.matrix.at(i, j) >= 0);
    }
    // Exactly one diagonal permutation plus the scaling sequence reproduces A'.
    CHECK(apply_scalings(diagonal_permute(a, r.relabeling), r.scalings) == r.matrix);
    // Per-submatrix minimizing-monomial preservation, on a few selectors.
    std::vector<SubmatrixSelector> sels = {
        SubmatrixSelector::square(5),
        SubmatrixSelector::removing(5, 1, 1),
        SubmatrixSelector::removing(5, 4, 4),
        SubmatrixSelector::removing(5, 5, 2),
        SubmatrixSelector({1, 3}, {2, 5}),
    };
    for (const auto& sel : sels) {
        auto mapped = relabel(sym_pair_sets(a, sel), r.relabeling);
        SubmatrixSelector sel2(relabel_indices(sel.row_indices, r.relabeling),
                               relabel_indices(sel.col_indices, r.relabeling));
        CHECK(mapped == sym_pair_sets(r.matrix, sel2));
    }
}

}  // namespace

TEST_CASE("diagonal permutation") {
    auto a = sym_from_rows({{0, 1, 2}, {1, 0, 3}, {2, 3, 0}});
    SECTION("identity leaves the matrix unchanged") {
        CHECK(diagonal_permute(a, Permutation::identity(3)) == a);
    }
    SECTION("(12) relabels as expected") {
        auto got = diagonal_permute(a, Permutation::from_cycles(3, {{1, 2}}));
        CHECK(got == sym_from_rows({{0, 1, 3}, {1, 0, 2}, {3, 2, 0}}));
    }
    SECTION("preserves symmetric tropical rank") {
        std::mt19937_64 rng(1001);
        for (int iter = 0; iter < 200; ++iter) {
            auto s = oracles::random_sym_matrix(rng, 5, 0, 2);
            std::vector<int> im{1, 2, 3, 4, 5};
            std::shuffle(im.begin(), im.end(), rng);
            Permutation sigma(im);
            CHECK(symmetric_tropical_rank(diagonal_permute(s, sigma)) ==
                  symmetric_tropical_rank(s));
        }
    }
}

TEST_CASE("symmetric scaling") {
    SECTION("c = 0 is the identity") {
        auto a = sym_from_rows({{0, 1}, {1, 4}});
        CHECK(symmetric_scale(a, 1, 0) == a);
    }
    SECTION("scales row and column together, diagonal twice") {
        auto a = sym_from_rows({{0, 1}, {1, 4}});
        auto got = symmetric_scale(a, 1, parse_rational("-1/2"));
        CHECK(got.at(1, 1) == -1);
        CHECK(got.at(1, 2) == parse_rational("1/2"));
        CHECK(got.at(2, 1) == parse_rational("1/2"));
        CHECK(got.at(2, 2) == 4);
    }
    SECTION("preserves every submatrix's minimizing-monomial multisets") {
        std::mt19937_64 rng(77);
        for (int iter = 0; iter < 100; ++iter) {
            auto s = oracles::random_sym_matrix(rng, 5, -2, 2);
            auto t = symmetric_scale(s, 1 + static_cast<int>(rng() % 5),
                                     Rational(static_cast<long>(rng() % 7) - 3));
            for (const auto& sel :
                 {SubmatrixSelector::square(5), SubmatrixSelector::removing(5, 2, 4),
                  SubmatrixSelector({1, 2, 4}, {2, 3, 5})}) {
                CHECK(sym_pair_sets(s, sel) == sym_pair_sets(t, sel));
            }
        }
    }
    SECTION("preserves symmetric tropical rank") {
        std::mt19937_64 rng(78);
        for (int iter = 0; iter < 100; ++iter) {
            auto s = oracles::random_sym_matrix(rng, 5, 0, 2);
            auto t = symmetric_scale(s, 1 + static_cast<int>(rng() % 5), parse_rational("3/2"));
            CHECK(symmetric_tropical_rank(t) == symmetric_tropical_rank(s));
        }
    }
}

TEST_CASE("lemma 1 rewrite") {
    SECTION("(1234) splits into (12)(34) and (14)(23)") {
        auto sigma = Permutation::from_cycles(5, {{1, 2, 3, 4}});
        auto [r1, r2] = lemma1_rewrite(sigma, {1, 2, 3, 4});
        CHECK(r1 == Permutation::from_cycles(5, {{1, 2}, {3, 4}}));
        CHECK(r2 == Permutation::from_cycles(5, {{1, 4}, {2, 3}}));
        CHECK(r1(5) == 5);
        CHECK(r2(5) == 5);
    }
    SECTION("cycle must be present") {
        auto sigma = Permutation::from_cycles(5, {{1, 2}, {3, 4}});
        CHECK_THROWS_AS(lemma1_rewrite(sigma, {1, 2, 3, 4}), std::invalid_argument);
    }
    SECTION("rewrites of minimizing 4-cycles also realize") {
        std::mt19937_64 rng(31);
        int found = 0, iters = 0;
        while (found < 500 && iters < 20000) {
            ++iters;
            auto s = oracles::random_sym_matrix(rng, 5, 0, 1);
            for (const auto& sigma : realizer_permutations(s.as_matrix())) {
                for (const auto& cyc : sigma.cycles()) {
                    if (cyc.size() != 4) continue;
                    auto [r1, r2] = lemma1_rewrite(sigma, cyc);
                    CHECK(realizes(s, r1));
                    CHECK(realizes(s, r2));
                    ++found;
                    break;
                }
            }
        }
        INFO("4-cycle realizers exercised: " << found);
        CHECK(found >= 500);
    }
}

TEST_CASE("transposition realizer exists for singular matrices") {
    SECTION("off-diagonal form with blanks = 1") {
        auto f = load_form("off_diagonal.txt");
        auto a = f.instantiate(Rational(1), Rational(1));
        auto sigma = find_transposition_realizer(a);
        CHECK(sigma.contains_transposition());
        CHECK(realizes(a, sigma));
    }
    SECTION("all-zero matrix") {
        SymMatrix z(5);
        auto sigma = find_transposition_realizer(z);
        CHECK(sigma.contains_transposition());
        CHECK(realizes(z, sigma));
    }
    SECTION("symmetrically nonsingular input is rejected") {
        // Block matrix built from the nonsingular 3x3 pattern
        // [[0,+,N1],[+,0,P],[N1,P,0]]: identity is the unique minimizer.
        auto a = sym_from_rows({{0, 1, 1, 9, 9},
                                {1, 0, 1, 9, 9},
                                {1, 1, 0, 9, 9},
                                {9, 9, 9, 0, 1},
                                {9, 9, 9, 1, 0}});
        REQUIRE_FALSE(is_sym_trop_singular(a));
        CHECK_THROWS_AS(find_transposition_realizer(a), NotSingularError);
    }
}

TEST_CASE("normalize handles the already-normalized identity shape") {
    auto a = sym_from_rows({{0, 2, 1, 1, 3},
                            {2, 0, 4, 1, 1},
                            {1, 4, 0, 2, 1},
                            {1, 1, 2, 0, 5},
                            {3, 1, 1, 5, 0}});
    auto r = normalize(a, Permutation::identity(5));
    CHECK(r.matrix == a);
    CHECK(r.scalings.empty());
    CHECK(r.realizer == Permutation::identity(5));
    check_normalized(a, r);
}

TEST_CASE("normalize the (12) case, negative-diagonal branch") {
    auto a = sym_from_rows({{-6, -4, 0, 1, 2},
                            {-4, 3, 1, 0, 1},
                            {0, 1, 0, 2, 3},
                            {1, 0, 2, 0, 1},
                            {2, 1, 3, 1, 0}});
    auto sigma = Permutation::from_cycles(5, {{1, 2}});
    REQUIRE(realizes(a, sigma));
    // After the first scaling of the proof a11 is still negative and the
    // residual row-1/row-2 freedom has to repair it.
    auto r = normalize(a, sigma);
    CHECK(r.realizer == sigma);
    check_normalized(a, r);
    CHECK(r.matrix.at(1, 2) == 0);
    CHECK(r.matrix.at(1, 1) == 0);
}

TEST_CASE("normalize satisfies its postconditions on random realizers") {
    std::mt19937_64 rng(20240202);
    int done = 0;
    while (done < 1000) {
        auto a = oracles::random_sym_matrix(rng, 5, -3, 3);
        auto realizers = realizer_permutations(a.as_matrix());
        const auto& sigma = realizers[rng() % realizers.size()];
        auto r = normalize(a, sigma);
        check_normalized(a, r);
        ++done;
    }
}

TEST_CASE("normalize exercises every cycle type") {
    std::mt19937_64 rng(5150);
    std::set<std::vector<int>> seen;
    int iters = 0;
    while (seen.size() < 7 && iters < 40000) {
        ++iters;
        auto a = oracles::random_sym_matrix(rng, 5, -2, 2);
        for (const auto& sigma : realizer_permutations(a.as_matrix())) {
            auto type = sigma.cycle_type();
            if (seen.count(type)) continue;
            auto r = normalize(a, sigma);
            check_normalized(a, r);
            seen.insert(type);
        }
    }
    INFO("cycle types covered: " << seen.size());
    // id, 2, 3, 2+2, 4, 3+2, 5
    CHECK(seen.size() == 7);
}

TEST_CASE("normalize is idempotent") {
    std::mt19937_64 rng(616);
    for (int iter = 0; iter < 100; ++iter) {
        auto a = oracles::random_sym_matrix(rng, 5, -2, 2);
        auto realizers = realizer_permutations(a.as_matrix());
        auto r = normalize(a, realizers.front());
        auto r2 = normalize(r.matrix, r.realizer);
        CHECK(r2.matrix == r.matrix);
        CHECK(r2.scalings.empty());
        CHECK(r2.relabeling == Permutation::identity(5));
    }
}

TEST_CASE("normalize rejects non-realizers") {
    auto a = sym_from_rows({{0, 5, 5, 5, 5},
                            {5, 0, 5, 5, 5},
                            {5, 5, 0, 5, 5},
                            {5, 5, 5, 0, 5},
                            {5, 5, 5, 5, 0}});
    CHECK_THROWS_AS(normalize(a, Permutation::from_cycles(5, {{1, 2}})), NotRealizerError);
}

TEST_CASE("form matching on the section-2 example") {
    auto a = sym_from_rows({{0, 2, 1}, {2, 0, 3}, {1, 3, 0}});

    FormMatrix all_plus_off(3);
    for (int i = 1; i <= 3; ++i) all_plus_off.set(i, i, Rational(0));
    all_plus_off.set(1, 2, FormMatrix::Plus{});
    all_plus_off.set(1, 3, FormMatrix::Plus{});
    all_plus_off.set(2, 3, FormMatrix::Plus{});
    CHECK(matches_form(a, all_plus_off));

    FormMatrix with_consts(3);
    with_consts.set(1, 1, Rational(0));
    with_consts.set(2, 2, Rational(0));
    with_consts.set(3, 3, Rational(0));
    with_consts.set(1, 2, Rational(2));
    with_consts.set(2, 3, FormMatrix::Plus{});
    CHECK(matches_form(a, with_consts));

    FormMatrix blank_corner = all_plus_off;
    blank_corner.set(1, 1, FormMatrix::Blank{});
    CHECK(matches_form(a, blank_corner));

    FormMatrix exact(3);
    exact.set(1, 1, Rational(0));
    exact.set(2, 2, Rational(0));
    exact.set(3, 3, Rational(0));
    exact.set(1, 2, Rational(2));
    exact.set(1, 3, Rational(1));
    exact.set(2, 3, Rational(3));
    CHECK(matches_form(a, exact));

    FormMatrix plus_corner = all_plus_off;
    plus_corner.set(1, 1, FormMatrix::Plus{});
    CHECK_FALSE(matches_form(a, plus_corner));

    FormMatrix blanks(3);
    CHECK(matches_form(a, blanks));
}

TEST_CASE("form files parse and instantiate") {
    auto joints = load_form("joints_example.txt");
    auto inst = joints.instantiate(Rational(1), Rational(1));
    CHECK(inst.at(1, 2) == 0);
    CHECK(inst.at(1, 1) == 1);
    CHECK(inst.at(3, 4) == 0);
    CHECK(matches_form(inst, joints));

    for (const char* name : {"off_diagonal.txt", "lemma3.txt", "lemma5.txt", "lemma6.txt",
                             "lemma8.txt", "lemma9.txt", "lemma10.txt"}) {
        auto f = load_form(name);
        CHECK(f.size() == 5);
        auto m = f.instantiate(Rational(2), Rational(1));
        CHECK(matches_form(m, f));
    }
}

#include "doctest.h"

#include <random>

#include "padint/errors.hpp"
#include "padint/motring.hpp"

using namespace padint;

namespace {

MotElem random_elem(std::mt19937 &rng) {
    std::uniform_int_distribution<int> kind(0, 4), small(-3, 3), pos(0, 3), neg(-3, -1);
    MotElem x;
    int nterms = 1 + rng() % 3;
    for (int i = 0; i < nterms; ++i) {
        mpq_class c(small(rng), 1 + pos(rng));
        c.canonicalize();
        MotElem t = MotElem::constant(c);
        int factors = rng() % 3;
        for (int j = 0; j < factors; ++j) {
            switch (kind(rng)) {
            case 0: t = t * MotElem::L(small(rng)); break;
            case 1: t = t * MotElem::T(pos(rng)); break;
            case 2: t = t * MotElem::inv_one_minus(pos(rng), neg(rng)); break;
            case 3: {
                ResPoly r = ResPoly::var(0).pow(2) - ResPoly::constant(small(rng));
                t = t * MotElem::formula(ResidueFormula(1, {{r, true}}));
                break;
            }
            default: {
                ResPoly r = ResPoly::var(0) * ResPoly::var(1) - ResPoly::constant(1);
                t = t * MotElem::formula(ResidueFormula(2, {{r, bool(rng() % 2)}}));
            }
            }
        }
        x += t;
    }
    return x;
}

} // namespace

TEST_CASE("ring identities") {
    MotElem X = MotElem::L(-1) * MotElem::T(2) + MotElem::constant(3);
    CHECK((X + MotElem()).simplify() == X.simplify());
    CHECK((X * MotElem::constant(1)).simplify() == X.simplify());
    MotElem f = MotElem::constant(1) - MotElem::L(-1) * MotElem::T(1);
    CHECK((f * MotElem::inv_one_minus(1, -1)).simplify() == MotElem::constant(1));
    CHECK((MotElem::L(1) * MotElem::L(-1)).simplify() == MotElem::constant(1));
}

TEST_CASE("counting formula classes") {
    MotElem A1 = MotElem::formula(ResidueFormula(1));
    CHECK(count_eval(A1, 5, 0) == 5);
    ResPoly x2 = ResPoly::var(0).pow(2) - ResPoly::constant(2);
    MotElem sq = MotElem::formula(ResidueFormula(1, {{x2, true}}));
    CHECK(count_eval(sq, 7, 0) == 2);
    MotElem g = (MotElem::constant(1) - MotElem::L(-1)) * MotElem::inv_one_minus(1, -1);
    CHECK(count_eval(g, 5, 1) == mpq_class(5, 6));
}

TEST_CASE("too many residue variables") {
    ResPoly s = ResPoly::var(0) + ResPoly::var(4);
    MotElem x = MotElem::formula(ResidueFormula(5, {{s, true}}));
    CHECK_THROWS_AS(count_eval(x, 3, 1), TooManyVariables);
}

TEST_CASE("count is a ring morphism on random elements") {
    std::mt19937 rng(12345);
    for (int it = 0; it < 200; ++it) {
        MotElem X = random_elem(rng), Y = random_elem(rng);
        MotElem sum = X + Y, prod = X * Y;
        for (long q : {3L, 5L, 7L}) {
            long s = 1 + it % 3;
            mpq_class cx = count_eval(X, q, s), cy = count_eval(Y, q, s);
            CHECK(count_eval(sum, q, s) == cx + cy);
            CHECK(count_eval(prod, q, s) == cx * cy);
        }
    }
}

TEST_CASE("simplify is idempotent and count preserving") {
    std::mt19937 rng(777);
    for (int it = 0; it < 100; ++it) {
        MotElem X = random_elem(rng) * random_elem(rng) + random_elem(rng);
        MotElem S = X.simplify();
        CHECK(S.simplify() == S);
        CHECK(S.in_j_form());
        for (long q : {3L, 5L, 7L})
            for (long s : {1L, 2L, 3L}) CHECK(count_eval(S, q, s) == count_eval(X, q, s));
    }
}

TEST_CASE("series expansion agrees with geometric expansion") {
    // q^-1 T / (1 - q^-1 T) = sum_{n>=1} q^-n T^n
    MotElem x = MotElem::L(-1) * MotElem::T(1) * MotElem::inv_one_minus(1, -1);
    auto c = count_series(x, 5, 6);
    CHECK(c[0] == 0);
    for (int n = 1; n <= 6; ++n) {
        mpq_class e(1);
        for (int i = 0; i < n; ++i) e /= 5;
        CHECK(c[n] == e);
    }
    CHECK(x.simplify().str() == "q^-1 T / (1 - q^-1 T)");
}

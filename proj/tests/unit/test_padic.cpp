#include "doctest.h"

#include <random>

#include "padint/errors.hpp"
#include "padint/padic.hpp"

using namespace padint;

namespace {

// Brute-force m-th root search modulo p^k among residues with a given
// first digit.
long brute_root(long x, long m, long p, long k, long first) {
    long mod = 1;
    for (int i = 0; i < k; ++i) mod *= p;
    for (long y = 0; y < mod; ++y) {
        if (y % p != first) continue;
        long acc = 1;
        for (int i = 0; i < m; ++i) acc = acc * y % mod;
        if (((acc - x) % mod + mod) % mod == 0) return y;
    }
    return -1;
}

} // namespace

TEST_CASE("ord, ac and res on basic values") {
    PAdicContext c5(5, 20), c3(3, 20);
    CHECK(ord(PAdicNumber::zero(c5)).is_infinite());
    CHECK(ord(PAdicNumber::from_int(c5, 75)) == ExtInt(2L));
    CHECK(ord(PAdicNumber::from_rational(c3, mpq_class(1, 9))) == ExtInt(-2L));
    CHECK(ac(PAdicNumber::zero(c5), 3) == 0);
    CHECK(ac(PAdicNumber::from_int(c5, 75), 1) == 3);
    CHECK(ac(PAdicNumber::from_int(c5, 75), 2) == 3);
    CHECK(ac(PAdicNumber::from_int(c5, -25), 2) == 24);
    CHECK(res(PAdicNumber::zero(c5), 2) == 0);
    CHECK(res(PAdicNumber::from_int(c5, 75), 2) == 0);
    CHECK(res(PAdicNumber::from_int(c5, 76), 2) == 1);
    CHECK_THROWS_AS(res(PAdicNumber::from_rational(c5, mpq_class(1, 5)), 1), NotIntegral);
    auto low = PAdicNumber::from_int(c5, 7).with_prec(2);
    CHECK_THROWS_AS(ac(low, 3), InsufficientPrecision);
}

TEST_CASE("text form") {
    PAdicContext c5(5, 6);
    CHECK(PAdicNumber::from_int(c5, 75).str() == "5^2 * 3 (mod 5^6)");
    CHECK(PAdicNumber::zero(c5).str() == "0");
}

TEST_CASE("valuation and angular component laws on random samples") {
    std::mt19937_64 rng(17);
    for (long p : {3L, 5L, 7L}) {
        PAdicContext ctx(p, 20);
        for (int i = 0; i < 200; ++i) {
            long a = static_cast<long>(rng() % 100000) + 1, b = static_cast<long>(rng() % 100000) + 1;
            if (rng() % 2) a = -a;
            auto x = PAdicNumber::from_int(ctx, a).with_prec(12);
            auto y = PAdicNumber::from_int(ctx, b).with_prec(12);
            CHECK(ord(x * y) == ord(x) + ord(y));
            CHECK(ac(x * y, 3) == (ac(x, 3) * ac(y, 3)) % ctx.modulus(3));
            auto s = x + y;
            CHECK(ord(s) >= min(ord(x), ord(y)));
            if (ord(x) != ord(y)) CHECK(ord(s) == min(ord(x), ord(y)));
        }
    }
}

TEST_CASE("cancellation below precision is reported") {
    PAdicContext c5(5, 4);
    auto x = PAdicNumber::from_int(c5, 1).with_prec(3);
    auto y = PAdicNumber::from_int(c5, 126).with_prec(3);
    CHECK_THROWS_AS(x - y, InsufficientPrecision);
    CHECK((PAdicNumber::from_int(c5, 3) - PAdicNumber::from_int(c5, 3)).is_zero());
}

TEST_CASE("mth_root") {
    PAdicContext c5(5, 20);
    auto x = PAdicNumber::from_int(c5, 6);
    auto y = mth_root(x, 1, 0, 2, 0);
    REQUIRE(!y.is_zero());
    CHECK(res(y, 2) == brute_root(6, 2, 5, 2, 1));
    CHECK(res(y, 2) == 16);
    CHECK(y.pow(2).agrees(x));
    CHECK(y.prec() == 20);
    CHECK(mth_root(PAdicNumber::from_int(c5, 5), 1, 0, 2, 0).is_zero());
    CHECK(mth_root(PAdicNumber::from_int(c5, 6), 1, 1, 2, 0).is_zero());
    CHECK(mth_root(PAdicNumber::from_int(c5, 6), 2, 0, 2, 0).is_zero());
    // cube root with p | m needs a deeper residue
    PAdicContext c3(3, 20);
    auto z = PAdicNumber::from_int(c3, 8);
    CHECK(mth_root(z, 2, 0, 3, 0).is_zero());
    auto w = mth_root(z, 2, 0, 3, 1);
    REQUIRE(!w.is_zero());
    CHECK(w.agrees(PAdicNumber::from_int(c3, 2)));
    CHECK(w.prec() == 19);
}

TEST_CASE("hensel_root") {
    PAdicContext c7(7, 20);
    std::vector<PAdicNumber> a = {PAdicNumber::from_int(c7, -1), PAdicNumber::zero(c7),
                                  PAdicNumber::from_int(c7, 1)};
    auto y = hensel_root(a, 6, 0);
    CHECK(y.agrees(PAdicNumber::from_int(c7, -1)));
    CHECK(res(y, 2) == 48);
    CHECK(hensel_root(a, 2, 0).is_zero());
    PAdicContext c5(5, 20);
    std::vector<PAdicNumber> b = {PAdicNumber::from_int(c5, 6), PAdicNumber::zero(c5),
                                  PAdicNumber::from_int(c5, -1)};
    auto r1 = hensel_root(b, 1, 0);
    auto r2 = mth_root(PAdicNumber::from_int(c5, 6), 1, 0, 2, 0);
    CHECK(r1.agrees(r2));
}

TEST_CASE("precision is stable under a larger budget") {
    for (int M : {10, 15}) {
        PAdicContext lo(5, M), hi(5, M + 5);
        auto a = mth_root(PAdicNumber::from_int(lo, 11), 1, 0, 2, 0);
        auto b = mth_root(PAdicNumber::from_int(hi, 11), 1, 0, 2, 0);
        CHECK(res(a, a.prec()) == res(b, a.prec()));
    }
}

TEST_CASE("newton_polygon") {
    mpz_class p = 5;
    auto np1 = newton_polygon(UPoly::from_ints({-7 * 25, 1}), p);
    REQUIRE(np1.segments.size() == 1);
    CHECK(np1.root_valuations() == std::vector<mpq_class>{2});
    auto np2 = newton_polygon(UPoly::from_ints({-5, 0, 1}), p);
    REQUIRE(np2.segments.size() == 1);
    CHECK(np2.segments[0].slope == mpq_class(-1, 2));
    CHECK(np2.segments[0].length == 2);
    auto np3 = newton_polygon(UPoly::from_ints({5, -6, 1}), p);
    CHECK(np3.root_valuations() == std::vector<mpq_class>{0, 1});
    CHECK_THROWS_AS(newton_polygon(UPoly(), p), ZeroPolynomial);
    auto np4 = newton_polygon(UPoly::from_ints({0, 0, 3, 1}), p);
    CHECK(np4.zero_roots == 2);
}

TEST_CASE("slope_factor") {
    PAdicContext c5(5, 20), c7(7, 20);
    auto sf = slope_factor(UPoly::from_ints({5, -6, 1}), c5);
    REQUIRE(sf.factors.size() == 2);
    CHECK(*sf.factors[0].valuation == 0);
    CHECK(*sf.factors[1].valuation == 1);
    // constant terms are minus the roots 1 and 5
    CHECK(sf.factors[0].factor[0].agrees(PAdicNumber::from_int(c5, -1)));
    CHECK(sf.factors[1].factor[0].agrees(PAdicNumber::from_int(c5, -5)));
    auto prod = poly_mul(sf.factors[0].factor, sf.factors[1].factor);
    CHECK(prod[1].agrees(PAdicNumber::from_int(c5, -6)));

    auto irr = slope_factor(UPoly::from_ints({-5, 0, 1}), c5);
    REQUIRE(irr.factors.size() == 1);
    CHECK(*irr.factors[0].valuation == mpq_class(1, 2));

    auto cub = slope_factor(UPoly::from_ints({0, -1, 0, 1}), c7);
    REQUIRE(cub.factors.size() == 3);
    std::vector<long> resid;
    for (auto &f : cub.factors) {
        CHECK(f.factor.size() == 2);
        resid.push_back(res(-f.factor[0], 1).get_si());
    }
    std::sort(resid.begin(), resid.end());
    CHECK(resid == std::vector<long>{0, 1, 6});
    CHECK_THROWS_AS(slope_factor(UPoly::from_ints({1, 2, 1}), c7), NotSquarefree);

    // every factor has a one-segment Newton polygon
    auto mix = slope_factor(UPoly::from_ints({-3 * 125, 7, 5, 2, 1}), c5);
    for (auto &f : mix.factors) CHECK(newton_polygon(f.factor).segments.size() == 1);
}

TEST_CASE("root_distance_vals") {
    mpz_class p = 5;
    CHECK(root_distance_vals(UPoly::from_ints({0, 1}), UPoly::from_ints({-1, 1}), p) ==
          std::vector<mpq_class>{0});
    CHECK(root_distance_vals(UPoly::from_ints({0, 1}), UPoly::from_ints({-5, 1}), p) ==
          std::vector<mpq_class>{1});
    CHECK(root_distance_vals(UPoly::from_ints({-1, 1}), UPoly::from_ints({-5, 0, 1}), p) ==
          std::vector<mpq_class>{0, 0});
    CHECK_THROWS_AS(root_distance_vals(UPoly::from_ints({-1, 1}), UPoly::from_ints({-1, 0, 1}), p),
                    CommonRoot);
    // y^2 - 5 against y - 5: ord(sqrt5 - 5) = 1/2 for both roots
    CHECK(root_distance_vals(UPoly::from_ints({-5, 0, 1}), UPoly::from_ints({-5, 1}), p) ==
          std::vector<mpq_class>{mpq_class(1, 2), mpq_class(1, 2)});
}

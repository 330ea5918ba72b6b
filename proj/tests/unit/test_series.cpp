#include "doctest.h"

#include <random>

#include "padint/errors.hpp"
#include "padint/series.hpp"

using namespace padint;

namespace {

SeparatedSeries S(const std::string &s, int m, int n, int Mt = 12, int D = 16) {
    return SeparatedSeries::parse(s, m, n, Mt, D);
}

SeparatedSeries random_poly(std::mt19937 &rng, int m, int n, int terms, int maxdeg, int maxt) {
    SeparatedSeries f(m, n);
    std::uniform_int_distribution<int> coef(-3, 3), deg(0, maxdeg), td(0, maxt);
    for (int i = 0; i < terms; ++i) {
        SeparatedSeries::Exps e(m + n + 1, 0);
        e[0] = td(rng);
        for (int v = 1; v <= m + n; ++v) e[v] = deg(rng);
        f.add_term(e, coef(rng));
    }
    return f;
}

// Regular in the last xi of degree d: monic part plus (t, rho) noise.
SeparatedSeries random_regular(std::mt19937 &rng, int m, int n, int d) {
    int last = m - 1;
    SeparatedSeries f = SeparatedSeries::var(m, n, last).pow(d);
    std::uniform_int_distribution<int> coef(-2, 2);
    for (int i = 0; i < d; ++i) {
        SeparatedSeries c = SeparatedSeries::constant(m, n, coef(rng));
        if (m > 1) c = c + SeparatedSeries::var(m, n, 0) * mpz_class(coef(rng));
        f = f + c * SeparatedSeries::var(m, n, last).pow(i);
    }
    SeparatedSeries noise = random_poly(rng, m, n, 4, d + 1, 3);
    SeparatedSeries small = SeparatedSeries::t(m, n);
    if (n > 0) small = small + SeparatedSeries::var(m, n, m);
    return f + noise * small;
}

PAdicNumber rand_point(std::mt19937 &rng, const PAdicContext &ctx, bool rho) {
    std::uniform_int_distribution<long> d(0, 10000);
    long v = d(rng);
    if (rho) v = v * 5 + 5;
    return PAdicNumber::from_int(ctx, v);
}

} // namespace

TEST_CASE("series evaluation") {
    PAdicContext ctx(5, 20);
    auto f = S("xi1", 2, 0);
    auto x = PAdicNumber::from_int(ctx, 17), y = PAdicNumber::from_int(ctx, 3);
    CHECK(f.eval({x, y}, ctx).agrees(x));

    SeparatedSeries g(1, 0, 7, 16, false);
    for (int i = 0; i <= 6; ++i) {
        SeparatedSeries::Exps e{i, i};
        g.add_term(e, 1);
    }
    auto v = g.eval({PAdicNumber::from_int(ctx, 5)}, ctx);
    CHECK(v.abs_prec() >= ExtInt(7));
    CHECK(v.agrees(PAdicNumber::from_rational(ctx, mpq_class(-1, 24))));

    auto r = S("rho1 + 1", 0, 1);
    auto z = r.eval({PAdicNumber::from_int(ctx, 2)}, ctx);
    CHECK(z.is_zero());
    CHECK(z.is_exact());
}

TEST_CASE("series composition") {
    auto f = S("xi1^2", 1, 0);
    auto a = S("xi1 + t", 1, 0);
    CHECK(compose(f, {a}, {}) == S("xi1^2 + 2*t*xi1 + t^2", 1, 0));
    CHECK(compose(f, {S("xi1", 1, 0)}, {}) == f);
    auto geo = S("1 + t*xi1 + t^2*xi1^2 + t^3*xi1^3 + t^4*xi1^4 + t^5*xi1^5 + t^6*xi1^6", 1, 0);
    auto sq = compose(geo, {S("xi1^2", 1, 0)}, {});
    CHECK(sq == S("1 + t*xi1^2 + t^2*xi1^4 + t^3*xi1^6 + t^4*xi1^8 + t^5*xi1^10 + t^6*xi1^12", 1, 0));
    auto h = S("rho1^2 + xi1", 1, 1);
    CHECK_THROWS_AS(compose(h, {S("xi1", 1, 1)}, {S("xi1 + rho1", 1, 1)}), CompositionDomain);
    CHECK_NOTHROW(compose(h, {S("xi1", 1, 1)}, {S("t + rho1", 1, 1)}));
}

TEST_CASE("regularity") {
    CHECK(is_regular(S("xi1^2 - t", 1, 0), 0, 2));
    CHECK_FALSE(is_regular(S("t*xi1^2 + xi1", 1, 0), 0, 2));
    CHECK(is_regular(S("t*xi1^2 + xi1", 1, 0), 0, 1));
    CHECK(is_regular(S("rho1^2 + t*rho1^3", 0, 1), 0, 2));
    CHECK_FALSE(is_regular(S("2*xi1", 1, 0), 0, 1));
}

TEST_CASE("Weierstrass division examples") {
    auto f = S("xi1^2 - t", 1, 0);
    auto [q1, r1] = w_divide(S("xi1^2", 1, 0), f, 0, 2);
    CHECK(q1 == S("1", 1, 0));
    CHECK(r1 == S("t", 1, 0));
    auto [q2, r2] = w_divide(S("xi1^3", 1, 0), f, 0, 2);
    CHECK(q2 == S("xi1", 1, 0));
    CHECK(r2 == S("t*xi1", 1, 0));
    auto [q3, r3] = w_divide(S("t", 1, 0), f, 0, 2);
    CHECK(q3.is_zero());
    CHECK(r3 == S("t", 1, 0));
    CHECK_THROWS_AS(w_divide(S("xi1", 1, 0), S("t*xi1", 1, 0), 0, 1), NotRegular);
    CHECK_THROWS_AS(w_divide(S("xi1", 1, 0), SeparatedSeries(1, 0), 0, 1), ZeroSeries);
}

TEST_CASE("Weierstrass preparation examples") {
    auto f = S("xi1^2 + t*xi1 + t", 1, 0);
    auto w = w_prepare(f, 0);
    CHECK(w.u == S("1", 1, 0));
    CHECK(w.P == f);
    auto g = S("(1 + t*xi1)*(xi1^2 - t)", 1, 0);
    auto w2 = w_prepare(g, 0);
    CHECK(w2.u == S("1 + t*xi1", 1, 0));
    CHECK(w2.P == S("xi1^2 - t", 1, 0));
    auto w3 = w_prepare(S("xi1*(1 + t)", 1, 0), 0);
    CHECK(w3.u == S("1 + t", 1, 0));
    CHECK(w3.P == S("xi1", 1, 0));
    auto rr = w_prepare(S("rho1^2*(1 + xi1*rho1) + t*rho1", 1, 1), 1);
    CHECK(rr.d == 2);
    CHECK(rr.u * rr.P == S("rho1^2*(1 + xi1*rho1) + t*rho1", 1, 1));
    CHECK(is_regular(rr.P, 1, 2));
}

TEST_CASE("division round trip on random regular pairs") {
    std::mt19937 rng(2024);
    for (auto [m, n] : std::vector<std::pair<int, int>>{{1, 0}, {2, 0}, {1, 1}}) {
        for (int it = 0; it < 100; ++it) {
            int d = 1 + it % 3;
            auto f = random_regular(rng, m, n, d);
            auto g = random_poly(rng, m, n, 5, 4, 4);
            auto [q, r] = w_divide(g, f, m - 1, d);
            CHECK((q * f + r) == g);
            CHECK(r.degree_in(m - 1) < d);
            auto again = w_divide(g, f, m - 1, d);
            CHECK(again.q.str() == q.str());
            CHECK(again.r.str() == r.str());
            auto w = w_prepare(f, m - 1);
            CHECK(w.u * w.P == f);
            CHECK(w.u.is_unit());
            auto w2 = w_prepare(w.u * w.P, m - 1);
            CHECK(w2.u == w.u);
            CHECK(w2.P == w.P);
        }
    }
}

TEST_CASE("rho direction division") {
    std::mt19937 rng(99);
    for (int it = 0; it < 30; ++it) {
        int d = 1 + it % 3;
        auto f = SeparatedSeries::var(1, 1, 1).pow(d) * S("1 + xi1*rho1", 1, 1) +
                 random_poly(rng, 1, 1, 3, 3, 2) * SeparatedSeries::t(1, 1);
        REQUIRE(is_regular(f, 1, d));
        auto g = random_poly(rng, 1, 1, 5, 4, 3);
        auto [q, r] = w_divide(g, f, 1, d);
        CHECK((q * f + r) == g);
        CHECK(r.degree_in(1) < d);
    }
}

TEST_CASE("evaluation is a homomorphism and respects composition") {
    std::mt19937 rng(5);
    PAdicContext ctx(5, 20);
    for (int it = 0; it < 30; ++it) {
        auto f = random_poly(rng, 1, 1, 4, 3, 3), g = random_poly(rng, 1, 1, 4, 3, 3);
        std::vector<PAdicNumber> x{rand_point(rng, ctx, false), rand_point(rng, ctx, true)};
        auto fx = f.eval(x, ctx), gx = g.eval(x, ctx);
        CHECK((f + g).eval(x, ctx).agrees(fx + gx));
        CHECK((f * g).eval(x, ctx).agrees(fx * gx));
        auto a = random_poly(rng, 1, 1, 3, 2, 2);
        auto b = S("t + rho1*xi1", 1, 1);
        auto c = compose(f, {a}, {b});
        auto lhs = c.eval(x, ctx);
        auto rhs = f.eval({a.eval(x, ctx), b.eval(x, ctx)}, ctx);
        CHECK(lhs.agrees(rhs));
    }
}

TEST_CASE("dominant terms") {
    SeparatedSeries F(1, 0, 7, 16, false);
    for (int i = 0; i <= 6; ++i) F.add_term({i, i}, 1);
    auto d = dominant_terms(F, {true});
    REQUIRE(d.size() == 1);
    CHECK(d[0].index == std::vector<int>{0});
    CHECK(d[0].coeff == SeparatedSeries::constant(1, 0, 1, 7));
    CHECK(d[0].unit == F);
    auto d2 = dominant_terms(S("xi1 + rho1", 1, 1), {true, true});
    REQUIRE(d2.size() == 2);
    for (auto &t : d2) CHECK(t.unit == SeparatedSeries::constant(1, 1, 1));
    auto d3 = dominant_terms(S("xi1*xi2 + 2*xi2^2 + xi1 + 3", 2, 0), {false, true});
    CHECK(d3.size() == 3);
    CHECK_THROWS_AS(dominant_terms(SeparatedSeries(1, 0), {true}), ZeroSeries);
}

TEST_CASE("preregularization") {
    auto p1 = preregularize(S("xi1", 2, 0));
    CHECK(p1.c == std::vector<int>{1});
    CHECK(p1.d == 1);
    CHECK(is_regular(p1.image, 1, 1));
    auto p2 = preregularize(S("xi1*xi2", 2, 0));
    CHECK(is_regular(p2.image, 1, p2.d));
    // the substitution xi1 -> xi1 + xi2^2 gives degree 3
    auto sub = compose(S("xi1*xi2", 2, 0), {S("xi1 + xi2^2", 2, 0), S("xi2", 2, 0)}, {});
    CHECK(is_regular(sub, 1, 3));
    auto p3 = preregularize(S("xi2^2 + t*xi1", 2, 0));
    CHECK(p3.c == std::vector<int>{0});
    CHECK(p3.d == 2);
    CHECK_THROWS_AS(preregularize(SeparatedSeries(2, 0)), ZeroSeries);
    // a kernel surrogate: nonzero series evaluate nonzero somewhere
    PAdicContext ctx(5, 20);
    for (auto s : {"xi1*xi2", "xi1 - xi2", "xi1^2 - xi2^3 + t"}) {
        auto p = preregularize(S(s, 2, 0));
        bool nonzero = false;
        for (long a = 0; a < 5 && !nonzero; ++a)
            for (long b = 0; b < 5 && !nonzero; ++b)
                nonzero = !p.image.eval({PAdicNumber::from_int(ctx, a), PAdicNumber::from_int(ctx, b)}, ctx).is_zero();
        CHECK(nonzero);
    }
}

#include "doctest.h"

#include <nlohmann/json.hpp>

#include "padint/errors.hpp"
#include "padint/integrate.hpp"
#include "padint/oracle.hpp"

using namespace padint;

namespace {

MPoly P(const std::string &src, const std::vector<std::string> &names) { return parse_poly(src, names).poly; }

MotElem geometric(long eT, long eL) {
    // (1 - L^-1) / (1 - L^eL T^eT)
    return (MotElem::constant(1) - MotElem::L(-1)) * MotElem::inv_one_minus(eT, eL);
}

void check_same_counts(const MotElem &a, const MotElem &b, std::vector<long> qs) {
    for (long q : qs)
        for (long s : {0L, 1L, 2L}) {
            CAPTURE(q);
            CAPTURE(s);
            CHECK(count_eval(a, q, s) == count_eval(b, q, s));
        }
}

} // namespace

TEST_CASE("zeta univariate examples") {
    std::vector<std::string> y{"y"};
    for (long p : {3L, 5L, 7L}) {
        CAPTURE(p);
        ZetaResult a = zeta(P("y", y), 1, p);
        check_same_counts(a.motelem, geometric(1, -1), {3, 5, 7});
        CHECK(a.mass_balanced());
        CHECK(a.complete());
        ZetaResult b = zeta(P("y^2", y), 1, p);
        check_same_counts(b.motelem, geometric(2, -1), {3, 5, 7});
        ZetaResult c = zeta(P("y^2 - p", y), 1, p);
        MotElem want = MotElem::constant(1) - MotElem::L(-1) + MotElem::monomial(1, -1, 1);
        check_same_counts(c.motelem, want, {3, 5, 7});
        CHECK(c.mass_balanced());
    }
}

TEST_CASE("zeta x*y is the square of zeta y") {
    ZetaResult r = zeta(P("x*y", {"x", "y"}), 2, 5);
    MotElem g = geometric(1, -1);
    check_same_counts(r.motelem, g * g, {3, 5, 7});
    CHECK(r.mass_balanced());
    ZetaResult x = zeta(P("x", {"x"}), 1, 5);
    CHECK(r.motelem == (x.motelem * x.motelem).simplify());
}

TEST_CASE("zeta coefficients agree with the oracle") {
    struct Fx {
        const char *f;
        std::vector<std::string> vars;
        std::vector<long> ps;
        int J;
    };
    std::vector<Fx> fx = {
        {"y", {"y"}, {3, 5, 7}, 8},
        {"y^2", {"y"}, {3, 5, 7}, 8},
        {"y*(y - 1)", {"y"}, {3, 5, 7}, 8},
        {"y^2 - p", {"y"}, {3, 5, 7}, 8},
        {"y^3 - y", {"y"}, {3, 5, 7}, 8},
        {"y^2 + 1", {"y"}, {3, 5}, 8},
        {"y^2*(y - 3)^3", {"y"}, {3}, 8},
        {"x*y", {"x", "y"}, {3, 5}, 5},
        {"x^2 - y", {"x", "y"}, {3, 5}, 5},
        {"y^2 - x", {"x", "y"}, {3, 5}, 5},
        {"x*y + x^2", {"x", "y"}, {3, 5}, 5},
        {"p*y - x^2", {"x", "y"}, {3}, 5},
        {"z - x*y", {"x", "y", "z"}, {3}, 4},
    };
    for (auto &F : fx)
        for (long p : F.ps) {
            std::string fname = F.f;
            CAPTURE(fname);
            CAPTURE(p);
            MPoly f = P(F.f, F.vars);
            ZetaResult r = zeta(f, static_cast<int>(F.vars.size()), p);
            REQUIRE(r.complete());
            CHECK(r.mass_balanced());
            CompareReport rep = compare(r.motelem, f, p, F.J);
            CAPTURE(rep.str());
            CHECK(rep.all_match);
        }
}

TEST_CASE("zeta with a second integrand") {
    std::vector<std::string> y{"y"};
    for (long p : {3L, 5L}) {
        CAPTURE(p);
        ZetaResult a = zeta(P("y", y), P("y", y), 1, p);
        check_same_counts(a.motelem, geometric(1, -2), {3, 5, 7});
        CHECK(a.mass_balanced());

        // int |y|^s |y - 1|: units give (p-2)/p + 1/(p(p+1)), ord y = j >= 1 gives (1 - 1/p) p^-j.
        ZetaResult b = zeta(P("y", y), P("y - 1", y), 1, p);
        auto c = count_series(b.motelem, p, 6);
        mpq_class pp(p);
        CHECK(c[0] == (pp - 2) / pp + 1 / (pp * (pp + 1)));
        mpq_class w = (1 - 1 / pp);
        for (int j = 1; j <= 6; ++j) {
            w /= pp;
            CHECK(c[j] == w);
        }
    }
    ZetaResult xy = zeta(P("x*y", {"x", "y"}), P("x*y", {"x", "y"}), 2, 3);
    MotElem g = geometric(1, -2);
    check_same_counts(xy.motelem, g * g, {3, 5, 7});
    CHECK(xy.mass_balanced());
}

TEST_CASE("zeta reduction order and thread count do not change the result") {
    MPoly f = P("x^2 - y", {"x", "y"});
    ZetaOptions serial;
    serial.serial = true;
    ZetaResult a = zeta(f, 2, 3, serial);
    for (int t : {1, 2, 4}) {
        ZetaOptions o;
        o.threads = t;
        ZetaResult b = zeta(f, 2, 3, o);
        CHECK(a.motelem == b.motelem);
        CHECK(a.to_json() == b.to_json());
    }
    CellDecomposition d = decompose({f}, 3, {"x", "y"});
    MotElem fwd, bwd;
    for (size_t i = 0; i < d.cells.size(); ++i) fwd += cell_contribution(d.cells[i]);
    for (size_t i = d.cells.size(); i-- > 0;) bwd += cell_contribution(d.cells[i]);
    CHECK(fwd.simplify() == bwd.simplify());
    CHECK(fwd.simplify() == a.motelem);
}

TEST_CASE("zeta reports unsupported splits as unresolved measure") {
    ZetaResult r = zeta(P("y^3 - x", {"x", "y"}), 2, 3);
    CHECK(!r.complete());
    CHECK(r.motelem.is_zero());
    CHECK(r.mass_balanced());
    CHECK(r.unresolved_reason.find("UnsupportedSplit") != std::string::npos);
    auto j = nlohmann::json::parse(r.to_json());
    CHECK(j.contains("motelem"));
    CHECK(j.contains("precision_certificate"));
    CHECK(j["cell_count"] == 0);
    CHECK(j.contains("unresolved_measure"));
}

TEST_CASE("zeta of the zero polynomial") {
    ZetaResult r = zeta(MPoly(1), 1, 5);
    CHECK(r.motelem.is_zero());
    CHECK(r.mass_balanced());
}

TEST_CASE("specialized zeta is the oracle partial sum plus a bounded tail") {
    for (long p : {3L, 5L}) {
        MPoly f = P("y^3 - y", {"y"});
        ZetaResult r = zeta(f, 1, p);
        const int J = 6;
        MuTable mu = mu_table(f, p, J);
        for (long s : {1L, 2L}) {
            mpq_class partial = count_eval_T(igusa_series(mu.mu), p, mpq_class(1, 1) / ipow(p, s).get_ui());
            mpq_class full = count_eval(r.motelem, p, s);
            mpq_class diff = full - partial;
            mpq_class bound = mu.tail;
            for (int j = 0; j < (J + 1) * s; ++j) bound /= p;
            CHECK(diff >= 0);
            CHECK(diff <= bound);
        }
    }
}

TEST_CASE("igusa series examples") {
    CHECK(igusa_series({1, 0, 0}) == MotElem::constant(1));
    CHECK(igusa_series({}).is_zero());
    std::vector<mpq_class> mu{mpq_class(4, 5), mpq_class(4, 25), mpq_class(4, 125), mpq_class(4, 625)};
    MotElem s = igusa_series(mu);
    MotElem want = MotElem::constant(mpq_class(4, 5)) + MotElem::monomial(mpq_class(4, 25), 0, 1) +
                   MotElem::monomial(mpq_class(4, 125), 0, 2) + MotElem::monomial(mpq_class(4, 625), 0, 3);
    CHECK(s == want);
    CHECK(count_series(s, 5, 3) == mu);
}

TEST_CASE("series integrands") {
    const long p = 5;
    SeparatedSeries x = SeparatedSeries::var(1, 0, 0);
    SeparatedSeries u = SeparatedSeries::constant(1, 0, 0);
    SeparatedSeries tx = SeparatedSeries::t(1, 0) * x;
    SeparatedSeries pw = SeparatedSeries::constant(1, 0, 1);
    for (int i = 0; i < x.Mt(); ++i) {
        u = u + pw;
        pw = pw * tx;
    }
    ZetaResult a = zeta_series_integrand(u * x, p);
    ZetaResult ref = zeta(P("x", {"x"}), 1, p);
    check_same_counts(a.motelem, ref.motelem, {3, 5, 7});
    REQUIRE(a.certificate.certified_below);
    CHECK(*a.certificate.certified_below == x.Mt());
    CHECK(!a.certificate.exact);
    CompareReport rep = compare(a.motelem, mu_table(P("x", {"x"}), p, 8), a.certificate.certified_below);
    CHECK(rep.all_match);

    ZetaResult b = zeta_series_integrand(SeparatedSeries::parse("xi1^2 - t", 1, 0), p);
    MotElem want = MotElem::constant(1) - MotElem::L(-1) + MotElem::monomial(1, -1, 1);
    check_same_counts(b.motelem, want, {3, 5, 7});

    ZetaResult c = zeta_series_integrand(SeparatedSeries::parse("1 + t*xi1", 1, 0), p);
    CHECK(c.motelem == MotElem::constant(1));
    CHECK(c.mass_balanced());

    // x -> x / (1 - t x) is an isometry of Z_p, so this integrates like y^2 - x.
    ZetaResult d = zeta_series_integrand(SeparatedSeries::parse("xi2^2 - xi1 - t*xi1*xi2^2", 2, 0), p);
    REQUIRE(d.complete());
    CHECK(d.mass_balanced());
    CHECK(compare(d.motelem, P("y^2 - x", {"x", "y"}), p, 5).all_match);

    // After preregularization xi1*xi2 becomes quadratic in the last variable with two moving roots.
    ZetaResult e = zeta_series_integrand(SeparatedSeries::parse("xi1*xi2", 2, 0), p);
    CHECK(!e.complete());
    CHECK(e.mass_balanced());

    CHECK_THROWS_AS(zeta_series_integrand(SeparatedSeries::parse("2*xi1", 1, 0), p), NotRegularAtTruncation);
    CHECK_THROWS_AS(zeta_series_integrand(SeparatedSeries::parse("rho1", 0, 1), p), UnsupportedTerm);
}

TEST_CASE("symbolic zeta agrees with fixed primes away from bad primes") {
    struct Fx {
        const char *f;
        std::vector<long> bad;
    };
    std::vector<Fx> fx = {{"y", {}}, {"y^2", {}}, {"y*(y - 1)", {}}, {"y^3 - y", {2}}, {"y^2 + 1", {2}}, {"y^3 - 2", {2, 3}}};
    for (auto &F : fx) {
        std::string fname = F.f;
            CAPTURE(fname);
        MPoly f = P(F.f, {"y"});
        SymbolicZeta sz = zeta_symbolic(f.to_upoly(1));
        CHECK(sz.bad_primes == F.bad);
        CHECK(sz.factored);
        for (long p : {3L, 5L, 7L, 11L, 13L}) {
            if (!sz.valid_at(p)) continue;
            CAPTURE(p);
            ZetaResult r = zeta(f, 1, p);
            CHECK(count_series(sz.motelem, p, 8) == count_series(r.motelem, p, 8));
            CHECK(compare(sz.motelem, f, p, 8).all_match);
        }
    }
    SymbolicZeta two = zeta_symbolic(UPoly::from_ints({0, 1}), UPoly::from_ints({-1, 1}));
    ZetaResult r = zeta(P("y", {"y"}), P("y - 1", {"y"}), 1, 7);
    CHECK(count_series(two.motelem, 7, 6) == count_series(r.motelem, 7, 6));
}

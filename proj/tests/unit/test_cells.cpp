#include "doctest.h"

#include <random>
#include <set>

#include "padint/cells.hpp"
#include "padint/errors.hpp"

using namespace padint;

namespace {

struct Fixture {
    const char *f;
    std::vector<std::string> vars;
    long p;
};

// Every sample lies in exactly one cell and the prepared data of each
// function agrees with direct evaluation.
void check_cells(const std::vector<std::string> &srcs, const std::vector<std::string> &vars, long p,
                 int samples = 1000) {
    std::vector<MPoly> fs;
    for (auto &s : srcs) fs.push_back(parse_poly(s, vars).poly);
    CellDecomposition d = decompose(fs, p, vars);
    PAdicContext ctx(p, 30);
    mpz_class mod = ipow(mpz_class(p), 6);
    std::mt19937_64 rng(12345 + p);
    std::uniform_int_distribution<long> U(0, mod.get_si() - 1);
    int bad_partition = 0, bad_ord = 0, bad_ac = 0;
    for (int s = 0; s < samples; ++s) {
        std::vector<mpq_class> pt;
        std::vector<mpz_class> zpt;
        for (size_t i = 0; i < vars.size(); ++i) {
            long v = s < 8 ? (s >> i & 1) * p * (s % 3) : U(rng);
            pt.push_back(v);
            zpt.push_back(v);
        }
        int hits = 0;
        for (auto &c : d.cells) {
            auto where = c.locate(pt, ctx);
            if (!where) continue;
            ++hits;
            for (size_t j = 0; j < fs.size(); ++j) {
                mpz_class v = fs[j].eval(mpz_class(p), zpt);
                const Prepared &P = c.prepared[j];
                if (v == 0) {
                    bad_ord += !P.vanishes;
                    continue;
                }
                auto o = P.ord_at(where->ords);
                if (!o || *o != vp(v, mpz_class(p))) ++bad_ord;
                mpz_class u = v;
                while (u % p == 0) u /= p;
                mpz_class r = u % p;
                if (r < 0) r += p;
                if (P.ac_at(where->res, p) != r.get_si()) ++bad_ac;
            }
        }
        if (hits != 1) ++bad_partition;
    }
    CHECK(bad_partition == 0);
    CHECK(bad_ord == 0);
    CHECK(bad_ac == 0);
    MotElem mass;
    for (auto &c : d.cells) mass += c.measure();
    mass = mass.simplify();
    CHECK(mass == MotElem::constant(1));
    for (long q : {3L, 5L, 7L}) CHECK(count_eval(mass, q, 0) == 1);
}

} // namespace

TEST_CASE("cells of y") {
    CellDecomposition d = prepare_univariate({UPoly::from_ints({0, 1})}, 5);
    int one_cells = 0;
    for (auto &c : d.cells) {
        if (c.kind() == 0) continue;
        ++one_cells;
        CHECK(to_string(c.levels[0].center) == "0");
    }
    CHECK(one_cells >= 1);
    bool found = false;
    for (auto &c : d.cells)
        if (c.kind() == 1 && c.prepared[0].i0 == 1) {
            found = true;
            CHECK(c.prepared[0].ord_str(c.ord_vars) == "a_y");
            CHECK(c.prepared[0].ac.str(c.res_vars) == "r_y");
        }
    CHECK(found);
}

TEST_CASE("cells of y^2 - p: no ac condition and parity") {
    for (long p : {3L, 5L, 7L}) {
        CellDecomposition d = decompose({parse_poly("y^2 - p", {"y"}).poly}, p, {"y"});
        for (auto &c : d.cells) {
            if (c.kind() == 0) continue;
            const Prepared &P = c.prepared[0];
            // either alpha = 0 with ord f = 0, or alpha >= 1 with ord f = 1
            CHECK(P.i0 == 0);
            CHECK((P.ord_const == 0 || P.ord_const == 1));
        }
        check_cells({"y^2 - p"}, {"y"}, p);
    }
}

TEST_CASE("cells of y(y-1) have centers 0 and 1") {
    CellDecomposition d = prepare_univariate({UPoly::from_ints({0, -1, 1})}, 5);
    std::set<std::string> zero_centers;
    for (auto &c : d.cells)
        if (c.kind() == 0 && c.prepared[0].vanishes) zero_centers.insert(to_string(c.levels[0].center));
    CHECK(zero_centers == std::set<std::string>{"0", "1"});
    // two terms y and y - 1 refine to the same centers
    CellDecomposition d2 = prepare_univariate({UPoly::from_ints({0, 1}), UPoly::from_ints({-1, 1})}, 5);
    CHECK(d2.cells.size() == d.cells.size());
}

TEST_CASE("cell partition and preparation on the univariate fixtures") {
    for (long p : {3L, 5L, 7L})
        for (const char *f : {"y", "y^2", "y*(y - 1)", "y^2 - p", "y^3 - y", "y^2*(y - 3)^3", "y^2 + 1", "y^3 - 2"}) {
            std::string src = f;
            CAPTURE(p);
            CAPTURE(src);
            check_cells({f}, {"y"}, p);
        }
}

TEST_CASE("cell partition and preparation in two variables") {
    for (long p : {3L, 5L})
        for (const char *f : {"x*y", "x^2 - y", "y^2 - x", "x*y + x^2", "(x + 1)*y - x^3", "y^3 - x", "x^2*y^2",
                              "y - p*x", "p*y - x^2", "x^3", "y^2 - p*x"}) {
            std::string src = f;
            CAPTURE(p);
            CAPTURE(src);
            if (p == 3 && src == "y^3 - x") continue;
            check_cells({f}, {"x", "y"}, p, 600);
        }
    check_cells({"x*y", "x + 1"}, {"x", "y"}, 3, 400);
    check_cells({"x*y*z", "z"}, {"x", "y", "z"}, 3, 300);
    check_cells({"z - x*y"}, {"x", "y", "z"}, 5, 300);
}

TEST_CASE("cells reject unsupported shapes") {
    CHECK_THROWS_AS(decompose({parse_poly("y^2 - x^2*y + x", {"x", "y"}).poly}, 5, {"x", "y"}), UnsupportedSplit);
    CHECK_THROWS_AS(decompose({parse_poly("y^3 - x", {"x", "y"}).poly}, 3, {"x", "y"}), UnsupportedSplit);
    CHECK_THROWS_AS(prepare_univariate({UPoly()}, 3), ZeroPolynomial);
}

TEST_CASE("cell measures") {
    CellDecomposition d = prepare_univariate({UPoly::from_ints({0, 1})}, 5);
    for (auto &c : d.cells) {
        if (c.kind() == 0) {
            CHECK(cell_measure(c).is_zero());
            continue;
        }
        mpq_class m = cell_measure_at(c, 5);
        CHECK(m > 0);
    }
    // alpha = 0 with xi free unit: (q - 1) q^-1
    Cell units = d.cells.back();
    CHECK(cell_measure(units) == (MotElem::constant(1) - MotElem::L(-1)).simplify());
    CHECK(!cells_to_json(d).empty());
}

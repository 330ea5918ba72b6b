#include "doctest.h"

#include <algorithm>
#include <map>
#include <string>

#include "padint/errors.hpp"
#include "padint/presburger.hpp"

using namespace padint;

namespace {

struct Fixture {
    std::string set;
    std::vector<long> a, b;
};

// The T-expansion of sum q^(b.z) T^(a.z) by brute enumeration; every fixture
// keeps all points of bounded a-degree inside the box.
std::vector<mpq_class> enum_series(const PresburgerSet &S, const std::vector<long> &a, const std::vector<long> &b,
                                   long q, int J) {
    std::vector<mpq_class> c(J + 1, 0);
    for (auto &z : enumerate(S, -30, 30)) {
        long d = 0, e = 0;
        for (size_t i = 0; i < z.size(); ++i) {
            d += a[i] * z[i];
            e += b[i] * z[i];
        }
        if (d < 0 || d > J) continue;
        mpq_class w = 1;
        for (long i = 0; i < std::labs(e); ++i) w *= q;
        if (e < 0) w = 1 / w;
        c[d] += w;
    }
    return c;
}

const std::vector<Fixture> &fixtures() {
    static const std::vector<Fixture> F = {
        {R"({"vars":["z"],"clauses":[[{"ge":[[1],-1]}]]})", {1}, {-1}},
        {R"({"vars":["z"],"clauses":[[{"ge":[[1],0]},{"cong":[[1],0,2]}]]})", {1}, {-1}},
        {R"({"vars":["x","y"],"clauses":[[{"ge":[[1,0],-1]},{"ge":[[0,1],-1]}]]})", {1, 1}, {-1, -1}},
        {R"({"vars":["z"],"clauses":[[{"ge":[[1],0]},{"ge":[[-1],5]},{"cong":[[1],-1,3]}]]})", {1}, {2}},
        {R"({"vars":["z"],"clauses":[[{"ge":[[1],0]}]]})", {2}, {-3}},
        {R"({"vars":["x","y"],"clauses":[[{"ge":[[1,0],0]},{"ge":[[-1,1],0]}]]})", {1, 1}, {0, -1}},
        {R"({"vars":["x","y"],"clauses":[[{"ge":[[1,0],0]},{"ge":[[0,1],0]},{"cong":[[1,1],-1,3]}]]})", {1, 2}, {-1, 1}},
        {R"({"vars":["x","y"],"clauses":[[{"ge":[[1,0],-1]},{"ge":[[-1,2],0]},{"ge":[[3,-1],0]}]]})", {1, 1}, {-2, 0}},
        {R"({"vars":["x","y"],"clauses":[[{"ge":[[1,0],0]},{"ge":[[0,1],0]},{"eq":[[1,-2],0]}]]})", {1, 1}, {-1, -1}},
        {R"({"vars":["x","y"],"clauses":[[{"ge":[[1,0],0]},{"ge":[[0,1],0]},{"eq":[[3,-2],-1]}]]})", {1, 1}, {0, -1}},
        {R"({"vars":["z"],"clauses":[[{"ge":[[1],-3]}],[{"ge":[[-1],5]},{"ge":[[1],0]}]]})", {1}, {-1}},
        {R"({"vars":["x","y","w"],"clauses":[[{"ge":[[1,0,0],0]},{"ge":[[0,1,0],0]},{"ge":[[0,0,1],0]},{"ge":[[-1,-1,-1],4]}]]})",
         {1, 1, 1}, {1, -1, 0}},
        {R"({"vars":["x","y","w"],"clauses":[[{"ge":[[1,0,0],0]},{"ge":[[0,1,0],0]},{"ge":[[0,0,1],0]}]]})", {1, 2, 3},
         {-1, -1, -1}},
        {R"({"vars":["z"],"clauses":[[{"ge":[[1],0]},{"ge":[[-1],7]}]]})", {0}, {0}},
        {R"({"vars":["x","y"],"clauses":[[{"ge":[[1,0],0]},{"ge":[[0,1],0]},{"ge":[[1,-1],0]}]]})", {1, 0}, {-1, 0}},
        {R"({"vars":["x","y"],"clauses":[[{"ge":[[1,0],-1]},{"ge":[[-1,3],0]},{"ge":[[1,-1],0]}]]})", {1, 0}, {-2, 0}},
        {R"({"vars":["x","y"],"clauses":[[{"ge":[[1,0],0]},{"ge":[[0,1],0]},{"cong":[[2,3],-1,5]},{"ge":[[-1,2],1]}]]})",
         {1, 1}, {0, -1}},
        {R"({"vars":["z"],"clauses":[[{"ge":[[-1],-1]}]]})", {-1}, {1}},
        {R"({"vars":["x","y"],"clauses":[[{"ge":[[1,0],0]},{"ge":[[0,1],0]},{"ge":[[1,-1],-2]}],[{"ge":[[1,0],0]},{"ge":[[0,1],0]},{"ge":[[-1,1],-2]}]]})",
         {1, 1}, {-1, 0}},
        {R"({"vars":["x","y","w"],"clauses":[[{"ge":[[1,0,0],0]},{"ge":[[0,1,0],0]},{"ge":[[0,0,1],0]},{"cong":[[1,1,-1],0,2]},{"ge":[[1,0,-1],1]}]]})",
         {1, 1, 1}, {-1, 0, -1}},
    };
    return F;
}

} // namespace

TEST_CASE("worked summation examples") {
    auto S1 = PresburgerSet::from_json(R"({"vars":["z"],"clauses":[[{"ge":[[1],-1]}]]})");
    CHECK(sum_exponential(S1, {1}, {-1}).str() == "q^-1 T / (1 - q^-1 T)");

    auto S2 = PresburgerSet::from_json(R"({"vars":["z"],"clauses":[[{"ge":[[1],0]},{"cong":[[1],0,2]}]]})");
    MotElem r2 = sum_exponential(S2, {1}, {-1});
    CHECK(r2 == MotElem::inv_one_minus(2, -2));

    auto S3 = PresburgerSet::from_json(R"({"vars":["x","y"],"clauses":[[{"ge":[[1,0],-1]},{"ge":[[0,1],-1]}]]})");
    MotElem r3 = sum_exponential(S3, {1, 1}, {-1, -1});
    MotElem g = MotElem::L(-1) * MotElem::T(1) * MotElem::inv_one_minus(1, -1);
    CHECK(r3 == (g * g).simplify());
    // exact truncated double sum at q = 5, T = 1/7
    mpq_class X = mpq_class(1, 35), part = 0, xp = 1;
    for (int z = 1; z <= 40; ++z) {
        xp *= X;
        part += xp;
    }
    mpq_class exact = count_eval_T(r3, 5, mpq_class(1, 7));
    mpq_class tail = exact - part * part;
    CHECK(tail > 0);
    CHECK(tail < mpq_class(1, 1000000) * mpq_class(1, 1000000) * mpq_class(1, 1000000));
}

TEST_CASE("emptiness and enumeration") {
    auto E1 = PresburgerSet::from_json(R"({"vars":["z"],"clauses":[[{"ge":[[1],-1]},{"ge":[[-1],0]}]]})");
    CHECK(is_empty(E1));
    auto E2 = PresburgerSet::from_json(R"({"vars":["z"],"clauses":[[{"cong":[[1],-1,2]},{"cong":[[1],0,2]}]]})");
    CHECK(is_empty(E2));
    auto P = PresburgerSet::from_json(R"({"vars":["z"],"clauses":[[{"ge":[[1],0]},{"ge":[[-1],5]},{"cong":[[1],-1,3]}]]})");
    CHECK_FALSE(is_empty(P));
    auto pts = enumerate(P, -10, 10);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0] == std::vector<long>{1});
    CHECK(pts[1] == std::vector<long>{4});
    CHECK(normalize(E1).clauses.empty());
    CHECK(sum_exponential(E1, {1}, {-1}).is_zero());
    auto N = PresburgerSet::from_json(R"({"vars":["x","y"],"clauses":[[{"eq":[[2,4],-3]}]]})");
    CHECK(is_empty(N));
}

TEST_CASE("json round trip") {
    for (auto &f : fixtures()) {
        auto S = PresburgerSet::from_json(f.set);
        auto R = PresburgerSet::from_json(S.to_json());
        CHECK(R.vars == S.vars);
        CHECK(R.clauses == S.clauses);
    }
    CHECK_THROWS_AS(PresburgerSet::from_json("{"), SyntaxError);
}

TEST_CASE("divergent sums are rejected") {
    auto S = PresburgerSet::from_json(R"({"vars":["z"],"clauses":[[{"ge":[[1],0]}]]})");
    CHECK_THROWS_AS(sum_exponential(S, {0}, {1}), Divergent);
    CHECK_THROWS_AS(sum_exponential(S, {-1}, {0}), Divergent);
    auto W = PresburgerSet::from_json(R"({"vars":["z"],"clauses":[[]]})");
    CHECK_THROWS_AS(sum_exponential(W, {1}, {-1}), Divergent);
}

TEST_CASE("fixture series agree with enumeration") {
    CHECK(fixtures().size() == 20);
    for (auto &f : fixtures()) {
        auto S = PresburgerSet::from_json(f.set);
        MotElem r = sum_exponential(S, f.a, f.b);
        bool strict = std::all_of(f.b.begin(), f.b.end(), [](long x) { return x < 0; });
        if (strict) CHECK(r.in_j_form());
        for (long q : {3L, 5L, 7L}) {
            auto got = count_series(r, q, 25);
            auto want = enum_series(S, f.a, f.b, q, 25);
            INFO(f.set, " q=", q);
            for (int n = 0; n <= 25; ++n) CHECK(got[n] == want[n]);
        }
    }
}

TEST_CASE("summation order does not matter") {
    for (auto &f : fixtures()) {
        auto S = PresburgerSet::from_json(f.set);
        size_t m = S.dim();
        if (m < 2) continue;
        // reverse the variable order
        PresburgerSet R;
        for (size_t i = 0; i < m; ++i) R.vars.push_back(S.vars[m - 1 - i]);
        for (auto &c : S.clauses) {
            Conjunction rc;
            for (auto a : c) {
                std::reverse(a.coeffs.begin(), a.coeffs.end());
                rc.push_back(a);
            }
            R.clauses.push_back(rc);
        }
        auto ra = f.a, rb = f.b;
        std::reverse(ra.begin(), ra.end());
        std::reverse(rb.begin(), rb.end());
        MotElem x = sum_exponential(S, f.a, f.b), y = sum_exponential(R, ra, rb);
        INFO(f.set);
        CHECK((x - y).simplify().is_zero());
    }
}

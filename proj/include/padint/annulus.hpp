#pragma once

#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "padint/padic.hpp"
#include "padint/poly.hpp"

namespace padint {

// One bound of an annulus formula. The radius is stored as an exponent r
// with epsilon = p^-r; nullopt stands for epsilon = 0.
//   outer: |poly(x)| <= eps  (strict: <), i.e. ord poly(x) >= r (>)
//   hole:  eps <= |poly(x)|  (strict: <), i.e. ord poly(x) <= r (<)
struct AnnulusBound {
    UPoly poly;
    std::optional<mpq_class> eps;
    bool strict = false;

    static AnnulusBound linear(const mpz_class &center, std::optional<mpq_class> eps, bool strict);
    // Center a of poly = x - a; throws UnsupportedTerm for other polynomials.
    mpz_class center() const;
    bool operator==(const AnnulusBound &o) const {
        return poly == o.poly && eps == o.eps && strict == o.strict;
    }
};

enum class AnnulusKind { Thin, Laurent, Point, Other };

struct AnnulusFormula {
    long p = 2;
    AnnulusBound outer;
    std::vector<AnnulusBound> holes;

    bool holds(const mpq_class &x) const;
    bool is_closed() const;
    bool is_open() const;
    AnnulusKind kind() const;
    // Sum of the degrees of the hole polynomials.
    int complexity() const;
    std::string str() const;
    std::string to_json() const;
    static AnnulusFormula from_json(const std::string &src, long p);
};

// Checks that the polynomials are monic linear integer polynomials, that
// every hole lies in the outer disc and that the holes are pairwise
// disjoint. Throws NotAnAnnulus with a witness otherwise.
void validate(const AnnulusFormula &phi);

struct AnnulusDecomposition {
    std::vector<AnnulusFormula> pieces;
    // Complexity at every recursive call, with the index of the parent call.
    std::vector<std::pair<int, int>> trace;
};

// Disjoint thin and Laurent pieces (plus isolated points) covering phi.
AnnulusDecomposition decompose_thin_laurent(const AnnulusFormula &phi);

// f = R * E on a piece with E a unit of norm-distance to 1 at most p^-delta.
struct FactoredPiece {
    AnnulusFormula piece;
    UPoly numerator;
    UPoly denominator;
    // Lower bound for ord(E - 1) on the piece. For open pieces the bound holds
    // pointwise and delta may be 0 (sup norm only approaches 1).
    mpq_class delta = 0;
    bool pointwise_only = false;
    // Factors with roots inside the piece are known to this many digits; the
    // identity holds outside a p^-precision neighbourhood of the roots of
    // exceptional.
    int precision = 0;
    UPoly exceptional;

    mpq_class eval(const mpq_class &x) const;
};

FactoredPiece factor_thin(const UPoly &f, const AnnulusFormula &thin, const PAdicContext &ctx);
std::vector<FactoredPiece> factor_laurent(const UPoly &f, const AnnulusFormula &laurent,
                                          const PAdicContext &ctx);
// Thin and Laurent pieces of phi, each factored.
std::vector<FactoredPiece> factor_on(const UPoly &f, const AnnulusFormula &phi, const PAdicContext &ctx);

// R = prod (x - center_j)^exponent_j.
struct LinearFactor {
    mpz_class center;
    long exponent = 1;
};

struct FactorRelation {
    // Either ord(x - center_j) is the constant value, or it equals
    // ord(x - tied_center) on the piece.
    bool tied = false;
    mpz_class tied_center;
    mpq_class value;
};

struct DPiece {
    AnnulusFormula piece;
    // On the piece R = constant * prod monomial * E with E = 1 mod p.
    mpq_class constant = 1;
    std::vector<LinearFactor> monomial;
    std::vector<FactorRelation> relations;
};

// Pieces of {x in Z_p : |R(x)| <= p^-e} (strict: <) inside the unit disc.
std::vector<DPiece> decompose_D_region(long p, const std::vector<LinearFactor> &R, const mpq_class &e,
                                       bool strict);

} // namespace padint

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "padint/extint.hpp"
#include "padint/poly.hpp"

namespace padint {

enum class Mode { FixedPrime, SymbolicQ };

struct PAdicContext {
    mpz_class p = 5;
    int M = 20;
    Mode mode = Mode::FixedPrime;
    bool equichar = false;

    PAdicContext() = default;
    PAdicContext(long prime, int digits = default_precision(), Mode m = Mode::FixedPrime,
                 bool eq = false);
    // Digit budget, overridable through PADIC_CELLS_PRECISION.
    static int default_precision();
    mpz_class modulus(int k) const;
};

// p^valuation * unit, known modulo p^(valuation + prec). An optional exact
// rational value is carried along when the number is known exactly.
class PAdicNumber {
public:
    PAdicNumber() = default;
    static PAdicNumber zero(const PAdicContext &ctx);
    static PAdicNumber from_int(const PAdicContext &ctx, const mpz_class &x);
    static PAdicNumber from_rational(const PAdicContext &ctx, const mpq_class &x);
    // Value congruent to x modulo p^abs_prec, not assumed exact.
    static PAdicNumber approx(const PAdicContext &ctx, const mpz_class &x, long abs_prec);
    static PAdicNumber from_parts(const PAdicContext &ctx, long valuation, const mpz_class &unit,
                                  int prec);

    const PAdicContext &context() const { return ctx_; }
    const ExtInt &valuation() const { return val_; }
    const mpz_class &unit() const { return unit_; }
    int prec() const { return prec_; }
    bool is_zero() const { return val_.is_infinite(); }
    bool is_exact() const { return exact_.has_value(); }
    const std::optional<mpq_class> &exact() const { return exact_; }
    // Absolute precision v + prec; infinite for exact values.
    ExtInt abs_prec() const;

    PAdicNumber operator+(const PAdicNumber &o) const;
    PAdicNumber operator-(const PAdicNumber &o) const;
    PAdicNumber operator*(const PAdicNumber &o) const;
    PAdicNumber operator/(const PAdicNumber &o) const;
    PAdicNumber operator-() const;
    PAdicNumber pow(unsigned k) const;
    // Same value on all digits trusted by both.
    bool agrees(const PAdicNumber &o) const;
    // Integer representative of an integral value modulo p^k.
    mpz_class residue_int(int k) const;
    PAdicNumber with_prec(int prec) const;

    std::string str() const;

private:
    void normalize_unit();
    PAdicContext ctx_;
    ExtInt val_ = ExtInt::infinity();
    mpz_class unit_ = 0;
    int prec_ = 0;
    std::optional<mpq_class> exact_;
};

ExtInt ord(const PAdicNumber &x);
mpz_class ac(const PAdicNumber &x, int m);
mpz_class res(const PAdicNumber &x, int m);

PAdicNumber mth_root(const PAdicNumber &x, const mpz_class &xi, long z, long m, int e);
PAdicNumber hensel_root(const std::vector<PAdicNumber> &a, const mpz_class &xi, int e);

struct NewtonSegment {
    mpq_class slope;
    int length;
    // Valuation of the roots on this segment.
    mpq_class root_valuation() const { return -slope; }
};

struct NewtonPolygon {
    std::vector<std::pair<int, ExtInt>> points;
    std::vector<NewtonSegment> segments;
    // Number of roots equal to zero (leading zero coefficients stripped).
    int zero_roots = 0;
    // Root valuations with multiplicity, in increasing order.
    std::vector<mpq_class> root_valuations() const;
};

NewtonPolygon newton_polygon(const std::vector<PAdicNumber> &f);
NewtonPolygon newton_polygon_vals(const std::vector<ExtInt> &vals);
NewtonPolygon newton_polygon(const UPoly &f, const mpz_class &p);

struct SlopeFactor {
    // Monic factor, coefficients from degree 0.
    std::vector<PAdicNumber> factor;
    // Root valuation; nullopt means the factor y (root 0).
    std::optional<mpq_class> valuation;
    // Reduction of the normalized factor, when the valuation is integral.
    std::vector<long> residue;
};

struct SlopeFactorization {
    std::vector<SlopeFactor> factors;
    // Digits to which the product of the factors matches f.
    int precision = 0;
};

SlopeFactorization slope_factor(const UPoly &f, const PAdicContext &ctx);
std::vector<PAdicNumber> poly_mul(const std::vector<PAdicNumber> &a,
                                  const std::vector<PAdicNumber> &b);

// Multiset {ord(a - b) : f(a) = 0, g(b) = 0} in increasing order.
std::vector<mpq_class> root_distance_vals(const UPoly &f, const UPoly &g, const mpz_class &p);
// Res_y(f(y), g(x + y)) as a polynomial in x.
UPoly difference_resultant(const UPoly &f, const UPoly &g);

} // namespace padint

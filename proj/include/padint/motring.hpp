#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "padint/residue.hpp"

namespace padint {

// Denominator factor 1 - L^b T^a, stored as (a, b).
using DenFactor = std::pair<long, long>;

struct MonoKey {
    std::vector<std::string> forms; // sorted formula keys (multiset)
    long eL = 0;
    long eT = 0;
    std::vector<std::pair<DenFactor, int>> den; // sorted, positive multiplicities

    auto operator<=>(const MonoKey &) const = default;
};

// Element of the ring of Q-combinations of residue formula classes, powers
// of L and T, and inverses of 1 - L^b T^a.
class MotElem {
public:
    MotElem() = default;
    static MotElem constant(const mpq_class &c);
    static MotElem L(long e = 1);
    static MotElem T(long e = 1);
    static MotElem monomial(const mpq_class &c, long eL, long eT);
    static MotElem formula(const ResidueFormula &f);
    // 1 / (1 - L^b T^a)
    static MotElem inv_one_minus(long a, long b);

    const std::map<MonoKey, mpq_class> &terms() const { return terms_; }
    const std::map<std::string, ResidueFormula> &formulas() const { return forms_; }
    bool is_zero() const { return terms_.empty(); }

    MotElem operator+(const MotElem &o) const;
    MotElem operator-(const MotElem &o) const;
    MotElem operator*(const MotElem &o) const;
    MotElem operator*(const mpq_class &c) const;
    MotElem operator-() const;
    MotElem &operator+=(const MotElem &o);
    // Syntactic equality of normalized representations.
    bool operator==(const MotElem &o) const { return terms_ == o.terms_; }

    // Canonical merged form: trivial formula classes become powers of L,
    // everything is put over one denominator and common factors cancel.
    MotElem simplify() const;
    // Every denominator satisfies a >= 0 and b < 0.
    bool in_j_form() const;
    // Replace each formula class by its count over F_q.
    MotElem count_formulas(long q) const;

    std::string str() const;
    // Normalized expression tree: a sum of terms, each a product of factors.
    std::string to_json() const;
    void add_term(const MonoKey &k, const mpq_class &c);

private:
    std::map<MonoKey, mpq_class> terms_;
    std::map<std::string, ResidueFormula> forms_;
};

// Count_q with T = q^(-s).
mpq_class count_eval(const MotElem &x, long q, long s);
// Count_q with T replaced by a rational number.
mpq_class count_eval_T(const MotElem &x, long q, const mpq_class &T);
// Coefficients of T^0..T^J of Count_q(x) expanded as a power series in T.
std::vector<mpq_class> count_series(const MotElem &x, long q, int J);

} // namespace padint

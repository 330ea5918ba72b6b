#pragma once

#include <string>
#include <vector>

#include "padint/motring.hpp"

namespace padint {

struct LinearConstraint {
    enum Kind { Ge, Eq, Cong };
    Kind kind = Ge;
    std::vector<long> coeffs; // one per variable
    long constant = 0;
    long modulus = 0; // Cong only: coeffs.z + constant == 0 mod modulus

    static LinearConstraint ge(std::vector<long> a, long c) { return {Ge, std::move(a), c, 0}; }
    static LinearConstraint eq(std::vector<long> a, long c) { return {Eq, std::move(a), c, 0}; }
    static LinearConstraint cong(std::vector<long> a, long c, long n) { return {Cong, std::move(a), c, n}; }

    long eval(const std::vector<long> &z) const;
    bool holds(const std::vector<long> &z) const;
    bool operator==(const LinearConstraint &o) const {
        return kind == o.kind && coeffs == o.coeffs && constant == o.constant && modulus == o.modulus;
    }
    bool operator<(const LinearConstraint &o) const;
    std::string str(const std::vector<std::string> &vars) const;
};

using Conjunction = std::vector<LinearConstraint>;

// Disjunction of conjunctions of affine inequalities, equalities and
// congruences over Z^m.
struct PresburgerSet {
    std::vector<std::string> vars;
    std::vector<Conjunction> clauses;

    PresburgerSet() = default;
    PresburgerSet(std::vector<std::string> v, std::vector<Conjunction> c)
        : vars(std::move(v)), clauses(std::move(c)) {}
    static PresburgerSet single(std::vector<std::string> v, Conjunction c) {
        return PresburgerSet(std::move(v), {std::move(c)});
    }

    size_t dim() const { return vars.size(); }
    bool contains(const std::vector<long> &z) const;
    PresburgerSet intersect(const PresburgerSet &o) const;
    // Equivalent set whose clauses are pairwise disjoint.
    PresburgerSet disjoint() const;
    std::string str() const;
    std::string to_json() const;
    static PresburgerSet from_json(const std::string &src);
};

PresburgerSet normalize(const PresburgerSet &S);
bool is_empty(const PresburgerSet &S);
bool is_empty(const Conjunction &C, size_t nvars);
// Points of S inside the box [lo, hi]^m, lexicographic order.
std::vector<std::vector<long>> enumerate(const PresburgerSet &S, long lo, long hi);

// Sum over z in S of L^(b.z) T^(a.z), returned in simplified form.
MotElem sum_exponential(const PresburgerSet &S, const std::vector<long> &a, const std::vector<long> &b);

// Sum over z in S of c * L^(b.z + b0) T^(a.z + a0); the building block used
// by the integration pipeline. Not simplified.
MotElem sum_affine(const Conjunction &C, size_t nvars, const std::vector<long> &a, long a0,
                   const std::vector<long> &b, long b0, const MotElem &coef);

} // namespace padint

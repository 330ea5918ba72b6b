#pragma once

#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace padint {

// Polynomial over Q in residue variables r0, r1, ... Exponent vectors are
// stored without trailing zeros, so polynomials in different numbers of
// variables combine freely.
class ResPoly {
public:
    using Exps = std::vector<int>;

    ResPoly() = default;
    static ResPoly constant(const mpq_class &c);
    static ResPoly var(int i);

    const std::map<Exps, mpq_class> &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    mpq_class constant_term() const;
    int max_var() const;
    int degree_in(int v) const;
    void add_term(Exps e, const mpq_class &c);

    ResPoly operator+(const ResPoly &o) const;
    ResPoly operator-(const ResPoly &o) const;
    ResPoly operator*(const ResPoly &o) const;
    ResPoly operator-() const;
    ResPoly pow(int k) const;
    bool operator==(const ResPoly &o) const { return terms_ == o.terms_; }
    bool operator<(const ResPoly &o) const { return terms_ < o.terms_; }

    ResPoly derivative(int v) const;
    // Coefficient of r_v^k.
    ResPoly coeff_in(int v, int k) const;
    // Replace r_v by the polynomial s.
    ResPoly substitute(int v, const ResPoly &s) const;
    // Renumber variables: r_i becomes r_map[i].
    ResPoly renamed(const std::vector<int> &map) const;
    // Value modulo the prime q; denominators must be units.
    long eval_mod(const std::vector<long> &vals, long q) const;
    // Scale to a primitive integer polynomial with positive leading term.
    ResPoly primitive() const;

    std::string str(const std::vector<std::string> &names) const;

private:
    std::map<Exps, mpq_class> terms_;
};

struct ResAtom {
    ResPoly poly;
    bool eq = true; // poly = 0, otherwise poly != 0
    bool operator<(const ResAtom &o) const {
        if (eq != o.eq) return eq < o.eq;
        return poly < o.poly;
    }
    bool operator==(const ResAtom &o) const { return eq == o.eq && poly == o.poly; }
};

// Conjunction of polynomial equations and inequations over the residue
// field in nvars free variables. Its class is counted over F_q.
class ResidueFormula {
public:
    ResidueFormula() = default;
    explicit ResidueFormula(int nvars, std::vector<ResAtom> atoms = {});

    int nvars() const { return nvars_; }
    const std::vector<ResAtom> &atoms() const { return atoms_; }
    bool is_true() const { return atoms_.empty(); }
    // Syntactically false (a nonzero constant set to zero, or 0 != 0).
    bool is_false() const;

    ResidueFormula conj(const ResidueFormula &o) const;
    ResidueFormula with_atom(const ResPoly &p, bool eq) const;
    ResidueFormula with_nvars(int n) const;
    bool holds(const std::vector<long> &vals, long q) const;
    // Number of F_q points; q must be prime.
    mpz_class count(long q) const;
    // Remove unused trailing variables and renumber the rest densely; the
    // returned factor is q-independent multiplicity L^k for dropped
    // unconstrained variables, reported through dropped.
    ResidueFormula compact(int &dropped) const;

    std::string key() const;
    std::string str() const;

private:
    void normalize();
    int nvars_ = 0;
    std::vector<ResAtom> atoms_;
};

std::vector<std::string> default_res_names(int n);

} // namespace padint

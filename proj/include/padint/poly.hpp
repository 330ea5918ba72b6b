#pragma once

#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace padint {

// Dense univariate polynomial over Q, coefficients from degree 0 upward.
class UPoly {
public:
    UPoly() = default;
    explicit UPoly(std::vector<mpq_class> c);
    static UPoly constant(const mpq_class &c);
    static UPoly monomial(const mpq_class &c, int deg);
    static UPoly from_ints(const std::vector<long> &c);

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<mpq_class> &coeffs() const { return c_; }
    mpq_class coeff(int i) const;
    mpq_class lead() const;

    UPoly operator+(const UPoly &o) const;
    UPoly operator-(const UPoly &o) const;
    UPoly operator*(const UPoly &o) const;
    UPoly operator*(const mpq_class &s) const;
    UPoly operator-() const;
    bool operator==(const UPoly &o) const { return c_ == o.c_; }

    UPoly derivative() const;
    mpq_class eval(const mpq_class &x) const;
    // f(x + c)
    UPoly shift(const mpq_class &c) const;
    // f(c * x)
    UPoly scale(const mpq_class &c) const;
    UPoly monic() const;
    // Multiply by the lcm of denominators and divide by content.
    UPoly primitive() const;
    UPoly compose(const UPoly &g) const;

    std::string str(const std::string &var = "y") const;

private:
    void trim();
    std::vector<mpq_class> c_;
};

void divmod(const UPoly &a, const UPoly &b, UPoly &q, UPoly &r);
UPoly gcd(const UPoly &a, const UPoly &b);
// Pairs (factor, multiplicity) with squarefree, pairwise coprime factors.
std::vector<std::pair<UPoly, int>> squarefree_decomposition(const UPoly &f);
bool is_squarefree(const UPoly &f);
// Distinct rational roots.
std::vector<mpq_class> rational_roots(const UPoly &f);
// Refine a list into pairwise coprime squarefree factors; each input is a
// product of powers of the returned factors.
std::vector<UPoly> coprime_basis(const std::vector<UPoly> &fs);
mpq_class resultant(const UPoly &f, const UPoly &g);

// Sparse multivariate polynomial over Z. Exponent slot 0 is the
// uniformizer t; slots 1..nvars are the variables.
class MPoly {
public:
    using Exps = std::vector<int>;

    MPoly() = default;
    explicit MPoly(int nvars) : nvars_(nvars) {}
    static MPoly constant(int nvars, const mpz_class &c);
    static MPoly var(int nvars, int i);
    static MPoly uniformizer(int nvars);

    int nvars() const { return nvars_; }
    const std::map<Exps, mpz_class> &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    void add_term(const Exps &e, const mpz_class &c);

    MPoly operator+(const MPoly &o) const;
    MPoly operator-(const MPoly &o) const;
    MPoly operator*(const MPoly &o) const;
    MPoly operator-() const;
    MPoly pow(int k) const;
    bool operator==(const MPoly &o) const { return terms_ == o.terms_; }

    int degree_in(int var) const;
    int t_degree() const { return degree_in(0); }
    int total_degree() const;
    // Coefficient of var^k as a polynomial with var removed from use.
    MPoly coeff_in(int var, int k) const;
    bool depends_on(int var) const { return degree_in(var) > 0; }
    // Replace t by the integer p.
    MPoly specialize_t(const mpz_class &p) const;
    MPoly reduce_mod(const mpz_class &m) const;
    mpz_class eval(const mpz_class &t, const std::vector<mpz_class> &x) const;
    // Univariate in variable var; all other variables and t must be absent.
    UPoly to_upoly(int var) const;
    MPoly with_nvars(int n) const;
    // Apply a permutation: variable i goes to slot perm[i-1].
    MPoly permuted(const std::vector<int> &perm) const;

    std::string str(const std::vector<std::string> &names,
                    const std::string &tname = "t") const;

private:
    int nvars_ = 0;
    std::map<Exps, mpz_class> terms_;
};

struct ParsedPoly {
    MPoly poly;
    std::vector<std::string> names;
};

// Parse integer polynomial text. Identifiers p and t denote the
// uniformizer; all other identifiers are variables. If names is nonempty
// it fixes the variable order, otherwise variables are sorted.
ParsedPoly parse_poly(const std::string &src,
                      const std::vector<std::string> &names = {});

mpz_class ipow(const mpz_class &b, unsigned long e);
long vp(const mpz_class &x, const mpz_class &p);
long vp(const mpq_class &x, const mpz_class &p);

} // namespace padint

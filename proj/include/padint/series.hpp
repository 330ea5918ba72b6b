#pragma once

#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "padint/padic.hpp"
#include "padint/poly.hpp"

namespace padint {

// Truncated element of S_{m,n}(Z[[t]]): coefficients are integer
// polynomials in t below degree Mt, rho exponents are at most D. Variable
// ids 0..m-1 are xi_1..xi_m and m..m+n-1 are rho_1..rho_n.
class SeparatedSeries {
public:
    using Exps = std::vector<int>; // [t, xi_1.., rho_1..]

    static constexpr int kDefaultMt = 12;
    static constexpr int kDefaultD = 16;

    SeparatedSeries() : SeparatedSeries(0, 0) {}
    SeparatedSeries(int m, int n, int Mt = kDefaultMt, int D = kDefaultD, bool exact = true);

    static SeparatedSeries constant(int m, int n, const mpz_class &c, int Mt = kDefaultMt, int D = kDefaultD);
    static SeparatedSeries var(int m, int n, int id, int Mt = kDefaultMt, int D = kDefaultD);
    static SeparatedSeries t(int m, int n, int Mt = kDefaultMt, int D = kDefaultD);
    // Variables of the polynomial become xi_1..xi_m, rho_1..rho_n in order.
    static SeparatedSeries from_mpoly(const MPoly &f, int m, int n, int Mt = kDefaultMt, int D = kDefaultD,
                                      bool exact = true);
    // Literal syntax: sums of c(t) * xi1^a * rho1^b.
    static SeparatedSeries parse(const std::string &src, int m, int n, int Mt = kDefaultMt, int D = kDefaultD);

    int m() const { return m_; }
    int n() const { return n_; }
    int nvars() const { return m_ + n_; }
    int Mt() const { return Mt_; }
    int D() const { return D_; }
    bool exact() const { return exact_; }
    void set_exact(bool e) { exact_ = e; }
    const std::map<Exps, mpz_class> &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const Exps &e, const mpz_class &c);

    SeparatedSeries operator+(const SeparatedSeries &o) const;
    SeparatedSeries operator-(const SeparatedSeries &o) const;
    SeparatedSeries operator*(const SeparatedSeries &o) const;
    SeparatedSeries operator*(const mpz_class &c) const;
    SeparatedSeries operator-() const;
    SeparatedSeries pow(int k) const;
    // Same truncated representative (exactness flag ignored).
    bool operator==(const SeparatedSeries &o) const { return terms_ == o.terms_; }

    int degree_in(int id) const;
    // Coefficient of var^k, still over the same variables.
    SeparatedSeries coeff_in(int id, int k) const;
    // Image modulo t and the listed rho variables.
    SeparatedSeries reduce(bool drop_t, const std::vector<int> &zero_vars) const;
    bool is_rho(int id) const { return id >= m_; }
    // Constant term modulo I + (rho) is +1 or -1.
    bool is_unit() const;
    SeparatedSeries inverse() const;
    MPoly to_mpoly() const;

    // Value at a point: xi-slots need ord >= 0, rho-slots ord > 0; outside
    // that domain the value is exactly 0.
    PAdicNumber eval(const std::vector<PAdicNumber> &point, const PAdicContext &ctx) const;

    std::string str() const;
    std::vector<std::string> var_names() const;

private:
    friend SeparatedSeries combine_shape(const SeparatedSeries &, const SeparatedSeries &);
    bool keeps(const Exps &e) const;
    int m_, n_, Mt_, D_;
    bool exact_;
    std::map<Exps, mpz_class> terms_;
};

// f(alphas, betas): alphas replace the xi, betas the rho; betas must lie in
// (t) + (rho).
SeparatedSeries compose(const SeparatedSeries &f, const std::vector<SeparatedSeries> &alphas,
                        const std::vector<SeparatedSeries> &betas);

bool is_regular(const SeparatedSeries &f, int id, int d);
// Degree d for which f is regular in var id, or -1.
int regular_degree(const SeparatedSeries &f, int id);

struct WDivision {
    SeparatedSeries q, r;
};
WDivision w_divide(const SeparatedSeries &g, const SeparatedSeries &f, int id, int d);

struct WPreparation {
    SeparatedSeries u, P;
    int d = 0;
};
WPreparation w_prepare(const SeparatedSeries &f, int id);

struct DominantTerm {
    std::vector<int> index;  // exponents of the inner variables
    SeparatedSeries coeff;   // series in the outer variables
    SeparatedSeries unit;    // G, verified to be a unit
};
// inner[id] marks the eta/lambda variables. F = sum coeff * z^index * unit.
std::vector<DominantTerm> dominant_terms(const SeparatedSeries &F, const std::vector<bool> &inner);

struct Preregularization {
    std::vector<int> c; // xi_i -> xi_i + xi_m^c[i] for i < m-1, 0 meaning unchanged
    int d = 0;
    SeparatedSeries image; // f after the change of variables
};
Preregularization preregularize(const SeparatedSeries &f);

} // namespace padint

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "padint/cells.hpp"
#include "padint/motring.hpp"
#include "padint/poly.hpp"
#include "padint/series.hpp"

namespace padint {

struct ZetaOptions {
    int threads = 0; // 0: OpenMP default
    bool serial = false;
};

struct PrecisionCertificate {
    bool exact = true;
    // T-coefficients below this index are certified (truncated integrands).
    std::optional<int> certified_below;
    int t_order = 0; // truncation order in t of the prepared polynomial
    std::string note;
};

// Result of integrating |f1|^s |f2| over Z_p^n. unresolved_measure is the
// measure of the part of the domain no cell covers; motelem carries the
// contribution of the cells only.
struct ZetaResult {
    long p = 0;
    MotElem motelem;
    PrecisionCertificate certificate;
    size_t cell_count = 0;
    MotElem mass;                // sum of the measures of all cells
    MotElem unresolved_measure;
    std::string unresolved_reason;
    std::vector<std::string> vars;

    bool complete() const { return unresolved_measure.is_zero(); }
    // mass + unresolved_measure == 1 after simplify and under count at q.
    bool mass_balanced() const;
    std::string to_json() const;
};

// Variables of f1 and f2 are the slots 1..n of the polynomials; the last one is innermost.
ZetaResult zeta(const MPoly &f1, const MPoly &f2, int n, long p, const ZetaOptions &opt = {});
ZetaResult zeta(const MPoly &f1, int n, long p, const ZetaOptions &opt = {});

// Per-cell contribution of |f1|^s |f2|, zero for null cells.
MotElem cell_contribution(const Cell &c);

// |f| = |P| where f = u P with u a unit; the polynomial P is integrated.
ZetaResult zeta_series_integrand(const SeparatedSeries &f, long p, const ZetaOptions &opt = {});

// sum_j mu_j T^j
MotElem igusa_series(const std::vector<mpq_class> &mu);

// Closed form in L, T and residue formula classes for t-free univariate f1, f2,
// valid at every prime not dividing bad_primes_product.
struct SymbolicZeta {
    MotElem motelem;
    mpz_class bad_primes_product;
    std::vector<long> bad_primes; // prime factors found by trial division
    bool factored = true;         // false if a cofactor above the trial bound remains

    bool valid_at(long p) const;
};
SymbolicZeta zeta_symbolic(const UPoly &f1, const UPoly &f2 = UPoly::constant(1));

} // namespace padint

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "padint/motring.hpp"
#include "padint/poly.hpp"

namespace padint {

struct OracleOptions {
    long budget = 10'000'000; // node expansions
    int threads = 0;          // 0: OpenMP default
};

// mu[j] = measure of {x in Z_p^n : ord f(x) = j} for j <= J, and the
// measure of {ord f(x) > J}.
struct MuTable {
    long p = 0;
    int n = 0;
    std::vector<mpq_class> mu;
    mpq_class tail;
    long expansions = 0;
};

// Fixed-prime oracle; t in f is read as p.
MuTable mu_table(const MPoly &f, long p, int J, const OracleOptions &opt = {});
MuTable mu_table_serial(const MPoly &f, long p, int J, const OracleOptions &opt = {});
mpq_class mu(const MPoly &f, long p, int j, const OracleOptions &opt = {});

// Same counts over F_p[[t]], with t the uniformizer.
MuTable mu_equichar_table(const MPoly &f, long p, int J, const OracleOptions &opt = {});
mpq_class mu_equichar(const MPoly &f, long p, int j, const OracleOptions &opt = {});

struct CompareEntry {
    int j;
    mpq_class expected; // oracle
    mpq_class got;      // from the closed form
    bool match;
};

struct CompareReport {
    std::vector<CompareEntry> entries;
    bool all_match = true;
    std::optional<int> first_mismatch;
    std::string str() const;
};

// Compare the T-expansion of X at q = p with the oracle values. Only
// coefficients up to certified (if given) are compared.
CompareReport compare(const MotElem &X, const MuTable &oracle, std::optional<int> certified = std::nullopt);
CompareReport compare(const MotElem &X, const MPoly &f, long p, int J, const OracleOptions &opt = {});

// Lines "j,numerator,denominator".
std::string to_csv(const MuTable &t);

} // namespace padint

#include "padint/oracle.hpp"

#include <atomic>
#include <sstream>

#include <omp.h>

#include "padint/errors.hpp"

namespace padint {

namespace {

using u64 = unsigned long long;
using u128 = unsigned __int128;

struct Term {
    u64 c;
    std::vector<int> e; // exponents of x1..xn
};

// f specialized at t = p with coefficients reduced mod M = p^(J+1).
struct ModPoly {
    int n;
    u64 M;
    std::vector<Term> terms;

    u64 eval(const std::vector<u64> &x) const {
        u128 s = 0;
        for (auto &t : terms) {
            u128 v = t.c;
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < t.e[i]; ++k) v = v * x[i] % M;
            s = (s + v) % M;
        }
        return static_cast<u64>(s);
    }
};

struct Counts {
    std::vector<u64> at; // residues mod p^(k+1) with ord exactly k
    u64 tail = 0;        // residues mod p^(J+1) with f = 0 mod p^(J+1)
    long expansions = 0;

    explicit Counts(int J) : at(J + 1, 0) {}
    void merge(const Counts &o) {
        for (size_t k = 0; k < at.size(); ++k) at[k] += o.at[k];
        tail += o.tail;
        expansions += o.expansions;
    }
};

struct Lifter {
    const ModPoly &F;
    long p;
    int J;
    std::vector<u64> pk; // p^k
    std::atomic<long> &spent;
    long budget;

    // x is known mod p^k and f(x) = 0 mod p^k; enumerate digit k.
    void expand(std::vector<u64> &x, int k, Counts &c) {
        if (spent.fetch_add(1, std::memory_order_relaxed) + 1 > budget)
            throw BudgetExceeded("oracle node budget of " + std::to_string(budget) + " expansions exceeded");
        ++c.expansions;
        int n = F.n;
        std::vector<u64> d(n, 0);
        std::vector<u64> base = x;
        while (true) {
            for (int i = 0; i < n; ++i) x[i] = base[i] + d[i] * pk[k];
            child(x, k, c);
            int i = n - 1;
            while (i >= 0 && d[i] == static_cast<u64>(p - 1)) d[i--] = 0;
            if (i < 0) break;
            ++d[i];
        }
        x = base;
    }

    void child(std::vector<u64> &x, int k, Counts &c) {
        u64 v = F.eval(x) % pk[k + 1];
        if (v != 0) {
            ++c.at[k];
        } else if (k + 1 > J) {
            ++c.tail;
        } else {
            expand(x, k + 1, c);
        }
    }
};

ModPoly make_modpoly(const MPoly &f, long p, int J) {
    mpz_class M = ipow(mpz_class(p), J + 1);
    if (mpz_sizeinbase(M.get_mpz_t(), 2) > 62)
        throw BudgetExceeded("oracle modulus p^(J+1) exceeds 62 bits");
    MPoly g = f.specialize_t(p);
    ModPoly F{f.nvars(), M.get_ui(), {}};
    for (auto &[e, c] : g.terms()) {
        mpz_class r;
        mpz_fdiv_r(r.get_mpz_t(), c.get_mpz_t(), M.get_mpz_t());
        if (r == 0) continue;
        F.terms.push_back({r.get_ui(), std::vector<int>(e.begin() + 1, e.end())});
    }
    return F;
}

MuTable finish(const Counts &c, long p, int n, int J) {
    MuTable t;
    t.p = p;
    t.n = n;
    t.expansions = c.expansions;
    for (int k = 0; k <= J; ++k) {
        mpz_class den = ipow(mpz_class(p), static_cast<unsigned long>((k + 1) * n));
        mpq_class v(mpz_class(static_cast<unsigned long>(c.at[k])), den);
        v.canonicalize();
        t.mu.push_back(v);
    }
    mpz_class den = ipow(mpz_class(p), static_cast<unsigned long>((J + 1) * n));
    t.tail = mpq_class(mpz_class(static_cast<unsigned long>(c.tail)), den);
    t.tail.canonicalize();
    return t;
}

void check_args(const MPoly &f, long p, int J) {
    if (J < 0) throw std::invalid_argument("level must be nonnegative");
    if (p < 2) throw std::invalid_argument("p must be a prime");
    if (f.nvars() == 0) return;
}

// Digit vectors of the first level, in lexicographic order.
std::vector<std::vector<u64>> first_digits(long p, int n) {
    std::vector<std::vector<u64>> out;
    std::vector<u64> d(n, 0);
    while (true) {
        out.push_back(d);
        int i = n - 1;
        while (i >= 0 && d[i] == static_cast<u64>(p - 1)) d[i--] = 0;
        if (i < 0) break;
        ++d[i];
    }
    return out;
}

} // namespace

MuTable mu_table_serial(const MPoly &f, long p, int J, const OracleOptions &opt) {
    check_args(f, p, J);
    ModPoly F = make_modpoly(f, p, J);
    std::atomic<long> spent{0};
    Lifter L{F, p, J, {}, spent, opt.budget};
    for (int k = 0; k <= J + 1; ++k) L.pk.push_back(ipow(mpz_class(p), k).get_ui());
    Counts c(J);
    std::vector<u64> x(F.n, 0);
    L.expand(x, 0, c);
    return finish(c, p, F.n, J);
}

MuTable mu_table(const MPoly &f, long p, int J, const OracleOptions &opt) {
    check_args(f, p, J);
    ModPoly F = make_modpoly(f, p, J);
    std::atomic<long> spent{1}; // the root expansion
    if (opt.budget < 1) throw BudgetExceeded("oracle node budget of " + std::to_string(opt.budget) + " expansions exceeded");
    Lifter L{F, p, J, {}, spent, opt.budget};
    for (int k = 0; k <= J + 1; ++k) L.pk.push_back(ipow(mpz_class(p), k).get_ui());
    auto roots = first_digits(p, F.n);
    Counts total(J);
    total.expansions = 1;
    int nthreads = opt.threads > 0 ? opt.threads : omp_get_max_threads();
    std::vector<Counts> local(nthreads, Counts(J));
    bool failed = false;
    std::string msg;
#pragma omp parallel for num_threads(nthreads) schedule(dynamic, 1)
    for (long i = 0; i < static_cast<long>(roots.size()); ++i) {
        try {
            std::vector<u64> x = roots[i];
            L.child(x, 0, local[omp_get_thread_num()]);
        } catch (const BudgetExceeded &e) {
#pragma omp critical
            {
                failed = true;
                msg = e.what();
            }
        }
    }
    if (failed) throw BudgetExceeded(msg);
    for (auto &c : local) total.merge(c);
    return finish(total, p, F.n, J);
}

mpq_class mu(const MPoly &f, long p, int j, const OracleOptions &opt) { return mu_table(f, p, j, opt).mu.at(j); }

// ---------------------------------------------------------------- equal characteristic

namespace {

using TPoly = std::vector<long>; // digits of an element of F_p[t]/t^N

struct ETerm {
    TPoly c;
    std::vector<int> e;
};

struct EqLifter {
    std::vector<ETerm> terms;
    int n;
    long p;
    int J;
    std::atomic<long> &spent;
    long budget;

    // product truncated mod t^N
    TPoly mul(const TPoly &a, const TPoly &b, int N) const {
        TPoly r(N, 0);
        for (int i = 0; i < N; ++i) {
            if (!a[i]) continue;
            for (int j = 0; i + j < N; ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
        }
        return r;
    }

    // f(x) mod t^N is zero
    bool vanishes(const std::vector<TPoly> &x, int N) const {
        TPoly s(N, 0);
        for (auto &t : terms) {
            TPoly v(t.c.begin(), t.c.begin() + N);
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < t.e[i]; ++k) v = mul(v, x[i], N);
            for (int i = 0; i < N; ++i) s[i] = (s[i] + v[i]) % p;
        }
        for (long d : s)
            if (d) return false;
        return true;
    }

    void expand(std::vector<TPoly> &x, int k, Counts &c) {
        if (spent.fetch_add(1, std::memory_order_relaxed) + 1 > budget)
            throw BudgetExceeded("oracle node budget of " + std::to_string(budget) + " expansions exceeded");
        ++c.expansions;
        std::vector<long> d(n, 0);
        while (true) {
            for (int i = 0; i < n; ++i) x[i][k] = d[i];
            child(x, k, c);
            int i = n - 1;
            while (i >= 0 && d[i] == p - 1) d[i--] = 0;
            if (i < 0) break;
            ++d[i];
        }
        for (int i = 0; i < n; ++i) x[i][k] = 0;
    }

    void child(std::vector<TPoly> &x, int k, Counts &c) {
        if (!vanishes(x, k + 1)) {
            ++c.at[k];
        } else if (k + 1 > J) {
            ++c.tail;
        } else {
            expand(x, k + 1, c);
        }
    }
};

} // namespace

MuTable mu_equichar_table(const MPoly &f, long p, int J, const OracleOptions &opt) {
    check_args(f, p, J);
    int n = f.nvars();
    int N = J + 1;
    std::atomic<long> spent{0};
    EqLifter L{{}, n, p, J, spent, opt.budget};
    std::map<std::vector<int>, TPoly> acc;
    for (auto &[e, c] : f.terms()) {
        std::vector<int> xe(e.begin() + 1, e.end());
        auto &v = acc.try_emplace(xe, TPoly(N, 0)).first->second;
        if (e[0] >= N) continue;
        mpz_class r;
        mpz_fdiv_r_ui(r.get_mpz_t(), c.get_mpz_t(), p);
        v[e[0]] = (v[e[0]] + r.get_si()) % p;
    }
    for (auto &[e, v] : acc) L.terms.push_back({v, e});
    Counts c(J);
    std::vector<TPoly> x(n, TPoly(N, 0));
    L.expand(x, 0, c);
    return finish(c, p, n, J);
}

mpq_class mu_equichar(const MPoly &f, long p, int j, const OracleOptions &opt) {
    return mu_equichar_table(f, p, j, opt).mu.at(j);
}

// ---------------------------------------------------------------- reports

CompareReport compare(const MotElem &X, const MuTable &oracle, std::optional<int> certified) {
    int J = static_cast<int>(oracle.mu.size()) - 1;
    if (certified) J = std::min(J, *certified);
    CompareReport r;
    if (J < 0) return r;
    auto got = count_series(X, oracle.p, J);
    for (int j = 0; j <= J; ++j) {
        bool m = got[j] == oracle.mu[j];
        r.entries.push_back({j, oracle.mu[j], got[j], m});
        if (!m && r.all_match) {
            r.all_match = false;
            r.first_mismatch = j;
        }
    }
    return r;
}

CompareReport compare(const MotElem &X, const MPoly &f, long p, int J, const OracleOptions &opt) {
    return compare(X, mu_table(f, p, J, opt));
}

std::string CompareReport::str() const {
    std::ostringstream os;
    for (auto &e : entries)
        os << "j=" << e.j << " oracle=" << e.expected.get_str() << " closed=" << e.got.get_str() << " "
           << (e.match ? "match" : "MISMATCH") << "\n";
    os << (all_match ? "all coefficients match" : "mismatch at j=" + std::to_string(*first_mismatch)) << "\n";
    return os.str();
}

std::string to_csv(const MuTable &t) {
    std::ostringstream os;
    os << "j,numerator,denominator\n";
    for (size_t j = 0; j < t.mu.size(); ++j)
        os << j << "," << t.mu[j].get_num().get_str() << "," << t.mu[j].get_den().get_str() << "\n";
    return os.str();
}

} // namespace padint

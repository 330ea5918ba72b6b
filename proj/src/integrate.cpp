#include "padint/integrate.hpp"

#include <exception>

#include <nlohmann/json.hpp>
#include <omp.h>

#include "padint/errors.hpp"
#include "padint/presburger.hpp"
#include "padint/residue.hpp"

namespace padint {

namespace {

std::vector<std::string> default_names(int n) {
    std::vector<std::string> v;
    for (int i = 1; i <= n; ++i) v.push_back("x" + std::to_string(i));
    return v;
}

ResPoly to_respoly(const UPoly &g) {
    ResPoly r;
    for (int i = 0; i <= g.degree(); ++i)
        if (g.coeff(i) != 0) r = r + ResPoly::constant(g.coeff(i)) * ResPoly::var(0).pow(i);
    return r;
}

mpz_class abs_num(const mpq_class &x) { return abs(x.get_num()) * x.get_den(); }

} // namespace

MotElem cell_contribution(const Cell &c) {
    if (c.null_set()) return MotElem();
    const Prepared &P1 = c.prepared.at(0);
    if (P1.vanishes) return MotElem();
    size_t n = c.ord_vars.size();
    std::vector<long> a = P1.ord_coeffs, b(n, 0);
    a.resize(n, 0);
    long a0 = P1.ord_const, b0 = 0;
    for (auto &l : c.levels) {
        if (l.zero) continue;
        --b0;
        for (size_t i = 0; i < n; ++i)
            if (c.ord_vars[i] == l.ord_name) b[i] = -1;
    }
    if (c.prepared.size() > 1) {
        const Prepared &P2 = c.prepared[1];
        if (P2.vanishes) return MotElem();
        for (size_t i = 0; i < n && i < P2.ord_coeffs.size(); ++i) b[i] -= P2.ord_coeffs[i];
        b0 -= P2.ord_const;
    }
    return sum_affine(c.theta, n, a, a0, b, b0, c.count);
}

bool ZetaResult::mass_balanced() const {
    MotElem total = (mass + unresolved_measure).simplify();
    if (!(total == MotElem::constant(1))) return false;
    for (long q : {3L, 5L, 7L})
        if (count_eval(total, q, 0) != 1) return false;
    return true;
}

std::string ZetaResult::to_json() const {
    using nlohmann::ordered_json;
    ordered_json j;
    j["p"] = p;
    j["vars"] = vars;
    j["motelem"] = ordered_json::parse(motelem.to_json());
    ordered_json cert;
    cert["exact"] = certificate.exact;
    cert["certified_below"] = certificate.certified_below ? ordered_json(*certificate.certified_below)
                                                          : ordered_json(nullptr);
    cert["t_order"] = certificate.t_order;
    cert["note"] = certificate.note;
    j["precision_certificate"] = cert;
    j["cell_count"] = cell_count;
    j["unresolved_measure"] = ordered_json::parse(unresolved_measure.to_json());
    if (!unresolved_reason.empty()) j["unresolved_reason"] = unresolved_reason;
    j["mass"] = ordered_json::parse(mass.to_json());
    return j.dump(2);
}

ZetaResult zeta(const MPoly &f1_in, const MPoly &f2_in, int n, long p, const ZetaOptions &opt) {
    ZetaResult r;
    r.p = p;
    r.vars = default_names(n);
    r.certificate.note = "exact: cell data and sums use integer arithmetic only";
    MPoly f1 = f1_in.with_nvars(n), f2 = f2_in.with_nvars(n);
    bool zero = f1.is_zero() || f2.is_zero();
    std::vector<MPoly> fs{zero ? MPoly::constant(n, 1) : f1};
    if (!zero && !(f2 == MPoly::constant(n, 1))) fs.push_back(f2);

    CellDecomposition d;
    try {
        d = decompose(fs, p, r.vars);
    } catch (const UnsupportedSplit &e) {
        r.unresolved_measure = MotElem::constant(1);
        r.unresolved_reason = e.what();
        return r;
    }
    r.cell_count = d.cells.size();

    std::vector<MotElem> parts(d.cells.size()), masses(d.cells.size());
    std::exception_ptr err;
    long N = static_cast<long>(d.cells.size());
    int threads = opt.threads > 0 ? opt.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (!opt.serial)
    for (long i = 0; i < N; ++i) {
        try {
            const Cell &c = d.cells[i];
            masses[i] = c.measure().simplify();
            if (!zero) parts[i] = cell_contribution(c).simplify();
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);

    MotElem z, m;
    for (long i = 0; i < N; ++i) {
        z += parts[i];
        m += masses[i];
    }
    r.motelem = z.simplify();
    r.mass = m.simplify();
    return r;
}

ZetaResult zeta(const MPoly &f1, int n, long p, const ZetaOptions &opt) {
    return zeta(f1, MPoly::constant(n, 1), n, p, opt);
}

ZetaResult zeta_series_integrand(const SeparatedSeries &f, long p, const ZetaOptions &opt) {
    if (f.n() != 0) throw UnsupportedTerm("series integrands with rho variables are not supported");
    if (f.is_zero()) throw ZeroSeries("cannot integrate the zero series");
    int m = f.m();
    if (f.is_unit()) {
        ZetaResult r;
        r.p = p;
        r.vars = default_names(m);
        r.motelem = MotElem::constant(1);
        r.mass = MotElem::constant(1);
        r.cell_count = 1;
        r.certificate.note = "unit integrand: |f| = 1 on the whole domain";
        return r;
    }
    WPreparation w;
    try {
        if (m == 1) {
            w = w_prepare(f, 0);
        } else {
            Preregularization pr = preregularize(f);
            w = w_prepare(pr.image, m - 1);
        }
    } catch (const NotRegular &e) {
        throw NotRegularAtTruncation(std::string(e.what()) + " (t-order " + std::to_string(f.Mt()) + ")");
    }
    MPoly P = w.P.to_mpoly();
    ZetaResult r = zeta(P, m, p, opt);
    r.certificate.exact = false;
    r.certificate.t_order = f.Mt();
    r.certificate.certified_below = f.Mt();
    r.certificate.note = "f = u P with |u| = 1; P is known modulo t^" + std::to_string(f.Mt()) +
                         ", so ord f = j is decided exactly for j < " + std::to_string(f.Mt());
    return r;
}

MotElem igusa_series(const std::vector<mpq_class> &mu) {
    MotElem s;
    for (size_t j = 0; j < mu.size(); ++j)
        if (mu[j] != 0) s += MotElem::monomial(mu[j], 0, static_cast<long>(j));
    return s;
}

bool SymbolicZeta::valid_at(long p) const { return bad_primes_product % p != 0; }

SymbolicZeta zeta_symbolic(const UPoly &f1, const UPoly &f2) {
    if (f1.is_zero() || f2.is_zero()) throw ZeroPolynomial("cannot integrate the zero polynomial");
    std::vector<UPoly> ins;
    if (f1.degree() > 0) ins.push_back(f1);
    if (f2.degree() > 0) ins.push_back(f2);
    std::vector<UPoly> basis;
    for (auto &g : coprime_basis(ins)) basis.push_back(g.primitive());

    // Exponent of each basis factor in f: divide repeatedly.
    auto split = [&](const UPoly &f, std::vector<int> &e) {
        UPoly rest = f;
        e.assign(basis.size(), 0);
        for (size_t i = 0; i < basis.size(); ++i) {
            for (;;) {
                UPoly q, rm;
                divmod(rest, basis[i], q, rm);
                if (!rm.is_zero()) break;
                rest = q;
                ++e[i];
            }
        }
        return rest.coeff(0); // constant left over
    };
    std::vector<int> e1, e2;
    mpq_class c1 = split(f1, e1), c2 = split(f2, e2);

    SymbolicZeta out;
    mpz_class bad = abs_num(c1) * abs_num(c2);
    for (size_t i = 0; i < basis.size(); ++i) {
        bad *= abs_num(basis[i].lead());
        if (basis[i].degree() > 1) bad *= abs_num(resultant(basis[i], basis[i].derivative()));
        for (size_t j = i + 1; j < basis.size(); ++j) bad *= abs_num(resultant(basis[i], basis[j]));
    }
    if (bad == 0) bad = 1;
    out.bad_primes_product = bad;
    mpz_class rest = bad;
    for (long q = 2; q < 1000000 && rest > 1; ++q) {
        if (rest % q != 0) continue;
        out.bad_primes.push_back(q);
        while (rest % q == 0) rest /= q;
    }
    out.factored = rest == 1;

    MotElem Linv = MotElem::L(-1);
    std::vector<ResAtom> nonroot;
    for (auto &g : basis) nonroot.push_back({to_respoly(g), false});
    MotElem z = MotElem::formula(ResidueFormula(1, nonroot)) * Linv;
    for (size_t i = 0; i < basis.size(); ++i) {
        MotElem roots = MotElem::formula(ResidueFormula(1, {{to_respoly(basis[i]), true}}));
        long a = e1[i], b = -1 - e2[i];
        z += roots * (MotElem::constant(1) - Linv) * MotElem::monomial(1, b, a) *
             MotElem::inv_one_minus(a, b);
    }
    out.motelem = z.simplify();
    return out;
}

} // namespace padint

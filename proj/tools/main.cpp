#include <algorithm>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "padint/annulus.hpp"
#include "padint/cells.hpp"
#include "padint/errors.hpp"
#include "padint/integrate.hpp"
#include "padint/oracle.hpp"
#include "padint/presburger.hpp"

using namespace padint;
using nlohmann::ordered_json;

namespace {

constexpr int kOk = 0, kUsage = 1, kCompute = 2, kMismatch = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<long> parse_longs(const std::string &s) {
    std::vector<long> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            v.push_back(std::stol(item, &used));
            if (item.find_first_not_of(' ', used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::logic_error &) {
            throw UsageError("not an integer list: " + s);
        }
    }
    if (v.empty()) throw UsageError("empty integer list");
    return v;
}

bool is_prime(long p) {
    if (p < 2) return false;
    for (long d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

void need_prime(long p) {
    if (!is_prime(p)) throw UsageError("--p must be a prime, got " + std::to_string(p));
}

// Polynomials over a shared, sorted variable list, padded to n and permuted.
struct Inputs {
    std::vector<std::string> names;
    std::vector<MPoly> polys;
};

Inputs read_polys(const std::vector<std::string> &srcs, int n, const std::string &order) {
    std::set<std::string> seen;
    for (auto &s : srcs)
        for (auto &v : parse_poly(s).names) seen.insert(v);
    std::vector<std::string> names(seen.begin(), seen.end());
    if (n < 0) n = std::max<int>(1, static_cast<int>(names.size()));
    if (static_cast<int>(names.size()) > n)
        throw UsageError("--vars " + std::to_string(n) + " is smaller than the number of variables used");
    for (int k = 1; static_cast<int>(names.size()) < n; ++k) {
        std::string c = "x" + std::to_string(k);
        if (!seen.count(c)) names.push_back(c);
    }
    Inputs in;
    for (auto &s : srcs) in.polys.push_back(parse_poly(s, names).poly.with_nvars(n));
    in.names = names;
    if (!order.empty()) {
        std::vector<long> perm = parse_longs(order);
        std::vector<int> p;
        std::vector<bool> hit(n, false);
        for (long x : perm) {
            if (x < 1 || x > n || hit[x - 1]) throw UsageError("--order must be a permutation of 1.." + std::to_string(n));
            hit[x - 1] = true;
            p.push_back(static_cast<int>(x));
        }
        if (static_cast<int>(p.size()) != n) throw UsageError("--order must list " + std::to_string(n) + " entries");
        for (auto &f : in.polys) f = f.permuted(p);
        std::vector<std::string> renamed(n);
        for (int i = 0; i < n; ++i) renamed[p[i] - 1] = names[i];
        in.names = renamed;
    }
    return in;
}

std::string q_str(const mpq_class &x) { return x.get_str(); }

int report_compare(const CompareReport &rep, bool json) {
    if (json) {
        ordered_json j;
        j["all_match"] = rep.all_match;
        j["first_mismatch"] = rep.first_mismatch ? ordered_json(*rep.first_mismatch) : ordered_json(nullptr);
        j["entries"] = ordered_json::array();
        for (auto &e : rep.entries)
            j["entries"].push_back({{"j", e.j}, {"oracle", q_str(e.expected)}, {"zeta", q_str(e.got)}, {"match", e.match}});
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << rep.str();
        if (!rep.str().empty() && rep.str().back() != '\n') std::cout << "\n";
    }
    return rep.all_match ? kOk : kMismatch;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Exact p-adic integrals of |f1|^s |f2| over Z_p^n"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);

    // zeta
    auto *zc = app.add_subcommand("zeta", "closed form of the integral");
    std::string f1, f2 = "1", order;
    int nvars = -1, jmax = 6;
    long p = 0;
    bool symbolic = false, equichar = false, json = false;
    zc->add_option("--f1", f1, "integrand raised to s")->required();
    zc->add_option("--f2", f2, "second integrand (default 1)");
    zc->add_option("--vars", nvars, "dimension n")->check(CLI::PositiveNumber);
    auto *zp = zc->add_option("--p", p, "prime");
    auto *zs = zc->add_flag("--symbolic-q", symbolic, "closed form for almost all primes (t-free univariate)");
    zp->excludes(zs);
    zc->add_flag("--equichar", equichar, "check against the F_p((t)) oracle");
    zc->add_option("--jmax", jmax, "coefficients checked by --equichar")->check(CLI::NonNegativeNumber);
    zc->add_option("--order", order, "variable permutation, e.g. 2,1");
    zc->add_flag("--json", json, "JSON output");

    // oracle
    auto *oc = app.add_subcommand("oracle", "branch-and-lift measures mu_j");
    std::string f;
    bool csv = false;
    oc->add_option("--f", f, "polynomial")->required();
    oc->add_option("--p", p, "prime")->required();
    oc->add_option("--jmax", jmax, "largest level")->required()->check(CLI::NonNegativeNumber);
    oc->add_flag("--equichar", equichar, "count over F_p[[t]]");
    oc->add_flag("--csv", csv, "lines j,numerator,denominator");
    oc->add_flag("--json", json, "JSON output");

    // compare
    auto *cc = app.add_subcommand("compare", "zeta against the oracle");
    cc->add_option("--f", f, "polynomial")->required();
    cc->add_option("--p", p, "prime")->required();
    cc->add_option("--jmax", jmax, "largest level")->required()->check(CLI::NonNegativeNumber);
    cc->add_option("--vars", nvars, "dimension n")->check(CLI::PositiveNumber);
    cc->add_option("--order", order, "variable permutation");
    cc->add_flag("--json", json, "JSON output");

    // cells
    auto *ce = app.add_subcommand("cells", "cell decomposition as JSON");
    ce->add_option("--f", f, "polynomial")->required();
    ce->add_option("--p", p, "prime")->required();
    ce->add_option("--vars", nvars, "dimension n")->check(CLI::PositiveNumber);
    ce->add_option("--order", order, "variable permutation");

    // annulus
    auto *an = app.add_subcommand("annulus", "thin / Laurent pieces and factorizations");
    std::string formula, factor;
    bool dec = false;
    an->add_option("--formula", formula, "annulus formula JSON")->required();
    an->add_option("--p", p, "prime")->required();
    auto *ad = an->add_flag("--decompose", dec, "thin and Laurent pieces (default)");
    an->add_option("--factor", factor, "univariate polynomial to factor on the pieces")->excludes(ad);

    // psum
    auto *ps = app.add_subcommand("psum", "sum of L^(b.z) T^(a.z) over a Presburger set");
    std::string set, acov, bcov;
    ps->add_option("--set", set, "Presburger set JSON")->required();
    ps->add_option("--a", acov, "T covector, comma separated")->required()->allow_extra_args(false);
    ps->add_option("--b", bcov, "L covector, comma separated")->required()->allow_extra_args(false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    ZetaOptions zopt;
    zopt.threads = threads;
    OracleOptions oopt;
    oopt.threads = threads;

    try {
        if (zc->parsed()) {
            if (!symbolic && !zp->count()) throw UsageError("zeta needs --p or --symbolic-q");
            if (symbolic) {
                if (equichar) throw UsageError("--equichar needs a fixed prime");
                Inputs in = read_polys({f1, f2}, nvars, order);
                if (in.names.size() != 1 || in.polys[0].t_degree() > 0 || in.polys[1].t_degree() > 0)
                    throw UnsupportedSplit("--symbolic-q supports univariate integrands without p or t");
                SymbolicZeta sz = zeta_symbolic(in.polys[0].to_upoly(1), in.polys[1].to_upoly(1));
                if (json) {
                    ordered_json j;
                    j["vars"] = in.names;
                    j["motelem"] = ordered_json::parse(sz.motelem.to_json());
                    j["bad_primes"] = sz.bad_primes;
                    j["bad_primes_complete"] = sz.factored;
                    j["bad_primes_product"] = sz.bad_primes_product.get_str();
                    std::cout << j.dump(2) << "\n";
                } else {
                    std::cout << sz.motelem.str() << "\n";
                    std::cout << "valid for primes not dividing " << sz.bad_primes_product.get_str() << "\n";
                }
                return kOk;
            }
            need_prime(p);
            Inputs in = read_polys({f1, f2}, nvars, order);
            int n = static_cast<int>(in.names.size());
            ZetaResult r = zeta(in.polys[0], in.polys[1], n, p, zopt);
            r.vars = in.names;
            int rc = kOk;
            std::optional<CompareReport> rep;
            if (equichar) {
                if (!(in.polys[1] == MPoly::constant(n, 1))) throw UsageError("--equichar needs f2 = 1");
                if (!r.complete()) throw UnsupportedSplit(r.unresolved_reason);
                rep = compare(r.motelem, mu_equichar_table(in.polys[0], p, jmax, oopt));
                rc = rep->all_match ? kOk : kMismatch;
            }
            if (json) {
                ordered_json j = ordered_json::parse(r.to_json());
                if (rep) j["equichar_match"] = rep->all_match;
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << r.motelem.str() << "\n";
                std::cout << "cells: " << r.cell_count << "\n";
                if (!r.complete()) std::cout << "unresolved measure: " << r.unresolved_measure.str() << " (" << r.unresolved_reason << ")\n";
                if (rep) std::cout << "equichar: " << (rep->all_match ? "match" : "mismatch") << "\n" << rep->str();
            }
            return rc;
        }
        if (oc->parsed()) {
            need_prime(p);
            Inputs in = read_polys({f}, nvars, "");
            MuTable t = equichar ? mu_equichar_table(in.polys[0], p, jmax, oopt) : mu_table(in.polys[0], p, jmax, oopt);
            if (csv) {
                std::cout << to_csv(t);
            } else if (json) {
                ordered_json j;
                j["p"] = p;
                j["vars"] = in.names;
                j["mu"] = ordered_json::array();
                for (auto &m : t.mu) j["mu"].push_back(q_str(m));
                j["tail"] = q_str(t.tail);
                std::cout << j.dump(2) << "\n";
            } else {
                for (size_t i = 0; i < t.mu.size(); ++i) std::cout << "mu_" << i << " = " << t.mu[i] << "\n";
                std::cout << "tail = " << t.tail << "\n";
            }
            return kOk;
        }
        if (cc->parsed()) {
            need_prime(p);
            Inputs in = read_polys({f}, nvars, order);
            ZetaResult r = zeta(in.polys[0], static_cast<int>(in.names.size()), p, zopt);
            if (!r.complete()) {
                std::cerr << "partial result: unresolved measure " << r.unresolved_measure.str() << " ("
                          << r.unresolved_reason << "); oracle values follow\n";
                std::cout << to_csv(mu_table(in.polys[0], p, jmax, oopt));
                return kCompute;
            }
            return report_compare(compare(r.motelem, mu_table(in.polys[0], p, jmax, oopt)), json);
        }
        if (ce->parsed()) {
            need_prime(p);
            Inputs in = read_polys({f}, nvars, order);
            std::cout << cells_to_json(decompose(in.polys, p, in.names)) << "\n";
            return kOk;
        }
        if (an->parsed()) {
            need_prime(p);
            AnnulusFormula phi = AnnulusFormula::from_json(formula, p);
            validate(phi);
            ordered_json out = ordered_json::array();
            if (factor.empty()) {
                for (auto &piece : decompose_thin_laurent(phi).pieces) out.push_back(ordered_json::parse(piece.to_json()));
            } else {
                ParsedPoly g = parse_poly(factor);
                if (g.names.size() > 1 || g.poly.t_degree() > 0) throw UsageError("--factor needs a univariate polynomial");
                UPoly u = g.names.empty() ? UPoly::constant(mpq_class(g.poly.eval(0, {}))) : g.poly.to_upoly(1);
                PAdicContext ctx(p);
                for (auto &fp : factor_on(u, phi, ctx)) {
                    ordered_json j;
                    j["piece"] = ordered_json::parse(fp.piece.to_json());
                    j["numerator"] = fp.numerator.str("x");
                    j["denominator"] = fp.denominator.str("x");
                    j["delta"] = q_str(fp.delta);
                    j["pointwise_only"] = fp.pointwise_only;
                    j["precision"] = fp.precision;
                    j["exceptional"] = fp.exceptional.str("x");
                    out.push_back(j);
                }
            }
            std::cout << out.dump(2) << "\n";
            return kOk;
        }
        if (ps->parsed()) {
            PresburgerSet S = PresburgerSet::from_json(set);
            std::vector<long> a = parse_longs(acov), b = parse_longs(bcov);
            if (a.size() != S.dim() || b.size() != S.dim())
                throw UsageError("--a and --b need " + std::to_string(S.dim()) + " entries");
            std::cout << sum_exponential(S, a, b).str() << "\n";
            return kOk;
        }
    } catch (const UsageError &e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const SyntaxError &e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    } catch (const nlohmann::json::exception &e) {
        std::cerr << "invalid JSON: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception &e) {
        std::cerr << e.what() << "\n";
        return kCompute;
    }
    return kUsage;
}

#include "padint/presburger.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include "json.hpp"

#include "padint/errors.hpp"
#include "padint/poly.hpp"

namespace padint {

// ---------------------------------------------------------------- constraints

long LinearConstraint::eval(const std::vector<long> &z) const {
    long s = constant;
    for (size_t i = 0; i < coeffs.size(); ++i) s += coeffs[i] * z[i];
    return s;
}

bool LinearConstraint::holds(const std::vector<long> &z) const {
    long v = eval(z);
    switch (kind) {
    case Ge: return v >= 0;
    case Eq: return v == 0;
    case Cong: return ((v % modulus) + modulus) % modulus == 0;
    }
    return false;
}

bool LinearConstraint::operator<(const LinearConstraint &o) const {
    return std::tie(kind, coeffs, constant, modulus) < std::tie(o.kind, o.coeffs, o.constant, o.modulus);
}

std::string LinearConstraint::str(const std::vector<std::string> &vars) const {
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < coeffs.size(); ++i) {
        long c = coeffs[i];
        if (!c) continue;
        os << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
        if (std::labs(c) != 1) os << std::labs(c) << "*";
        os << (i < vars.size() ? vars[i] : "z" + std::to_string(i));
        first = false;
    }
    if (first) {
        os << constant;
    } else if (constant) {
        os << (constant < 0 ? " - " : " + ") << std::labs(constant);
    }
    switch (kind) {
    case Ge: os << " >= 0"; break;
    case Eq: os << " = 0"; break;
    case Cong: os << " = 0 mod " << modulus; break;
    }
    return os.str();
}

bool PresburgerSet::contains(const std::vector<long> &z) const {
    for (auto &c : clauses) {
        bool ok = true;
        for (auto &a : c)
            if (!a.holds(z)) {
                ok = false;
                break;
            }
        if (ok) return true;
    }
    return false;
}

PresburgerSet PresburgerSet::intersect(const PresburgerSet &o) const {
    PresburgerSet r;
    r.vars = vars;
    for (auto &a : clauses)
        for (auto &b : o.clauses) {
            Conjunction c = a;
            c.insert(c.end(), b.begin(), b.end());
            r.clauses.push_back(c);
        }
    return r;
}

namespace {

// Disjoint pieces whose union is the complement of one atom.
std::vector<LinearConstraint> negate_atom(const LinearConstraint &a) {
    std::vector<long> neg = a.coeffs;
    for (auto &x : neg) x = -x;
    switch (a.kind) {
    case LinearConstraint::Ge: return {LinearConstraint::ge(neg, -a.constant - 1)};
    case LinearConstraint::Eq:
        return {LinearConstraint::ge(a.coeffs, a.constant - 1), LinearConstraint::ge(neg, -a.constant - 1)};
    case LinearConstraint::Cong: {
        std::vector<LinearConstraint> r;
        for (long s = 1; s < a.modulus; ++s) r.push_back(LinearConstraint::cong(a.coeffs, a.constant - s, a.modulus));
        return r;
    }
    }
    return {};
}

// Disjoint pieces whose union is the complement of a conjunction.
std::vector<Conjunction> negate_conj(const Conjunction &c) {
    std::vector<Conjunction> out;
    Conjunction prefix;
    for (auto &a : c) {
        for (auto &n : negate_atom(a)) {
            Conjunction piece = prefix;
            piece.push_back(n);
            out.push_back(piece);
        }
        prefix.push_back(a);
    }
    return out;
}

} // namespace

PresburgerSet PresburgerSet::disjoint() const {
    PresburgerSet r;
    r.vars = vars;
    std::vector<Conjunction> outside{Conjunction{}}; // complement of clauses seen so far
    for (auto &c : clauses) {
        for (auto &o : outside) {
            Conjunction piece = o;
            piece.insert(piece.end(), c.begin(), c.end());
            if (!is_empty(piece, vars.size())) r.clauses.push_back(piece);
        }
        std::vector<Conjunction> next;
        for (auto &o : outside)
            for (auto &n : negate_conj(c)) {
                Conjunction piece = o;
                piece.insert(piece.end(), n.begin(), n.end());
                if (!is_empty(piece, vars.size())) next.push_back(piece);
            }
        outside = next;
    }
    return r;
}

std::string PresburgerSet::str() const {
    if (clauses.empty()) return "false";
    std::ostringstream os;
    for (size_t i = 0; i < clauses.size(); ++i) {
        if (i) os << " or ";
        os << "(";
        if (clauses[i].empty()) os << "true";
        for (size_t j = 0; j < clauses[i].size(); ++j) os << (j ? " and " : "") << clauses[i][j].str(vars);
        os << ")";
    }
    return os.str();
}

std::string PresburgerSet::to_json() const {
    nlohmann::json j;
    j["vars"] = vars;
    j["clauses"] = nlohmann::json::array();
    for (auto &c : clauses) {
        nlohmann::json cj = nlohmann::json::array();
        for (auto &a : c) {
            nlohmann::json aj;
            switch (a.kind) {
            case LinearConstraint::Ge: aj["ge"] = {a.coeffs, a.constant}; break;
            case LinearConstraint::Eq: aj["eq"] = {a.coeffs, a.constant}; break;
            case LinearConstraint::Cong: aj["cong"] = {a.coeffs, a.constant, a.modulus}; break;
            }
            cj.push_back(aj);
        }
        j["clauses"].push_back(cj);
    }
    return j.dump();
}

PresburgerSet PresburgerSet::from_json(const std::string &src) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(src);
    } catch (const std::exception &e) {
        throw SyntaxError(std::string("invalid set JSON: ") + e.what());
    }
    PresburgerSet S;
    try {
        S.vars = j.at("vars").get<std::vector<std::string>>();
        for (auto &cj : j.at("clauses")) {
            Conjunction c;
            for (auto &aj : cj) {
                LinearConstraint a;
                const nlohmann::json *body = nullptr;
                if (aj.contains("ge")) {
                    a.kind = LinearConstraint::Ge;
                    body = &aj["ge"];
                } else if (aj.contains("eq")) {
                    a.kind = LinearConstraint::Eq;
                    body = &aj["eq"];
                } else if (aj.contains("cong")) {
                    a.kind = LinearConstraint::Cong;
                    body = &aj["cong"];
                } else {
                    throw SyntaxError("constraint needs one of ge, eq, cong");
                }
                a.coeffs = body->at(0).get<std::vector<long>>();
                a.constant = body->at(1).get<long>();
                if (a.kind == LinearConstraint::Cong) {
                    a.modulus = body->at(2).get<long>();
                    if (a.modulus <= 0) throw SyntaxError("congruence modulus must be positive");
                }
                if (a.coeffs.size() != S.vars.size()) throw SyntaxError("coefficient count differs from variable count");
                c.push_back(a);
            }
            S.clauses.push_back(c);
        }
    } catch (const nlohmann::json::exception &e) {
        throw SyntaxError(std::string("malformed set JSON: ") + e.what());
    }
    return S;
}

// ---------------------------------------------------------------- elimination engine

namespace {

using Q = mpq_class;
using Z = mpz_class;

struct ICon {
    LinearConstraint::Kind kind;
    std::vector<Z> a;
    Z c;
    Z n;
};

struct Aff {
    std::vector<Q> a;
    Q c;
};

using VPoly = std::map<std::vector<int>, Q>;

struct STerm {
    VPoly poly;
    Aff eL, eT;
    std::map<DenFactor, int> den;
};

Z lcm_den(const Aff &f) {
    Z l = 1;
    for (auto &x : f.a) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den().get_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), f.c.get_den().get_mpz_t());
    return l;
}

bool is_int(const Q &x) { return x.get_den() == 1; }

Q frac(const Z &n, const Z &d) {
    Q r(n, d);
    r.canonicalize();
    return r;
}

Z fdiv(const Z &a, const Z &b) {
    Z q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

Z fmod(const Z &a, const Z &b) {
    Z r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

// Integer constraint from a rational affine form (form >= 0, = 0, or
// == 0 mod n), valid when the form is integer-valued.
ICon icon_from(const Aff &f, LinearConstraint::Kind k, const Z &n = 0) {
    Z l = lcm_den(f);
    ICon r;
    r.kind = k;
    for (auto &x : f.a) r.a.push_back(Z(x * l));
    r.c = Z(f.c * l);
    r.n = k == LinearConstraint::Cong ? Z(n * l) : Z(0);
    return r;
}

Aff aff_sub(const Aff &x, const Aff &y) {
    Aff r = x;
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
    r.c -= y.c;
    return r;
}

VPoly vmul(const VPoly &x, const VPoly &y) {
    VPoly r;
    for (auto &[e1, c1] : x)
        for (auto &[e2, c2] : y) {
            std::vector<int> e = e1;
            for (size_t i = 0; i < e.size(); ++i) e[i] += e2[i];
            Q &t = r[e];
            t += c1 * c2;
            if (t == 0) r.erase(e);
        }
    return r;
}

void vadd(VPoly &x, const VPoly &y, const Q &s = 1) {
    for (auto &[e, c] : y) {
        Q &t = x[e];
        t += c * s;
        if (t == 0) x.erase(e);
    }
}

VPoly vconst(size_t m, const Q &c) {
    VPoly r;
    if (c != 0) r[std::vector<int>(m, 0)] = c;
    return r;
}

VPoly vaff(const Aff &f) {
    size_t m = f.a.size();
    VPoly r = vconst(m, f.c);
    for (size_t i = 0; i < m; ++i) {
        if (f.a[i] == 0) continue;
        std::vector<int> e(m, 0);
        e[i] = 1;
        r[e] = f.a[i];
    }
    return r;
}

VPoly vpow(const VPoly &x, int k, size_t m) {
    VPoly r = vconst(m, 1);
    for (int i = 0; i < k; ++i) r = vmul(r, x);
    return r;
}

Q binom(int n, int k) {
    Z r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return Q(r);
}

// Numerators of A_i and B_{i,l} over (1 - X)^(i+1), where
// sum_{j<N} j^i X^j = A_i(X) - X^N sum_l N^l B_{i,l}(X).
struct GeomTables {
    std::vector<UPoly> A;
    std::vector<std::vector<UPoly>> B;

    void extend(int k) {
        if (A.empty()) {
            A.push_back(UPoly::constant(1));
            B.push_back({UPoly::constant(1)});
        }
        UPoly one_minus({Q(1), Q(-1)});
        UPoly X({Q(0), Q(1)});
        while (static_cast<int>(A.size()) <= k) {
            int r = static_cast<int>(A.size()); // previous power r = i
            auto D = [&](const UPoly &P) { return (X * P.derivative() * one_minus) + (X * P * Q(r)); };
            A.push_back(D(A.back()));
            const auto &pb = B.back();
            std::vector<UPoly> nb(pb.size() + 1);
            for (size_t l = 0; l < pb.size(); ++l) nb[l] = nb[l] + D(pb[l]);
            for (size_t l = 0; l < pb.size(); ++l) nb[l + 1] = nb[l + 1] + pb[l] * one_minus;
            B.push_back(nb);
        }
    }
};

UPoly faulhaber(int i) {
    // sum_{j<N} j^i as a polynomial in N, by interpolation at N = 0..i+1
    int D = i + 1;
    std::vector<Q> xs, ys;
    Q acc = 0;
    for (int N = 0; N <= D; ++N) {
        xs.emplace_back(N);
        ys.push_back(acc);
        Q t = 1;
        for (int k = 0; k < i; ++k) t *= N;
        if (i == 0) t = 1;
        acc += t;
    }
    std::vector<Q> c = ys;
    for (int j = 1; j <= D; ++j)
        for (int k = D; k >= j; --k) c[k] = (c[k] - c[k - 1]) / (xs[k] - xs[k - j]);
    UPoly r = UPoly::constant(c[D]);
    for (int k = D - 1; k >= 0; --k) r = r * UPoly({-xs[k], Q(1)}) + UPoly::constant(c[k]);
    return r;
}

class Engine {
public:
    bool exist_only = false;
    bool found = false;
    std::vector<std::string> names;
    MotElem acc;
    GeomTables tables;

    void run(size_t m, std::vector<ICon> cons, std::vector<STerm> terms) {
        if (exist_only && found) return;
        if (!simplify(m, cons)) return;
        if (m == 0) {
            found = true;
            if (exist_only) return;
            for (auto &t : terms) emit(t);
            return;
        }
        size_t z = m - 1;
        // congruences on z
        Z N = 1;
        for (auto &c : cons) {
            if (c.kind != LinearConstraint::Cong) continue;
            Z az = fmod(c.a[z], c.n);
            if (az == 0) continue;
            Z g;
            mpz_gcd(g.get_mpz_t(), az.get_mpz_t(), c.n.get_mpz_t());
            Z need = c.n / g;
            mpz_lcm(N.get_mpz_t(), N.get_mpz_t(), need.get_mpz_t());
        }
        if (N > 1) {
            for (Z rho = 0; rho < N; ++rho) {
                Aff F{std::vector<Q>(m, 0), Q(rho)};
                F.a[z] = Q(N);
                auto nc = cons;
                auto nt = terms;
                subst(m, z, F, false, nc, nt);
                run(m, nc, nt);
            }
            return;
        }
        // equalities on z
        for (size_t i = 0; i < cons.size(); ++i) {
            if (cons[i].kind != LinearConstraint::Eq || cons[i].a[z] == 0) continue;
            ICon e = cons[i];
            Z cz = e.a[z];
            Aff F{std::vector<Q>(m, 0), frac(-e.c, cz)};
            for (size_t j = 0; j < z; ++j) F.a[j] = frac(-e.a[j], cz);
            std::vector<ICon> nc;
            for (size_t j = 0; j < cons.size(); ++j)
                if (j != i) nc.push_back(cons[j]);
            Z acz = abs(cz);
            if (acz > 1) {
                ICon g;
                g.kind = LinearConstraint::Cong;
                g.a = e.a;
                g.a[z] = 0;
                g.c = e.c;
                g.n = acz;
                nc.push_back(g);
            }
            auto nt = terms;
            subst(m, z, F, true, nc, nt);
            run(m - 1, nc, nt);
            return;
        }
        // inequalities on z
        std::vector<ICon> rest, lo, hi;
        for (auto &c : cons) {
            if (c.a[z] == 0)
                rest.push_back(c);
            else if (c.a[z] > 0)
                lo.push_back(c);
            else
                hi.push_back(c);
        }
        if (lo.empty() && !hi.empty()) {
            Aff F{std::vector<Q>(m, 0), Q(0)};
            F.a[z] = -1;
            auto nc = cons;
            auto nt = terms;
            subst(m, z, F, false, nc, nt);
            run(m, nc, nt);
            return;
        }
        if (lo.empty() && hi.empty()) {
            if (!exist_only) {
                for (auto &t : terms)
                    if (t.eL.a[z] != 0 || t.eT.a[z] != 0 || depends(t.poly, z))
                        throw Divergent("set is unbounded in both directions along " + name(z));
                throw Divergent("set is unbounded in both directions along " + name(z));
            }
            drop_var(m, rest, terms);
            run(m - 1, rest, terms);
            return;
        }
        // Bounds as rational affine forms after residue splitting.
        struct Bound {
            Z A;
            std::vector<Z> e; // over z' (size z)
            Z c;
            bool lower;
        };
        std::vector<Bound> bounds;
        for (auto &c : lo) bounds.push_back({c.a[z], {c.a.begin(), c.a.begin() + z}, c.c, true});
        for (auto &c : hi) bounds.push_back({-c.a[z], {c.a.begin(), c.a.begin() + z}, c.c, false});
        split_bounds(m, rest, terms, bounds, 0, {}, {}, {});
    }

private:
    std::string name(size_t i) const { return i < names.size() ? names[i] : "z" + std::to_string(i); }

    static bool depends(const VPoly &p, size_t z) {
        for (auto &[e, c] : p)
            if (e[z]) return true;
        return false;
    }

    bool simplify(size_t m, std::vector<ICon> &cons) {
        std::vector<ICon> out;
        for (auto &c : cons) {
            if (c.kind == LinearConstraint::Cong) {
                for (auto &x : c.a) x = fmod(x, c.n);
                c.c = fmod(c.c, c.n);
                if (c.n == 1) continue;
            }
            Z g = 0;
            for (size_t i = 0; i < m; ++i) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.a[i].get_mpz_t());
            if (g == 0) {
                bool ok = c.kind == LinearConstraint::Ge ? c.c >= 0
                          : c.kind == LinearConstraint::Eq ? c.c == 0
                                                           : fmod(c.c, c.n) == 0;
                if (!ok) return false;
                continue;
            }
            if (c.kind == LinearConstraint::Ge && g > 1) {
                for (auto &x : c.a) x /= g;
                c.c = fdiv(c.c, g);
            } else if (c.kind == LinearConstraint::Eq && g > 1) {
                if (fmod(c.c, g) != 0) return false;
                for (auto &x : c.a) x /= g;
                c.c /= g;
            }
            out.push_back(c);
        }
        cons = out;
        return true;
    }

    void emit(const STerm &t) {
        if (!is_int(t.eL.c) || !is_int(t.eT.c)) throw std::logic_error("non-integral exponent after summation");
        Q c = 0;
        auto it = t.poly.find({});
        if (it != t.poly.end()) c = it->second;
        if (c == 0) return;
        MonoKey k;
        k.eL = t.eL.c.get_num().get_si();
        k.eT = t.eT.c.get_num().get_si();
        for (auto &[f, mult] : t.den)
            if (mult) k.den.push_back({f, mult});
        acc.add_term(k, c);
    }

    // Substitute variable z by F (over m vars). If drop, F must not involve z
    // and z is removed afterwards.
    void subst(size_t m, size_t z, const Aff &F, bool drop, std::vector<ICon> &cons, std::vector<STerm> &terms) {
        for (auto &c : cons) {
            Aff f{std::vector<Q>(m), Q(c.c)};
            for (size_t i = 0; i < m; ++i) f.a[i] = Q(c.a[i]);
            Q az = f.a[z];
            f.a[z] = 0;
            for (size_t i = 0; i < m; ++i) f.a[i] += az * F.a[i];
            f.c += az * F.c;
            Z n = c.n;
            c = icon_from(f, c.kind, n);
            if (drop) c.a.pop_back();
        }
        VPoly Fp = vaff(F);
        for (auto &t : terms) {
            VPoly np;
            std::map<int, VPoly> byk;
            for (auto &[e, c] : t.poly) {
                std::vector<int> f = e;
                int k = f[z];
                f[z] = 0;
                byk[k][f] += c;
            }
            for (auto &[k, rest] : byk) vadd(np, vmul(rest, vpow(Fp, k, m)));
            t.poly = np;
            for (Aff *ex : {&t.eL, &t.eT}) {
                Q w = ex->a[z];
                ex->a[z] = 0;
                for (size_t i = 0; i < m; ++i) ex->a[i] += w * F.a[i];
                ex->c += w * F.c;
            }
        }
        if (drop) drop_var(m, cons, terms, false);
    }

    void drop_var(size_t m, std::vector<ICon> &cons, std::vector<STerm> &terms, bool do_cons = true) {
        size_t z = m - 1;
        if (do_cons)
            for (auto &c : cons) c.a.pop_back();
        for (auto &t : terms) {
            VPoly np;
            for (auto &[e, c] : t.poly) {
                std::vector<int> f(e.begin(), e.begin() + z);
                np[f] += c;
            }
            t.poly = np;
            t.eL.a.pop_back();
            t.eT.a.pop_back();
        }
    }

    // Enumerate residues of bound numerators, then pick extreme bounds.
    template <class BoundT>
    void split_bounds(size_t m, const std::vector<ICon> &rest, const std::vector<STerm> &terms,
                      const std::vector<BoundT> &bounds, size_t idx, std::vector<ICon> extra, std::vector<Aff> lows,
                      std::vector<Aff> highs) {
        size_t z = m - 1;
        if (idx == bounds.size()) {
            choose_extremes(m, rest, terms, extra, lows, highs);
            return;
        }
        const BoundT &b = bounds[idx];
        for (Z sigma = 0; sigma < b.A; ++sigma) {
            auto ex = extra;
            if (b.A > 1) {
                ICon g;
                g.kind = LinearConstraint::Cong;
                g.a = b.e;
                g.a.push_back(0);
                g.c = b.c - sigma;
                g.n = b.A;
                ex.push_back(g);
            }
            Aff f{std::vector<Q>(z), Q(0)};
            if (b.lower) {
                // z >= (-e + sigma) / A
                for (size_t i = 0; i < z; ++i) f.a[i] = frac(-b.e[i], b.A);
                f.c = frac(-b.c + sigma, b.A);
                auto l2 = lows;
                l2.push_back(f);
                split_bounds(m, rest, terms, bounds, idx + 1, ex, l2, highs);
            } else {
                // z <= (e - sigma) / A
                for (size_t i = 0; i < z; ++i) f.a[i] = frac(b.e[i], b.A);
                f.c = frac(b.c - sigma, b.A);
                auto h2 = highs;
                h2.push_back(f);
                split_bounds(m, rest, terms, bounds, idx + 1, ex, lows, h2);
            }
            if (exist_only && found) return;
        }
    }

    static ICon pad(ICon c) {
        c.a.push_back(0);
        return c;
    }

    void choose_extremes(size_t m, const std::vector<ICon> &rest, const std::vector<STerm> &terms,
                         const std::vector<ICon> &extra, const std::vector<Aff> &lows, const std::vector<Aff> &highs) {
        size_t nl = std::max<size_t>(lows.size(), 1), nh = std::max<size_t>(highs.size(), 1);
        for (size_t i = 0; i < nl; ++i)
            for (size_t j = 0; j < nh; ++j) {
                std::vector<ICon> cons = rest;
                cons.insert(cons.end(), extra.begin(), extra.end());
                std::optional<Aff> L, U;
                if (!lows.empty()) {
                    L = lows[i];
                    for (size_t k = 0; k < lows.size(); ++k) {
                        if (k == i) continue;
                        Aff d = aff_sub(lows[i], lows[k]);
                        if (k < i) d.c -= 1;
                        cons.push_back(pad(icon_from(d, LinearConstraint::Ge)));
                    }
                }
                if (!highs.empty()) {
                    U = highs[j];
                    for (size_t k = 0; k < highs.size(); ++k) {
                        if (k == j) continue;
                        Aff d = aff_sub(highs[k], highs[j]);
                        if (k < j) d.c -= 1;
                        cons.push_back(pad(icon_from(d, LinearConstraint::Ge)));
                    }
                }
                if (L && U) cons.push_back(pad(icon_from(aff_sub(*U, *L), LinearConstraint::Ge)));
                // z no longer appears in cons (all bound constraints were removed)
                std::vector<STerm> nt;
                if (!exist_only) {
                    nt = sum_over(m, terms, *L, U, cons);
                } else {
                    nt = terms;
                }
                auto nc = cons;
                drop_var(m, nc, nt);
                run(m - 1, nc, nt);
                if (exist_only && found) return;
            }
    }

    // Sum the terms over z from L to U (U absent: to infinity). May add an
    // equality constraint when z-weights force a single point.
    std::vector<STerm> sum_over(size_t m, const std::vector<STerm> &terms, const Aff &L0, const std::optional<Aff> &U0,
                                std::vector<ICon> &cons) {
        size_t z = m - 1;
        // extend bound forms to m vars (z coefficient 0)
        Aff L = L0;
        L.a.push_back(0);
        std::optional<Aff> U;
        if (U0) {
            U = *U0;
            U->a.push_back(0);
        }
        bool fractional = false;
        for (auto &t : terms)
            if (!is_int(t.eL.a[z]) || !is_int(t.eT.a[z])) fractional = true;
        if (fractional) {
            if (!U) throw Divergent("fractional weight on unbounded variable " + name(z));
            cons.push_back(pad(icon_from(aff_sub(*U, L), LinearConstraint::Eq)));
            // keep cons in m-variable layout
            cons.back().a.resize(m, 0);
            std::vector<STerm> out = terms;
            std::vector<ICon> dummy;
            Aff F = L;
            subst_keep(m, z, F, out);
            return out;
        }
        std::vector<STerm> out;
        VPoly Lp = vaff(L);
        VPoly Np;
        if (U) {
            Np = vaff(aff_sub(*U, L));
            vadd(Np, vconst(m, 1));
        }
        for (auto &t : terms) {
            long wL = t.eL.a[z].get_num().get_si();
            long wT = t.eT.a[z].get_num().get_si();
            // split polynomial by power of z
            std::map<int, VPoly> byk;
            for (auto &[e, c] : t.poly) {
                std::vector<int> f = e;
                int k = f[z];
                f[z] = 0;
                byk[k][f] += c;
            }
            STerm base = t;
            base.eL.a[z] = 0;
            base.eT.a[z] = 0;
            // X^L factor
            for (size_t i = 0; i < m; ++i) {
                base.eL.a[i] += Q(wL) * L.a[i];
                base.eT.a[i] += Q(wT) * L.a[i];
            }
            base.eL.c += Q(wL) * L.c;
            base.eT.c += Q(wT) * L.c;
            for (auto &[k, coefp] : byk) {
                for (int i = 0; i <= k; ++i) {
                    VPoly pre = vmul(coefp, vpow(Lp, k - i, m));
                    for (auto &[e, c] : pre) c *= binom(k, i);
                    if (wL == 0 && wT == 0) {
                        if (!U) throw Divergent("infinite sum of constant weight along " + name(z));
                        UPoly F = faulhaber(i);
                        VPoly s;
                        for (int d = 0; d <= F.degree(); ++d) {
                            if (F.coeff(d) == 0) continue;
                            VPoly nd = vpow(Np, d, m);
                            vadd(s, nd, F.coeff(d));
                        }
                        STerm nt = base;
                        nt.poly = vmul(pre, s);
                        if (!nt.poly.empty()) out.push_back(nt);
                        continue;
                    }
                    if (!U && !(wT > 0 || (wT == 0 && wL < 0)))
                        throw Divergent("sum does not converge along increasing " + name(z));
                    tables.extend(i);
                    // A_i part
                    push_rational(out, base, pre, tables.A[i], i + 1, wL, wT, nullptr);
                    if (U) {
                        // - X^N sum_l N^l B_{i,l}
                        STerm shifted = base;
                        Aff Naff = aff_sub(*U, L);
                        Naff.c += 1;
                        for (size_t v = 0; v < m; ++v) {
                            shifted.eL.a[v] += Q(wL) * Naff.a[v];
                            shifted.eT.a[v] += Q(wT) * Naff.a[v];
                        }
                        shifted.eL.c += Q(wL) * Naff.c;
                        shifted.eT.c += Q(wT) * Naff.c;
                        for (size_t l = 0; l < tables.B[i].size(); ++l) {
                            VPoly pl = vmul(pre, vpow(Np, static_cast<int>(l), m));
                            for (auto &[e, c] : pl) c = -c;
                            push_rational(out, shifted, pl, tables.B[i][l], i + 1, wL, wT, nullptr);
                        }
                    }
                }
            }
        }
        return out;
    }

    void subst_keep(size_t m, size_t z, const Aff &F, std::vector<STerm> &terms) {
        std::vector<ICon> none;
        subst(m, z, F, false, none, terms);
    }

    // Append base * poly * P(X) / (1 - X)^r with X = L^wL T^wT.
    void push_rational(std::vector<STerm> &out, const STerm &base, const VPoly &poly, const UPoly &P, int r, long wL,
                       long wT, void *) {
        bool flip = wT < 0 || (wT == 0 && wL > 0);
        for (int j = 0; j <= P.degree(); ++j) {
            if (P.coeff(j) == 0) continue;
            STerm nt = base;
            nt.poly = poly;
            Q sc = P.coeff(j);
            long eLs = wL * j, eTs = wT * j;
            DenFactor f{wT, wL};
            if (flip) {
                if (r % 2) sc = -sc;
                eLs -= static_cast<long>(r) * wL;
                eTs -= static_cast<long>(r) * wT;
                f = {-wT, -wL};
            }
            for (auto &[e, c] : nt.poly) c *= sc;
            nt.eL.c += eLs;
            nt.eT.c += eTs;
            nt.den[f] += r;
            if (!nt.poly.empty()) out.push_back(nt);
        }
    }
};

std::vector<ICon> to_icons(const Conjunction &C) {
    std::vector<ICon> out;
    for (auto &a : C) {
        ICon c;
        c.kind = a.kind;
        for (long x : a.coeffs) c.a.emplace_back(x);
        c.c = a.constant;
        c.n = a.modulus;
        out.push_back(c);
    }
    return out;
}

} // namespace

bool is_empty(const Conjunction &C, size_t nvars) {
    Engine e;
    e.exist_only = true;
    e.run(nvars, to_icons(C), {});
    return !e.found;
}

bool is_empty(const PresburgerSet &S) {
    for (auto &c : S.clauses)
        if (!is_empty(c, S.dim())) return false;
    return true;
}

PresburgerSet normalize(const PresburgerSet &S) {
    PresburgerSet r;
    r.vars = S.vars;
    for (auto c : S.clauses) {
        Conjunction out;
        bool dead = false;
        for (auto a : c) {
            long g = 0;
            for (long x : a.coeffs) g = std::gcd(g, std::labs(x));
            if (a.kind == LinearConstraint::Cong) {
                for (auto &x : a.coeffs) x = ((x % a.modulus) + a.modulus) % a.modulus;
                a.constant = ((a.constant % a.modulus) + a.modulus) % a.modulus;
                g = 0;
                for (long x : a.coeffs) g = std::gcd(g, x);
                if (a.modulus == 1) continue;
            }
            if (g == 0) {
                if (!a.holds(std::vector<long>(a.coeffs.size(), 0))) dead = true;
                continue;
            }
            if (a.kind == LinearConstraint::Ge && g > 1) {
                for (auto &x : a.coeffs) x /= g;
                a.constant = fdiv(Z(a.constant), Z(g)).get_si();
            }
            if (a.kind == LinearConstraint::Eq && g > 1) {
                if (a.constant % g) {
                    dead = true;
                    continue;
                }
                for (auto &x : a.coeffs) x /= g;
                a.constant /= g;
            }
            out.push_back(a);
        }
        if (dead) continue;
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        if (is_empty(out, S.dim())) continue;
        if (std::find(r.clauses.begin(), r.clauses.end(), out) == r.clauses.end()) r.clauses.push_back(out);
    }
    return r;
}

std::vector<std::vector<long>> enumerate(const PresburgerSet &S, long lo, long hi) {
    std::vector<std::vector<long>> out;
    size_t m = S.dim();
    std::vector<long> z(m, lo);
    if (m == 0) {
        if (S.contains(z)) out.push_back(z);
        return out;
    }
    while (true) {
        if (S.contains(z)) out.push_back(z);
        size_t i = m;
        while (i > 0) {
            --i;
            if (z[i] < hi) {
                ++z[i];
                for (size_t j = i + 1; j < m; ++j) z[j] = lo;
                break;
            }
            if (i == 0) return out;
        }
    }
}

MotElem sum_affine(const Conjunction &C, size_t nvars, const std::vector<long> &a, long a0,
                   const std::vector<long> &b, long b0, const MotElem &coef) {
    Engine e;
    STerm t;
    t.poly = vconst(nvars, 1);
    t.eL = Aff{std::vector<Q>(nvars), Q(b0)};
    t.eT = Aff{std::vector<Q>(nvars), Q(a0)};
    for (size_t i = 0; i < nvars; ++i) {
        t.eL.a[i] = Q(b.at(i));
        t.eT.a[i] = Q(a.at(i));
    }
    e.run(nvars, to_icons(C), {t});
    return e.acc * coef;
}

MotElem sum_exponential(const PresburgerSet &S, const std::vector<long> &a, const std::vector<long> &b) {
    if (a.size() != S.dim() || b.size() != S.dim()) throw std::invalid_argument("covector length differs from dimension");
    MotElem total;
    PresburgerSet D = S.disjoint();
    for (auto &c : D.clauses) total += sum_affine(c, S.dim(), a, 0, b, 0, MotElem::constant(1));
    return total.simplify();
}

} // namespace padint

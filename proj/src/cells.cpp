#include "padint/cells.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "padint/errors.hpp"

namespace padint {

namespace {

long modp(const mpz_class &a, long p) {
    mpz_class r = a % p;
    if (r < 0) r += p;
    return r.get_si();
}

long inv_modp(long a, long p) {
    mpz_class r, A = a, P = p;
    mpz_invert(r.get_mpz_t(), A.get_mpz_t(), P.get_mpz_t());
    return r.get_si();
}

// Unit part of a nonzero rational, reduced mod p.
long ac_rational(const mpq_class &c, long p) {
    mpz_class n = c.get_num(), d = c.get_den();
    while (n % p == 0) n /= p;
    while (d % p == 0) d /= p;
    return modp(n, p) * inv_modp(modp(d, p), p) % p;
}

ResPoly rp_mod(const ResPoly &f, long p) {
    ResPoly out;
    for (auto &[e, c] : f.terms()) {
        long v = modp(c.get_num(), p) * inv_modp(modp(c.get_den(), p), p) % p;
        if (v) out.add_term(e, v);
    }
    return out;
}

ResPoly rp_univ(const std::vector<long> &coeffs, int var) {
    ResPoly out;
    ResPoly x = ResPoly::var(var);
    ResPoly pw = ResPoly::constant(1);
    for (long c : coeffs) {
        if (c) out = out + pw * ResPoly::constant(c);
        pw = pw * x;
    }
    return out;
}

long eval_modp(const std::vector<long> &c, long x, long p) {
    long r = 0;
    for (size_t i = c.size(); i-- > 0;) r = (r * x + c[i]) % p;
    return r;
}

std::vector<long> deriv(const std::vector<long> &c, long p) {
    std::vector<long> d;
    for (size_t i = 1; i < c.size(); ++i) d.push_back(static_cast<long>(i) * c[i] % p);
    return d;
}

ExprP parse_center(const std::string &src, const std::map<std::string, Sort> &decls = {}) {
    ExprP t = parse_term(src, decls);
    if (t->sort != Sort::val()) throw SortError("center " + src + " is not a Val term");
    return t;
}

std::string rat_str(const mpq_class &q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

LinearConstraint ge(const std::vector<long> &a, long c) { return LinearConstraint::ge(a, c); }

// Affine expression over the ord coordinates of a cell.
struct Aff {
    std::vector<long> a;
    long c = 0;
    Aff operator+(const Aff &o) const {
        Aff r = *this;
        for (size_t i = 0; i < r.a.size(); ++i) r.a[i] += o.a[i];
        r.c += o.c;
        return r;
    }
    Aff operator-(const Aff &o) const { return *this + o * -1; }
    Aff operator*(long k) const {
        Aff r = *this;
        for (auto &x : r.a) x *= k;
        r.c *= k;
        return r;
    }
    bool constant() const {
        return std::all_of(a.begin(), a.end(), [](long x) { return x == 0; });
    }
};

Aff unit_aff(size_t n, size_t i) {
    Aff r{std::vector<long>(n, 0), 0};
    r.a[i] = 1;
    return r;
}

Prepared make_prepared(const Aff &o, const ResPoly &ac, long p, const std::vector<bool> &is_level) {
    Prepared P;
    P.ord_coeffs = o.a;
    P.ord_const = o.c;
    P.ac = rp_mod(ac, p);
    for (size_t i = 0; i < o.a.size(); ++i)
        if (is_level[i]) P.i0 += static_cast<int>(o.a[i]);
    return P;
}

Prepared vanishing(size_t nord) {
    Prepared P;
    P.vanishes = true;
    P.ord_coeffs.assign(nord, 0);
    return P;
}

void add_ord(Cell &c, const std::string &name) {
    c.ord_vars.push_back(name);
    for (auto &l : c.theta) l.coeffs.push_back(0);
    for (auto &P : c.prepared) P.ord_coeffs.push_back(0);
}

void add_res(Cell &c, const std::string &name) {
    c.res_vars.push_back(name);
    c.psi = c.psi.with_nvars(static_cast<int>(c.res_vars.size()));
}

std::vector<bool> level_mask(const Cell &c) {
    std::vector<bool> m(c.ord_vars.size(), false);
    for (auto &l : c.levels)
        if (!l.zero)
            for (size_t i = 0; i < c.ord_vars.size(); ++i)
                if (c.ord_vars[i] == l.ord_name) m[i] = true;
    return m;
}

// Adds a constraint; returns false if it is constant and violated.
bool constrain(Cell &c, LinearConstraint l) {
    l.coeffs.resize(c.ord_vars.size(), 0);
    bool zero = std::all_of(l.coeffs.begin(), l.coeffs.end(), [](long x) { return x == 0; });
    if (zero) {
        if (l.holds(std::vector<long>(c.ord_vars.size(), 0))) return true;
        return false;
    }
    c.theta.push_back(l);
    return true;
}

bool satisfiable(const Cell &c) { return c.theta.empty() || !is_empty(c.theta, c.ord_vars.size()); }

// ---------------------------------------------------------------- univariate

struct BasisData {
    std::vector<UPoly> g;                 // primitive integer, pairwise coprime
    std::vector<std::vector<int>> e;      // e[j][i]: exponent of g_i in f_j
    std::vector<mpq_class> c;             // f_j = c_j * prod g_i^e
};

UPoly integer_primitive(const UPoly &f) {
    UPoly g = f.primitive();
    return g;
}

BasisData factor_basis(const std::vector<UPoly> &fs) {
    BasisData B;
    std::vector<UPoly> nonconst;
    for (auto &f : fs) {
        if (f.is_zero()) throw ZeroPolynomial("cannot prepare the zero polynomial");
        if (f.degree() >= 1) nonconst.push_back(f);
    }
    std::vector<UPoly> basis = nonconst.empty() ? std::vector<UPoly>{} : coprime_basis(nonconst);
    for (auto &b0 : basis) {
        UPoly b = integer_primitive(b0);
        if (b.degree() < 1) continue;
        for (auto &r : rational_roots(b)) {
            UPoly lin = integer_primitive(UPoly({mpq_class(-r.get_num()), mpq_class(r.get_den())}));
            UPoly q, rem;
            divmod(b, lin, q, rem);
            b = q.degree() >= 1 ? integer_primitive(q) : q;
            B.g.push_back(lin);
        }
        if (b.degree() >= 1) B.g.push_back(b);
    }
    for (auto &f : fs) {
        UPoly rem = f;
        std::vector<int> ex(B.g.size(), 0);
        for (size_t i = 0; i < B.g.size(); ++i) {
            while (rem.degree() >= 1) {
                UPoly q, r;
                divmod(rem, B.g[i], q, r);
                if (!r.is_zero()) break;
                rem = q;
                ++ex[i];
            }
        }
        if (rem.degree() != 0) throw PrecisionLoss("basis factorization did not close");
        B.e.push_back(ex);
        B.c.push_back(rem.coeff(0));
    }
    return B;
}

// ord / ac of one basis factor on a cell.
struct FData {
    bool zero = false;
    long ordc = 0;
    long ord_alpha = 0;
    ResPoly ac;
};

struct Univariate {
    long p;
    std::string var;
    std::vector<std::string> all_vars;
    BasisData B;
    std::vector<Cell> out;
    std::string alpha, xi;

    Cell skeleton(const ExprP &center, bool zero) const {
        Cell c;
        c.p = p;
        c.vars = all_vars;
        CellLevel l;
        l.zero = zero;
        l.center = center;
        if (!zero) {
            l.ord_name = alpha;
            l.res_name = xi;
            c.ord_vars = {alpha};
            c.res_vars = {xi};
        }
        c.levels = {l};
        c.psi = ResidueFormula(zero ? 0 : 1);
        c.count = MotElem::constant(1);
        return c;
    }

    void finish(Cell &c, const std::vector<FData> &fd) {
        std::vector<bool> mask = level_mask(c);
        for (size_t j = 0; j < B.c.size(); ++j) {
            bool van = false;
            Aff o{std::vector<long>(c.ord_vars.size(), 0), vp(B.c[j], p)};
            ResPoly ac = ResPoly::constant(ac_rational(B.c[j], p));
            for (size_t i = 0; i < B.g.size(); ++i) {
                int e = B.e[j][i];
                if (!e) continue;
                if (fd[i].zero) {
                    van = true;
                    continue;
                }
                o.c += e * fd[i].ordc;
                if (!c.ord_vars.empty()) o.a[0] += e * fd[i].ord_alpha;
                ac = rp_mod(ac * fd[i].ac.pow(e), p);
            }
            if (van)
                c.prepared.push_back(vanishing(c.ord_vars.size()));
            else
                c.prepared.push_back(make_prepared(o, ac, p, mask));
        }
        out.push_back(std::move(c));
    }

    ExprP int_center(const mpz_class &c) const { return parse_center(c.get_str()); }

    void node(const mpz_class &c, int k, int depth) {
        if (depth > 400) throw PrecisionLoss("root separation needs more than 400 levels");
        mpz_class pk = ipow(mpz_class(p), static_cast<unsigned long>(k));
        size_t nb = B.g.size();
        std::vector<long> v(nb);
        std::vector<std::vector<mpz_class>> H(nb);
        std::vector<std::vector<long>> Hb(nb), Hd(nb);
        for (size_t i = 0; i < nb; ++i) {
            UPoly G = B.g[i].shift(mpq_class(c)).scale(mpq_class(pk));
            long m = -1;
            for (auto &co : G.coeffs())
                if (co != 0) {
                    long w = vp(co, p);
                    if (m < 0 || w < m) m = w;
                }
            v[i] = m;
            mpz_class pv = ipow(mpz_class(p), static_cast<unsigned long>(m));
            for (auto &co : G.coeffs()) {
                mpq_class h = co / pv;
                if (h.get_den() != 1) throw PrecisionLoss("non-integral shifted factor");
                H[i].push_back(h.get_num());
                Hb[i].push_back(modp(h.get_num(), p));
            }
            Hd[i] = deriv(Hb[i], p);
        }
        auto fd_const = [&](long b) {
            std::vector<FData> fd(nb);
            for (size_t i = 0; i < nb; ++i) {
                fd[i].ordc = v[i];
                fd[i].ac = ResPoly::constant(eval_modp(Hb[i], b, p));
            }
            return fd;
        };

        long generic_roots = 0;
        for (long b = 0; b < p; ++b) {
            std::vector<size_t> hit;
            for (size_t i = 0; i < nb; ++i)
                if (eval_modp(Hb[i], b, p) == 0) hit.push_back(i);
            if (b != 0 && !hit.empty()) ++generic_roots;
            if (hit.empty()) {
                if (b != 0) continue;
                Cell fam = skeleton(int_center(c), false);
                constrain(fam, ge({1}, -(k + 1)));
                fam.psi = fam.psi.with_atom(ResPoly::var(0), false);
                fam.count = MotElem::L(1) - MotElem::constant(1);
                finish(fam, fd_const(0));
                Cell pt = skeleton(int_center(c), true);
                finish(pt, fd_const(0));
                continue;
            }
            if (hit.size() == 1 && eval_modp(Hd[hit[0]], b, p) != 0) {
                size_t i = hit[0];
                ExprP center;
                if (B.g[i].degree() == 1) {
                    center = parse_center(rat_str(-B.g[i].coeff(0) / B.g[i].coeff(1)));
                } else {
                    std::string h = "h_{" + std::to_string(B.g[i].degree()) + ",0}(";
                    for (size_t t = 0; t < H[i].size(); ++t) h += (t ? ", " : "") + H[i][t].get_str();
                    h += ", " + std::to_string(b) + ")";
                    std::string s = k == 0 ? h : c.get_str() + " + t0^" + std::to_string(k) + "*" + h;
                    center = parse_center(s);
                }
                std::vector<FData> fd = fd_const(b);
                fd[i].ordc = v[i] - k;
                fd[i].ord_alpha = 1;
                fd[i].ac = ResPoly::var(0) * ResPoly::constant(eval_modp(Hd[i], b, p));
                Cell fam = skeleton(center, false);
                constrain(fam, ge({1}, -(k + 1)));
                fam.psi = fam.psi.with_atom(ResPoly::var(0), false);
                fam.count = MotElem::L(1) - MotElem::constant(1);
                finish(fam, fd);
                std::vector<FData> fz = fd_const(b);
                fz[i].zero = true;
                Cell pt = skeleton(center, true);
                finish(pt, fz);
                continue;
            }
            node(c + pk * b, k + 1, depth + 1);
        }
        // units of the annulus ord(y - c) = k outside the root residues
        Cell gen = skeleton(int_center(c), false);
        constrain(gen, LinearConstraint::eq({1}, -k));
        ResPoly prod = ResPoly::constant(1);
        std::vector<FData> fd(nb);
        for (size_t i = 0; i < nb; ++i) {
            fd[i].ordc = v[i];
            fd[i].ac = rp_univ(Hb[i], 0);
            prod = rp_mod(prod * fd[i].ac, p);
        }
        gen.psi = gen.psi.with_atom(ResPoly::var(0), false);
        if (nb) gen.psi = gen.psi.with_atom(prod, false);
        gen.count = MotElem::L(1) - MotElem::constant(1 + generic_roots);
        finish(gen, fd);
    }
};

// ---------------------------------------------------------------- products

Cell product(const Cell &A, const Cell &Bc, const std::vector<std::pair<int, int>> &combine, long p) {
    // combine[j] = (index into A.prepared or -1, index into B.prepared or -1)
    Cell c;
    c.p = p;
    c.vars = A.vars;
    c.levels = A.levels;
    c.levels.insert(c.levels.end(), Bc.levels.begin(), Bc.levels.end());
    size_t na = A.ord_vars.size(), nb = Bc.ord_vars.size();
    int ra = static_cast<int>(A.res_vars.size()), rb = static_cast<int>(Bc.res_vars.size());
    c.ord_vars = A.ord_vars;
    c.ord_vars.insert(c.ord_vars.end(), Bc.ord_vars.begin(), Bc.ord_vars.end());
    c.res_vars = A.res_vars;
    c.res_vars.insert(c.res_vars.end(), Bc.res_vars.begin(), Bc.res_vars.end());
    for (auto l : A.theta) {
        l.coeffs.resize(na + nb, 0);
        c.theta.push_back(l);
    }
    for (auto l : Bc.theta) {
        std::vector<long> co(na, 0);
        co.insert(co.end(), l.coeffs.begin(), l.coeffs.end());
        l.coeffs = co;
        c.theta.push_back(l);
    }
    std::vector<int> shift(rb);
    for (int i = 0; i < rb; ++i) shift[i] = ra + i;
    c.psi = A.psi.with_nvars(ra + rb);
    for (auto &at : Bc.psi.atoms()) c.psi = c.psi.with_atom(at.poly.renamed(shift), at.eq);
    c.count = A.count * Bc.count;
    std::vector<bool> mask = level_mask(c);
    for (auto [ia, ib] : combine) {
        Prepared P;
        Aff o{std::vector<long>(na + nb, 0), 0};
        ResPoly ac = ResPoly::constant(1);
        bool van = false;
        if (ia >= 0) {
            const Prepared &X = A.prepared[ia];
            van = van || X.vanishes;
            for (size_t i = 0; i < na; ++i) o.a[i] += X.ord_coeffs[i];
            o.c += X.ord_const;
            ac = ac * X.ac;
        }
        if (ib >= 0) {
            const Prepared &X = Bc.prepared[ib];
            van = van || X.vanishes;
            for (size_t i = 0; i < nb; ++i) o.a[na + i] += X.ord_coeffs[i];
            o.c += X.ord_const;
            ac = ac * X.ac.renamed(shift);
        }
        c.prepared.push_back(van ? vanishing(na + nb) : make_prepared(o, ac, p, mask));
    }
    return c;
}

// ---------------------------------------------------------------- parametric

struct Decomposer {
    long p;
    std::vector<std::string> names;

    std::string mstr(const MPoly &f) const { return f.str(names); }

    std::vector<Cell> univariate(const std::vector<MPoly> &fs, int var) {
        std::vector<UPoly> us;
        for (auto &f : fs) us.push_back(f.to_upoly(var));
        Univariate U{p, names[var - 1], names, factor_basis(us), {}, "a_" + names[var - 1], "r_" + names[var - 1]};
        U.node(0, 0, 0);
        return U.out;
    }

    std::vector<Cell> products(const std::vector<Cell> &A, const std::vector<Cell> &B,
                               const std::vector<std::pair<int, int>> &combine) {
        std::vector<Cell> out;
        for (auto &a : A)
            for (auto &b : B) out.push_back(product(a, b, combine, p));
        return out;
    }

    // f = g(x') * h(y) with integer g primitive.
    static bool separate(const MPoly &f, int y, MPoly &g, MPoly &h) {
        int m = f.degree_in(y);
        int i0 = -1;
        for (int i = 0; i <= m; ++i)
            if (!f.coeff_in(y, i).is_zero()) {
                i0 = i;
                break;
            }
        MPoly a0 = f.coeff_in(y, i0);
        auto key = a0.terms().begin();
        mpz_class c = key->second, cont = 0;
        for (auto &[e, v] : a0.terms()) cont = gcd(cont, mpz_class(v));
        if (c < 0) cont = -cont;
        g = MPoly(f.nvars());
        for (auto &[e, v] : a0.terms()) g.add_term(e, mpz_class(v / cont));
        h = MPoly(f.nvars());
        for (int i = 0; i <= m; ++i) {
            MPoly ai = f.coeff_in(y, i);
            if (ai.is_zero()) continue;
            auto it = ai.terms().find(key->first);
            if (it == ai.terms().end()) return false;
            mpz_class ci = it->second;
            if (ai * MPoly::constant(f.nvars(), c) != a0 * MPoly::constant(f.nvars(), ci)) return false;
            mpq_class hi = mpq_class(ci) * mpq_class(cont) / mpq_class(c);
            hi.canonicalize();
            if (hi.get_den() != 1) return false;
            MPoly::Exps e(f.nvars() + 1, 0);
            e[y] = i;
            h.add_term(e, hi.get_num());
        }
        return true;
    }

    std::vector<Cell> run(const std::vector<MPoly> &fs, int nv) {
        if (nv == 1) return univariate(fs, 1);
        int y = nv;
        std::vector<int> D;
        for (size_t j = 0; j < fs.size(); ++j)
            if (fs[j].depends_on(y)) D.push_back(static_cast<int>(j));
        if (D.empty()) {
            auto base = run(fs, nv - 1);
            auto ys = univariate({}, y);
            std::vector<std::pair<int, int>> comb;
            for (size_t j = 0; j < fs.size(); ++j) comb.push_back({static_cast<int>(j), -1});
            return products(base, ys, comb);
        }
        // all y-dependent functions split as g(x') h(y)
        {
            std::vector<MPoly> bfs, yfs;
            std::vector<std::pair<int, int>> comb;
            bool ok = true;
            for (size_t j = 0; j < fs.size() && ok; ++j) {
                if (!fs[j].depends_on(y)) {
                    comb.push_back({static_cast<int>(bfs.size()), -1});
                    bfs.push_back(fs[j]);
                    continue;
                }
                MPoly g, h;
                if (!separate(fs[j], y, g, h)) {
                    ok = false;
                    break;
                }
                comb.push_back({static_cast<int>(bfs.size()), static_cast<int>(yfs.size())});
                bfs.push_back(g);
                yfs.push_back(h);
            }
            if (ok) return products(run(bfs, nv - 1), univariate(yfs, y), comb);
        }
        if (D.size() != 1)
            throw UnsupportedSplit("several functions depend on " + names[y - 1] + " without splitting as products");
        int d = D[0];
        const MPoly &F = fs[d];
        int m = F.degree_in(y);
        std::vector<int> nz;
        for (int i = 0; i <= m; ++i)
            if (!F.coeff_in(y, i).is_zero()) nz.push_back(i);
        std::vector<MPoly> others;
        for (size_t j = 0; j < fs.size(); ++j)
            if (static_cast<int>(j) != d) others.push_back(fs[j]);
        MPoly am = F.coeff_in(y, m);
        MPoly a0 = F.coeff_in(y, 0);
        bool am_const = am.total_degree() == 0;
        if (m == 1 && am_const && am.terms().begin()->second % p != 0)
            return linear_unit(fs, d, others, a0, am, nv);
        if (nv == 2 && (m == 1 || (nz.size() == 2 && nz[0] == 0))) {
            if (m > 1 && m % p == 0)
                throw UnsupportedSplit("binomial of degree " + std::to_string(m) + " divisible by p in " +
                                       names[y - 1]);
            std::vector<MPoly> bfs = others;
            bfs.push_back(a0);
            bfs.push_back(am);
            auto base = univariate(bfs, 1);
            std::vector<Cell> out;
            for (auto &B : base) extend_binomial(B, fs.size(), d, m, a0, am, out);
            return out;
        }
        throw UnsupportedSplit("no supported preparation for " + F.str(names) + " in " + names[y - 1]);
    }

    // Map the base prepared data (others...) into positions around d.
    static std::vector<Prepared> place(const Cell &B, size_t nf, int d, const Prepared &Pd) {
        std::vector<Prepared> P;
        size_t k = 0;
        for (size_t j = 0; j < nf; ++j) P.push_back(static_cast<int>(j) == d ? Pd : B.prepared[k++]);
        return P;
    }

    std::vector<Cell> linear_unit(const std::vector<MPoly> &fs, int d, const std::vector<MPoly> &others,
                                  const MPoly &a0, const MPoly &a1, int nv) {
        auto base = run(others, nv - 1);
        std::string y = names[nv - 1];
        mpz_class c1 = a1.terms().begin()->second;
        ExprP center = parse_center("-(" + mstr(a0) + ")/(" + c1.get_str() + ")");
        std::vector<Cell> out;
        for (auto &B : base) {
            for (bool zero : {false, true}) {
                Cell c = B;
                CellLevel l;
                l.zero = zero;
                l.center = center;
                if (!zero) {
                    l.ord_name = "a_" + y;
                    l.res_name = "r_" + y;
                    add_ord(c, l.ord_name);
                    add_res(c, l.res_name);
                }
                c.levels.push_back(l);
                Prepared Pd;
                if (zero) {
                    Pd = vanishing(c.ord_vars.size());
                } else {
                    constrain(c, ge(unit_aff(c.ord_vars.size(), c.ord_vars.size() - 1).a, 0));
                    int ri = static_cast<int>(c.res_vars.size()) - 1;
                    c.psi = c.psi.with_atom(ResPoly::var(ri), false);
                    c.count = c.count * (MotElem::L(1) - MotElem::constant(1));
                    Pd = make_prepared(unit_aff(c.ord_vars.size(), c.ord_vars.size() - 1),
                                       ResPoly::var(ri) * ResPoly::constant(modp(c1, p)), p, level_mask(c));
                }
                c.prepared = place(c, fs.size(), d, Pd);
                out.push_back(std::move(c));
            }
        }
        return out;
    }

    // Enumerate residue tuples of a base cell satisfying its psi.
    std::vector<std::vector<long>> base_tuples(const Cell &B) const {
        std::vector<std::vector<long>> out;
        size_t n = B.res_vars.size();
        std::vector<long> t(n, 0);
        std::function<void(size_t)> go = [&](size_t i) {
            if (i == n) {
                if (B.psi.holds(t, p)) out.push_back(t);
                return;
            }
            for (long r = 0; r < p; ++r) {
                t[i] = r;
                go(i + 1);
            }
        };
        go(0);
        return out;
    }

    void extend_binomial(const Cell &B, size_t nf, int d, int m, const MPoly &a0, const MPoly &am,
                         std::vector<Cell> &out) {
        std::string y = names[1];
        size_t nb = B.prepared.size();
        const Prepared Pb = B.prepared[nb - 2]; // a0
        const Prepared Pa = B.prepared[nb - 1]; // a_m
        Cell base = B;
        base.prepared.resize(nb - 2);

        auto new_level = [&](Cell &c, const ExprP &center, bool zero) {
            CellLevel l;
            l.zero = zero;
            l.center = center;
            if (!zero) {
                l.ord_name = "a_" + y;
                l.res_name = "r_" + y;
                add_ord(c, l.ord_name);
                add_res(c, l.res_name);
            }
            c.levels.push_back(l);
            return l;
        };
        auto emit = [&](Cell c, const Prepared &Pd) {
            if (!satisfiable(c)) return;
            c.prepared = place(c, nf, d, Pd);
            out.push_back(std::move(c));
        };
        auto pad = [&](const Prepared &P, size_t n) {
            Aff a{P.ord_coeffs, P.ord_const};
            a.a.resize(n, 0);
            return a;
        };
        ExprP zero_center = parse_center("0");
        MotElem Lm1 = MotElem::L(1) - MotElem::constant(1);

        // a(x) y^m + b(x) with one side vanishing on this base cell
        if (Pa.vanishes || Pb.vanishes) {
            for (bool zero : {false, true}) {
                Cell c = base;
                new_level(c, zero_center, zero);
                size_t n = c.ord_vars.size();
                Prepared Pd;
                if (!zero) {
                    constrain(c, ge(unit_aff(n, n - 1).a, 0));
                    int ri = static_cast<int>(c.res_vars.size()) - 1;
                    c.psi = c.psi.with_atom(ResPoly::var(ri), false);
                    c.count = c.count * Lm1;
                }
                std::vector<bool> mask = level_mask(c);
                if (Pa.vanishes && Pb.vanishes) {
                    Pd = vanishing(n);
                } else if (Pa.vanishes) {
                    Pd = make_prepared(pad(Pb, n), Pb.ac, p, mask);
                } else if (zero) {
                    Pd = vanishing(n);
                } else {
                    int ri = static_cast<int>(c.res_vars.size()) - 1;
                    Pd = make_prepared(pad(Pa, n) + unit_aff(n, n - 1) * m, Pa.ac * ResPoly::var(ri).pow(m), p,
                                       mask);
                }
                emit(c, Pd);
            }
            return;
        }

        if (m == 1) {
            // y = -b/a when ord b >= ord a, otherwise ord f = ord b throughout
            ExprP center = parse_center("-(" + mstr(a0) + ")/(" + mstr(am) + ")");
            for (int branch = 0; branch < 2; ++branch)
                for (bool zero : {false, true}) {
                    Cell c = base;
                    new_level(c, branch == 0 ? center : zero_center, zero);
                    size_t n = c.ord_vars.size();
                    Aff A = pad(Pa, n), Bo = pad(Pb, n);
                    bool ok = branch == 0 ? constrain(c, ge((Bo - A).a, (Bo - A).c))
                                          : constrain(c, ge((A - Bo).a, (A - Bo).c - 1));
                    if (!ok) continue;
                    int ri = static_cast<int>(c.res_vars.size()) - 1;
                    if (!zero) {
                        constrain(c, ge(unit_aff(n, n - 1).a, 0));
                        c.psi = c.psi.with_atom(ResPoly::var(ri), false);
                        c.count = c.count * Lm1;
                    }
                    std::vector<bool> mask = level_mask(c);
                    Prepared Pd;
                    if (branch == 0)
                        Pd = zero ? vanishing(n) : make_prepared(A + unit_aff(n, n - 1), Pa.ac * ResPoly::var(ri), p, mask);
                    else
                        Pd = make_prepared(Bo, Pb.ac, p, mask);
                    emit(c, Pd);
                }
            return;
        }

        // K = number of (base residues, s) with ac(a) s^m + ac(b) = 0, s != 0
        long K = 0;
        for (auto &t : base_tuples(base))
            for (long s = 1; s < p; ++s) {
                std::vector<long> ts = t;
                long va = Pa.ac.eval_mod(ts, p), vb = Pb.ac.eval_mod(ts, p);
                long sm = 1;
                for (int i = 0; i < m; ++i) sm = sm * s % p;
                if ((va * sm + vb) % p == 0) ++K;
            }

        // center 0 branches: ord(a y^m) < ord b, >, and = without cancellation
        for (int branch = 0; branch < 3; ++branch) {
            Cell c = base;
            new_level(c, zero_center, false);
            size_t n = c.ord_vars.size();
            int ri = static_cast<int>(c.res_vars.size()) - 1;
            Aff A = pad(Pa, n), Bo = pad(Pb, n), al = unit_aff(n, n - 1);
            Aff diff = A + al * m - Bo; // ord(a y^m) - ord b
            constrain(c, ge(al.a, 0));
            c.psi = c.psi.with_atom(ResPoly::var(ri), false);
            std::vector<bool> mask = level_mask(c);
            ResPoly yam = Pa.ac * ResPoly::var(ri).pow(m);
            Prepared Pd;
            if (branch == 0) {
                constrain(c, ge((diff * -1).a, (diff * -1).c - 1));
                c.count = c.count * Lm1;
                Pd = make_prepared(A + al * m, yam, p, mask);
            } else if (branch == 1) {
                constrain(c, ge(diff.a, diff.c - 1));
                c.count = c.count * Lm1;
                Pd = make_prepared(Bo, Pb.ac, p, mask);
            } else {
                constrain(c, LinearConstraint::eq(diff.a, diff.c));
                c.psi = c.psi.with_atom(rp_mod(yam + Pb.ac, p), false);
                c.count = c.count * Lm1 - MotElem::constant(K);
                Pd = make_prepared(Bo, yam + Pb.ac, p, mask);
            }
            emit(c, Pd);
        }
        {
            Cell c = base;
            new_level(c, zero_center, true);
            std::vector<bool> mask = level_mask(c);
            emit(c, make_prepared(pad(Pb, c.ord_vars.size()), Pb.ac, p, mask));
        }
        if (K == 0) return;

        // near a root rho of y^m = -b/a with ord rho = n, ac rho = s
        std::string nn = "n_" + y, ss = "s_" + y;
        ExprP root = parse_center("root_{" + std::to_string(m) + ",0}(-(" + mstr(a0) + ")/(" + mstr(am) + "), " + ss +
                                      ", " + nn + ")",
                                  {{nn, Sort::ord()}, {ss, Sort::res(1)}});
        for (bool zero : {false, true}) {
            Cell c = base;
            add_ord(c, nn);
            add_res(c, ss);
            size_t in = c.ord_vars.size() - 1;
            int is = static_cast<int>(c.res_vars.size()) - 1;
            new_level(c, root, zero);
            c.levels.back().aux = {{nn, parse_term("ord(" + y + ")")}, {ss, parse_term("ac_1(" + y + ")")}};
            size_t n = c.ord_vars.size();
            Aff A = pad(Pa, n), Bo = pad(Pb, n), nv = unit_aff(n, in);
            Aff eqn = A + nv * m - Bo;
            constrain(c, LinearConstraint::eq(eqn.a, eqn.c));
            constrain(c, ge(nv.a, 0));
            ResPoly sm = ResPoly::var(is).pow(m);
            c.psi = c.psi.with_atom(rp_mod(Pa.ac * sm + Pb.ac, p), true);
            c.psi = c.psi.with_atom(ResPoly::var(is), false);
            c.count = MotElem::constant(K);
            Prepared Pd;
            if (zero) {
                Pd = vanishing(n);
            } else {
                Aff g = unit_aff(n, n - 1);
                constrain(c, ge((g - nv).a, (g - nv).c - 1));
                int ri = static_cast<int>(c.res_vars.size()) - 1;
                c.psi = c.psi.with_atom(ResPoly::var(ri), false);
                c.count = c.count * Lm1;
                std::vector<bool> mask = level_mask(c);
                Pd = make_prepared(A + nv * (m - 1) + g,
                                   Pa.ac * ResPoly::constant(m) * ResPoly::var(is).pow(m - 1) * ResPoly::var(ri), p,
                                   mask);
            }
            emit(c, Pd);
        }
    }
};

} // namespace

// ---------------------------------------------------------------- Prepared / Cell

std::optional<long> Prepared::ord_at(const std::vector<long> &ords) const {
    if (vanishes) return std::nullopt;
    long v = ord_const;
    for (size_t i = 0; i < ord_coeffs.size(); ++i) v += ord_coeffs[i] * ords.at(i);
    return v;
}

long Prepared::ac_at(const std::vector<long> &res, long p) const {
    if (vanishes) return 0;
    return ac.eval_mod(res, p);
}

std::string Prepared::ord_str(const std::vector<std::string> &names) const {
    if (vanishes) return "inf";
    std::string s;
    for (size_t i = 0; i < ord_coeffs.size(); ++i) {
        long c = ord_coeffs[i];
        if (!c) continue;
        std::string t = (c == 1 || c == -1) ? names[i] : std::to_string(std::labs(c)) + "*" + names[i];
        s += s.empty() ? (c < 0 ? "-" + t : t) : (c < 0 ? " - " : " + ") + t;
    }
    if (s.empty()) return std::to_string(ord_const);
    if (ord_const) s += (ord_const < 0 ? " - " : " + ") + std::to_string(std::labs(ord_const));
    return s;
}

bool Cell::null_set() const {
    return std::any_of(levels.begin(), levels.end(), [](const CellLevel &l) { return l.zero; });
}

int Cell::kind() const { return levels.empty() || levels.back().zero ? 0 : 1; }

std::optional<CellPoint> Cell::locate(const std::vector<mpq_class> &x, const PAdicContext &ctx) const {
    Env env;
    for (size_t i = 0; i < vars.size(); ++i) env.vars[vars[i]] = Value::of_val(PAdicNumber::from_rational(ctx, x[i]));
    CellPoint pt;
    pt.ords.assign(ord_vars.size(), 0);
    pt.res.assign(res_vars.size(), 0);
    auto slot = [](const std::vector<std::string> &v, const std::string &n) {
        return static_cast<size_t>(std::find(v.begin(), v.end(), n) - v.begin());
    };
    for (size_t i = 0; i < levels.size(); ++i) {
        const CellLevel &l = levels[i];
        for (auto &[name, t] : l.aux) {
            Value v = eval_term(t, env, ctx);
            env.vars[name] = v;
            if (v.sort == Sort::ord()) {
                if (v.ord.is_infinite()) return std::nullopt;
                pt.ords[slot(ord_vars, name)] = v.ord.to_long();
            } else {
                pt.res[slot(res_vars, name)] = v.res.get_si();
            }
        }
        PAdicNumber c = eval_term(l.center, env, ctx).val;
        // Agreement to every working digit counts as lying on the center.
        PAdicNumber d = PAdicNumber::zero(ctx);
        try {
            d = env.vars.at(vars[i]).val - c;
        } catch (const InsufficientPrecision &) {
        }
        if (l.zero) {
            if (!d.is_zero()) return std::nullopt;
            continue;
        }
        if (d.is_zero()) return std::nullopt;
        long a = ord(d).to_long();
        long r = ac(d, 1).get_si();
        pt.ords[slot(ord_vars, l.ord_name)] = a;
        pt.res[slot(res_vars, l.res_name)] = r;
        env.vars[l.ord_name] = Value::of_ord(ExtInt(a));
        env.vars[l.res_name] = Value::of_res(1, r);
    }
    for (auto &lc : theta)
        if (!lc.holds(pt.ords)) return std::nullopt;
    if (!psi.holds(pt.res, p)) return std::nullopt;
    return pt;
}

MotElem Cell::measure() const {
    if (null_set()) return MotElem();
    std::vector<bool> mask = level_mask(*this);
    std::vector<long> a(ord_vars.size(), 0), b(ord_vars.size(), 0);
    long b0 = 0;
    for (size_t i = 0; i < ord_vars.size(); ++i)
        if (mask[i]) b[i] = -1;
    for (auto &l : levels)
        if (!l.zero) --b0;
    return sum_affine(theta, ord_vars.size(), a, 0, b, b0, count);
}

MotElem cell_measure(const Cell &c) { return c.measure().simplify(); }

mpq_class cell_measure_at(const Cell &c, long q) { return count_eval(c.measure(), q, 0); }

std::string Cell::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = kind();
    nlohmann::ordered_json base;
    base["presburger"] = nlohmann::ordered_json::parse(PresburgerSet::single(ord_vars, theta).to_json());
    base["residue_formula"] = psi.str();
    j["base"] = base;
    const CellLevel &in = levels.back();
    j["center"] = to_string(in.center);
    j["alpha"] = in.zero ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(in.ord_name);
    j["xi"] = in.zero ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(in.res_name);
    j["k"] = k;
    j["levels"] = nlohmann::ordered_json::array();
    for (size_t i = 0; i < levels.size(); ++i) {
        nlohmann::ordered_json l;
        l["var"] = vars[i];
        l["kind"] = levels[i].zero ? 0 : 1;
        l["center"] = to_string(levels[i].center);
        if (!levels[i].aux.empty()) {
            nlohmann::ordered_json aux = nlohmann::ordered_json::object();
            for (auto &[n, t] : levels[i].aux) aux[n] = to_string(t);
            l["aux"] = aux;
        }
        j["levels"].push_back(l);
    }
    j["count"] = count.str();
    j["prepared"] = nlohmann::ordered_json::array();
    std::vector<std::string> rn = res_vars;
    for (auto &P : prepared) {
        nlohmann::ordered_json q;
        q["i0"] = P.i0;
        q["ord_expr"] = P.ord_str(ord_vars);
        q["ac_expr"] = P.vanishes ? "0" : P.ac.str(rn);
        q["ell"] = P.ell;
        j["prepared"].push_back(q);
    }
    return j.dump();
}

CellDecomposition prepare_univariate(const std::vector<UPoly> &fs, long p, const std::string &var) {
    Univariate U{p, var, {var}, factor_basis(fs), {}, "a_" + var, "r_" + var};
    U.node(0, 0, 0);
    CellDecomposition d;
    d.cells = std::move(U.out);
    for (auto &f : fs) d.functions.push_back(f.str(var));
    return d;
}

CellDecomposition decompose(const std::vector<MPoly> &fs, long p, const std::vector<std::string> &names) {
    if (fs.empty()) throw std::invalid_argument("decompose needs at least one function");
    int nv = fs[0].nvars();
    if (static_cast<int>(names.size()) != nv) throw std::invalid_argument("variable names do not match");
    std::vector<MPoly> g;
    for (auto &f : fs) {
        if (f.is_zero()) throw ZeroPolynomial("cannot prepare the zero polynomial");
        g.push_back(f.t_degree() > 0 ? f.specialize_t(p) : f);
    }
    Decomposer D{p, names};
    CellDecomposition d;
    d.cells = D.run(g, nv);
    for (auto &f : fs) d.functions.push_back(f.str(names));
    return d;
}

std::string cells_to_json(const CellDecomposition &d) {
    nlohmann::ordered_json j;
    j["functions"] = d.functions;
    j["cell_count"] = d.cells.size();
    j["cells"] = nlohmann::ordered_json::array();
    for (auto &c : d.cells) j["cells"].push_back(nlohmann::ordered_json::parse(c.to_json()));
    return j.dump(2);
}

} // namespace padint

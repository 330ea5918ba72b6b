#include "padint/series.hpp"

#include <algorithm>
#include <sstream>

#include "padint/errors.hpp"

namespace padint {

SeparatedSeries::SeparatedSeries(int m, int n, int Mt, int D, bool exact)
    : m_(m), n_(n), Mt_(Mt), D_(D), exact_(exact) {
    if (Mt < 1) throw std::invalid_argument("t-adic truncation order must be at least 1");
    if (D < 0) throw std::invalid_argument("degree bound must be nonnegative");
}

SeparatedSeries SeparatedSeries::constant(int m, int n, const mpz_class &c, int Mt, int D) {
    SeparatedSeries s(m, n, Mt, D);
    s.add_term(Exps(m + n + 1, 0), c);
    return s;
}

SeparatedSeries SeparatedSeries::var(int m, int n, int id, int Mt, int D) {
    if (id < 0 || id >= m + n) throw std::out_of_range("series variable id");
    SeparatedSeries s(m, n, Mt, D);
    Exps e(m + n + 1, 0);
    e[id + 1] = 1;
    s.add_term(e, 1);
    return s;
}

SeparatedSeries SeparatedSeries::t(int m, int n, int Mt, int D) {
    SeparatedSeries s(m, n, Mt, D);
    Exps e(m + n + 1, 0);
    e[0] = 1;
    s.add_term(e, 1);
    return s;
}

SeparatedSeries SeparatedSeries::from_mpoly(const MPoly &f, int m, int n, int Mt, int D, bool exact) {
    if (f.nvars() > m + n) throw std::invalid_argument("polynomial has more variables than the series shape");
    SeparatedSeries s(m, n, Mt, D, exact);
    for (auto &[e, c] : f.terms()) {
        Exps x(m + n + 1, 0);
        std::copy(e.begin(), e.end(), x.begin());
        s.add_term(x, c);
    }
    return s;
}

std::vector<std::string> SeparatedSeries::var_names() const {
    std::vector<std::string> v;
    for (int i = 1; i <= m_; ++i) v.push_back("xi" + std::to_string(i));
    for (int j = 1; j <= n_; ++j) v.push_back("rho" + std::to_string(j));
    return v;
}

SeparatedSeries SeparatedSeries::parse(const std::string &src, int m, int n, int Mt, int D) {
    SeparatedSeries shape(m, n, Mt, D);
    auto parsed = parse_poly(src, shape.var_names());
    return from_mpoly(parsed.poly, m, n, Mt, D, true);
}

bool SeparatedSeries::keeps(const Exps &e) const {
    if (e[0] >= Mt_) return false;
    for (int j = 0; j < n_; ++j)
        if (e[1 + m_ + j] > D_) return false;
    return true;
}

void SeparatedSeries::add_term(const Exps &e, const mpz_class &c) {
    if (c == 0) return;
    if (!keeps(e)) {
        exact_ = false;
        return;
    }
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

SeparatedSeries combine_shape(const SeparatedSeries &a, const SeparatedSeries &b) {
    if (a.m_ != b.m_ || a.n_ != b.n_) throw std::invalid_argument("series shapes differ");
    return SeparatedSeries(a.m_, a.n_, std::min(a.Mt_, b.Mt_), std::min(a.D_, b.D_), a.exact_ && b.exact_);
}

SeparatedSeries SeparatedSeries::operator+(const SeparatedSeries &o) const {
    SeparatedSeries r = combine_shape(*this, o);
    for (auto &[e, c] : terms_) r.add_term(e, c);
    for (auto &[e, c] : o.terms_) r.add_term(e, c);
    return r;
}

SeparatedSeries SeparatedSeries::operator-() const {
    SeparatedSeries r = *this;
    for (auto &[e, c] : r.terms_) c = -c;
    return r;
}

SeparatedSeries SeparatedSeries::operator-(const SeparatedSeries &o) const { return *this + (-o); }

SeparatedSeries SeparatedSeries::operator*(const SeparatedSeries &o) const {
    SeparatedSeries r = combine_shape(*this, o);
    Exps e(m_ + n_ + 1);
    for (auto &[e1, c1] : terms_)
        for (auto &[e2, c2] : o.terms_) {
            for (size_t i = 0; i < e.size(); ++i) e[i] = e1[i] + e2[i];
            r.add_term(e, c1 * c2);
        }
    return r;
}

SeparatedSeries SeparatedSeries::operator*(const mpz_class &c) const {
    SeparatedSeries r(m_, n_, Mt_, D_, exact_);
    for (auto &[e, x] : terms_) r.add_term(e, x * c);
    return r;
}

SeparatedSeries SeparatedSeries::pow(int k) const {
    SeparatedSeries r = constant(m_, n_, 1, Mt_, D_);
    r.exact_ = exact_;
    SeparatedSeries b = *this;
    while (k > 0) {
        if (k & 1) r = r * b;
        k >>= 1;
        if (k) b = b * b;
    }
    return r;
}

int SeparatedSeries::degree_in(int id) const {
    int d = -1;
    for (auto &[e, c] : terms_) d = std::max(d, e[id + 1]);
    return d;
}

SeparatedSeries SeparatedSeries::coeff_in(int id, int k) const {
    SeparatedSeries r(m_, n_, Mt_, D_, exact_);
    for (auto &[e, c] : terms_) {
        if (e[id + 1] != k) continue;
        Exps f = e;
        f[id + 1] = 0;
        r.add_term(f, c);
    }
    return r;
}

SeparatedSeries SeparatedSeries::reduce(bool drop_t, const std::vector<int> &zero_vars) const {
    SeparatedSeries r(m_, n_, Mt_, D_, exact_);
    for (auto &[e, c] : terms_) {
        if (drop_t && e[0] > 0) continue;
        bool keep = true;
        for (int v : zero_vars)
            if (e[v + 1] > 0) keep = false;
        if (keep) r.add_term(e, c);
    }
    return r;
}

namespace {

std::vector<int> rho_ids(const SeparatedSeries &f, int except = -1) {
    std::vector<int> v;
    for (int j = f.m(); j < f.m() + f.n(); ++j)
        if (j != except) v.push_back(j);
    return v;
}

// Upper bound on the number of contraction steps before (t, rho)^k
// vanishes in the truncated ring.
int step_bound(const SeparatedSeries &f) { return f.Mt() + f.n() * (f.D() + 1) + 2; }

} // namespace

bool SeparatedSeries::is_unit() const {
    SeparatedSeries c = reduce(true, rho_ids(*this));
    if (c.terms_.size() != 1) return false;
    auto &[e, v] = *c.terms_.begin();
    for (int x : e)
        if (x) return false;
    return v == 1 || v == -1;
}

SeparatedSeries SeparatedSeries::inverse() const {
    if (!is_unit()) throw NotRegular("series is not a unit");
    mpz_class eps = reduce(true, rho_ids(*this)).terms_.begin()->second;
    SeparatedSeries one = constant(m_, n_, 1, Mt_, D_);
    SeparatedSeries w = (*this) * eps - one; // in (t, rho)
    SeparatedSeries r = one, pw = one;
    int bound = step_bound(*this);
    for (int k = 1;; ++k) {
        pw = pw * (-w);
        if (pw.is_zero()) break;
        if (k > bound) throw TruncationTooSmall("unit inverse did not stabilize");
        r = r + pw;
    }
    r = r * eps;
    r.exact_ = exact_;
    return r;
}

MPoly SeparatedSeries::to_mpoly() const {
    MPoly p(m_ + n_);
    for (auto &[e, c] : terms_) p.add_term(e, c);
    return p;
}

std::string SeparatedSeries::str() const { return to_mpoly().str(var_names()); }

PAdicNumber SeparatedSeries::eval(const std::vector<PAdicNumber> &point, const PAdicContext &ctx) const {
    if (static_cast<int>(point.size()) != m_ + n_) throw std::invalid_argument("point dimension differs from series");
    ExtInt rho_ord = ExtInt::infinity();
    for (int i = 0; i < m_ + n_; ++i) {
        ExtInt o = ord(point[i]);
        if (i < m_ ? o < ExtInt(0) : o <= ExtInt(0)) return PAdicNumber::from_int(ctx, 0);
        if (i >= m_) rho_ord = min(rho_ord, o);
    }
    const mpz_class &p = ctx.p;
    bool all_exact = std::all_of(point.begin(), point.end(), [](const PAdicNumber &x) { return x.is_exact(); });
    if (all_exact && exact_) {
        mpq_class s = 0;
        for (auto &[e, c] : terms_) {
            mpq_class v = mpq_class(c * ipow(p, e[0]));
            for (int i = 0; i < m_ + n_; ++i)
                for (int k = 0; k < e[i + 1]; ++k) v *= *point[i].exact();
            s += v;
        }
        return PAdicNumber::from_rational(ctx, s);
    }
    ExtInt K = ExtInt::infinity();
    for (auto &x : point) K = min(K, x.abs_prec());
    if (!exact_) {
        K = min(K, ExtInt(Mt_));
        if (n_ > 0 && !rho_ord.is_infinite()) K = min(K, ExtInt(rho_ord.value() * (D_ + 1)));
    }
    if (K.is_infinite()) K = ExtInt(ctx.M);
    long k = K.to_long();
    mpz_class M = ipow(p, k);
    std::vector<mpz_class> xs;
    for (auto &x : point) xs.push_back(x.is_zero() ? mpz_class(0) : x.residue_int(static_cast<int>(k)));
    mpz_class s = 0;
    for (auto &[e, c] : terms_) {
        mpz_class v = c * ipow(p, e[0]) % M;
        for (int i = 0; i < m_ + n_; ++i)
            for (int j = 0; j < e[i + 1]; ++j) v = v * xs[i] % M;
        s += v;
    }
    s %= M;
    if (s < 0) s += M;
    return PAdicNumber::approx(ctx, s, k);
}

// ---------------------------------------------------------------- composition

SeparatedSeries compose(const SeparatedSeries &f, const std::vector<SeparatedSeries> &alphas,
                        const std::vector<SeparatedSeries> &betas) {
    if (static_cast<int>(alphas.size()) != f.m() || static_cast<int>(betas.size()) != f.n())
        throw std::invalid_argument("substitution count differs from series variables");
    if (alphas.empty() && betas.empty()) return f;
    const SeparatedSeries &shape = alphas.empty() ? betas[0] : alphas[0];
    int Mt = std::min(f.Mt(), shape.Mt()), D = std::min(f.D(), shape.D());
    bool exact = f.exact();
    std::vector<SeparatedSeries> subs = alphas;
    subs.insert(subs.end(), betas.begin(), betas.end());
    for (auto &s : subs) {
        if (s.m() != shape.m() || s.n() != shape.n()) throw std::invalid_argument("substitutions have different shapes");
        Mt = std::min(Mt, s.Mt());
        D = std::min(D, s.D());
        exact = exact && s.exact();
    }
    for (auto &b : betas)
        if (!b.reduce(true, rho_ids(b)).is_zero())
            throw CompositionDomain("substitution for a rho variable must lie in (t) + (rho)");
    SeparatedSeries T = SeparatedSeries::t(shape.m(), shape.n(), Mt, D);
    SeparatedSeries r(shape.m(), shape.n(), Mt, D, exact);
    // cache powers per slot
    std::vector<std::vector<SeparatedSeries>> pw(subs.size());
    auto power = [&](size_t i, int k) -> const SeparatedSeries & {
        auto &v = pw[i];
        if (v.empty()) v.push_back(SeparatedSeries::constant(shape.m(), shape.n(), 1, Mt, D));
        while (static_cast<int>(v.size()) <= k) v.push_back(v.back() * subs[i]);
        return v[k];
    };
    for (auto &[e, c] : f.terms()) {
        SeparatedSeries term = SeparatedSeries::constant(shape.m(), shape.n(), c, Mt, D);
        if (e[0]) term = term * T.pow(e[0]);
        for (size_t i = 0; i < subs.size(); ++i)
            if (e[i + 1]) term = term * power(i, e[i + 1]);
        r = r + term;
    }
    r.set_exact(r.exact() && exact);
    return r;
}

// ---------------------------------------------------------------- Weierstrass

namespace {

SeparatedSeries monomial_var(const SeparatedSeries &like, int id, int k) {
    SeparatedSeries s(like.m(), like.n(), like.Mt(), like.D());
    SeparatedSeries::Exps e(like.m() + like.n() + 1, 0);
    e[id + 1] = k;
    s.add_term(e, 1);
    return s;
}

// Reduction used by the regularity test: mod I + (rho) for xi variables,
// mod I + (other rho) for a rho variable.
SeparatedSeries reg_image(const SeparatedSeries &f, int id) {
    return f.is_rho(id) ? f.reduce(true, rho_ids(f, id)) : f.reduce(true, rho_ids(f));
}

// One division step by the regular part fb of f: G = Q fb + R.
void base_divide(const SeparatedSeries &G0, const SeparatedSeries &fb, const SeparatedSeries &unit_inv, int id, int d,
                 SeparatedSeries &Q, SeparatedSeries &R) {
    SeparatedSeries G = G0;
    Q = SeparatedSeries(G.m(), G.n(), G.Mt(), G.D());
    R = SeparatedSeries(G.m(), G.n(), G.Mt(), G.D());
    if (!fb.is_rho(id)) {
        // classical division on coefficient buckets in var id
        auto buckets = [&](const SeparatedSeries &x) {
            std::map<int, SeparatedSeries> b;
            for (auto &[e, c] : x.terms()) {
                SeparatedSeries::Exps f = e;
                f[id + 1] = 0;
                b.try_emplace(e[id + 1], SeparatedSeries(G.m(), G.n(), G.Mt(), G.D())).first->second.add_term(f, c);
            }
            return b;
        };
        auto gb = buckets(G);
        auto fbb = buckets(fb);
        fbb.erase(d);
        std::map<int, SeparatedSeries> qb;
        for (int k = gb.empty() ? -1 : gb.rbegin()->first; k >= d; --k) {
            auto it = gb.find(k);
            if (it == gb.end() || it->second.is_zero()) continue;
            SeparatedSeries lead = it->second;
            gb.erase(it);
            for (auto &[j, c] : fbb) {
                SeparatedSeries prod = lead * c;
                auto jt = gb.try_emplace(k - d + j, SeparatedSeries(G.m(), G.n(), G.Mt(), G.D())).first;
                jt->second = jt->second - prod;
            }
            qb.emplace(k - d, lead);
        }
        auto assemble = [&](const std::map<int, SeparatedSeries> &b, SeparatedSeries &out) {
            for (auto &[k, c] : b)
                for (auto &[e, v] : c.terms()) {
                    SeparatedSeries::Exps f = e;
                    f[id + 1] = k;
                    out.add_term(f, v);
                }
        };
        assemble(qb, Q);
        assemble(gb, R);
    } else {
        SeparatedSeries A(G.m(), G.n(), G.Mt(), G.D());
        for (auto &[e, c] : G.terms()) {
            if (e[id + 1] < d) {
                R.add_term(e, c);
            } else {
                SeparatedSeries::Exps f = e;
                f[id + 1] -= d;
                A.add_term(f, c);
            }
        }
        Q = A * unit_inv;
    }
}

} // namespace

int regular_degree(const SeparatedSeries &f, int id) {
    if (id < 0 || id >= f.nvars()) throw std::out_of_range("series variable id");
    SeparatedSeries fb = reg_image(f, id);
    if (fb.is_zero()) return -1;
    if (!f.is_rho(id)) {
        int k = fb.degree_in(id);
        SeparatedSeries lead = fb.coeff_in(id, k);
        return lead == SeparatedSeries::constant(f.m(), f.n(), 1, f.Mt(), f.D()) ? k : -1;
    }
    int k = fb.D() + 1;
    for (auto &[e, c] : fb.terms()) k = std::min(k, e[id + 1]);
    SeparatedSeries u(f.m(), f.n(), f.Mt(), f.D());
    for (auto &[e, c] : fb.terms()) {
        SeparatedSeries::Exps g = e;
        g[id + 1] -= k;
        u.add_term(g, c);
    }
    return u.is_unit() ? k : -1;
}

bool is_regular(const SeparatedSeries &f, int id, int d) { return regular_degree(f, id) == d; }

WDivision w_divide(const SeparatedSeries &g, const SeparatedSeries &f, int id, int d) {
    if (f.is_zero()) throw ZeroSeries("division by the zero series");
    if (!is_regular(f, id, d)) throw NotRegular("divisor is not regular of degree " + std::to_string(d));
    SeparatedSeries fb = reg_image(f, id);
    SeparatedSeries unit_inv;
    if (f.is_rho(id)) {
        SeparatedSeries u(f.m(), f.n(), f.Mt(), f.D());
        for (auto &[e, c] : fb.terms()) {
            SeparatedSeries::Exps x = e;
            x[id + 1] -= d;
            u.add_term(x, c);
        }
        unit_inv = u.inverse();
    }
    SeparatedSeries h = f - fb;
    SeparatedSeries Gk = g;
    SeparatedSeries q(g.m(), g.n(), std::min(g.Mt(), f.Mt()), std::min(g.D(), f.D()));
    SeparatedSeries r = q;
    int bound = step_bound(f) + step_bound(g);
    for (int step = 0; !Gk.is_zero(); ++step) {
        if (step > bound) throw TruncationTooSmall("division iteration did not stabilize within the truncation");
        SeparatedSeries Q, R;
        base_divide(Gk, fb, unit_inv, id, d, Q, R);
        q = q + Q;
        r = r + R;
        Gk = -(Q * h);
    }
    q.set_exact(g.exact() && f.exact());
    r.set_exact(g.exact() && f.exact());
    return {q, r};
}

WPreparation w_prepare(const SeparatedSeries &f, int id) {
    if (f.is_zero()) throw ZeroSeries("cannot prepare the zero series");
    int d = regular_degree(f, id);
    if (d < 0) throw NotRegular("series is not regular in the requested variable");
    SeparatedSeries zd = monomial_var(f, id, d);
    auto [q, r] = w_divide(zd, f, id, d);
    WPreparation out;
    out.d = d;
    out.P = zd - r;
    if (!q.is_unit()) throw NotRegular("preparation quotient is not a unit");
    // f = u P, and dividing f by the monic P is cheaper than inverting q
    out.u = w_divide(f, out.P, id, d).q;
    out.P.set_exact(f.exact());
    out.u.set_exact(f.exact());
    return out;
}

// ---------------------------------------------------------------- dominant terms

std::vector<DominantTerm> dominant_terms(const SeparatedSeries &F, const std::vector<bool> &inner) {
    if (F.is_zero()) throw ZeroSeries("dominant terms of the zero series");
    if (static_cast<int>(inner.size()) != F.nvars()) throw std::invalid_argument("variable split has wrong length");
    std::vector<int> ids;
    for (int i = 0; i < F.nvars(); ++i)
        if (inner[i]) ids.push_back(i);
    std::map<std::vector<int>, SeparatedSeries> groups;
    for (auto &[e, c] : F.terms()) {
        std::vector<int> key;
        SeparatedSeries::Exps rest = e;
        for (int i : ids) {
            key.push_back(e[i + 1]);
            rest[i + 1] = 0;
        }
        auto it = groups.try_emplace(key, SeparatedSeries(F.m(), F.n(), F.Mt(), F.D(), F.exact())).first;
        it->second.add_term(rest, c);
    }
    std::vector<std::pair<std::vector<int>, SeparatedSeries>> order(groups.begin(), groups.end());
    std::stable_sort(order.begin(), order.end(), [](auto &a, auto &b) {
        int da = 0, db = 0;
        for (int x : a.first) da += x;
        for (int x : b.first) db += x;
        return da < db;
    });
    std::vector<DominantTerm> out;
    SeparatedSeries one = SeparatedSeries::constant(F.m(), F.n(), 1, F.Mt(), F.D());
    for (auto &[key, coeff] : order) {
        bool absorbed = false;
        for (auto &dt : out) {
            bool below = true, rho_step = false;
            for (size_t k = 0; k < key.size(); ++k) {
                if (dt.index[k] > key[k]) below = false;
                if (key[k] > dt.index[k] && F.is_rho(ids[k])) rho_step = true;
            }
            if (!below || !dt.coeff.is_unit()) continue;
            SeparatedSeries c = coeff * dt.coeff.inverse();
            if (!rho_step && !c.reduce(true, {}).is_zero()) continue;
            SeparatedSeries mono = one;
            for (size_t k = 0; k < key.size(); ++k) mono = mono * monomial_var(F, ids[k], key[k] - dt.index[k]);
            dt.unit = dt.unit + c * mono;
            absorbed = true;
            break;
        }
        if (!absorbed) out.push_back({key, coeff, one});
    }
    for (auto &dt : out)
        if (!dt.unit.is_unit()) throw std::logic_error("dominant term factor is not a unit");
    return out;
}

// ---------------------------------------------------------------- preregularization

Preregularization preregularize(const SeparatedSeries &f) {
    if (f.is_zero()) throw ZeroSeries("cannot preregularize the zero series");
    if (f.n() != 0) throw std::invalid_argument("preregularize expects xi variables only");
    int m = f.m();
    Preregularization out;
    out.c.assign(std::max(m - 1, 0), 0);
    if (m == 0) {
        out.image = f;
        return out;
    }
    int d = regular_degree(f, m - 1);
    if (d >= 0) {
        out.d = d;
        out.image = f;
        return out;
    }
    int deg = f.reduce(true, {}).to_mpoly().total_degree();
    for (int c = 1; c <= deg + 2; ++c) {
        std::vector<SeparatedSeries> alphas;
        std::vector<int> cs;
        long ci = 1;
        for (int i = m - 2; i >= 0; --i) {
            ci *= c;
            cs.insert(cs.begin(), static_cast<int>(ci));
        }
        for (int i = 0; i < m; ++i) {
            SeparatedSeries a = SeparatedSeries::var(m, 0, i, f.Mt(), f.D());
            if (i < m - 1) a = a + SeparatedSeries::var(m, 0, m - 1, f.Mt(), f.D()).pow(cs[i]);
            alphas.push_back(a);
        }
        SeparatedSeries g = compose(f, alphas, {});
        int dg = regular_degree(g, m - 1);
        if (dg >= 0) {
            out.c = cs;
            out.d = dg;
            out.image = g;
            return out;
        }
    }
    throw NotRegular("no change of variables makes the series regular (leading coefficient is not a unit)");
}

} // namespace padint

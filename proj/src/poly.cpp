#include "padint/poly.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "padint/errors.hpp"

namespace padint {

mpz_class ipow(const mpz_class &b, unsigned long e) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

long vp(const mpz_class &x, const mpz_class &p) {
    if (x == 0) throw InsufficientPrecision("valuation of zero");
    mpz_class y = x;
    long v = 0;
    while (mpz_divisible_p(y.get_mpz_t(), p.get_mpz_t())) {
        y /= p;
        ++v;
    }
    return v;
}

long vp(const mpq_class &x, const mpz_class &p) {
    return vp(x.get_num(), p) - vp(x.get_den(), p);
}

// ---------------------------------------------------------------- UPoly

UPoly::UPoly(std::vector<mpq_class> c) : c_(std::move(c)) { trim(); }

UPoly UPoly::constant(const mpq_class &c) { return UPoly({c}); }

UPoly UPoly::monomial(const mpq_class &c, int deg) {
    std::vector<mpq_class> v(deg + 1, 0);
    v[deg] = c;
    return UPoly(v);
}

UPoly UPoly::from_ints(const std::vector<long> &c) {
    std::vector<mpq_class> v;
    for (long x : c) v.emplace_back(x);
    return UPoly(v);
}

void UPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

mpq_class UPoly::coeff(int i) const {
    if (i < 0 || i >= static_cast<int>(c_.size())) return 0;
    return c_[i];
}

mpq_class UPoly::lead() const { return c_.empty() ? mpq_class(0) : c_.back(); }

UPoly UPoly::operator+(const UPoly &o) const {
    std::vector<mpq_class> r(std::max(c_.size(), o.c_.size()), 0);
    for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
    for (size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
    return UPoly(r);
}

UPoly UPoly::operator-(const UPoly &o) const { return *this + (-o); }

UPoly UPoly::operator-() const {
    std::vector<mpq_class> r = c_;
    for (auto &x : r) x = -x;
    return UPoly(r);
}

UPoly UPoly::operator*(const UPoly &o) const {
    if (is_zero() || o.is_zero()) return UPoly();
    std::vector<mpq_class> r(c_.size() + o.c_.size() - 1, 0);
    for (size_t i = 0; i < c_.size(); ++i)
        for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return UPoly(r);
}

UPoly UPoly::operator*(const mpq_class &s) const {
    std::vector<mpq_class> r = c_;
    for (auto &x : r) x *= s;
    return UPoly(r);
}

UPoly UPoly::derivative() const {
    std::vector<mpq_class> r;
    for (size_t i = 1; i < c_.size(); ++i) r.push_back(c_[i] * mpq_class(static_cast<long>(i)));
    return UPoly(r);
}

mpq_class UPoly::eval(const mpq_class &x) const {
    mpq_class r = 0;
    for (size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
    return r;
}

UPoly UPoly::shift(const mpq_class &c) const {
    // Horner in polynomial arithmetic.
    UPoly r;
    UPoly lin({c, mpq_class(1)});
    for (size_t i = c_.size(); i-- > 0;) r = r * lin + UPoly::constant(c_[i]);
    return r;
}

UPoly UPoly::scale(const mpq_class &c) const {
    std::vector<mpq_class> r = c_;
    mpq_class f = 1;
    for (auto &x : r) {
        x *= f;
        f *= c;
    }
    return UPoly(r);
}

UPoly UPoly::monic() const {
    if (is_zero()) return *this;
    return *this * mpq_class(1 / lead());
}

UPoly UPoly::primitive() const {
    if (is_zero()) return *this;
    mpz_class l = 1;
    for (auto &x : c_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den().get_mpz_t());
    std::vector<mpq_class> r;
    mpz_class g = 0;
    for (auto &x : c_) {
        mpq_class y = x * l;
        r.push_back(y);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), y.get_num().get_mpz_t());
    }
    if (lead() < 0) g = -g;
    for (auto &x : r) x /= g;
    return UPoly(r);
}

UPoly UPoly::compose(const UPoly &g) const {
    UPoly r;
    for (size_t i = c_.size(); i-- > 0;) r = r * g + UPoly::constant(c_[i]);
    return r;
}

std::string UPoly::str(const std::string &var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (size_t i = c_.size(); i-- > 0;) {
        if (c_[i] == 0) continue;
        mpq_class a = c_[i];
        bool neg = a < 0;
        if (neg) a = -a;
        if (first) {
            if (neg) os << "-";
        } else {
            os << (neg ? " - " : " + ");
        }
        first = false;
        if (i == 0 || a != 1) {
            os << a.get_str();
            if (i > 0) os << "*";
        }
        if (i > 0) {
            os << var;
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

void divmod(const UPoly &a, const UPoly &b, UPoly &q, UPoly &r) {
    if (b.is_zero()) throw ZeroPolynomial("division by zero polynomial");
    std::vector<mpq_class> rem = a.coeffs();
    int db = b.degree();
    std::vector<mpq_class> quo(std::max(0, a.degree() - db + 1), 0);
    for (int i = a.degree(); i >= db; --i) {
        if (rem[i] == 0) continue;
        mpq_class c = rem[i] / b.lead();
        quo[i - db] = c;
        for (int j = 0; j <= db; ++j) rem[i - db + j] -= c * b.coeff(j);
    }
    q = UPoly(quo);
    r = UPoly(rem);
}

UPoly gcd(const UPoly &a, const UPoly &b) {
    UPoly x = a, y = b;
    while (!y.is_zero()) {
        UPoly q, r;
        divmod(x, y, q, r);
        x = y;
        y = r;
    }
    return x.is_zero() ? x : x.monic();
}

std::vector<std::pair<UPoly, int>> squarefree_decomposition(const UPoly &f) {
    if (f.is_zero()) throw ZeroPolynomial("squarefree decomposition of zero");
    std::vector<std::pair<UPoly, int>> out;
    if (f.degree() == 0) return out;
    // Yun's algorithm.
    UPoly fm = f.monic();
    UPoly a = gcd(fm, fm.derivative());
    UPoly q, r;
    divmod(fm, a, q, r);
    UPoly b = q;
    UPoly c;
    divmod(fm.derivative(), a, c, r);
    UPoly d = c - b.derivative();
    int i = 1;
    while (b.degree() > 0) {
        UPoly g = gcd(b, d);
        if (g.degree() > 0) out.push_back({g, i});
        UPoly nb, nc;
        divmod(b, g, nb, r);
        divmod(d, g, nc, r);
        b = nb;
        d = nc - b.derivative();
        ++i;
    }
    return out;
}

bool is_squarefree(const UPoly &f) {
    if (f.is_zero()) return false;
    return gcd(f, f.derivative()).degree() <= 0;
}

namespace {

std::vector<mpz_class> divisors(mpz_class n) {
    if (n < 0) n = -n;
    std::vector<std::pair<mpz_class, int>> fac;
    mpz_class m = n;
    for (mpz_class d = 2; d * d <= m; ++d) {
        int e = 0;
        while (m % d == 0) {
            m /= d;
            ++e;
        }
        if (e) fac.push_back({d, e});
    }
    if (m > 1) fac.push_back({m, 1});
    std::vector<mpz_class> ds{1};
    for (auto &[pr, e] : fac) {
        std::vector<mpz_class> nd;
        for (auto &d : ds) {
            mpz_class x = d;
            for (int k = 0; k <= e; ++k) {
                nd.push_back(x);
                x *= pr;
            }
        }
        ds = nd;
    }
    return ds;
}

} // namespace

std::vector<mpq_class> rational_roots(const UPoly &f) {
    if (f.is_zero()) throw ZeroPolynomial("roots of zero polynomial");
    std::vector<mpq_class> roots;
    UPoly g = f.primitive();
    int low = 0;
    while (g.coeff(low) == 0) ++low;
    if (low > 0) {
        roots.push_back(0);
        g = UPoly(std::vector<mpq_class>(g.coeffs().begin() + low, g.coeffs().end()));
    }
    if (g.degree() <= 0) return roots;
    auto num = divisors(g.coeff(0).get_num());
    auto den = divisors(g.lead().get_num());
    std::set<mpq_class> seen;
    for (auto &a : num)
        for (auto &b : den)
            for (int s : {1, -1}) {
                mpq_class c(a * s, b);
                c.canonicalize();
                if (seen.count(c)) continue;
                seen.insert(c);
                if (g.eval(c) == 0) roots.push_back(c);
            }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::vector<UPoly> coprime_basis(const std::vector<UPoly> &fs) {
    std::vector<UPoly> basis;
    for (auto &f : fs) {
        if (f.is_zero()) throw ZeroPolynomial("coprime basis of zero");
        for (auto &[g, m] : squarefree_decomposition(f)) basis.push_back(g.monic());
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < basis.size() && !changed; ++i)
            for (size_t j = i + 1; j < basis.size() && !changed; ++j) {
                UPoly g = gcd(basis[i], basis[j]);
                if (g.degree() <= 0) continue;
                UPoly a, b, r;
                divmod(basis[i], g, a, r);
                divmod(basis[j], g, b, r);
                std::vector<UPoly> nb;
                for (size_t k = 0; k < basis.size(); ++k)
                    if (k != i && k != j) nb.push_back(basis[k]);
                for (auto &h : {a, b, g})
                    if (h.degree() > 0) nb.push_back(h.monic());
                basis = nb;
                changed = true;
            }
    }
    std::sort(basis.begin(), basis.end(), [](const UPoly &a, const UPoly &b) {
        if (a.degree() != b.degree()) return a.degree() < b.degree();
        return a.str() < b.str();
    });
    return basis;
}

mpq_class resultant(const UPoly &f, const UPoly &g) {
    if (f.is_zero() || g.is_zero()) return 0;
    UPoly a = f, b = g;
    mpq_class res = 1;
    while (true) {
        int da = a.degree(), db = b.degree();
        if (db == 0) {
            mpq_class l = b.lead();
            mpq_class pw = 1;
            for (int i = 0; i < da; ++i) pw *= l;
            return res * pw;
        }
        UPoly q, r;
        divmod(a, b, q, r);
        if (r.is_zero()) return 0;
        int dr = r.degree();
        if ((da * db) % 2 == 1) res = -res;
        mpq_class l = b.lead();
        for (int i = 0; i < da - dr; ++i) res *= l;
        a = b;
        b = r;
    }
}

// ---------------------------------------------------------------- MPoly

MPoly MPoly::constant(int nvars, const mpz_class &c) {
    MPoly r(nvars);
    r.add_term(Exps(nvars + 1, 0), c);
    return r;
}

MPoly MPoly::var(int nvars, int i) {
    MPoly r(nvars);
    Exps e(nvars + 1, 0);
    e[i] = 1;
    r.add_term(e, 1);
    return r;
}

MPoly MPoly::uniformizer(int nvars) { return var(nvars, 0); }

void MPoly::add_term(const Exps &e, const mpz_class &c) {
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

MPoly MPoly::operator+(const MPoly &o) const {
    int n = std::max(nvars_, o.nvars_);
    MPoly r = with_nvars(n);
    for (auto &[e, c] : o.with_nvars(n).terms_) r.add_term(e, c);
    return r;
}

MPoly MPoly::operator-() const {
    MPoly r(nvars_);
    for (auto &[e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

MPoly MPoly::operator-(const MPoly &o) const { return *this + (-o); }

MPoly MPoly::operator*(const MPoly &o) const {
    int n = std::max(nvars_, o.nvars_);
    MPoly a = with_nvars(n), b = o.with_nvars(n);
    MPoly r(n);
    for (auto &[e1, c1] : a.terms_)
        for (auto &[e2, c2] : b.terms_) {
            Exps e(n + 1);
            for (int i = 0; i <= n; ++i) e[i] = e1[i] + e2[i];
            r.add_term(e, c1 * c2);
        }
    return r;
}

MPoly MPoly::pow(int k) const {
    MPoly r = constant(nvars_, 1);
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
}

int MPoly::degree_in(int var) const {
    int d = 0;
    for (auto &[e, c] : terms_) d = std::max(d, e[var]);
    return d;
}

int MPoly::total_degree() const {
    int d = 0;
    for (auto &[e, c] : terms_) {
        int s = 0;
        for (int i = 1; i <= nvars_; ++i) s += e[i];
        d = std::max(d, s);
    }
    return d;
}

MPoly MPoly::coeff_in(int var, int k) const {
    MPoly r(nvars_);
    for (auto &[e, c] : terms_)
        if (e[var] == k) {
            Exps f = e;
            f[var] = 0;
            r.add_term(f, c);
        }
    return r;
}

MPoly MPoly::specialize_t(const mpz_class &p) const {
    MPoly r(nvars_);
    for (auto &[e, c] : terms_) {
        Exps f = e;
        f[0] = 0;
        r.add_term(f, c * ipow(p, e[0]));
    }
    return r;
}

MPoly MPoly::reduce_mod(const mpz_class &m) const {
    MPoly r(nvars_);
    for (auto &[e, c] : terms_) {
        mpz_class x = c % m;
        if (x < 0) x += m;
        r.add_term(e, x);
    }
    return r;
}

mpz_class MPoly::eval(const mpz_class &t, const std::vector<mpz_class> &x) const {
    mpz_class s = 0;
    for (auto &[e, c] : terms_) {
        mpz_class m = c * ipow(t, e[0]);
        for (int i = 1; i <= nvars_; ++i) m *= ipow(x[i - 1], e[i]);
        s += m;
    }
    return s;
}

UPoly MPoly::to_upoly(int var) const {
    std::vector<mpq_class> c(degree_in(var) + 1, 0);
    for (auto &[e, k] : terms_) {
        for (int i = 0; i <= nvars_; ++i)
            if (i != var && e[i] != 0)
                throw UnsupportedSplit("polynomial is not univariate");
        c[e[var]] += k;
    }
    return UPoly(c);
}

MPoly MPoly::with_nvars(int n) const {
    if (n == nvars_) return *this;
    MPoly r(n);
    for (auto &[e, c] : terms_) {
        Exps f(n + 1, 0);
        for (int i = 0; i <= std::min(n, nvars_); ++i) f[i] = e[i];
        for (int i = n + 1; i <= nvars_; ++i)
            if (e[i] != 0) throw std::invalid_argument("dropping a used variable");
        r.add_term(f, c);
    }
    return r;
}

MPoly MPoly::permuted(const std::vector<int> &perm) const {
    MPoly r(nvars_);
    for (auto &[e, c] : terms_) {
        Exps f(nvars_ + 1, 0);
        f[0] = e[0];
        for (int i = 1; i <= nvars_; ++i) f[perm[i - 1]] = e[i];
        r.add_term(f, c);
    }
    return r;
}

std::string MPoly::str(const std::vector<std::string> &names, const std::string &tname) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto &[e, c0] = *it;
        mpz_class c = c0;
        bool neg = c < 0;
        if (neg) c = -c;
        if (first) {
            if (neg) os << "-";
        } else {
            os << (neg ? " - " : " + ");
        }
        first = false;
        std::vector<std::string> parts;
        if (c != 1) parts.push_back(c.get_str());
        for (int i = 0; i <= nvars_; ++i) {
            if (e[i] == 0) continue;
            std::string nm = i == 0 ? tname
                                    : (i - 1 < static_cast<int>(names.size()) ? names[i - 1]
                                                                               : "x" + std::to_string(i));
            parts.push_back(e[i] == 1 ? nm : nm + "^" + std::to_string(e[i]));
        }
        if (parts.empty()) parts.push_back("1");
        for (size_t k = 0; k < parts.size(); ++k) os << (k ? "*" : "") << parts[k];
    }
    return os.str();
}

// ---------------------------------------------------------------- parser

namespace {

struct PolyParser {
    std::string s;
    size_t i = 0;
    std::vector<std::string> names;
    int nv = 0;

    void ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    [[noreturn]] void fail(const std::string &msg) {
        throw SyntaxError(msg + " at position " + std::to_string(i) + " in \"" + s + "\"");
    }
    MPoly expr() {
        ws();
        MPoly r = term();
        while (true) {
            ws();
            if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
                char op = s[i++];
                MPoly t = term();
                r = op == '+' ? r + t : r - t;
            } else {
                return r;
            }
        }
    }
    MPoly term() {
        MPoly r = unary();
        while (true) {
            ws();
            if (i < s.size() && s[i] == '*') {
                ++i;
                r = r * unary();
            } else {
                return r;
            }
        }
    }
    MPoly unary() {
        ws();
        if (i < s.size() && s[i] == '-') {
            ++i;
            return -unary();
        }
        if (i < s.size() && s[i] == '+') {
            ++i;
            return unary();
        }
        return power();
    }
    MPoly power() {
        MPoly b = atom();
        ws();
        if (i < s.size() && s[i] == '^') {
            ++i;
            ws();
            size_t st = i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            if (st == i) fail("expected exponent");
            return b.pow(std::stoi(s.substr(st, i - st)));
        }
        return b;
    }
    MPoly atom() {
        ws();
        if (i >= s.size()) fail("unexpected end of input");
        if (s[i] == '(') {
            ++i;
            MPoly r = expr();
            ws();
            if (i >= s.size() || s[i] != ')') fail("expected ')'");
            ++i;
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(s[i]))) {
            size_t st = i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            return MPoly::constant(nv, mpz_class(s.substr(st, i - st)));
        }
        if (std::isalpha(static_cast<unsigned char>(s[i])) || s[i] == '_') {
            size_t st = i;
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
            std::string id = s.substr(st, i - st);
            if (id == "p" || id == "t") return MPoly::uniformizer(nv);
            auto it = std::find(names.begin(), names.end(), id);
            if (it == names.end()) fail("unknown variable '" + id + "'");
            return MPoly::var(nv, static_cast<int>(it - names.begin()) + 1);
        }
        fail(std::string("unexpected character '") + s[i] + "'");
    }
};

std::vector<std::string> scan_identifiers(const std::string &s) {
    std::set<std::string> ids;
    for (size_t i = 0; i < s.size();) {
        if (std::isalpha(static_cast<unsigned char>(s[i])) || s[i] == '_') {
            size_t st = i;
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
            std::string id = s.substr(st, i - st);
            if (id != "p" && id != "t") ids.insert(id);
        } else {
            ++i;
        }
    }
    return {ids.begin(), ids.end()};
}

} // namespace

ParsedPoly parse_poly(const std::string &src, const std::vector<std::string> &names) {
    PolyParser ps;
    ps.s = src;
    ps.names = names.empty() ? scan_identifiers(src) : names;
    ps.nv = static_cast<int>(ps.names.size());
    MPoly r = ps.expr();
    ps.ws();
    if (ps.i != src.size()) ps.fail("trailing input");
    return {r.with_nvars(ps.nv), ps.names};
}

} // namespace padint

#include "padint/residue.hpp"

#include <algorithm>
#include <sstream>

#include "padint/errors.hpp"

namespace padint {

namespace {

void strip(ResPoly::Exps &e) {
    while (!e.empty() && e.back() == 0) e.pop_back();
}

long powmod(long b, long e, long q) {
    long r = 1 % q;
    b %= q;
    if (b < 0) b += q;
    while (e > 0) {
        if (e & 1) r = r * b % q;
        b = b * b % q;
        e >>= 1;
    }
    return r;
}

long invmod(long a, long q) {
    a %= q;
    if (a < 0) a += q;
    if (a == 0) throw std::domain_error("residue denominator vanishes modulo q");
    return powmod(a, q - 2, q);
}

} // namespace

std::vector<std::string> default_res_names(int n) {
    std::vector<std::string> r;
    for (int i = 0; i < n; ++i) r.push_back("r" + std::to_string(i));
    return r;
}

// ---------------------------------------------------------------- ResPoly

ResPoly ResPoly::constant(const mpq_class &c) {
    ResPoly r;
    r.add_term({}, c);
    return r;
}

ResPoly ResPoly::var(int i) {
    ResPoly r;
    Exps e(i + 1, 0);
    e[i] = 1;
    r.add_term(e, 1);
    return r;
}

bool ResPoly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

mpq_class ResPoly::constant_term() const {
    auto it = terms_.find({});
    return it == terms_.end() ? mpq_class(0) : it->second;
}

int ResPoly::max_var() const {
    int m = -1;
    for (auto &[e, c] : terms_) m = std::max(m, static_cast<int>(e.size()) - 1);
    return m;
}

int ResPoly::degree_in(int v) const {
    int d = 0;
    for (auto &[e, c] : terms_)
        if (v < static_cast<int>(e.size())) d = std::max(d, e[v]);
    return d;
}

void ResPoly::add_term(Exps e, const mpq_class &c) {
    if (c == 0) return;
    strip(e);
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

ResPoly ResPoly::operator+(const ResPoly &o) const {
    ResPoly r = *this;
    for (auto &[e, c] : o.terms_) r.add_term(e, c);
    return r;
}

ResPoly ResPoly::operator-() const {
    ResPoly r;
    for (auto &[e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

ResPoly ResPoly::operator-(const ResPoly &o) const { return *this + (-o); }

ResPoly ResPoly::operator*(const ResPoly &o) const {
    ResPoly r;
    for (auto &[e1, c1] : terms_)
        for (auto &[e2, c2] : o.terms_) {
            Exps e(std::max(e1.size(), e2.size()), 0);
            for (size_t i = 0; i < e1.size(); ++i) e[i] += e1[i];
            for (size_t i = 0; i < e2.size(); ++i) e[i] += e2[i];
            r.add_term(e, c1 * c2);
        }
    return r;
}

ResPoly ResPoly::pow(int k) const {
    ResPoly r = constant(1);
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
}

ResPoly ResPoly::derivative(int v) const {
    ResPoly r;
    for (auto &[e, c] : terms_) {
        if (v >= static_cast<int>(e.size()) || e[v] == 0) continue;
        Exps f = e;
        f[v] -= 1;
        r.add_term(f, c * e[v]);
    }
    return r;
}

ResPoly ResPoly::coeff_in(int v, int k) const {
    ResPoly r;
    for (auto &[e, c] : terms_) {
        int d = v < static_cast<int>(e.size()) ? e[v] : 0;
        if (d != k) continue;
        Exps f = e;
        if (v < static_cast<int>(f.size())) f[v] = 0;
        r.add_term(f, c);
    }
    return r;
}

ResPoly ResPoly::substitute(int v, const ResPoly &s) const {
    ResPoly r;
    for (int k = 0; k <= degree_in(v); ++k) {
        ResPoly c = coeff_in(v, k);
        if (!c.is_zero()) r = r + c * s.pow(k);
    }
    return r;
}

ResPoly ResPoly::renamed(const std::vector<int> &map) const {
    ResPoly r;
    for (auto &[e, c] : terms_) {
        Exps f;
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            int j = map.at(i);
            if (static_cast<int>(f.size()) <= j) f.resize(j + 1, 0);
            f[j] += e[i];
        }
        r.add_term(f, c);
    }
    return r;
}

long ResPoly::eval_mod(const std::vector<long> &vals, long q) const {
    long s = 0;
    for (auto &[e, c] : terms_) {
        long num = mpz_class(c.get_num() % q).get_si();
        long den = mpz_class(c.get_den() % q).get_si();
        long t = num * invmod(den, q) % q;
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i]) t = t * powmod(vals.at(i), e[i], q) % q;
        s = (s + t) % q;
    }
    if (s < 0) s += q;
    return s;
}

ResPoly ResPoly::primitive() const {
    if (terms_.empty()) return *this;
    mpz_class l = 1, g = 0;
    for (auto &[e, c] : terms_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den().get_mpz_t());
    for (auto &[e, c] : terms_) {
        mpz_class n = mpq_class(c * l).get_num();
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
    }
    mpq_class f(l, g);
    if (terms_.rbegin()->second < 0) f = -f;
    ResPoly r;
    for (auto &[e, c] : terms_) r.terms_.emplace(e, c * f);
    return r;
}

std::string ResPoly::str(const std::vector<std::string> &names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        mpq_class c = it->second;
        bool neg = c < 0;
        if (neg) c = -c;
        os << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
        first = false;
        std::vector<std::string> parts;
        if (c != 1 || it->first.empty()) parts.push_back(c.get_str());
        for (size_t i = 0; i < it->first.size(); ++i) {
            int d = it->first[i];
            if (!d) continue;
            std::string nm = i < names.size() ? names[i] : "r" + std::to_string(i);
            parts.push_back(d == 1 ? nm : nm + "^" + std::to_string(d));
        }
        for (size_t k = 0; k < parts.size(); ++k) os << (k ? "*" : "") << parts[k];
    }
    return os.str();
}

// ---------------------------------------------------------------- formulas

ResidueFormula::ResidueFormula(int nvars, std::vector<ResAtom> atoms) : nvars_(nvars), atoms_(std::move(atoms)) {
    normalize();
}

void ResidueFormula::normalize() {
    std::vector<ResAtom> out;
    bool falsum = false;
    for (auto &a : atoms_) {
        if (a.poly.max_var() >= nvars_) nvars_ = a.poly.max_var() + 1;
        if (a.poly.is_constant()) {
            bool zero = a.poly.is_zero();
            if (a.eq != zero) falsum = true;
            continue;
        }
        out.push_back({a.poly.primitive(), a.eq});
    }
    if (falsum) {
        atoms_ = {{ResPoly::constant(1), true}};
        return;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    atoms_ = out;
}

bool ResidueFormula::is_false() const {
    return atoms_.size() == 1 && atoms_[0].eq && atoms_[0].poly.is_constant();
}

ResidueFormula ResidueFormula::conj(const ResidueFormula &o) const {
    std::vector<ResAtom> a = atoms_;
    a.insert(a.end(), o.atoms_.begin(), o.atoms_.end());
    return ResidueFormula(std::max(nvars_, o.nvars_), a);
}

ResidueFormula ResidueFormula::with_atom(const ResPoly &p, bool eq) const {
    std::vector<ResAtom> a = atoms_;
    a.push_back({p, eq});
    return ResidueFormula(nvars_, a);
}

ResidueFormula ResidueFormula::with_nvars(int n) const {
    ResidueFormula r = *this;
    r.nvars_ = std::max(n, nvars_);
    return r;
}

bool ResidueFormula::holds(const std::vector<long> &vals, long q) const {
    for (auto &a : atoms_) {
        bool z = a.poly.eval_mod(vals, q) == 0;
        if (z != a.eq) return false;
    }
    return true;
}

mpz_class ResidueFormula::count(long q) const {
    if (is_false()) return 0;
    if (atoms_.empty()) {
        mpz_class r;
        mpz_ui_pow_ui(r.get_mpz_t(), q, nvars_);
        return r;
    }
    if (nvars_ > 4) throw TooManyVariables("residue formula has " + std::to_string(nvars_) + " variables");
    std::vector<long> v(nvars_, 0);
    long total = 1;
    for (int i = 0; i < nvars_; ++i) total *= q;
    mpz_class cnt = 0;
    for (long idx = 0; idx < total; ++idx) {
        long t = idx;
        for (int i = 0; i < nvars_; ++i) {
            v[i] = t % q;
            t /= q;
        }
        if (holds(v, q)) ++cnt;
    }
    return cnt;
}

ResidueFormula ResidueFormula::compact(int &dropped) const {
    std::vector<bool> used(nvars_, false);
    for (auto &a : atoms_)
        for (auto &[e, c] : a.poly.terms())
            for (size_t i = 0; i < e.size(); ++i)
                if (e[i]) used[i] = true;
    std::vector<int> map(nvars_, -1);
    int k = 0;
    for (int i = 0; i < nvars_; ++i)
        if (used[i]) map[i] = k++;
    dropped = nvars_ - k;
    std::vector<ResAtom> na;
    for (auto &a : atoms_) na.push_back({a.poly.renamed(map), a.eq});
    return ResidueFormula(k, na);
}

std::string ResidueFormula::key() const {
    std::ostringstream os;
    os << nvars_ << ":";
    auto names = default_res_names(nvars_);
    for (auto &a : atoms_) os << a.poly.str(names) << (a.eq ? "=0;" : "!=0;");
    return os.str();
}

std::string ResidueFormula::str() const {
    auto names = default_res_names(nvars_);
    std::ostringstream os;
    os << "[";
    if (atoms_.empty()) os << "true";
    for (size_t i = 0; i < atoms_.size(); ++i) {
        if (i) os << " & ";
        os << atoms_[i].poly.str(names) << (atoms_[i].eq ? " = 0" : " != 0");
    }
    os << "]";
    if (nvars_ > 0) {
        os << "_{";
        for (int i = 0; i < nvars_; ++i) os << (i ? "," : "") << names[i];
        os << "}";
    }
    return os.str();
}

} // namespace padint

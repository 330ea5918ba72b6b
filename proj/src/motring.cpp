#include "padint/motring.hpp"

#include <algorithm>
#include <sstream>

#include "padint/errors.hpp"

#include <nlohmann/json.hpp>

namespace padint {

namespace {

long floor_div(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::vector<std::pair<DenFactor, int>> merge_den(const std::vector<std::pair<DenFactor, int>> &x,
                                                 const std::vector<std::pair<DenFactor, int>> &y) {
    std::map<DenFactor, int> m;
    for (auto &[f, k] : x) m[f] += k;
    for (auto &[f, k] : y) m[f] += k;
    std::vector<std::pair<DenFactor, int>> r;
    for (auto &[f, k] : m)
        if (k) r.push_back({f, k});
    return r;
}

mpq_class qpow(long q, long e) {
    mpz_class b;
    mpz_ui_pow_ui(b.get_mpz_t(), q, static_cast<unsigned long>(e < 0 ? -e : e));
    return e < 0 ? mpq_class(mpz_class(1), b) : mpq_class(b);
}

mpq_class rpow(const mpq_class &x, long e) {
    mpq_class r = 1;
    mpq_class b = e < 0 ? mpq_class(1 / x) : x;
    for (long i = 0; i < (e < 0 ? -e : e); ++i) r *= b;
    return r;
}

std::string mono_str(const mpq_class &c0, const MonoKey &k, const std::map<std::string, ResidueFormula> &forms,
                     bool leading) {
    mpq_class c = c0;
    bool neg = c < 0;
    if (neg) c = -c;
    std::vector<std::string> parts;
    for (auto &f : k.forms) parts.push_back(forms.at(f).str());
    if (k.eL != 0) parts.push_back(k.eL == 1 ? "q" : "q^" + std::to_string(k.eL));
    if (k.eT != 0) parts.push_back(k.eT == 1 ? "T" : "T^" + std::to_string(k.eT));
    std::string body;
    if (c != 1 || parts.empty()) body = c.get_str();
    for (auto &p : parts) body += (body.empty() ? "" : " ") + p;
    std::string sign = leading ? (neg ? "-" : "") : (neg ? " - " : " + ");
    return sign + body;
}

} // namespace

MotElem MotElem::constant(const mpq_class &c) {
    MotElem r;
    r.add_term(MonoKey{}, c);
    return r;
}

MotElem MotElem::L(long e) { return monomial(1, e, 0); }
MotElem MotElem::T(long e) { return monomial(1, 0, e); }

MotElem MotElem::monomial(const mpq_class &c, long eL, long eT) {
    MotElem r;
    MonoKey k;
    k.eL = eL;
    k.eT = eT;
    r.add_term(k, c);
    return r;
}

MotElem MotElem::formula(const ResidueFormula &f) {
    MotElem r;
    if (f.is_false()) return r;
    MonoKey k;
    k.forms = {f.key()};
    r.forms_[f.key()] = f;
    r.add_term(k, 1);
    return r;
}

MotElem MotElem::inv_one_minus(long a, long b) {
    if (a == 0 && b == 0) throw Divergent("1/(1 - 1)");
    MotElem r;
    MonoKey k;
    if (a < 0 || (a == 0 && b > 0)) {
        k.eL = -b;
        k.eT = -a;
        k.den = {{{-a, -b}, 1}};
        r.add_term(k, -1);
    } else {
        k.den = {{{a, b}, 1}};
        r.add_term(k, 1);
    }
    return r;
}

void MotElem::add_term(const MonoKey &k, const mpq_class &c) {
    if (c == 0) return;
    auto it = terms_.find(k);
    if (it == terms_.end()) {
        terms_.emplace(k, c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

MotElem MotElem::operator+(const MotElem &o) const {
    MotElem r = *this;
    r += o;
    return r;
}

MotElem &MotElem::operator+=(const MotElem &o) {
    for (auto &[k, f] : o.forms_) forms_.emplace(k, f);
    for (auto &[k, c] : o.terms_) add_term(k, c);
    return *this;
}

MotElem MotElem::operator-() const { return *this * mpq_class(-1); }
MotElem MotElem::operator-(const MotElem &o) const { return *this + (-o); }

MotElem MotElem::operator*(const mpq_class &c) const {
    MotElem r;
    if (c == 0) return r;
    r.forms_ = forms_;
    for (auto &[k, v] : terms_) r.terms_.emplace(k, v * c);
    return r;
}

MotElem MotElem::operator*(const MotElem &o) const {
    MotElem r;
    r.forms_ = forms_;
    for (auto &[k, f] : o.forms_) r.forms_.emplace(k, f);
    for (auto &[k1, c1] : terms_)
        for (auto &[k2, c2] : o.terms_) {
            MonoKey k;
            k.forms = k1.forms;
            k.forms.insert(k.forms.end(), k2.forms.begin(), k2.forms.end());
            std::sort(k.forms.begin(), k.forms.end());
            k.eL = k1.eL + k2.eL;
            k.eT = k1.eT + k2.eT;
            k.den = merge_den(k1.den, k2.den);
            r.add_term(k, c1 * c2);
        }
    return r;
}

bool MotElem::in_j_form() const {
    for (auto &[k, c] : terms_)
        for (auto &[f, m] : k.den)
            if (!(f.first >= 0 && f.second < 0)) return false;
    return true;
}

MotElem MotElem::count_formulas(long q) const {
    MotElem r;
    for (auto &[k, c] : terms_) {
        mpq_class v = c;
        for (auto &f : k.forms) v *= mpq_class(forms_.at(f).count(q));
        MonoKey nk = k;
        nk.forms.clear();
        r.add_term(nk, v);
    }
    return r;
}

namespace {

// Exact division of a denominator-free element by 1 - L^b T^a.
bool divide_binomial(const MotElem &N, const DenFactor &f, MotElem &Q) {
    long a = f.first, b = f.second;
    // Group monomials by class modulo the step (b, a).
    std::map<std::tuple<std::vector<std::string>, long, long>, std::map<long, mpq_class>> classes;
    for (auto &[k, c] : N.terms()) {
        long s = a != 0 ? floor_div(k.eT, a) : floor_div(k.eL, b);
        classes[{k.forms, k.eL - s * b, k.eT - s * a}][s] += c;
    }
    MotElem out;
    for (auto &[rep, series] : classes) {
        mpq_class total = 0;
        for (auto &[s, c] : series) total += c;
        if (total != 0) return false;
        mpq_class acc = 0;
        long lo = series.begin()->first, hi = series.rbegin()->first;
        for (long s = lo; s < hi; ++s) {
            auto it = series.find(s);
            if (it != series.end()) acc += it->second;
            if (acc == 0) continue;
            MonoKey k;
            k.forms = std::get<0>(rep);
            k.eL = std::get<1>(rep) + s * b;
            k.eT = std::get<2>(rep) + s * a;
            out.add_term(k, acc);
        }
    }
    Q = out;
    return true;
}

} // namespace

MotElem MotElem::simplify() const {
    // Step 1: rewrite formula classes.
    MotElem expanded;
    for (auto &[k, c] : terms_) {
        MotElem t = MotElem::constant(c);
        bool zero = false;
        for (auto &fk : k.forms) {
            int dropped = 0;
            ResidueFormula f = forms_.at(fk).compact(dropped);
            if (f.is_false()) {
                zero = true;
                break;
            }
            t = t * MotElem::L(dropped);
            if (f.is_true()) continue;
            const auto &at = f.atoms();
            if (f.nvars() == 1 && at.size() == 1 && !at[0].eq && at[0].poly == ResPoly::var(0)) {
                t = t * (MotElem::L(1) - MotElem::constant(1));
                continue;
            }
            t = t * MotElem::formula(f);
        }
        if (zero) continue;
        MonoKey rest;
        rest.eL = k.eL;
        rest.eT = k.eT;
        rest.den = k.den;
        MotElem m;
        m.add_term(rest, 1);
        expanded += t * m;
    }
    if (expanded.terms_.empty()) return MotElem();
    // Step 2: common denominator.
    std::map<DenFactor, int> D;
    for (auto &[k, c] : expanded.terms_)
        for (auto &[f, m] : k.den) D[f] = std::max(D[f], m);
    MotElem N;
    N.forms_ = expanded.forms_;
    for (auto &[k, c] : expanded.terms_) {
        MonoKey nk = k;
        nk.den.clear();
        MotElem t;
        t.forms_ = expanded.forms_;
        t.add_term(nk, c);
        std::map<DenFactor, int> have;
        for (auto &[f, m] : k.den) have[f] = m;
        for (auto &[f, m] : D)
            for (int i = have[f]; i < m; ++i) t = t * (MotElem::constant(1) - MotElem::monomial(1, f.second, f.first));
        N += t;
    }
    if (N.terms_.empty()) return MotElem();
    // Step 3: cancel.
    bool progress = true;
    while (progress) {
        progress = false;
        for (auto &[f, m] : D) {
            if (m == 0) continue;
            MotElem Q;
            if (N.terms_.empty() || divide_binomial(N, f, Q)) {
                Q.forms_ = N.forms_;
                N = Q;
                --m;
                progress = true;
            }
        }
    }
    std::vector<std::pair<DenFactor, int>> den;
    for (auto &[f, m] : D)
        if (m) den.push_back({f, m});
    MotElem r;
    for (auto &[k, c] : N.terms_) {
        MonoKey nk = k;
        nk.den = den;
        r.add_term(nk, c);
        for (auto &fk : nk.forms) r.forms_.emplace(fk, N.forms_.at(fk));
    }
    return r;
}

std::string MotElem::str() const {
    if (terms_.empty()) return "0";
    std::map<std::vector<std::pair<DenFactor, int>>, std::vector<std::pair<MonoKey, mpq_class>>> groups;
    for (auto &[k, c] : terms_) groups[k.den].push_back({k, c});
    std::ostringstream os;
    bool first_group = true;
    for (auto &[den, ts] : groups) {
        std::string num;
        // highest T degree first reads better; keep lexicographic stable order otherwise
        std::vector<std::pair<MonoKey, mpq_class>> v = ts;
        std::stable_sort(v.begin(), v.end(), [](auto &x, auto &y) {
            if (x.first.eT != y.first.eT) return x.first.eT < y.first.eT;
            return x.first.eL > y.first.eL;
        });
        for (size_t i = 0; i < v.size(); ++i) num += mono_str(v[i].second, v[i].first, forms_, i == 0);
        std::string part;
        if (den.empty()) {
            part = num;
        } else {
            std::string d;
            for (auto &[f, m] : den) {
                MonoKey k;
                k.eL = f.second;
                k.eT = f.first;
                std::string fac = "(1" + mono_str(-1, k, forms_, false) + ")";
                if (m > 1) fac += "^" + std::to_string(m);
                d += fac;
            }
            part = (v.size() > 1 ? "(" + num + ")" : num) + " / " + d;
        }
        if (!first_group) {
            if (part[0] == '-')
                os << " - " << part.substr(1);
            else
                os << " + " << part;
        } else {
            os << part;
        }
        first_group = false;
    }
    return os.str();
}

mpq_class count_eval_T(const MotElem &x, long q, const mpq_class &T) {
    mpq_class s = 0;
    for (auto &[k, c] : x.terms()) {
        mpq_class v = c;
        for (auto &f : k.forms) v *= mpq_class(x.formulas().at(f).count(q));
        v *= qpow(q, k.eL);
        v *= rpow(T, k.eT);
        for (auto &[f, m] : k.den) {
            mpq_class d = 1 - qpow(q, f.second) * rpow(T, f.first);
            if (d == 0) throw Divergent("denominator vanishes at this point");
            for (int i = 0; i < m; ++i) v /= d;
        }
        s += v;
    }
    return s;
}

mpq_class count_eval(const MotElem &x, long q, long s) { return count_eval_T(x, q, qpow(q, -s)); }

std::vector<mpq_class> count_series(const MotElem &x, long q, int J) {
    std::vector<mpq_class> out(J + 1, 0);
    for (auto &[k, c] : x.terms()) {
        mpq_class v = c;
        for (auto &f : k.forms) v *= mpq_class(x.formulas().at(f).count(q));
        v *= qpow(q, k.eL);
        long shift = k.eT;
        if (shift > J) continue;
        int len = static_cast<int>(J - shift) + 1;
        std::vector<mpq_class> ser(len, 0);
        ser[0] = v;
        for (auto &[f, m] : k.den) {
            long a = f.first;
            mpq_class qb = qpow(q, f.second);
            for (int rep = 0; rep < m; ++rep) {
                if (a == 0) {
                    mpq_class d = 1 - qb;
                    if (d == 0) throw Divergent("constant denominator vanishes");
                    for (auto &y : ser) y /= d;
                    continue;
                }
                if (a < 0) throw Divergent("denominator is not a power series in T");
                // multiply by 1/(1 - qb T^a): s[i] += qb * s[i - a]
                for (int i = static_cast<int>(a); i < len; ++i) ser[i] += qb * ser[i - a];
            }
        }
        for (int i = 0; i < len; ++i) {
            long d = shift + i;
            if (d >= 0 && d <= J) out[d] += ser[i];
        }
    }
    return out;
}

} // namespace padint

namespace padint {

std::string MotElem::to_json() const {
    using nlohmann::ordered_json;
    MotElem x = simplify();
    ordered_json terms = ordered_json::array();
    for (auto &[k, c] : x.terms_) {
        ordered_json fs = ordered_json::array();
        for (auto &f : k.forms) fs.push_back(x.forms_.at(f).str());
        ordered_json den = ordered_json::array();
        for (auto &[ab, mult] : k.den)
            den.push_back({{"a", ab.first}, {"b", ab.second}, {"mult", mult}});
        terms.push_back({{"coeff", c.get_str()}, {"formulas", fs}, {"L", k.eL}, {"T", k.eT}, {"den", den}});
    }
    ordered_json out = {{"op", "sum"}, {"terms", terms}, {"text", x.str()}};
    return out.dump();
}

} // namespace padint

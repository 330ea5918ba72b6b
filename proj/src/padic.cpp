#include "padint/padic.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "padint/errors.hpp"

namespace padint {

namespace {

mpz_class mod_pos(const mpz_class &a, const mpz_class &m) {
    mpz_class r = a % m;
    if (r < 0) r += m;
    return r;
}

mpz_class inv_mod(const mpz_class &a, const mpz_class &m) {
    mpz_class r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
        throw InsufficientPrecision("non-invertible residue");
    return r;
}

// Residue of a p-integral rational modulo m = p^k.
mpz_class rat_mod(const mpq_class &x, const mpz_class &m) {
    return mod_pos(x.get_num() * inv_mod(mod_pos(x.get_den(), m), m), m);
}

long vp_int_or(const mpz_class &x, const mpz_class &p, long cap) {
    if (x == 0) return cap;
    return std::min(cap, vp(x, p));
}

} // namespace

// ---------------------------------------------------------------- context

PAdicContext::PAdicContext(long prime, int digits, Mode m, bool eq)
    : p(prime), M(digits), mode(m), equichar(eq) {
    if (prime < 2 || mpz_probab_prime_p(p.get_mpz_t(), 25) == 0)
        throw std::invalid_argument("p must be prime");
    if (M < 1) throw std::invalid_argument("precision must be positive");
}

int PAdicContext::default_precision() {
    if (const char *s = std::getenv("PADIC_CELLS_PRECISION")) {
        int v = std::atoi(s);
        if (v >= 1) return v;
    }
    return 20;
}

mpz_class PAdicContext::modulus(int k) const { return ipow(p, static_cast<unsigned long>(std::max(k, 0))); }

// ---------------------------------------------------------------- numbers

PAdicNumber PAdicNumber::zero(const PAdicContext &ctx) {
    PAdicNumber r;
    r.ctx_ = ctx;
    r.prec_ = ctx.M;
    r.exact_ = mpq_class(0);
    return r;
}

PAdicNumber PAdicNumber::from_int(const PAdicContext &ctx, const mpz_class &x) {
    return from_rational(ctx, mpq_class(x));
}

PAdicNumber PAdicNumber::from_rational(const PAdicContext &ctx, const mpq_class &x) {
    if (x == 0) return zero(ctx);
    PAdicNumber r;
    r.ctx_ = ctx;
    long v = vp(x, ctx.p);
    r.val_ = ExtInt(v);
    r.prec_ = ctx.M;
    mpq_class u = x;
    if (v > 0) u /= mpq_class(ipow(ctx.p, v));
    if (v < 0) u *= mpq_class(ipow(ctx.p, -v));
    r.unit_ = rat_mod(u, ctx.modulus(ctx.M));
    r.exact_ = x;
    return r;
}

PAdicNumber PAdicNumber::approx(const PAdicContext &ctx, const mpz_class &x, long abs_prec) {
    mpz_class m = ctx.modulus(static_cast<int>(abs_prec));
    mpz_class y = mod_pos(x, m);
    if (y == 0) throw InsufficientPrecision("value indistinguishable from zero");
    long v = vp(y, ctx.p);
    return from_parts(ctx, v, y / ipow(ctx.p, v), static_cast<int>(abs_prec - v));
}

PAdicNumber PAdicNumber::from_parts(const PAdicContext &ctx, long valuation, const mpz_class &unit,
                                    int prec) {
    if (prec < 1) throw InsufficientPrecision("fewer than one trusted digit");
    PAdicNumber r;
    r.ctx_ = ctx;
    r.val_ = ExtInt(valuation);
    r.prec_ = std::min(prec, ctx.M);
    r.unit_ = unit;
    r.normalize_unit();
    if (r.unit_ % ctx.p == 0) throw std::invalid_argument("unit part divisible by p");
    return r;
}

void PAdicNumber::normalize_unit() { unit_ = mod_pos(unit_, ctx_.modulus(prec_)); }

ExtInt PAdicNumber::abs_prec() const {
    if (exact_) return ExtInt::infinity();
    if (is_zero()) return ExtInt(static_cast<long>(prec_));
    return val_ + ExtInt(static_cast<long>(prec_));
}

PAdicNumber PAdicNumber::with_prec(int prec) const {
    PAdicNumber r = *this;
    r.exact_.reset();
    if (is_zero()) return r;
    if (prec < 1) throw InsufficientPrecision("fewer than one trusted digit");
    r.prec_ = std::min(prec_, prec);
    r.normalize_unit();
    return r;
}

PAdicNumber PAdicNumber::operator-() const {
    PAdicNumber r = *this;
    if (exact_) r.exact_ = -*exact_;
    if (!is_zero()) r.unit_ = mod_pos(-unit_, ctx_.modulus(prec_));
    return r;
}

PAdicNumber PAdicNumber::operator+(const PAdicNumber &o) const {
    if (exact_ && o.exact_) return from_rational(ctx_, *exact_ + *o.exact_);
    if (is_zero() && exact_) return o;
    if (o.is_zero() && o.exact_) return *this;
    ExtInt A = std::min(abs_prec(), o.abs_prec());
    long a = A.to_long();
    long v0 = a;
    if (!is_zero()) v0 = std::min(v0, val_.to_long());
    if (!o.is_zero()) v0 = std::min(v0, o.val_.to_long());
    mpz_class m = ctx_.modulus(static_cast<int>(a - v0));
    mpz_class x = 0;
    if (!is_zero() && val_.to_long() < a) x += ctx_.modulus(static_cast<int>(val_.to_long() - v0)) * unit_;
    if (!o.is_zero() && o.val_.to_long() < a)
        x += ctx_.modulus(static_cast<int>(o.val_.to_long() - v0)) * o.unit_;
    x = mod_pos(x, m);
    if (x == 0) throw InsufficientPrecision("cancellation beyond working precision");
    long v = v0 + vp(x, ctx_.p);
    return from_parts(ctx_, v, x / ipow(ctx_.p, v - v0), static_cast<int>(a - v));
}

PAdicNumber PAdicNumber::operator-(const PAdicNumber &o) const { return *this + (-o); }

PAdicNumber PAdicNumber::operator*(const PAdicNumber &o) const {
    if (exact_ && o.exact_) return from_rational(ctx_, *exact_ * *o.exact_);
    if ((is_zero() && exact_) || (o.is_zero() && o.exact_)) return zero(ctx_);
    if (is_zero() || o.is_zero()) {
        // Unknown digits: only the absolute precision survives.
        PAdicNumber r = zero(ctx_);
        r.exact_.reset();
        return r;
    }
    int pr = std::min(prec_, o.prec_);
    return from_parts(ctx_, (val_ + o.val_).to_long(), unit_ * o.unit_, pr);
}

PAdicNumber PAdicNumber::operator/(const PAdicNumber &o) const {
    if (o.is_zero()) throw std::domain_error("p-adic division by zero");
    if (exact_ && o.exact_) return from_rational(ctx_, *exact_ / *o.exact_);
    if (is_zero()) return *this;
    int pr = std::min(prec_, o.prec_);
    mpz_class m = ctx_.modulus(pr);
    return from_parts(ctx_, val_.to_long() - o.val_.to_long(), unit_ * inv_mod(mod_pos(o.unit_, m), m), pr);
}

PAdicNumber PAdicNumber::pow(unsigned k) const {
    PAdicNumber r = from_int(ctx_, 1);
    for (unsigned i = 0; i < k; ++i) r = r * *this;
    return r;
}

bool PAdicNumber::agrees(const PAdicNumber &o) const {
    if (exact_ && o.exact_) return *exact_ == *o.exact_;
    ExtInt A = std::min(abs_prec(), o.abs_prec());
    long a = A.to_long();
    auto scaled = [&](const PAdicNumber &x, long lo) -> mpz_class {
        if (x.is_zero() || x.val_.to_long() >= a) return 0;
        return ctx_.modulus(static_cast<int>(x.val_.to_long() - lo)) * x.unit_;
    };
    long lo = a;
    if (!is_zero()) lo = std::min(lo, val_.to_long());
    if (!o.is_zero()) lo = std::min(lo, o.val_.to_long());
    mpz_class m = ctx_.modulus(static_cast<int>(a - lo));
    return mod_pos(scaled(*this, lo) - scaled(o, lo), m) == 0;
}

mpz_class PAdicNumber::residue_int(int k) const {
    if (k <= 0) return 0;
    if (is_zero()) {
        if (!exact_ && abs_prec() < ExtInt(static_cast<long>(k)))
            throw InsufficientPrecision("residue beyond known digits");
        return 0;
    }
    if (val_ < ExtInt(0L)) throw NotIntegral("residue of non-integral value");
    if (val_.to_long() >= k) return 0;
    if (abs_prec() < ExtInt(static_cast<long>(k))) throw InsufficientPrecision("residue beyond known digits");
    mpz_class m = ctx_.modulus(k);
    return mod_pos(ctx_.modulus(static_cast<int>(val_.to_long())) * unit_, m);
}

std::string PAdicNumber::str() const {
    if (is_zero()) return exact_ ? "0" : "0 (mod " + ctx_.p.get_str() + "^" + std::to_string(prec_) + ")";
    std::ostringstream os;
    os << ctx_.p << "^" << val_ << " * " << unit_ << " (mod " << ctx_.p << "^" << prec_ << ")";
    return os.str();
}

ExtInt ord(const PAdicNumber &x) { return x.valuation(); }

mpz_class ac(const PAdicNumber &x, int m) {
    if (x.is_zero()) return 0;
    if (m > x.prec()) throw InsufficientPrecision("angular component depth exceeds precision");
    return mod_pos(x.unit(), x.context().modulus(m));
}

mpz_class res(const PAdicNumber &x, int m) {
    if (!x.is_zero() && x.valuation() < ExtInt(0L)) throw NotIntegral("res of non-integral value");
    return x.residue_int(m);
}

// ---------------------------------------------------------------- roots

PAdicNumber mth_root(const PAdicNumber &x, const mpz_class &xi, long z, long m, int e) {
    const PAdicContext &ctx = x.context();
    PAdicNumber zero = PAdicNumber::zero(ctx);
    if (m < 1 || x.is_zero()) return zero;
    if (x.valuation() != ExtInt(m * z)) return zero;
    long em = vp_int_or(mpz_class(m), ctx.p, 1000);
    if (em > e) return zero;
    if (2 * e + 1 > x.prec()) throw InsufficientPrecision("root condition needs more digits");
    mpz_class mod1 = ctx.modulus(2 * e + 1);
    if (xi % ctx.p == 0) return zero;
    mpz_class lhs;
    mpz_powm_ui(lhs.get_mpz_t(), mod_pos(xi, mod1).get_mpz_t(), m, mod1.get_mpz_t());
    if (lhs != ac(x, 2 * e + 1)) return zero;
    int N = x.prec();
    if (N - em < 1) throw InsufficientPrecision("root loses all digits");
    mpz_class modN = ctx.modulus(N);
    mpz_class modE = ctx.modulus(static_cast<int>(em));
    mpz_class w = x.unit();
    mpz_class u = mod_pos(xi, modN);
    mpz_class mu = mpz_class(m) / modE;
    for (int it = 0; it < 4 * N + 8; ++it) {
        mpz_class um;
        mpz_powm_ui(um.get_mpz_t(), u.get_mpz_t(), m, modN.get_mpz_t());
        mpz_class diff = mod_pos(um - w, modN);
        if (diff == 0) break;
        mpz_class um1;
        mpz_powm_ui(um1.get_mpz_t(), u.get_mpz_t(), m - 1, modN.get_mpz_t());
        if (diff % modE != 0) throw PrecisionLoss("Newton step not divisible");
        mpz_class delta = mod_pos((diff / modE) * inv_mod(mod_pos(mu * um1, modN), modN), modN);
        u = mod_pos(u - delta, modN);
    }
    return PAdicNumber::from_parts(ctx, z, u, static_cast<int>(N - em));
}

PAdicNumber hensel_root(const std::vector<PAdicNumber> &a, const mpz_class &xi, int e) {
    if (a.empty()) throw ZeroPolynomial("hensel_root of empty polynomial");
    const PAdicContext &ctx = a[0].context();
    PAdicNumber zero = PAdicNumber::zero(ctx);
    if (xi % ctx.p == 0) return zero;
    long N = ctx.M;
    for (auto &c : a) {
        if (!c.is_zero() && c.valuation() < ExtInt(0L)) return zero;
        ExtInt ap = c.abs_prec();
        if (ap.is_finite()) N = std::min(N, ap.to_long());
    }
    if (N < 2 * e + 1) throw InsufficientPrecision("coefficients too imprecise");
    mpz_class modN = ctx.modulus(static_cast<int>(N));
    std::vector<mpz_class> A;
    for (auto &c : a) A.push_back(c.residue_int(static_cast<int>(N)));
    auto evalf = [&](const mpz_class &y, const mpz_class &mod) {
        mpz_class r = 0;
        for (size_t i = A.size(); i-- > 0;) r = mod_pos(r * y + A[i], mod);
        return r;
    };
    auto evald = [&](const mpz_class &y, const mpz_class &mod) {
        mpz_class r = 0;
        for (size_t i = A.size(); i-- > 1;) r = mod_pos(r * y + A[i] * static_cast<long>(i), mod);
        return r;
    };
    mpz_class m1 = ctx.modulus(2 * e + 1);
    mpz_class me = ctx.modulus(e + 1);
    if (evalf(mod_pos(xi, m1), m1) != 0) return zero;
    mpz_class d0 = evald(mod_pos(xi, me), me);
    if (d0 == 0) return zero;
    long ed = vp(d0, ctx.p);
    mpz_class modE = ctx.modulus(static_cast<int>(ed));
    mpz_class y = mod_pos(xi, modN);
    for (int it = 0; it < 4 * N + 8; ++it) {
        mpz_class fy = evalf(y, modN);
        if (fy == 0) break;
        mpz_class fp = evald(y, modN);
        if (fy % modE != 0 || fp % modE != 0) throw PrecisionLoss("Hensel step not divisible");
        mpz_class delta = mod_pos((fy / modE) * inv_mod(mod_pos(fp / modE, modN), modN), modN);
        y = mod_pos(y - delta, modN);
    }
    if (N - ed < 1) throw InsufficientPrecision("root loses all digits");
    return PAdicNumber::from_parts(ctx, 0, y, static_cast<int>(N - ed));
}

// ---------------------------------------------------------------- Newton polygons

std::vector<mpq_class> NewtonPolygon::root_valuations() const {
    std::vector<mpq_class> r;
    for (auto &s : segments)
        for (int i = 0; i < s.length; ++i) r.push_back(s.root_valuation());
    std::sort(r.begin(), r.end());
    return r;
}

NewtonPolygon newton_polygon_vals(const std::vector<ExtInt> &vals) {
    NewtonPolygon np;
    int lo = -1, hi = -1;
    for (int i = 0; i < static_cast<int>(vals.size()); ++i)
        if (vals[i].is_finite()) {
            if (lo < 0) lo = i;
            hi = i;
        }
    if (lo < 0) throw ZeroPolynomial("Newton polygon of zero polynomial");
    np.zero_roots = lo;
    std::vector<std::pair<int, mpz_class>> hull;
    for (int i = lo; i <= hi; ++i) {
        np.points.push_back({i, vals[i]});
        if (vals[i].is_infinite()) continue;
        mpz_class y = vals[i].value();
        while (hull.size() >= 2) {
            auto &o = hull[hull.size() - 2];
            auto &a = hull.back();
            mpz_class cr = mpz_class(a.first - o.first) * (y - o.second) -
                           (a.second - o.second) * mpz_class(i - o.first);
            if (cr <= 0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back({i, y});
    }
    for (size_t k = 1; k < hull.size(); ++k) {
        int len = hull[k].first - hull[k - 1].first;
        mpq_class slope(hull[k].second - hull[k - 1].second, mpz_class(len));
        slope.canonicalize();
        np.segments.push_back({slope, len});
    }
    return np;
}

NewtonPolygon newton_polygon(const std::vector<PAdicNumber> &f) {
    std::vector<ExtInt> v;
    for (auto &c : f) v.push_back(c.valuation());
    return newton_polygon_vals(v);
}

NewtonPolygon newton_polygon(const UPoly &f, const mpz_class &p) {
    if (f.is_zero()) throw ZeroPolynomial("Newton polygon of zero polynomial");
    std::vector<ExtInt> v;
    for (auto &c : f.coeffs()) v.push_back(c == 0 ? ExtInt::infinity() : ExtInt(vp(c, p)));
    return newton_polygon_vals(v);
}

std::vector<PAdicNumber> poly_mul(const std::vector<PAdicNumber> &a, const std::vector<PAdicNumber> &b) {
    if (a.empty() || b.empty()) return {};
    const PAdicContext &ctx = a[0].context();
    std::vector<PAdicNumber> r(a.size() + b.size() - 1, PAdicNumber::zero(ctx));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
    return r;
}

// ---------------------------------------------------------------- slope factorization

namespace {

mpq_class round_padic(const mpq_class &r, const mpz_class &p, long abs_prec) {
    if (r == 0) return 0;
    long v = vp(r, p);
    if (v >= abs_prec) return 0;
    mpq_class u = r;
    if (v > 0) u /= mpq_class(ipow(p, v));
    if (v < 0) u *= mpq_class(ipow(p, -v));
    mpz_class m = ipow(p, abs_prec - v);
    mpz_class ui = rat_mod(u, m);
    mpq_class out(ui);
    if (v > 0) out *= mpq_class(ipow(p, v));
    if (v < 0) out /= mpq_class(ipow(p, -v));
    return out;
}

UPoly round_poly(const UPoly &f, const mpz_class &p, long abs_prec) {
    std::vector<mpq_class> c;
    for (auto &x : f.coeffs()) c.push_back(round_padic(x, p, abs_prec));
    return UPoly(c);
}

long min_ord(const UPoly &f, const mpz_class &p, long cap) {
    long m = cap;
    for (auto &c : f.coeffs())
        if (c != 0) m = std::min(m, vp(c, p));
    return m;
}

// Solve the dense system A x = b exactly.
std::vector<mpq_class> solve(std::vector<std::vector<mpq_class>> A, std::vector<mpq_class> b) {
    size_t n = A.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && A[piv][col] == 0) ++piv;
        if (piv == n) throw PrecisionLoss("singular Sylvester system");
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (size_t r = 0; r < n; ++r) {
            if (r == col || A[r][col] == 0) continue;
            mpq_class f = A[r][col] / A[col][col];
            for (size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<mpq_class> x(n);
    for (size_t i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
    return x;
}

// Lift f ~ G*H (G monic) so that f - G*H has valuation >= target.
void lift_factorization(const UPoly &f, UPoly &G, UPoly &H, const mpz_class &p, long target) {
    int n = f.degree(), k = G.degree();
    long prev = -1000000;
    int stalls = 0;
    for (int it = 0; it < 200; ++it) {
        UPoly E = f - G * H;
        long o = min_ord(E, p, target);
        if (o >= target) return;
        if (o <= prev) {
            if (++stalls > 3) throw PrecisionLoss("factor lifting stalled");
        } else {
            stalls = 0;
        }
        prev = o;
        // Unknowns: dG_0..dG_{k-1}, dH_0..dH_{n-k}.
        int nu = n + 1;
        std::vector<std::vector<mpq_class>> A(nu, std::vector<mpq_class>(nu, 0));
        for (int j = 0; j < k; ++j)
            for (int i = 0; i <= H.degree(); ++i) A[i + j][j] += H.coeff(i);
        for (int j = 0; j <= n - k; ++j)
            for (int i = 0; i <= k; ++i) A[i + j][k + j] += G.coeff(i);
        std::vector<mpq_class> b(nu);
        for (int i = 0; i < nu; ++i) b[i] = E.coeff(i);
        auto x = solve(A, b);
        std::vector<mpq_class> dg(x.begin(), x.begin() + k), dh(x.begin() + k, x.end());
        long prec = target + 2 * (target - o) + 8;
        G = round_poly(G + UPoly(dg), p, prec);
        H = round_poly(H + UPoly(dh), p, prec);
        // keep G monic
        std::vector<mpq_class> gc = G.coeffs();
        gc.resize(k + 1, 0);
        gc[k] = 1;
        G = UPoly(gc);
    }
    throw PrecisionLoss("factor lifting did not converge");
}

std::vector<long> residue_of(const UPoly &g, const mpz_class &p) {
    std::vector<long> r;
    for (auto &c : g.coeffs()) r.push_back(rat_mod(c, p).get_si());
    return r;
}

std::vector<long> polymod_div_linear(const std::vector<long> &a, long root, long p, long &rem) {
    // synthetic division by (z - root) over F_p
    int d = static_cast<int>(a.size()) - 1;
    std::vector<long> q(std::max(d, 0), 0);
    long acc = 0;
    for (int i = d; i >= 0; --i) {
        acc = ((acc * root + a[i]) % p + p) % p;
        if (i > 0) q[i - 1] = acc;
    }
    rem = acc;
    return q;
}

std::vector<SlopeFactor> split_residues(const UPoly &G, const mpq_class &lam, const PAdicContext &ctx,
                                        long target) {
    const mpz_class &p = ctx.p;
    int k = G.degree();
    std::vector<UPoly> pieces;
    std::vector<std::vector<long>> residues;
    if (lam.get_den() == 1) {
        long l = lam.get_num().get_si();
        // G(p^l z) / p^(l k) is monic with unit roots.
        mpq_class s = l >= 0 ? mpq_class(ipow(p, l)) : mpq_class(1) / mpq_class(ipow(p, -l));
        mpq_class sk = 1;
        for (int i = 0; i < k; ++i) sk *= s;
        UPoly Gz = G.scale(s) * mpq_class(1 / sk);
        long pl = p.get_si();
        std::vector<long> red = residue_of(Gz, p);
        std::vector<std::pair<long, int>> roots;
        std::vector<long> rest = red;
        for (long r = 1; r < pl; ++r) {
            int mult = 0;
            while (rest.size() > 1) {
                long rem;
                auto q = polymod_div_linear(rest, r, pl, rem);
                if (rem != 0) break;
                rest = q;
                ++mult;
            }
            if (mult) roots.push_back({r, mult});
        }
        if (roots.size() + (rest.size() > 1 ? 1 : 0) <= 1) {
            pieces.push_back(Gz);
        } else {
            UPoly cur = Gz;
            for (auto &[r, mult] : roots) {
                if (cur.degree() == mult) {
                    pieces.push_back(cur);
                    cur = UPoly::constant(1);
                    break;
                }
                std::vector<long> q = residue_of(cur, p);
                for (int i = 0; i < mult; ++i) {
                    long rem;
                    q = polymod_div_linear(q, r, pl, rem);
                }
                UPoly g0 = UPoly::constant(1);
                for (int i = 0; i < mult; ++i) g0 = g0 * UPoly({mpq_class(-r), mpq_class(1)});
                UPoly h0 = UPoly::from_ints(q);
                lift_factorization(cur, g0, h0, p, target);
                pieces.push_back(g0);
                cur = h0.monic();
            }
            if (cur.degree() > 0) pieces.push_back(cur);
        }
        std::vector<SlopeFactor> out;
        for (auto &pz : pieces) {
            int kk = pz.degree();
            mpq_class si = 1 / s;
            UPoly gy = pz.scale(si);
            mpq_class t = 1;
            for (int i = 0; i < kk; ++i) t *= s;
            gy = gy * t;
            SlopeFactor sf;
            for (auto &c : gy.coeffs())
                sf.factor.push_back(PAdicNumber::from_rational(ctx, round_padic(c, p, target)).with_prec(
                    static_cast<int>(std::max<long>(1, target - (c == 0 ? 0 : vp(c, p))))));
            sf.valuation = lam;
            sf.residue = residue_of(pz, p);
            out.push_back(sf);
        }
        return out;
    }
    SlopeFactor sf;
    for (auto &c : G.coeffs())
        sf.factor.push_back(PAdicNumber::from_rational(ctx, round_padic(c, p, target))
                                .with_prec(static_cast<int>(std::max<long>(1, target - (c == 0 ? 0 : vp(c, p))))));
    sf.valuation = lam;
    return {sf};
}

} // namespace

SlopeFactorization slope_factor(const UPoly &f0, const PAdicContext &ctx) {
    if (f0.is_zero()) throw ZeroPolynomial("slope_factor of zero");
    if (!is_squarefree(f0)) throw NotSquarefree("polynomial has a repeated factor over Q");
    const mpz_class &p = ctx.p;
    UPoly f = f0.monic();
    SlopeFactorization out;
    out.precision = ctx.M;
    bool has_zero = f.coeff(0) == 0;
    if (has_zero) {
        UPoly q, r;
        divmod(f, UPoly({mpq_class(0), mpq_class(1)}), q, r);
        f = q;
    }
    long base = min_ord(f, p, 0);
    long target = base + ctx.M;
    UPoly rest = f;
    std::vector<SlopeFactor> facs;
    while (rest.degree() > 0) {
        NewtonPolygon np = newton_polygon(rest, p);
        const NewtonSegment &seg = np.segments.front();
        UPoly G;
        if (np.segments.size() == 1) {
            G = rest;
            rest = UPoly::constant(1);
        } else {
            int k = seg.length;
            std::vector<mpq_class> lo(rest.coeffs().begin(), rest.coeffs().begin() + k + 1);
            std::vector<mpq_class> hi(rest.coeffs().begin() + k, rest.coeffs().end());
            UPoly G0 = UPoly(lo);
            mpq_class ck = G0.lead();
            G0 = G0.monic();
            UPoly H0 = UPoly(hi) * ck;
            lift_factorization(rest, G0, H0, p, target);
            G = G0;
            rest = H0.monic();
        }
        for (auto &sf : split_residues(G, seg.root_valuation(), ctx, target)) facs.push_back(sf);
    }
    std::sort(facs.begin(), facs.end(), [](const SlopeFactor &a, const SlopeFactor &b) {
        if (*a.valuation != *b.valuation) return *a.valuation < *b.valuation;
        return a.residue < b.residue;
    });
    if (has_zero) {
        SlopeFactor sf;
        sf.factor = {PAdicNumber::zero(ctx), PAdicNumber::from_int(ctx, 1)};
        sf.residue = {0, 1};
        facs.push_back(sf);
    }
    out.factors = facs;
    return out;
}

UPoly difference_resultant(const UPoly &f, const UPoly &g) {
    int D = f.degree() * g.degree();
    std::vector<mpq_class> xs, ys;
    for (int i = 0; i <= D; ++i) {
        xs.emplace_back(i);
        ys.push_back(resultant(f, g.shift(mpq_class(i))));
    }
    // Newton divided differences.
    std::vector<mpq_class> c = ys;
    for (int j = 1; j <= D; ++j)
        for (int i = D; i >= j; --i) c[i] = (c[i] - c[i - 1]) / (xs[i] - xs[i - j]);
    UPoly r = UPoly::constant(c[D]);
    for (int i = D - 1; i >= 0; --i) r = r * UPoly({-xs[i], mpq_class(1)}) + UPoly::constant(c[i]);
    return r;
}

std::vector<mpq_class> root_distance_vals(const UPoly &f, const UPoly &g, const mpz_class &p) {
    if (f.degree() < 1 || g.degree() < 1) throw ZeroPolynomial("root distances need nonconstant inputs");
    if (!is_squarefree(f) || !is_squarefree(g)) throw NotSquarefree("root distances need squarefree inputs");
    if (resultant(f, g) == 0) throw CommonRoot("polynomials share a root");
    UPoly R = difference_resultant(f, g);
    return newton_polygon(R, p).root_valuations();
}

} // namespace padint

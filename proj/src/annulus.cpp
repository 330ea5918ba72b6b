#include "padint/annulus.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "padint/errors.hpp"

namespace padint {

using json = nlohmann::json;

namespace {

// Radii: nullopt is +infinity.
using Rad = std::optional<mpq_class>;

bool rad_less(const Rad &a, const Rad &b) {
    if (!a) return false;
    if (!b) return true;
    return *a < *b;
}
bool rad_eq(const Rad &a, const Rad &b) { return a.has_value() == b.has_value() && (!a || *a == *b); }
Rad rad_min(const Rad &a, const Rad &b) { return rad_less(b, a) ? b : a; }

Rad ord_of(const mpq_class &x, long p) {
    if (x == 0) return std::nullopt;
    return mpq_class(vp(x, mpz_class(p)));
}

mpq_class canon(mpq_class q) {
    q.canonicalize();
    return q;
}

// Disc with integer center; a point when r is infinite and closed.
struct Disc {
    mpz_class c;
    Rad r;
    bool closed = true;

    bool contains(const mpz_class &a, long p) const {
        Rad o = ord_of(mpq_class(a - c), p);
        if (closed) return !rad_less(o, r);
        return rad_less(r, o);
    }
    bool contains(const Disc &h, long p) const {
        if (!contains(h.c, p)) return false;
        if (rad_less(r, h.r)) return true;
        if (rad_eq(r, h.r)) return closed || !h.closed;
        return false;
    }
    bool meets(const Disc &h, long p) const { return contains(h.c, p) || h.contains(c, p); }
    std::string str() const {
        if (!r) return "{" + c.get_str() + "}";
        return std::string(closed ? "D(" : "D°(") + c.get_str() + ", " + r->get_str() + ")";
    }
};

Disc outer_disc(const AnnulusBound &b) { return {b.center(), b.eps, !b.strict}; }
// Region removed by a hole bound.
Disc hole_disc(const AnnulusBound &b) { return {b.center(), b.eps, b.strict}; }

AnnulusFormula make_formula(long p, const Disc &outer, const std::vector<Disc> &holes) {
    AnnulusFormula f;
    f.p = p;
    f.outer = AnnulusBound::linear(outer.c, outer.r, !outer.closed);
    for (auto &h : holes) f.holes.push_back(AnnulusBound::linear(h.c, h.r, h.closed));
    return f;
}

AnnulusFormula thin_formula(long p, const mpz_class &c, const mpq_class &r, const std::vector<mpz_class> &reps) {
    std::vector<Disc> hs;
    for (auto &a : reps) hs.push_back({a, r, false});
    return make_formula(p, {c, r, true}, hs);
}

// {lo < ord(x - a) < hi}; hi infinite gives the punctured disc.
AnnulusFormula laurent_formula(long p, const mpz_class &a, const mpq_class &lo, const Rad &hi) {
    return make_formula(p, {a, lo, false}, {{a, hi, true}});
}

AnnulusFormula point_formula(long p, const mpz_class &a) { return make_formula(p, {a, std::nullopt, true}, {}); }

struct Decomposer {
    long p;
    AnnulusDecomposition out;

    int enter(int parent, size_t nholes) {
        out.trace.push_back({static_cast<int>(nholes), parent});
        return static_cast<int>(out.trace.size()) - 1;
    }

    void closed(const mpz_class &c, const mpq_class &r, const std::vector<Disc> &H, int parent) {
        int me = enter(parent, H.size());
        for (auto &h : H)
            if (h.closed && rad_eq(h.r, Rad(r))) return;
        std::vector<std::vector<Disc>> classes;
        for (auto &h : H) {
            bool placed = false;
            for (auto &cl : classes)
                if (rad_less(Rad(r), ord_of(mpq_class(h.c - cl[0].c), p))) {
                    cl.push_back(h);
                    placed = true;
                    break;
                }
            if (!placed) classes.push_back({h});
        }
        std::vector<mpz_class> reps;
        for (auto &cl : classes) reps.push_back(cl[0].c);
        out.pieces.push_back(thin_formula(p, c, r, reps));
        for (auto &cl : classes) {
            if (cl.size() == 1 && !cl[0].closed && rad_eq(cl[0].r, Rad(r))) continue;
            open(cl[0].c, r, cl, me);
        }
    }

    void open(const mpz_class &c, const mpq_class &r, const std::vector<Disc> &H, int parent) {
        int me = enter(parent, H.size());
        if (H.empty()) {
            out.pieces.push_back(laurent_formula(p, c, r, std::nullopt));
            out.pieces.push_back(point_formula(p, c));
            return;
        }
        for (auto &h : H)
            if (!h.closed && rad_eq(h.r, Rad(r))) return;
        const mpz_class a1 = H[0].c;
        Rad s = std::nullopt;
        for (auto &h : H) {
            s = rad_min(s, h.r);
            s = rad_min(s, ord_of(mpq_class(h.c - a1), p));
        }
        out.pieces.push_back(laurent_formula(p, a1, r, s));
        if (!s) return;
        closed(a1, *s, H, me);
    }
};

std::string bound_json_poly(const UPoly &f) { return f.str("x"); }

UPoly parse_upoly_x(const std::string &src) {
    ParsedPoly pp = parse_poly(src, {"x"});
    if (pp.poly.t_degree() > 0) throw SyntaxError("annulus polynomial must not contain p or t");
    return pp.poly.to_upoly(1);
}

AnnulusBound bound_from_json(const json &j) {
    AnnulusBound b;
    if (!j.is_object() || !j.contains("poly")) throw SyntaxError("annulus bound needs a poly field");
    b.poly = parse_upoly_x(j.at("poly").get<std::string>());
    if (j.contains("eps") && !j.at("eps").is_null()) {
        const json &e = j.at("eps");
        if (!e.is_array() || e.size() != 2) throw SyntaxError("eps must be [num, den]");
        mpq_class q(mpz_class(e[0].get<long>()), mpz_class(e[1].get<long>()));
        if (q.get_den() == 0) throw SyntaxError("eps denominator is zero");
        b.eps = canon(q);
    }
    b.strict = j.value("strict", false);
    return b;
}

json bound_to_json(const AnnulusBound &b) {
    json j;
    j["poly"] = bound_json_poly(b.poly);
    if (b.eps)
        j["eps"] = {b.eps->get_num().get_si(), b.eps->get_den().get_si()};
    else
        j["eps"] = nullptr;
    j["strict"] = b.strict;
    return j;
}

std::string bound_str(const AnnulusBound &b, bool outer, long p) {
    std::string eps = !b.eps ? "0" : (*b.eps == 0 ? "1" : std::to_string(p) + "^" + mpq_class(-*b.eps).get_str());
    std::string lhs = "|" + b.poly.str("x") + "|";
    if (outer) return lhs + (b.strict ? " < " : " <= ") + eps;
    return eps + (b.strict ? " < " : " <= ") + lhs;
}

mpq_class pow_p(long p, long e) {
    mpz_class a = ipow(mpz_class(p), static_cast<unsigned long>(e < 0 ? -e : e));
    return e >= 0 ? mpq_class(a) : canon(mpq_class(1, a));
}

UPoly lin(const mpz_class &a) { return UPoly({mpq_class(-a), mpq_class(1)}); }

UPoly upow(const UPoly &f, long k) {
    UPoly r = UPoly::constant(1);
    for (long i = 0; i < k; ++i) r = r * f;
    return r;
}

mpz_class mod_p(const mpz_class &x, long p) {
    mpz_class r = x % p;
    if (r < 0) r += p;
    return r;
}

} // namespace

// ---------------------------------------------------------------- formulas

AnnulusBound AnnulusBound::linear(const mpz_class &center, std::optional<mpq_class> eps, bool strict) {
    AnnulusBound b;
    b.poly = lin(center);
    b.eps = eps;
    b.strict = strict;
    return b;
}

mpz_class AnnulusBound::center() const {
    if (poly.degree() != 1 || poly.lead() != 1 || poly.coeff(0).get_den() != 1)
        throw UnsupportedTerm("annulus polynomial " + poly.str("x") + " is not of the form x - a with a in Z");
    return -poly.coeff(0).get_num();
}

bool AnnulusFormula::holds(const mpq_class &x) const {
    auto val = [&](const UPoly &f) { return ord_of(f.eval(x), p); };
    Rad o = val(outer.poly);
    if (outer.strict ? !rad_less(outer.eps, o) : rad_less(o, outer.eps)) return false;
    for (auto &h : holes) {
        Rad v = val(h.poly);
        if (h.strict ? !rad_less(v, h.eps) : rad_less(h.eps, v)) return false;
    }
    return true;
}

bool AnnulusFormula::is_closed() const {
    if (outer.strict) return false;
    for (auto &h : holes)
        if (h.strict) return false;
    return true;
}

bool AnnulusFormula::is_open() const {
    if (!outer.strict) return false;
    for (auto &h : holes)
        if (!h.strict) return false;
    return true;
}

AnnulusKind AnnulusFormula::kind() const {
    if (outer.poly.degree() != 1) return AnnulusKind::Other;
    for (auto &h : holes)
        if (h.poly.degree() != 1) return AnnulusKind::Other;
    if (!outer.eps && !outer.strict && holes.empty()) return AnnulusKind::Point;
    if (is_closed() && outer.eps && *outer.eps >= 0) {
        bool same = true;
        for (auto &h : holes)
            if (!rad_eq(h.eps, outer.eps)) same = false;
        if (same) return AnnulusKind::Thin;
    }
    if (is_open() && holes.size() == 1 && outer.eps) return AnnulusKind::Laurent;
    return AnnulusKind::Other;
}

int AnnulusFormula::complexity() const {
    int c = 0;
    for (auto &h : holes) c += h.poly.degree();
    return c;
}

std::string AnnulusFormula::str() const {
    std::string s = bound_str(outer, true, p);
    for (auto &h : holes) s += " & " + bound_str(h, false, p);
    return s;
}

std::string AnnulusFormula::to_json() const {
    json j;
    j["outer"] = bound_to_json(outer);
    j["holes"] = json::array();
    for (auto &h : holes) j["holes"].push_back(bound_to_json(h));
    return j.dump();
}

AnnulusFormula AnnulusFormula::from_json(const std::string &src, long p) {
    json j;
    try {
        j = json::parse(src);
    } catch (const json::exception &e) {
        throw SyntaxError(std::string("annulus json: ") + e.what());
    }
    AnnulusFormula f;
    f.p = p;
    try {
        f.outer = bound_from_json(j.at("outer"));
        if (j.contains("holes"))
            for (auto &h : j.at("holes")) f.holes.push_back(bound_from_json(h));
    } catch (const json::exception &e) {
        throw SyntaxError(std::string("annulus json: ") + e.what());
    }
    return f;
}

void validate(const AnnulusFormula &phi) {
    auto check_poly = [](const AnnulusBound &b) {
        const UPoly &f = b.poly;
        if (f.degree() < 1 || f.lead() != 1) throw NotAnAnnulus(f.str("x") + " is not monic nonconstant");
        for (auto &c : f.coeffs())
            if (c.get_den() != 1) throw NotAnAnnulus(f.str("x") + " has non-integral coefficients");
        if (f.degree() > 1)
            throw UnsupportedTerm("only linear annulus polynomials are supported, got " + f.str("x"));
    };
    check_poly(phi.outer);
    for (auto &h : phi.holes) check_poly(h);
    if (phi.outer.eps && *phi.outer.eps < 0) throw NotAnAnnulus("outer radius exceeds 1");
    Disc O = outer_disc(phi.outer);
    if (!O.r && !O.closed) throw NotAnAnnulus("outer condition |" + phi.outer.poly.str("x") + "| < 0 is empty");
    std::vector<Disc> H;
    for (auto &h : phi.holes) {
        if (!h.eps && !h.strict)
            throw NotAnAnnulus("hole condition 0 <= |" + h.poly.str("x") + "| removes nothing");
        Disc d = hole_disc(h);
        if (!O.contains(d, phi.p)) throw NotAnAnnulus("hole " + d.str() + " is not inside " + O.str());
        H.push_back(d);
    }
    for (size_t i = 0; i < H.size(); ++i)
        for (size_t j = i + 1; j < H.size(); ++j)
            if (H[i].meets(H[j], phi.p))
                throw NotAnAnnulus("holes " + H[i].str() + " and " + H[j].str() + " intersect");
}

AnnulusDecomposition decompose_thin_laurent(const AnnulusFormula &phi) {
    validate(phi);
    Decomposer d{phi.p, {}};
    Disc O = outer_disc(phi.outer);
    std::vector<Disc> H;
    for (auto &h : phi.holes) H.push_back(hole_disc(h));
    if (!O.r) {
        d.enter(-1, H.size());
        if (H.empty()) d.out.pieces.push_back(point_formula(phi.p, O.c));
    } else if (O.closed) {
        d.closed(O.c, *O.r, H, -1);
    } else {
        d.open(O.c, *O.r, H, -1);
    }
    return d.out;
}

// ---------------------------------------------------------------- factoring

mpq_class FactoredPiece::eval(const mpq_class &x) const {
    mpq_class d = denominator.eval(x);
    if (d == 0) throw std::domain_error("denominator vanishes");
    return canon(numerator.eval(x) / d);
}

FactoredPiece factor_thin(const UPoly &f, const AnnulusFormula &thin, const PAdicContext &ctx) {
    if (thin.kind() != AnnulusKind::Thin) throw NotAnAnnulus(thin.str() + " is not thin");
    if (f.is_zero()) throw ZeroPolynomial("factor_thin of zero");
    const long p = ctx.p.get_si();
    const mpz_class c = thin.outer.center();
    const mpq_class r = *thin.outer.eps;
    std::vector<mpz_class> removed;
    for (auto &h : thin.holes) removed.push_back(h.center());
    auto removed_index = [&](const mpz_class &a) -> int {
        for (size_t k = 0; k < removed.size(); ++k)
            if (rad_less(Rad(r), ord_of(mpq_class(a - removed[k]), p))) return static_cast<int>(k);
        return -1;
    };

    FactoredPiece out;
    out.piece = thin;
    out.precision = ctx.M;
    out.exceptional = UPoly::constant(1);
    std::vector<long> n(removed.size(), 0);
    long m = vp(f.lead(), ctx.p);
    mpz_class unit;
    {
        mpq_class u = canon(f.lead() / pow_p(p, m));
        mpz_class den = mod_p(u.get_den(), p), inv;
        mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), mpz_class(p).get_mpz_t());
        unit = mod_p(u.get_num() * inv, p);
    }
    mpq_class delta = 1;
    const long rden = r.get_den().get_si();

    for (auto &[g, mult] : squarefree_decomposition(f)) {
        if (g.degree() < 1) continue;
        UPoly gy = g.monic().shift(mpq_class(c));
        SlopeFactorization sf = slope_factor(gy, ctx);
        out.precision = std::min(out.precision, sf.precision);
        for (auto &F : sf.factors) {
            int deg = static_cast<int>(F.factor.size()) - 1;
            // -1 outside the disc, -2 inside the piece, k >= 0 removed class k
            int where;
            if (!F.valuation) {
                where = removed_index(c);
                if (where < 0) where = -2;
            } else if (*F.valuation < r) {
                where = -1;
            } else if (*F.valuation > r) {
                where = removed_index(c);
                if (where < 0) where = -2;
            } else {
                where = -2;
                if (r.get_den() == 1) {
                    // residue of (y / p^r) for a single-root factor
                    std::vector<long> res = F.residue;
                    long rho = -1;
                    if (static_cast<int>(res.size()) == deg + 1 && deg >= 1) {
                        for (long t = 1; t < p; ++t) {
                            // check (u - t)^deg == res mod p
                            std::vector<long> pw{1};
                            for (int i = 0; i < deg; ++i) {
                                std::vector<long> nx(pw.size() + 1, 0);
                                for (size_t j = 0; j < pw.size(); ++j) {
                                    nx[j + 1] = (nx[j + 1] + pw[j]) % p;
                                    nx[j] = ((nx[j] - t * pw[j]) % p + p) % p;
                                }
                                pw = nx;
                            }
                            bool ok = true;
                            for (int i = 0; i <= deg; ++i)
                                if (((res[i] % p) + p) % p != pw[i]) ok = false;
                            if (ok) {
                                rho = t;
                                break;
                            }
                        }
                    }
                    if (rho > 0) {
                        mpz_class a = c + rho * ipow(ctx.p, r.get_num().get_ui());
                        int k = removed_index(a);
                        if (k >= 0) where = k;
                    }
                }
            }
            if (where == -1) {
                const PAdicNumber &f0 = F.factor[0];
                m += mult * ord(f0).to_long();
                mpz_class u = mod_p(f0.unit(), p);
                for (int i = 0; i < mult; ++i) unit = mod_p(unit * u, p);
                delta = std::min(delta, canon(r - *F.valuation));
            } else if (where >= 0) {
                n[where] += static_cast<long>(mult) * deg;
                delta = std::min(delta, canon(mpq_class(1, deg * rden)));
            } else {
                ExtInt prec = ExtInt::infinity();
                for (auto &co : F.factor) prec = std::min(prec, co.abs_prec());
                int N = prec.is_infinite() ? ctx.M : static_cast<int>(std::min<long>(prec.to_long(), ctx.M));
                out.precision = std::min(out.precision, N);
                std::vector<mpq_class> co;
                mpz_class mod = ipow(ctx.p, N);
                for (auto &a : F.factor) {
                    mpz_class v = a.is_zero() ? mpz_class(0) : a.residue_int(N);
                    if (v > mod / 2) v -= mod;
                    co.emplace_back(v);
                }
                UPoly P = UPoly(co).shift(mpq_class(-c));
                out.exceptional = out.exceptional * P;
                for (int i = 0; i < mult; ++i) out.numerator = out.numerator.is_zero() ? P : out.numerator * P;
            }
        }
    }
    UPoly num = out.numerator.is_zero() ? UPoly::constant(1) : out.numerator;
    for (size_t k = 0; k < removed.size(); ++k) num = num * upow(lin(removed[k]), n[k]);
    mpz_class su = unit > p / 2 ? mpz_class(unit - p) : unit;
    num = num * mpq_class(su);
    if (m >= 0) {
        out.numerator = num * pow_p(p, m);
        out.denominator = UPoly::constant(1);
    } else {
        out.numerator = num;
        out.denominator = UPoly::constant(mpq_class(pow_p(p, -m)));
    }
    out.delta = delta;
    return out;
}

std::vector<FactoredPiece> factor_laurent(const UPoly &f, const AnnulusFormula &laurent, const PAdicContext &ctx) {
    if (laurent.kind() != AnnulusKind::Laurent) throw NotAnAnnulus(laurent.str() + " is not Laurent");
    if (f.is_zero()) throw ZeroPolynomial("factor_laurent of zero");
    const long p = ctx.p.get_si();
    Disc O = outer_disc(laurent.outer);
    Disc Hd = hole_disc(laurent.holes[0]);
    const mpz_class a = Hd.c;
    const mpq_class lo = *O.r;
    const Rad hi = Hd.r;
    UPoly g = f.shift(mpq_class(a));
    NewtonPolygon np = newton_polygon(g, ctx.p);
    std::vector<mpq_class> vals = np.root_valuations();
    std::vector<mpq_class> cuts;
    for (auto &w : vals)
        if (w > lo && rad_less(Rad(w), hi) && (cuts.empty() || cuts.back() != w)) cuts.push_back(w);

    std::vector<FactoredPiece> out;
    auto open_piece = [&](const mpq_class &l, const Rad &h) {
        // number of roots of g with valuation >= h, counting the zero roots
        long i = np.zero_roots;
        for (auto &w : vals)
            if (!rad_less(Rad(w), h)) ++i;
        if (!h) i = np.zero_roots;
        mpq_class b = g.coeff(static_cast<int>(i));
        long m = vp(b, ctx.p);
        mpq_class u = canon(b / pow_p(p, m));
        mpz_class den = mod_p(u.get_den(), p), inv;
        mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), mpz_class(p).get_mpz_t());
        mpz_class un = mod_p(u.get_num() * inv, p);
        if (un > p / 2) un -= p;
        FactoredPiece fp;
        fp.piece = laurent_formula(p, a, l, h);
        UPoly num = upow(lin(a), i) * mpq_class(un);
        if (m >= 0) {
            fp.numerator = num * pow_p(p, m);
            fp.denominator = UPoly::constant(1);
        } else {
            fp.numerator = num;
            fp.denominator = UPoly::constant(pow_p(p, -m));
        }
        fp.delta = 0;
        fp.pointwise_only = true;
        fp.precision = ctx.M;
        fp.exceptional = UPoly::constant(1);
        out.push_back(fp);
    };
    mpq_class l = lo;
    for (auto &w : cuts) {
        open_piece(l, Rad(w));
        out.push_back(factor_thin(f, thin_formula(p, a, w, {a}), ctx));
        l = w;
    }
    open_piece(l, hi);
    return out;
}

std::vector<FactoredPiece> factor_on(const UPoly &f, const AnnulusFormula &phi, const PAdicContext &ctx) {
    std::vector<FactoredPiece> out;
    for (auto &piece : decompose_thin_laurent(phi).pieces) {
        switch (piece.kind()) {
        case AnnulusKind::Thin:
            out.push_back(factor_thin(f, piece, ctx));
            break;
        case AnnulusKind::Laurent:
            for (auto &fp : factor_laurent(f, piece, ctx)) out.push_back(fp);
            break;
        default: {
            // isolated point
            FactoredPiece fp;
            fp.piece = piece;
            fp.numerator = UPoly::constant(f.eval(mpq_class(piece.outer.center())));
            fp.denominator = UPoly::constant(1);
            fp.delta = 1;
            fp.precision = ctx.M;
            fp.exceptional = UPoly::constant(1);
            out.push_back(fp);
        }
        }
    }
    return out;
}

// ---------------------------------------------------------------- D-regions

namespace {

struct Center {
    mpz_class b;
    long n;
};

struct DRes {
    bool full = false;
    bool empty = false;
    std::vector<DPiece> pieces;
};

struct DRegion {
    long p;
    std::vector<Center> all;
    std::vector<LinearFactor> input;
    mpq_class e;
    bool strict;

    bool accept(const mpq_class &v) const { return strict ? v > e : v >= e; }

    mpq_class o(const mpz_class &x) const { return *ord_of(mpq_class(x), p); }

    // Local data for a piece where every center in 'tied' satisfies
    // ord(x - b) = ord(x - tie(b)) and the others are separated from 'anchor'.
    DPiece local(const AnnulusFormula &phi, const mpz_class &anchor,
                 const std::vector<std::pair<mpz_class, mpz_class>> &ties) const {
        DPiece d;
        d.piece = phi;
        std::map<mpz_class, long> mono;
        mpq_class C = 1;
        for (auto &c : all) {
            bool found = false;
            for (auto &[b, t] : ties)
                if (b == c.b) {
                    mono[t] += c.n;
                    found = true;
                }
            if (!found) {
                mpq_class base(anchor - c.b);
                C *= c.n >= 0 ? mpq_class(ipow(base.get_num(), c.n)) : canon(mpq_class(1, ipow(base.get_num(), -c.n)));
            }
        }
        d.constant = canon(C);
        for (auto &[t, k] : mono)
            if (k != 0) d.monomial.push_back({t, k});
        for (auto &lf : input) {
            FactorRelation rel;
            bool found = false;
            for (auto &[b, t] : ties)
                if (b == lf.center) {
                    rel.tied = true;
                    rel.tied_center = t;
                    found = true;
                }
            if (!found) rel.value = o(anchor - lf.center);
            d.relations.push_back(rel);
        }
        return d;
    }

    DPiece disc_piece(const Disc &D) const {
        std::vector<std::pair<mpz_class, mpz_class>> ties;
        for (auto &c : all)
            if (D.contains(c.b, p)) ties.push_back({c.b, c.b});
        return local(make_formula(p, D, {}), D.c, ties);
    }

    DRes closed(const mpz_class &c, const mpq_class &r) const {
        Disc D{c, r, true};
        std::vector<std::vector<Center>> classes;
        mpq_class V = 0;
        for (auto &x : all) {
            if (!D.contains(x.b, p)) {
                V += x.n * o(c - x.b);
                continue;
            }
            V += x.n * r;
            bool placed = false;
            for (auto &cl : classes)
                if (rad_less(Rad(r), ord_of(mpq_class(x.b - cl[0].b), p))) {
                    cl.push_back(x);
                    placed = true;
                    break;
                }
            if (!placed) classes.push_back({x});
        }
        DRes res;
        bool inc = accept(V);
        if (classes.empty()) {
            res.full = inc;
            res.empty = !inc;
            return res;
        }
        std::vector<DRes> kids;
        bool all_full = true, all_empty = true;
        for (auto &cl : classes) {
            kids.push_back(open(cl[0].b, r));
            all_full = all_full && kids.back().full;
            all_empty = all_empty && kids.back().empty;
        }
        if (inc && all_full) {
            res.full = true;
            return res;
        }
        if (!inc && all_empty) {
            res.empty = true;
            return res;
        }
        if (inc) {
            std::vector<mpz_class> reps;
            std::vector<std::pair<mpz_class, mpz_class>> ties;
            for (auto &cl : classes) {
                reps.push_back(cl[0].b);
                for (auto &x : cl) ties.push_back({x.b, cl[0].b});
            }
            res.pieces.push_back(local(thin_formula(p, c, r, reps), c, ties));
        }
        for (size_t k = 0; k < classes.size(); ++k) {
            if (kids[k].full)
                res.pieces.push_back(disc_piece({classes[k][0].b, r, false}));
            else
                for (auto &d : kids[k].pieces) res.pieces.push_back(d);
        }
        return res;
    }

    struct End {
        Rad v;
        bool closed;
    };

    DRes open(const mpz_class &c, const mpq_class &r) const {
        Disc D{c, r, false};
        std::vector<Center> in;
        for (auto &x : all)
            if (D.contains(x.b, p)) in.push_back(x);
        DRes res;
        if (in.empty()) {
            mpq_class V = 0;
            for (auto &x : all) V += x.n * o(c - x.b);
            res.full = accept(V);
            res.empty = !res.full;
            return res;
        }
        const mpz_class a1 = in[0].b;
        Rad s = std::nullopt;
        long beta = 0;
        for (auto &x : in) {
            s = rad_min(s, ord_of(mpq_class(x.b - a1), p));
            beta += x.n;
        }
        mpq_class alpha = 0;
        for (auto &x : all)
            if (!D.contains(x.b, p)) alpha += x.n * o(a1 - x.b);

        DRes inner;
        if (!s) {
            inner.full = beta > 0;
            inner.empty = !inner.full;
        } else {
            inner = closed(a1, *s);
        }

        End lo{Rad(r), false}, hi{s, false};
        bool none = false;
        if (beta == 0) {
            none = !accept(alpha);
        } else {
            mpq_class vs = canon((e - alpha) / beta);
            if (beta > 0) {
                if (vs > r) lo = {Rad(vs), !strict};
            } else {
                if (rad_less(Rad(vs), s)) hi = {Rad(vs), !strict};
                if (vs <= r) none = true;
            }
        }
        if (!none) {
            if (rad_less(hi.v, lo.v)) none = true;
            if (rad_eq(hi.v, lo.v) && !(hi.closed && lo.closed)) none = true;
        }
        bool whole = !none && rad_eq(lo.v, Rad(r)) && !lo.closed && rad_eq(hi.v, s) && !hi.closed;
        if (whole && inner.full) {
            res.full = true;
            return res;
        }
        if (none && inner.empty) {
            res.empty = true;
            return res;
        }
        bool reaches_top = !none && rad_eq(hi.v, s) && !hi.closed;
        if (inner.full && reaches_top) {
            res.pieces.push_back(disc_piece({a1, lo.v, lo.closed}));
            return res;
        }
        if (!none) {
            AnnulusFormula phi;
            phi.p = p;
            phi.outer = AnnulusBound::linear(a1, lo.v, !lo.closed);
            // hole removes what lies above hi
            phi.holes.push_back(AnnulusBound::linear(a1, hi.v, !hi.closed));
            std::vector<std::pair<mpz_class, mpz_class>> ties;
            for (auto &x : in) ties.push_back({x.b, a1});
            res.pieces.push_back(local(phi, a1, ties));
        }
        if (inner.full)
            res.pieces.push_back(disc_piece({a1, s, true}));
        else
            for (auto &d : inner.pieces) res.pieces.push_back(d);
        return res;
    }
};

} // namespace

std::vector<DPiece> decompose_D_region(long p, const std::vector<LinearFactor> &R, const mpq_class &e, bool strict) {
    DRegion dr{p, {}, R, canon(e), strict};
    for (auto &lf : R) {
        if (lf.exponent == 0) continue;
        bool merged = false;
        for (auto &c : dr.all)
            if (c.b == lf.center) {
                c.n += lf.exponent;
                merged = true;
            }
        if (!merged) dr.all.push_back({lf.center, lf.exponent});
    }
    dr.all.erase(std::remove_if(dr.all.begin(), dr.all.end(), [](const Center &c) { return c.n == 0; }),
                 dr.all.end());
    DRes top = dr.closed(0, 0);
    if (top.full) return {dr.disc_piece({0, mpq_class(0), true})};
    return top.pieces;
}

} // namespace padint

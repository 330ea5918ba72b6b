#include "padint/dplang.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <regex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "padint/errors.hpp"

namespace padint {

std::string Sort::str() const {
    switch (kind) {
    case SortKind::Val: return "Val";
    case SortKind::Ord: return "Ord";
    case SortKind::Res: return "Res_" + std::to_string(m);
    case SortKind::Bool: return "Bool";
    }
    return "?";
}

bool Expr::operator==(const Expr &o) const {
    if (op != o.op || sort != o.sort || name != o.name || num != o.num || m != o.m || e != o.e) return false;
    if ((op == Op::Exists || op == Op::Forall) && bound != o.bound) return false;
    if (kids.size() != o.kids.size()) return false;
    for (size_t i = 0; i < kids.size(); ++i)
        if (!same(kids[i], o.kids[i])) return false;
    return true;
}

bool same(const ExprP &a, const ExprP &b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

namespace {

const Sort kNoAnnot = Sort::boolean();

ExprP mk(Op op, std::vector<ExprP> kids = {}, size_t pos = 0) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->kids = std::move(kids);
    e->pos = pos;
    e->bound = kNoAnnot;
    return e;
}

// ---------------------------------------------------------------- lexer

enum class Tok { Int, Ident, Series, Sym, End };

struct Token {
    Tok kind;
    std::string text;
    size_t pos;
};

std::vector<Token> lex(const std::string &s) {
    std::vector<Token> out;
    size_t i = 0;
    auto err = [&](const std::string &msg) { throw SyntaxError(msg + " at offset " + std::to_string(i)); };
    while (i < s.size()) {
        unsigned char c = s[i];
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        size_t st = i;
        if (std::isdigit(c)) {
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            out.push_back({Tok::Int, s.substr(st, i - st), st});
            continue;
        }
        if (c == 'S' && i + 1 < s.size() && s[i + 1] == '"') {
            size_t close = s.find('"', i + 2);
            if (close == std::string::npos) err("unterminated series name");
            out.push_back({Tok::Series, s.substr(i + 2, close - i - 2), st});
            i = close + 1;
            continue;
        }
        if (std::isalpha(c) || c == '_') {
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
            std::string id = s.substr(st, i - st);
            if (!id.empty() && id.back() == '_' && i < s.size() && s[i] == '{') {
                size_t close = s.find('}', i);
                if (close == std::string::npos) err("unterminated index");
                id += s.substr(i, close - i + 1);
                i = close + 1;
            }
            out.push_back({Tok::Ident, id, st});
            continue;
        }
        static const char *two[] = {"!=", "<=", ">="};
        bool done = false;
        for (auto *t : two)
            if (s.compare(i, 2, t) == 0) {
                out.push_back({Tok::Sym, t, st});
                i += 2;
                done = true;
                break;
            }
        if (done) continue;
        if (std::string("()+-*/^=<>&|!:.,").find(static_cast<char>(c)) != std::string::npos) {
            out.push_back({Tok::Sym, std::string(1, static_cast<char>(c)), st});
            ++i;
            continue;
        }
        err(std::string("unexpected character '") + static_cast<char>(c) + "'");
    }
    out.push_back({Tok::End, "", s.size()});
    return out;
}

// ---------------------------------------------------------------- parser

struct Parser {
    std::vector<Token> toks;
    size_t k = 0;

    const Token &cur() const { return toks[k]; }
    bool is_sym(const std::string &s) const { return cur().kind == Tok::Sym && cur().text == s; }
    bool is_ident(const std::string &s) const { return cur().kind == Tok::Ident && cur().text == s; }
    [[noreturn]] void fail(const std::string &msg) const {
        throw SyntaxError(msg + " at offset " + std::to_string(cur().pos) +
                          (cur().kind == Tok::End ? " (end of input)" : " near '" + cur().text + "'"));
    }
    void expect(const std::string &s) {
        if (!is_sym(s)) fail("expected '" + s + "'");
        ++k;
    }
    long integer() {
        if (cur().kind != Tok::Int) fail("expected an integer");
        long v = std::stol(cur().text);
        ++k;
        return v;
    }

    Sort sort_name() {
        if (cur().kind != Tok::Ident) fail("expected a sort name");
        std::string s = cur().text;
        ++k;
        if (s == "Val") return Sort::val();
        if (s == "Ord") return Sort::ord();
        std::smatch mm;
        static const std::regex re("Res_([0-9]+)");
        if (std::regex_match(s, mm, re)) {
            int m = std::stoi(mm[1]);
            if (m < 1) throw SyntaxError("Res index must be positive");
            return Sort::res(m);
        }
        --k;
        fail("unknown sort");
    }

    ExprP formula() {
        ExprP l = conj();
        while (is_sym("|")) {
            size_t p = cur().pos;
            ++k;
            l = mk(Op::Or, {l, conj()}, p);
        }
        return l;
    }
    ExprP conj() {
        ExprP l = unary();
        while (is_sym("&")) {
            size_t p = cur().pos;
            ++k;
            l = mk(Op::And, {l, unary()}, p);
        }
        return l;
    }
    ExprP unary() {
        size_t p = cur().pos;
        if (is_sym("!")) {
            ++k;
            return mk(Op::Not, {unary()}, p);
        }
        if (is_ident("E") || is_ident("A")) {
            Op q = cur().text == "E" ? Op::Exists : Op::Forall;
            ++k;
            if (cur().kind != Tok::Ident) fail("expected a bound variable");
            std::string v = cur().text;
            ++k;
            expect(":");
            Sort s = sort_name();
            expect(".");
            auto e = std::const_pointer_cast<Expr>(mk(q, {unary()}, p));
            e->name = v;
            e->bound = s;
            return e;
        }
        if (is_ident("true") || is_ident("false")) {
            Op o = cur().text == "true" ? Op::True : Op::False;
            ++k;
            return mk(o, {}, p);
        }
        if (is_sym("(")) {
            size_t save = k;
            try {
                ++k;
                ExprP f = formula();
                expect(")");
                if (!is_relop()) return f;
            } catch (const SyntaxError &) {
            }
            k = save;
        }
        return atom();
    }
    bool is_relop() const {
        for (auto *s : {"=", "!=", "<", "<=", ">", ">="})
            if (is_sym(s)) return true;
        return false;
    }
    ExprP atom() {
        size_t p = cur().pos;
        ExprP l = term();
        if (!is_relop()) fail("expected a comparison");
        std::string r = cur().text;
        ++k;
        ExprP rt = term();
        Op o = r == "=" ? Op::Eq : r == "!=" ? Op::Ne : r == "<" ? Op::Lt : r == "<=" ? Op::Le : r == ">" ? Op::Gt : Op::Ge;
        if (is_ident("mod")) {
            if (o != Op::Eq) fail("mod needs '='");
            ++k;
            long n = integer();
            if (n < 1) fail("modulus must be positive");
            auto e = std::const_pointer_cast<Expr>(mk(Op::Cong, {l, rt}, p));
            e->num = n;
            return e;
        }
        return mk(o, {l, rt}, p);
    }

    ExprP term() {
        size_t p = cur().pos;
        ExprP l;
        if (is_sym("-")) {
            ++k;
            ExprP a = product();
            if (a->op == Op::Int) {
                auto e = std::const_pointer_cast<Expr>(mk(Op::Int, {}, p));
                e->num = -a->num;
                l = e;
            } else {
                l = mk(Op::Neg, {a}, p);
            }
        } else {
            l = product();
        }
        while (is_sym("+") || is_sym("-")) {
            Op o = cur().text == "+" ? Op::Add : Op::Sub;
            size_t q = cur().pos;
            ++k;
            l = mk(o, {l, product()}, q);
        }
        return l;
    }
    ExprP product() {
        ExprP l = power();
        while (is_sym("*") || is_sym("/")) {
            Op o = cur().text == "*" ? Op::Mul : Op::Div;
            size_t q = cur().pos;
            ++k;
            l = mk(o, {l, power()}, q);
        }
        return l;
    }
    ExprP power() {
        ExprP b = primary();
        if (is_sym("^")) {
            size_t q = cur().pos;
            ++k;
            bool neg = false;
            if (is_sym("-")) {
                neg = true;
                ++k;
            }
            long n = integer();
            auto e = std::const_pointer_cast<Expr>(mk(Op::Pow, {b}, q));
            e->num = neg ? -n : n;
            return e;
        }
        return b;
    }
    std::vector<ExprP> args() {
        expect("(");
        std::vector<ExprP> a;
        if (!is_sym(")")) {
            a.push_back(term());
            while (is_sym(",")) {
                ++k;
                a.push_back(term());
            }
        }
        expect(")");
        return a;
    }
    ExprP primary() {
        size_t p = cur().pos;
        if (cur().kind == Tok::Int) {
            auto e = std::const_pointer_cast<Expr>(mk(Op::Int, {}, p));
            e->num = mpz_class(cur().text);
            ++k;
            return e;
        }
        if (is_sym("(")) {
            ++k;
            ExprP t = term();
            expect(")");
            return t;
        }
        if (cur().kind == Tok::Series) {
            std::string nm = cur().text;
            ++k;
            auto e = std::const_pointer_cast<Expr>(mk(Op::Series, args(), p));
            e->name = nm;
            return e;
        }
        if (cur().kind != Tok::Ident) fail("expected a term");
        std::string id = cur().text;
        ++k;
        static const std::regex ac_re("ac_([0-9]+)"), res_re("res_([0-9]+)"),
            ext_re("(h|root)_\\{([0-9]+),([0-9]+)\\}");
        std::smatch mm;
        if (id == "t0") return mk(Op::T0, {}, p);
        if (id == "ord") {
            auto a = args();
            if (a.size() != 1) throw SortError("ord takes one argument at offset " + std::to_string(p));
            return mk(Op::OrdOf, a, p);
        }
        if (std::regex_match(id, mm, ac_re) || std::regex_match(id, mm, res_re)) {
            int m = std::stoi(mm[1]);
            if (m < 1) throw SyntaxError("depth must be positive at offset " + std::to_string(p));
            auto a = args();
            if (a.size() != 1) throw SortError(id + " takes one argument at offset " + std::to_string(p));
            auto e = std::const_pointer_cast<Expr>(mk(id[0] == 'a' ? Op::Ac : Op::ResOf, a, p));
            e->m = m;
            return e;
        }
        if (std::regex_match(id, mm, ext_re)) {
            int m = std::stoi(mm[2]), ee = std::stoi(mm[3]);
            if (m < 1) throw SyntaxError("root index must be positive at offset " + std::to_string(p));
            auto a = args();
            bool h = mm[1] == "h";
            size_t want = h ? static_cast<size_t>(m) + 2 : 3;
            if (a.size() != want)
                throw SortError(id + " takes " + std::to_string(want) + " arguments, got " + std::to_string(a.size()) +
                                " at offset " + std::to_string(p));
            auto e = std::const_pointer_cast<Expr>(mk(h ? Op::Hensel : Op::Root, a, p));
            e->m = m;
            e->e = ee;
            return e;
        }
        if (id == "mod" || id == "E" || id == "A" || id == "true" || id == "false") {
            --k;
            fail("reserved word");
        }
        auto e = std::const_pointer_cast<Expr>(mk(Op::Var, {}, p));
        e->name = id;
        if (is_sym(":")) {
            ++k;
            e->bound = sort_name();
        }
        return e;
    }
};

// ---------------------------------------------------------------- typing

struct Typer {
    std::map<std::string, Sort> free;
    std::vector<std::pair<std::string, Sort>> scope;
    bool changed = false;

    std::optional<Sort> lookup(const std::string &n) const {
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
            if (it->first == n) return it->second;
        auto f = free.find(n);
        if (f != free.end()) return f->second;
        return std::nullopt;
    }

    [[noreturn]] static void sort_error(const ExprP &e, const std::string &msg) {
        throw SortError(msg + " at offset " + std::to_string(e->pos));
    }

    void declare(const ExprP &e, const Sort &s) {
        auto f = free.find(e->name);
        if (f == free.end()) {
            free[e->name] = s;
            changed = true;
        } else if (f->second != s) {
            sort_error(e, "variable " + e->name + " used as " + s.str() + " and " + f->second.str());
        }
    }

    std::optional<Sort> synth(const ExprP &e) const {
        switch (e->op) {
        case Op::Var: return lookup(e->name);
        case Op::Int: return std::nullopt;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Neg:
            for (auto &k : e->kids)
                if (auto s = synth(k)) return s;
            return std::nullopt;
        case Op::Pow: return synth(e->kids[0]);
        case Op::OrdOf:
        case Op::RefOrd: return Sort::ord();
        case Op::Ac:
        case Op::ResOf:
        case Op::RefAc: return Sort::res(e->m);
        default: return Sort::val();
        }
    }

    // Pass 1: record sorts of free variables forced by context.
    void collect(const ExprP &e, std::optional<Sort> want) {
        switch (e->op) {
        case Op::Var:
            if (e->bound != kNoAnnot) declare(e, e->bound);
            if (want && !lookup(e->name)) declare(e, *want);
            return;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Neg: {
            auto s = want ? want : synth(e);
            for (auto &k : e->kids) collect(k, s);
            return;
        }
        case Op::Pow: collect(e->kids[0], want); return;
        case Op::Div:
        case Op::Series:
        case Op::OrdOf:
        case Op::Ac:
        case Op::ResOf:
            for (auto &k : e->kids) collect(k, Sort::val());
            return;
        case Op::Root:
            collect(e->kids[0], Sort::val());
            collect(e->kids[1], Sort::res(2 * e->e + 1));
            collect(e->kids[2], Sort::ord());
            return;
        case Op::Hensel:
            for (size_t i = 0; i + 1 < e->kids.size(); ++i) collect(e->kids[i], Sort::val());
            collect(e->kids.back(), Sort::res(2 * e->e + 1));
            return;
        case Op::Eq:
        case Op::Ne: {
            auto s = synth(e->kids[0]);
            if (!s) s = synth(e->kids[1]);
            collect(e->kids[0], s);
            collect(e->kids[1], s);
            return;
        }
        case Op::Lt:
        case Op::Le:
        case Op::Gt:
        case Op::Ge:
        case Op::Cong:
            collect(e->kids[0], Sort::ord());
            collect(e->kids[1], Sort::ord());
            return;
        case Op::Not:
        case Op::And:
        case Op::Or:
            for (auto &k : e->kids) collect(k, std::nullopt);
            return;
        case Op::Exists:
        case Op::Forall:
            scope.push_back({e->name, e->bound});
            collect(e->kids[0], std::nullopt);
            scope.pop_back();
            return;
        default: return;
        }
    }

    ExprP with(const ExprP &e, Sort s, std::vector<ExprP> kids) {
        auto n = std::make_shared<Expr>(*e);
        n->sort = s;
        n->kids = std::move(kids);
        if (n->op == Op::Var) n->bound = kNoAnnot;
        return n;
    }

    static void need_term(const ExprP &e, const Sort &s) {
        if (s.kind == SortKind::Bool) sort_error(e, "term used where a formula is expected");
    }

    ExprP check(const ExprP &e, std::optional<Sort> want) {
        auto expect_sort = [&](const Sort &got) {
            if (want && *want != got)
                sort_error(e, "expected sort " + want->str() + ", found " + got.str());
            return got;
        };
        switch (e->op) {
        case Op::Var: {
            if (e->bound != kNoAnnot) declare(e, e->bound);
            auto s = lookup(e->name);
            if (!s) {
                s = want ? *want : Sort::val();
                free[e->name] = *s;
            }
            need_term(e, *s);
            return with(e, expect_sort(*s), {});
        }
        case Op::Int: {
            Sort s = want ? *want : Sort::val();
            need_term(e, s);
            return with(e, s, {});
        }
        case Op::T0: return with(e, expect_sort(Sort::val()), {});
        case Op::Add:
        case Op::Sub:
        case Op::Neg:
        case Op::Mul: {
            std::optional<Sort> s = want ? want : synth(e);
            if (!s) s = Sort::val();
            need_term(e, *s);
            std::vector<ExprP> ks;
            for (auto &k : e->kids) ks.push_back(check(k, s));
            if (e->op == Op::Mul && s->kind == SortKind::Ord && ks[0]->op != Op::Int && ks[1]->op != Op::Int)
                sort_error(e, "Ord multiplication needs an integer factor");
            return with(e, *s, ks);
        }
        case Op::Pow: {
            std::optional<Sort> s = want ? want : synth(e);
            if (!s) s = Sort::val();
            if (s->kind == SortKind::Ord || s->kind == SortKind::Bool) sort_error(e, "power of a non-ring sort");
            if (s->kind == SortKind::Res && e->num < 0) sort_error(e, "negative power in a residue ring");
            return with(e, *s, {check(e->kids[0], s)});
        }
        case Op::Div:
            expect_sort(Sort::val());
            return with(e, Sort::val(), {check(e->kids[0], Sort::val()), check(e->kids[1], Sort::val())});
        case Op::Series: {
            expect_sort(Sort::val());
            std::vector<ExprP> ks;
            for (auto &k : e->kids) ks.push_back(check(k, Sort::val()));
            return with(e, Sort::val(), ks);
        }
        case Op::Root:
            expect_sort(Sort::val());
            return with(e, Sort::val(),
                        {check(e->kids[0], Sort::val()), check(e->kids[1], Sort::res(2 * e->e + 1)),
                         check(e->kids[2], Sort::ord())});
        case Op::Hensel: {
            expect_sort(Sort::val());
            std::vector<ExprP> ks;
            for (size_t i = 0; i + 1 < e->kids.size(); ++i) ks.push_back(check(e->kids[i], Sort::val()));
            ks.push_back(check(e->kids.back(), Sort::res(2 * e->e + 1)));
            return with(e, Sort::val(), ks);
        }
        case Op::OrdOf: return with(e, expect_sort(Sort::ord()), {check(e->kids[0], Sort::val())});
        case Op::Ac:
        case Op::ResOf: return with(e, expect_sort(Sort::res(e->m)), {check(e->kids[0], Sort::val())});
        case Op::RefOrd: return with(e, expect_sort(Sort::ord()), {});
        case Op::RefAc: return with(e, expect_sort(Sort::res(e->m)), {});
        case Op::True:
        case Op::False: return with(e, expect_sort(Sort::boolean()), {});
        case Op::Eq:
        case Op::Ne: {
            expect_sort(Sort::boolean());
            auto s = synth(e->kids[0]);
            if (!s) s = synth(e->kids[1]);
            if (!s) s = Sort::val();
            return with(e, Sort::boolean(), {check(e->kids[0], s), check(e->kids[1], s)});
        }
        case Op::Lt:
        case Op::Le:
        case Op::Gt:
        case Op::Ge:
        case Op::Cong:
            expect_sort(Sort::boolean());
            return with(e, Sort::boolean(), {check(e->kids[0], Sort::ord()), check(e->kids[1], Sort::ord())});
        case Op::Not:
        case Op::And:
        case Op::Or: {
            expect_sort(Sort::boolean());
            std::vector<ExprP> ks;
            for (auto &k : e->kids) ks.push_back(check(k, Sort::boolean()));
            return with(e, Sort::boolean(), ks);
        }
        case Op::Exists:
        case Op::Forall: {
            expect_sort(Sort::boolean());
            scope.push_back({e->name, e->bound});
            ExprP b = check(e->kids[0], Sort::boolean());
            scope.pop_back();
            auto n = std::make_shared<Expr>(*e);
            n->sort = Sort::boolean();
            n->kids = {b};
            return n;
        }
        }
        sort_error(e, "unknown node");
    }
};

ExprP typecheck(const ExprP &raw, const std::map<std::string, Sort> &decls, bool formula) {
    Typer t;
    t.free = decls;
    for (int it = 0; it < 8; ++it) {
        t.changed = false;
        t.collect(raw, formula ? std::optional<Sort>() : t.synth(raw));
        if (!t.changed) break;
    }
    return t.check(raw, formula ? std::optional<Sort>(Sort::boolean()) : std::nullopt);
}

ExprP parse_any(const std::string &src, const std::map<std::string, Sort> &decls, bool formula) {
    Parser p{lex(src)};
    ExprP raw = formula ? p.formula() : p.term();
    if (p.cur().kind != Tok::End) p.fail("trailing input");
    return typecheck(raw, decls, formula);
}

// ---------------------------------------------------------------- printing

int prec(const ExprP &e) {
    switch (e->op) {
    case Op::Add:
    case Op::Sub:
    case Op::Neg: return 1;
    case Op::Int: return e->num < 0 ? 1 : 5;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Pow: return 3;
    default: return 5;
    }
}

struct Printer {
    std::set<std::string> annotate;
    std::vector<std::string> bound;

    std::string var(const ExprP &e) {
        bool is_bound = std::find(bound.begin(), bound.end(), e->name) != bound.end();
        if (!is_bound && annotate.count(e->name)) {
            annotate.erase(e->name);
            return e->name + ":" + e->sort.str();
        }
        return e->name;
    }

    std::string list(const std::vector<ExprP> &ks) {
        std::string s = "(";
        for (size_t i = 0; i < ks.size(); ++i) s += (i ? ", " : "") + term(ks[i], 0, true);
        return s + ")";
    }

    // min: minimal precedence allowed without parentheses; start: the term
    // begins a sum, where a leading minus is allowed.
    std::string term(const ExprP &e, int min, bool start) {
        bool neg_like = e->op == Op::Neg || (e->op == Op::Int && e->num < 0);
        bool paren = prec(e) < min || (neg_like && !start);
        std::string s;
        switch (e->op) {
        case Op::Var: s = var(e); break;
        case Op::Int: s = e->num.get_str(); break;
        case Op::T0: s = "t0"; break;
        case Op::Add: s = term(e->kids[0], 1, true) + " + " + term(e->kids[1], 2, false); break;
        case Op::Sub: s = term(e->kids[0], 1, true) + " - " + term(e->kids[1], 2, false); break;
        case Op::Neg: s = "-" + term(e->kids[0], 2, false); break;
        case Op::Mul: s = term(e->kids[0], 2, false) + "*" + term(e->kids[1], 3, false); break;
        case Op::Div: s = term(e->kids[0], 2, false) + "/" + term(e->kids[1], 3, false); break;
        case Op::Pow: s = term(e->kids[0], 5, false) + "^" + e->num.get_str(); break;
        case Op::Series: s = "S\"" + e->name + "\"" + list(e->kids); break;
        case Op::Root: s = "root_{" + std::to_string(e->m) + "," + std::to_string(e->e) + "}" + list(e->kids); break;
        case Op::Hensel: s = "h_{" + std::to_string(e->m) + "," + std::to_string(e->e) + "}" + list(e->kids); break;
        case Op::OrdOf: s = "ord" + list(e->kids); break;
        case Op::Ac: s = "ac_" + std::to_string(e->m) + list(e->kids); break;
        case Op::ResOf: s = "res_" + std::to_string(e->m) + list(e->kids); break;
        case Op::RefOrd: s = "ord(f" + e->num.get_str() + ")"; break;
        case Op::RefAc: s = "ac_" + std::to_string(e->m) + "(f" + e->num.get_str() + ")"; break;
        default: s = "?";
        }
        return paren ? "(" + s + ")" : s;
    }

    static int fprec(const ExprP &e) {
        if (e->op == Op::Or) return 1;
        if (e->op == Op::And) return 2;
        return 3;
    }

    std::string formula(const ExprP &e, int min) {
        std::string s;
        switch (e->op) {
        case Op::True: return "true";
        case Op::False: return "false";
        case Op::Eq:
        case Op::Ne:
        case Op::Lt:
        case Op::Le:
        case Op::Gt:
        case Op::Ge:
        case Op::Cong: {
            static const std::map<Op, std::string> rel = {{Op::Eq, " = "}, {Op::Ne, " != "}, {Op::Lt, " < "},
                                                          {Op::Le, " <= "}, {Op::Gt, " > "}, {Op::Ge, " >= "},
                                                          {Op::Cong, " = "}};
            s = term(e->kids[0], 0, true) + rel.at(e->op) + term(e->kids[1], 0, true);
            if (e->op == Op::Cong) s += " mod " + e->num.get_str();
            return s;
        }
        case Op::Not: return "!(" + formula(e->kids[0], 0) + ")";
        case Op::And: s = formula(e->kids[0], 2) + " & " + formula(e->kids[1], 3); break;
        case Op::Or: s = formula(e->kids[0], 1) + " | " + formula(e->kids[1], 2); break;
        case Op::Exists:
        case Op::Forall: {
            bound.push_back(e->name);
            s = std::string(e->op == Op::Exists ? "E " : "A ") + e->name + ":" + e->bound.str() + ". (" +
                formula(e->kids[0], 0) + ")";
            bound.pop_back();
            return s;
        }
        default: return term(e, 0, true);
        }
        return fprec(e) < min ? "(" + s + ")" : s;
    }

    std::string any(const ExprP &e) { return e->is_formula() ? formula(e, 0) : term(e, 0, true); }
};

void free_vars(const ExprP &e, std::vector<std::string> &bound, std::map<std::string, Sort> &out) {
    if (e->op == Op::Var && std::find(bound.begin(), bound.end(), e->name) == bound.end()) out[e->name] = e->sort;
    if (e->op == Op::Exists || e->op == Op::Forall) bound.push_back(e->name);
    for (auto &k : e->kids) free_vars(k, bound, out);
    if (e->op == Op::Exists || e->op == Op::Forall) bound.pop_back();
}

} // namespace

ExprP parse_term(const std::string &src, const std::map<std::string, Sort> &decls) {
    return parse_any(src, decls, false);
}

ExprP parse_formula(const std::string &src, const std::map<std::string, Sort> &decls) {
    return parse_any(src, decls, true);
}

std::string to_string(const ExprP &e) {
    Printer plain;
    std::string s = plain.any(e);
    try {
        ExprP back = parse_any(s, {}, e->is_formula());
        if (same(back, e)) return s;
    } catch (const Error &) {
    }
    // Annotate the first occurrence of each free non-Val variable.
    std::vector<std::string> b;
    std::map<std::string, Sort> fv;
    free_vars(e, b, fv);
    Printer ann;
    for (auto &[n, s2] : fv)
        if (s2.kind != SortKind::Val) ann.annotate.insert(n);
    return ann.any(e);
}

std::string to_json(const ExprP &e) {
    std::function<nlohmann::json(const ExprP &)> go = [&](const ExprP &x) {
        static const char *names[] = {"Var",  "Int",   "T0",   "Add",   "Sub", "Mul",  "Neg",   "Pow",
                                      "Div",  "Series", "Root", "Hensel", "ord", "ac",   "res",   "ref_ord",
                                      "ref_ac", "true", "false", "=",    "!=",  "<",    "<=",    ">",
                                      ">=",   "cong",  "not",  "and",   "or",  "exists", "forall"};
        nlohmann::json j;
        j["op"] = names[static_cast<int>(x->op)];
        j["sort"] = x->sort.str();
        if (!x->name.empty()) j["name"] = x->name;
        if (x->op == Op::Int || x->op == Op::Pow || x->op == Op::Cong || x->op == Op::RefOrd || x->op == Op::RefAc)
            j["num"] = x->num.get_str();
        if (x->m) j["m"] = x->m;
        if (x->op == Op::Root || x->op == Op::Hensel) j["e"] = x->e;
        if (x->op == Op::Exists || x->op == Op::Forall) j["bound"] = x->bound.str();
        if (!x->kids.empty()) {
            j["args"] = nlohmann::json::array();
            for (auto &k : x->kids) j["args"].push_back(go(k));
        }
        return j;
    };
    return go(e).dump();
}

// ---------------------------------------------------------------- evaluation

std::string Value::str() const {
    switch (sort.kind) {
    case SortKind::Val: return val.str();
    case SortKind::Res: return res.get_str() + " (Res_" + std::to_string(sort.m) + ")";
    case SortKind::Ord: return ord.str();
    default: return "?";
    }
}

namespace {

mpz_class modpos(const mpz_class &a, const mpz_class &m) {
    mpz_class r = a % m;
    if (r < 0) r += m;
    return r;
}

struct Evaluator {
    const Env &env;
    const PAdicContext &ctx;
    std::vector<std::pair<std::string, Value>> scope;
    const std::vector<Value> *refs = nullptr;

    const Value &lookup(const ExprP &e) const {
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
            if (it->first == e->name) return it->second;
        auto f = env.vars.find(e->name);
        if (f == env.vars.end()) throw std::invalid_argument("unbound variable " + e->name);
        return f->second;
    }

    Value check_sort(const Value &v, const ExprP &e) const {
        if (v.sort != e->sort)
            throw SortError("variable " + e->name + " bound to " + v.sort.str() + ", expected " + e->sort.str());
        return v;
    }

    static ExtInt ord_add(const ExtInt &a, const ExtInt &b) { return a + b; }
    static ExtInt ord_neg(const ExtInt &a) {
        if (a.is_infinite()) throw UnsupportedFragment("negation of ord of zero");
        return ExtInt(mpz_class(-a.value()));
    }
    static ExtInt ord_scale(const mpz_class &k, const ExtInt &a) {
        if (a.is_infinite()) {
            if (k > 0) return a;
            if (k == 0) return ExtInt(0L);
            throw UnsupportedFragment("negative multiple of ord of zero");
        }
        return ExtInt(mpz_class(k * a.value()));
    }

    PAdicNumber inv(const PAdicNumber &x) const {
        if (x.is_zero()) return PAdicNumber::zero(ctx);
        return PAdicNumber::from_int(ctx, 1) / x;
    }

    Value term(const ExprP &e) {
        const Sort &s = e->sort;
        auto mod = [&]() { return ctx.modulus(s.m); };
        switch (e->op) {
        case Op::Var: return check_sort(lookup(e), e);
        case Op::Int:
            if (s.kind == SortKind::Val) return Value::of_val(PAdicNumber::from_int(ctx, e->num));
            if (s.kind == SortKind::Res) return Value::of_res(s.m, modpos(e->num, mod()));
            return Value::of_ord(ExtInt(e->num));
        case Op::T0: return Value::of_val(PAdicNumber::from_int(ctx, ctx.p));
        case Op::Add:
        case Op::Sub: {
            Value a = term(e->kids[0]), b = term(e->kids[1]);
            bool add = e->op == Op::Add;
            if (s.kind == SortKind::Val) return Value::of_val(add ? a.val + b.val : a.val - b.val);
            if (s.kind == SortKind::Res) return Value::of_res(s.m, modpos(add ? mpz_class(a.res + b.res) : mpz_class(a.res - b.res), mod()));
            return Value::of_ord(add ? ord_add(a.ord, b.ord) : ord_add(a.ord, ord_neg(b.ord)));
        }
        case Op::Neg: {
            Value a = term(e->kids[0]);
            if (s.kind == SortKind::Val) return Value::of_val(-a.val);
            if (s.kind == SortKind::Res) return Value::of_res(s.m, modpos(-a.res, mod()));
            return Value::of_ord(ord_neg(a.ord));
        }
        case Op::Mul: {
            if (s.kind == SortKind::Ord) {
                const ExprP &ki = e->kids[0]->op == Op::Int ? e->kids[0] : e->kids[1];
                const ExprP &ko = e->kids[0]->op == Op::Int ? e->kids[1] : e->kids[0];
                return Value::of_ord(ord_scale(ki->num, term(ko).ord));
            }
            Value a = term(e->kids[0]), b = term(e->kids[1]);
            if (s.kind == SortKind::Val) return Value::of_val(a.val * b.val);
            return Value::of_res(s.m, modpos(a.res * b.res, mod()));
        }
        case Op::Pow: {
            Value a = term(e->kids[0]);
            long n = e->num.get_si();
            if (s.kind == SortKind::Res) {
                mpz_class r;
                mpz_powm_ui(r.get_mpz_t(), a.res.get_mpz_t(), static_cast<unsigned long>(n), mod().get_mpz_t());
                return Value::of_res(s.m, r);
            }
            PAdicNumber b = n >= 0 ? a.val : inv(a.val);
            return Value::of_val(b.pow(static_cast<unsigned>(n >= 0 ? n : -n)));
        }
        case Op::Div: {
            Value a = term(e->kids[0]), b = term(e->kids[1]);
            return Value::of_val(a.val * inv(b.val));
        }
        case Op::Series: {
            auto f = env.series.find(e->name);
            if (f == env.series.end()) throw UnsupportedTerm("unknown series symbol " + e->name);
            std::vector<PAdicNumber> pt;
            for (auto &k : e->kids) pt.push_back(term(k).val);
            if (static_cast<int>(pt.size()) != f->second.m() + f->second.n())
                throw SortError("series " + e->name + " applied to " + std::to_string(pt.size()) + " arguments");
            return Value::of_val(f->second.eval(pt, ctx));
        }
        case Op::Root: {
            Value x = term(e->kids[0]), xi = term(e->kids[1]), z = term(e->kids[2]);
            if (z.ord.is_infinite()) return Value::of_val(PAdicNumber::zero(ctx));
            return Value::of_val(mth_root(x.val, xi.res, z.ord.to_long(), e->m, e->e));
        }
        case Op::Hensel: {
            std::vector<PAdicNumber> a;
            for (size_t i = 0; i + 1 < e->kids.size(); ++i) a.push_back(term(e->kids[i]).val);
            Value xi = term(e->kids.back());
            return Value::of_val(hensel_root(a, xi.res, e->e));
        }
        case Op::OrdOf: return Value::of_ord(ord(term(e->kids[0]).val));
        case Op::Ac: return Value::of_res(e->m, ac(term(e->kids[0]).val, e->m));
        case Op::ResOf: {
            PAdicNumber x = term(e->kids[0]).val;
            if (!x.is_zero() && x.valuation() < ExtInt(0L)) return Value::of_res(e->m, 0);
            return Value::of_res(e->m, res(x, e->m));
        }
        case Op::RefOrd:
        case Op::RefAc: {
            if (!refs) throw std::logic_error("reference outside a normal form");
            const Value &v = refs->at(e->num.get_ui());
            if (e->op == Op::RefOrd) return Value::of_ord(ord(v.val));
            return Value::of_res(e->m, ac(v.val, e->m));
        }
        default: throw SortError("formula used as a term");
        }
    }

    bool formula(const ExprP &e) {
        switch (e->op) {
        case Op::True: return true;
        case Op::False: return false;
        case Op::Eq:
        case Op::Ne: {
            Value a = term(e->kids[0]), b = term(e->kids[1]);
            bool eq;
            if (a.sort.kind == SortKind::Val) {
                PAdicNumber d = a.val - b.val;
                if (!d.is_zero() || d.is_exact())
                    eq = d.is_zero();
                else
                    throw InsufficientPrecision("equality of inexact values");
            } else if (a.sort.kind == SortKind::Res) {
                eq = a.res == b.res;
            } else {
                eq = a.ord == b.ord;
            }
            return e->op == Op::Eq ? eq : !eq;
        }
        case Op::Lt:
        case Op::Le:
        case Op::Gt:
        case Op::Ge: {
            ExtInt a = term(e->kids[0]).ord, b = term(e->kids[1]).ord;
            switch (e->op) {
            case Op::Lt: return a < b;
            case Op::Le: return a <= b;
            case Op::Gt: return a > b;
            default: return a >= b;
            }
        }
        case Op::Cong: {
            ExtInt a = term(e->kids[0]).ord, b = term(e->kids[1]).ord;
            if (a.is_infinite() || b.is_infinite()) return false;
            return modpos(a.value() - b.value(), e->num) == 0;
        }
        case Op::Not: return !formula(e->kids[0]);
        case Op::And: return formula(e->kids[0]) && formula(e->kids[1]);
        case Op::Or: return formula(e->kids[0]) || formula(e->kids[1]);
        case Op::Exists:
        case Op::Forall: {
            if (e->bound.kind != SortKind::Res)
                throw UnsupportedFragment("evaluation of a " + e->bound.str() + " quantifier");
            mpz_class q = ctx.modulus(e->bound.m);
            if (q > 100000) throw UnsupportedFragment("residue quantifier over a ring that is too large");
            bool ex = e->op == Op::Exists;
            for (long r = 0; r < q.get_si(); ++r) {
                scope.push_back({e->name, Value::of_res(e->bound.m, r)});
                bool b = formula(e->kids[0]);
                scope.pop_back();
                if (ex && b) return true;
                if (!ex && !b) return false;
            }
            return !ex;
        }
        default: throw SortError("term used as a formula");
        }
    }
};

} // namespace

Value eval_term(const ExprP &t, const Env &env, const PAdicContext &ctx) {
    Evaluator ev{env, ctx, {}, nullptr};
    return ev.term(t);
}

bool eval_formula(const ExprP &phi, const Env &env, const PAdicContext &ctx) {
    Evaluator ev{env, ctx, {}, nullptr};
    return ev.formula(phi);
}

// ---------------------------------------------------------------- normal form

namespace {

enum class Lit { Res, Ord };

struct NF {
    std::vector<ExprP> terms;

    int index(const ExprP &t) {
        for (size_t i = 0; i < terms.size(); ++i)
            if (same(terms[i], t)) return static_cast<int>(i);
        terms.push_back(t);
        return static_cast<int>(terms.size()) - 1;
    }

    ExprP ref(Op op, int k, int m) {
        auto e = std::const_pointer_cast<Expr>(mk(op));
        e->num = k;
        e->m = op == Op::RefAc ? m : 0;
        e->sort = op == Op::RefAc ? Sort::res(m) : Sort::ord();
        return e;
    }

    static ExprP rebuild(const ExprP &e, std::vector<ExprP> kids) {
        auto n = std::make_shared<Expr>(*e);
        n->kids = std::move(kids);
        return n;
    }

    static bool contains(const ExprP &e, Op op) {
        if (e->op == op) return true;
        for (auto &k : e->kids)
            if (contains(k, op)) return true;
        return false;
    }

    // Replace ord(t) and ac_m(t) by references; res_m must be gone already.
    ExprP subst(const ExprP &e) {
        if (e->op == Op::OrdOf) return ref(Op::RefOrd, index(e->kids[0]), 0);
        if (e->op == Op::Ac) return ref(Op::RefAc, index(e->kids[0]), e->m);
        if (e->sort.kind == SortKind::Val && e->op != Op::Var && e->op != Op::Int)
            return e; // Val subterm outside ord/ac only inside Val atoms
        std::vector<ExprP> ks;
        for (auto &k : e->kids) ks.push_back(subst(k));
        return rebuild(e, ks);
    }

    static ExprP first_res(const ExprP &e) {
        if (e->op == Op::ResOf) return e;
        for (auto &k : e->kids)
            if (auto r = first_res(k)) return r;
        return nullptr;
    }

    static ExprP replace(const ExprP &e, const ExprP &what, const ExprP &with) {
        if (same(e, what)) return with;
        std::vector<ExprP> ks;
        for (auto &k : e->kids) ks.push_back(replace(k, what, with));
        return rebuild(e, ks);
    }

    static ExprP node(Op op, Sort s, std::vector<ExprP> kids) {
        auto e = std::const_pointer_cast<Expr>(mk(op, std::move(kids)));
        e->sort = s;
        return e;
    }
    static ExprP integer(long v, Sort s) {
        auto e = std::const_pointer_cast<Expr>(mk(Op::Int));
        e->num = v;
        e->sort = s;
        return e;
    }

    // res_m(x) = ac_m(x) if ord x = 0, ac_m(1 + x) - 1 if ord x > 0, 0 if ord x < 0.
    ExprP expand_res(const ExprP &atom) {
        ExprP r = first_res(atom);
        if (!r) return atom;
        const ExprP &x = r->kids[0];
        Sort rs = Sort::res(r->m);
        ExprP ordx = node(Op::OrdOf, Sort::ord(), {x});
        ExprP zero = integer(0, Sort::ord());
        ExprP acx = node(Op::Ac, rs, {x});
        acx = std::const_pointer_cast<Expr>(acx);
        std::const_pointer_cast<Expr>(acx)->m = r->m;
        ExprP onex = node(Op::Add, Sort::val(), {integer(1, Sort::val()), x});
        ExprP ac1x = node(Op::Ac, rs, {onex});
        std::const_pointer_cast<Expr>(ac1x)->m = r->m;
        ExprP shifted = node(Op::Sub, rs, {ac1x, integer(1, rs)});
        ExprP c0 = node(Op::And, Sort::boolean(),
                        {node(Op::Eq, Sort::boolean(), {ordx, zero}), expand_res(replace(atom, r, acx))});
        ExprP c1 = node(Op::And, Sort::boolean(),
                        {node(Op::Gt, Sort::boolean(), {ordx, zero}), expand_res(replace(atom, r, shifted))});
        ExprP c2 = node(Op::And, Sort::boolean(),
                        {node(Op::Lt, Sort::boolean(), {ordx, zero}), expand_res(replace(atom, r, integer(0, rs)))});
        return node(Op::Or, Sort::boolean(), {node(Op::Or, Sort::boolean(), {c0, c1}), c2});
    }

    static ExprP negate_atom(const ExprP &a) {
        static const std::map<Op, Op> neg = {{Op::Eq, Op::Ne}, {Op::Ne, Op::Eq}, {Op::Lt, Op::Ge},
                                             {Op::Ge, Op::Lt}, {Op::Gt, Op::Le}, {Op::Le, Op::Gt},
                                             {Op::True, Op::False}, {Op::False, Op::True}};
        auto it = neg.find(a->op);
        if (it == neg.end()) return node(Op::Not, Sort::boolean(), {a});
        auto n = std::make_shared<Expr>(*a);
        n->op = it->second;
        return n;
    }

    using Conj = std::vector<std::pair<Lit, ExprP>>;
    using DNF = std::vector<Conj>;

    static DNF product(const DNF &a, const DNF &b) {
        DNF out;
        for (auto &x : a)
            for (auto &y : b) {
                Conj c = x;
                c.insert(c.end(), y.begin(), y.end());
                out.push_back(c);
            }
        return out;
    }

    Lit classify(const ExprP &e, const ExprP &orig) {
        bool has_ord = contains(e, Op::RefOrd) || contains(e, Op::Lt) || contains(e, Op::Le) ||
                       contains(e, Op::Gt) || contains(e, Op::Ge) || contains(e, Op::Cong);
        bool has_res = contains(e, Op::RefAc);
        std::function<bool(const ExprP &)> sorts = [&](const ExprP &x) {
            if ((x->op == Op::Eq || x->op == Op::Ne) && x->kids[0]->sort.kind == SortKind::Ord) has_ord = true;
            if ((x->op == Op::Eq || x->op == Op::Ne) && x->kids[0]->sort.kind == SortKind::Res) has_res = true;
            if ((x->op == Op::Exists || x->op == Op::Forall)) {
                if (x->bound.kind == SortKind::Res) has_res = true;
                if (x->bound.kind == SortKind::Ord) has_ord = true;
            }
            for (auto &k : x->kids) sorts(k);
            return true;
        };
        sorts(e);
        if (has_ord && has_res)
            throw UnsupportedFragment("quantified subformula mixes residue and order conditions: " + to_string(orig));
        return has_ord ? Lit::Ord : Lit::Res;
    }

    // Quantifier-free in Val: atoms only mention Val terms through ord/ac/res.
    ExprP convert_body(const ExprP &e) {
        switch (e->op) {
        case Op::Eq:
        case Op::Ne:
            if (e->kids[0]->sort.kind == SortKind::Val) {
                ExprP d = e->kids[1]->op == Op::Int && e->kids[1]->num == 0
                              ? e->kids[0]
                              : node(Op::Sub, Sort::val(), {e->kids[0], e->kids[1]});
                ExprP a = node(Op::Ac, Sort::res(1), {d});
                std::const_pointer_cast<Expr>(a)->m = 1;
                return subst(node(e->op, Sort::boolean(), {a, integer(0, Sort::res(1))}));
            }
            [[fallthrough]];
        case Op::Lt:
        case Op::Le:
        case Op::Gt:
        case Op::Ge:
        case Op::Cong: {
            if (first_res(e)) throw UnsupportedFragment("res_m inside a quantified subformula");
            return subst(e);
        }
        case Op::Exists:
        case Op::Forall:
            if (e->bound.kind == SortKind::Val) throw UnsupportedFragment("Val-sort quantifier on " + e->name);
            [[fallthrough]];
        default: {
            std::vector<ExprP> ks;
            for (auto &k : e->kids) ks.push_back(convert_body(k));
            return rebuild(e, ks);
        }
        }
    }

    DNF dnf(const ExprP &e, bool neg) {
        switch (e->op) {
        case Op::True: return neg ? DNF{} : DNF{Conj{}};
        case Op::False: return neg ? DNF{Conj{}} : DNF{};
        case Op::Not: return dnf(e->kids[0], !neg);
        case Op::And:
        case Op::Or: {
            bool conj = (e->op == Op::And) != neg;
            DNF a = dnf(e->kids[0], neg), b = dnf(e->kids[1], neg);
            if (conj) return product(a, b);
            a.insert(a.end(), b.begin(), b.end());
            return a;
        }
        case Op::Exists:
        case Op::Forall: {
            if (e->bound.kind == SortKind::Val) throw UnsupportedFragment("Val-sort quantifier on " + e->name);
            ExprP body = convert_body(e);
            if (neg) body = node(Op::Not, Sort::boolean(), {body});
            return DNF{Conj{{classify(body, e), body}}};
        }
        default: {
            ExprP a = neg ? negate_atom(e) : e;
            if (a->op == Op::Not) {
                // congruence: keep the negation as a literal
                ExprP inner = subst(a->kids[0]);
                return DNF{Conj{{Lit::Ord, node(Op::Not, Sort::boolean(), {inner})}}};
            }
            if (first_res(a)) return dnf(expand_res(a), false);
            if ((a->op == Op::Eq || a->op == Op::Ne) && a->kids[0]->sort.kind == SortKind::Val) {
                ExprP c = convert_body(a);
                return DNF{Conj{{Lit::Res, c}}};
            }
            ExprP c = subst(a);
            bool ord = c->kids[0]->sort.kind == SortKind::Ord;
            return DNF{Conj{{ord ? Lit::Ord : Lit::Res, c}}};
        }
        }
    }
};

ExprP conjoin(const std::vector<ExprP> &xs) {
    if (xs.empty()) {
        auto t = std::const_pointer_cast<Expr>(mk(Op::True));
        t->sort = Sort::boolean();
        return t;
    }
    ExprP r = xs[0];
    for (size_t i = 1; i < xs.size(); ++i) {
        auto n = std::const_pointer_cast<Expr>(mk(Op::And, {r, xs[i]}));
        n->sort = Sort::boolean();
        r = n;
    }
    return r;
}

} // namespace

NormalFormFormula to_normal_form(const ExprP &phi) {
    if (!phi->is_formula()) throw SortError("normal form of a term");
    NF nf;
    NF::DNF d = nf.dnf(phi, false);
    NormalFormFormula out;
    for (auto &c : d) {
        std::vector<ExprP> psi, theta;
        for (auto &[kind, lit] : c) (kind == Lit::Res ? psi : theta).push_back(lit);
        out.disjuncts.push_back({conjoin(psi), conjoin(theta)});
    }
    out.terms = nf.terms;
    return out;
}

bool NormalFormFormula::eval(const Env &env, const PAdicContext &ctx) const {
    std::vector<Value> vals;
    for (auto &t : terms) vals.push_back(eval_term(t, env, ctx));
    Evaluator ev{env, ctx, {}, &vals};
    for (auto &d : disjuncts)
        if (ev.formula(d.psi) && ev.formula(d.theta)) return true;
    return false;
}

std::string NormalFormFormula::str() const {
    std::ostringstream os;
    if (disjuncts.empty()) os << "false";
    for (size_t i = 0; i < disjuncts.size(); ++i)
        os << (i ? " | " : "") << "[" << to_string(disjuncts[i].psi) << "] & [" << to_string(disjuncts[i].theta)
           << "]";
    for (size_t i = 0; i < terms.size(); ++i) os << (i ? ", " : " where ") << "f" << i << " = " << to_string(terms[i]);
    return os.str();
}

} // namespace padint

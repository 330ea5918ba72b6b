#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "padint/extint.hpp"
#include "padint/padic.hpp"
#include "padint/series.hpp"

namespace padint {

enum class SortKind { Val, Res, Ord, Bool };

struct Sort {
    SortKind kind = SortKind::Val;
    int m = 0; // Res_m only

    static Sort val() { return {SortKind::Val, 0}; }
    static Sort ord() { return {SortKind::Ord, 0}; }
    static Sort res(int m) { return {SortKind::Res, m}; }
    static Sort boolean() { return {SortKind::Bool, 0}; }
    bool operator==(const Sort &o) const { return kind == o.kind && m == o.m; }
    bool operator!=(const Sort &o) const { return !(*this == o); }
    std::string str() const;
};

enum class Op {
    // terms
    Var, Int, T0, Add, Sub, Mul, Neg, Pow, Div, Series, Root, Hensel, OrdOf, Ac, ResOf,
    // placeholders used by normal forms: ord / ac_m of the index-th listed term
    RefOrd, RefAc,
    // formulas
    True, False, Eq, Ne, Lt, Le, Gt, Ge, Cong, Not, And, Or, Exists, Forall
};

struct Expr;
using ExprP = std::shared_ptr<const Expr>;

struct Expr {
    Op op = Op::Int;
    Sort sort;
    std::string name;  // Var, Series, bound variable of a quantifier
    mpz_class num = 0; // Int value, Pow exponent, Cong modulus, Ref index
    int m = 0, e = 0;  // Ac/ResOf depth, Root/Hensel indices, RefAc depth
    Sort bound;        // sort of the quantified variable
    std::vector<ExprP> kids;
    size_t pos = 0;    // source offset, not part of equality

    bool operator==(const Expr &o) const;
    bool is_formula() const { return sort.kind == SortKind::Bool; }
};

bool same(const ExprP &a, const ExprP &b);

// Variables not bound in the source get their sort from the context they
// occur in (arguments of ord/ac, comparisons, Res/Ord arithmetic), from a
// `name:Sort` annotation, or from decls; otherwise they are Val.
ExprP parse_term(const std::string &src, const std::map<std::string, Sort> &decls = {});
ExprP parse_formula(const std::string &src, const std::map<std::string, Sort> &decls = {});

std::string to_string(const ExprP &e);
std::string to_json(const ExprP &e);

struct Value {
    Sort sort;
    PAdicNumber val;
    mpz_class res = 0;
    ExtInt ord = 0L;

    static Value of_val(const PAdicNumber &v) { return {Sort::val(), v, 0, 0L}; }
    static Value of_res(int m, const mpz_class &r) { return {Sort::res(m), PAdicNumber(), r, 0L}; }
    static Value of_ord(const ExtInt &o) { return {Sort::ord(), PAdicNumber(), 0, o}; }
    std::string str() const;
};

struct Env {
    std::map<std::string, Value> vars;
    std::map<std::string, SeparatedSeries> series;
};

// Total conventions: 0^-1 = 0, x/0 = 0, res_m(x) = 0 when ord x < 0.
Value eval_term(const ExprP &t, const Env &env, const PAdicContext &ctx);
bool eval_formula(const ExprP &phi, const Env &env, const PAdicContext &ctx);

// Disjunction of psi(ac of terms) & theta(ord of terms). psi and theta refer
// to the listed terms through RefAc / RefOrd nodes.
struct NormalFormFormula {
    std::vector<ExprP> terms;
    struct Disjunct {
        ExprP psi;
        ExprP theta;
    };
    std::vector<Disjunct> disjuncts;

    bool eval(const Env &env, const PAdicContext &ctx) const;
    std::string str() const;
};

NormalFormFormula to_normal_form(const ExprP &phi);

} // namespace padint

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "padint/dplang.hpp"
#include "padint/motring.hpp"
#include "padint/padic.hpp"
#include "padint/poly.hpp"
#include "padint/presburger.hpp"
#include "padint/residue.hpp"

namespace padint {

// One coordinate of a cell. A 1-level is {ord(z - c) = alpha, ac_1(z - c) = xi},
// a 0-level is {z = c}. The center is a Val term over the earlier
// coordinates and the auxiliary names defined so far.
struct CellLevel {
    bool zero = false;
    ExprP center;
    // Auxiliary Ord / Res_1 coordinates, evaluated in order before the center.
    std::vector<std::pair<std::string, ExprP>> aux;
    std::string ord_name, res_name;
};

// ord f = ord_const + ord_coeffs . (ord coordinates), ac_1 f = ac(res
// coordinates) mod p. A vanishing function is 0 on the whole cell.
struct Prepared {
    bool vanishes = false;
    std::vector<long> ord_coeffs;
    long ord_const = 0;
    ResPoly ac;
    int i0 = 0;
    int ell = 0;

    std::optional<long> ord_at(const std::vector<long> &ords) const;
    long ac_at(const std::vector<long> &res, long p) const;
    std::string ord_str(const std::vector<std::string> &names) const;
};

struct CellPoint {
    std::vector<long> ords;
    std::vector<long> res;
};

struct Cell {
    long p = 2;
    std::vector<std::string> vars;
    std::vector<CellLevel> levels;
    std::vector<std::string> ord_vars;
    std::vector<std::string> res_vars;
    Conjunction theta;
    ResidueFormula psi;
    // Number of residue tuples satisfying psi, as a polynomial in L.
    MotElem count;
    std::vector<Prepared> prepared;
    int k = 1;

    bool null_set() const;
    // Kind of the innermost level: 0 or 1.
    int kind() const;
    std::optional<CellPoint> locate(const std::vector<mpq_class> &x, const PAdicContext &ctx) const;
    // Haar measure summed over the base, as an element free of T.
    MotElem measure() const;
    std::string to_json() const;
};

// Pieces of the ambient space with prepared data for each listed function.
struct CellDecomposition {
    std::vector<Cell> cells;
    std::vector<std::string> functions;
};

// All functions are univariate integer polynomials in the variable var.
CellDecomposition prepare_univariate(const std::vector<UPoly> &fs, long p, const std::string &var = "y");

// Innermost variable is the last one. Coefficients are prepared over the
// earlier variables; raises UnsupportedSplit outside the supported shapes
// (y-free, products g(x')h(y), linear in y, binomial a y^m + b with n = 2).
CellDecomposition decompose(const std::vector<MPoly> &fs, long p, const std::vector<std::string> &names);

mpq_class cell_measure_at(const Cell &c, long q);
MotElem cell_measure(const Cell &c);

std::string cells_to_json(const CellDecomposition &d);

} // namespace padint

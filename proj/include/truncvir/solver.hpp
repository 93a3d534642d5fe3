#pragma once

// Exact linear solving with solution spaces and infeasibility certificates,
// the pointwise witness problem, and homogeneous derivation spaces.

#include "truncvir/linear_map.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace truncvir {

inline bool field_is_zero(const QSqrt2& x) { return x.is_zero(); }
inline bool field_is_zero(const Rational& x) { return sgn(x) == 0; }
inline QSqrt2 field_inverse(const QSqrt2& x) { return x.inverse(); }
inline Rational field_inverse(const Rational& x)
{
    if (sgn(x) == 0)
        throw std::domain_error("division by zero");
    return Rational(1) / x;
}

/// Sorted (column, value) pairs without zeros.
template <class Field>
using SparseVector = std::vector<std::pair<std::size_t, Field>>;

namespace detail {

/// dst += alpha * src, both sorted.
template <class Field>
void axpy(SparseVector<Field>& dst, const Field& alpha, const SparseVector<Field>& src)
{
    if (field_is_zero(alpha) || src.empty())
        return;
    SparseVector<Field> out;
    out.reserve(dst.size() + src.size());
    auto a = dst.begin();
    auto b = src.begin();
    while (a != dst.end() || b != src.end()) {
        if (b == src.end() || (a != dst.end() && a->first < b->first)) {
            out.push_back(std::move(*a++));
        } else if (a == dst.end() || b->first < a->first) {
            out.emplace_back(b->first, alpha * b->second);
            ++b;
        } else {
            Field v = a->second + alpha * b->second;
            if (!field_is_zero(v))
                out.emplace_back(a->first, std::move(v));
            ++a;
            ++b;
        }
    }
    dst = std::move(out);
}

template <class Field>
Field lookup(const SparseVector<Field>& v, std::size_t col)
{
    auto it = std::lower_bound(v.begin(), v.end(), col, [](const auto& e, std::size_t c) { return e.first < c; });
    return (it != v.end() && it->first == col) ? it->second : Field(0);
}

}  // namespace detail

template <class Field>
struct LinearSystem {
    std::size_t cols = 0;
    std::vector<SparseVector<Field>> rows;
    std::vector<Field> rhs;
    std::vector<std::string> col_labels;  // one per unknown, unique
    std::vector<std::string> row_labels;  // optional, one per equation

    std::size_t row_count() const { return rows.size(); }

    void add_row(SparseVector<Field> row, Field b, std::string label = {})
    {
        rows.push_back(std::move(row));
        rhs.push_back(std::move(b));
        if (!label.empty() || !row_labels.empty())
            row_labels.push_back(std::move(label));
    }

    static LinearSystem from_dense(const std::vector<std::vector<Field>>& a, const std::vector<Field>& b)
    {
        if (a.size() != b.size())
            throw std::invalid_argument("row count differs from rhs length");
        LinearSystem sys;
        sys.cols = a.empty() ? 0 : a.front().size();
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i].size() != sys.cols)
                throw std::invalid_argument("ragged matrix");
            SparseVector<Field> row;
            for (std::size_t j = 0; j < a[i].size(); ++j)
                if (!field_is_zero(a[i][j]))
                    row.emplace_back(j, a[i][j]);
            sys.rows.push_back(std::move(row));
            sys.rhs.push_back(b[i]);
        }
        for (std::size_t j = 0; j < sys.cols; ++j)
            sys.col_labels.push_back("x" + std::to_string(j));
        return sys;
    }
};

template <class Field>
struct Solution {
    std::vector<Field> particular;             // free variables set to zero
    std::vector<std::vector<Field>> nullspace;  // one vector per free column, in column order
    std::vector<std::size_t> pivot_cols;
};

template <class Field>
struct Infeasible {
    std::vector<Field> certificate;  // z with z*A = 0 and z*b != 0
};

template <class Field>
using SolveOutcome = std::variant<Solution<Field>, Infeasible<Field>>;

/// Incremental reduced row echelon form. Rows are fed one at a time; pivot
/// rows stay fully reduced, so the final form is the unique RREF and the
/// pivot of each row is its first nonzero column after reduction.
template <class Field>
class RowReducer {
public:
    explicit RowReducer(std::size_t cols, bool track_origin = false) : cols_(cols), track_(track_origin) {}

    /// Returns false when the row is inconsistent (reduces to 0 = nonzero).
    bool insert(SparseVector<Field> row, Field b, std::size_t origin_index = 0)
    {
        Row r{std::move(row), std::move(b), {}};
        if (track_)
            r.origin.emplace_back(origin_index, Field(1));
        // Pivot rows vanish on other pivot columns, so the row's original
        // coefficients are the exact multiples to subtract.
        std::vector<std::pair<std::size_t, Field>> hits;
        for (const auto& [c, v] : r.coeffs)
            if (auto it = pivot_of_col_.find(c); it != pivot_of_col_.end())
                hits.emplace_back(it->second, v);
        for (const auto& [pr, v] : hits) {
            const Row& p = rows_[pr];
            Field neg = -v;
            detail::axpy(r.coeffs, neg, p.coeffs);
            r.rhs += neg * p.rhs;
            if (track_)
                detail::axpy(r.origin, neg, p.origin);
        }
        if (r.coeffs.empty()) {
            if (field_is_zero(r.rhs))
                return true;
            if (!conflict_)
                conflict_ = std::move(r);
            return false;
        }
        const std::size_t col = r.coeffs.front().first;
        const Field inv = field_inverse(r.coeffs.front().second);
        for (auto& [c, v] : r.coeffs)
            v *= inv;
        r.rhs *= inv;
        for (auto& [c, v] : r.origin)
            v *= inv;
        for (auto& other : rows_) {
            Field f = detail::lookup(other.coeffs, col);
            if (field_is_zero(f))
                continue;
            Field neg = -f;
            detail::axpy(other.coeffs, neg, r.coeffs);
            other.rhs += neg * r.rhs;
            if (track_)
                detail::axpy(other.origin, neg, r.origin);
        }
        pivot_of_col_.emplace(col, rows_.size());
        rows_.push_back(std::move(r));
        return true;
    }

    bool consistent() const { return !conflict_.has_value(); }
    std::size_t rank() const { return rows_.size(); }

    /// Combination of inserted rows witnessing inconsistency, sized to row_count.
    std::vector<Field> certificate(std::size_t row_count) const
    {
        std::vector<Field> z(row_count, Field(0));
        if (conflict_)
            for (const auto& [i, v] : conflict_->origin)
                z.at(i) = v;
        return z;
    }

    Solution<Field> solution() const
    {
        Solution<Field> s;
        s.particular.assign(cols_, Field(0));
        for (const auto& [col, r] : pivot_of_col_) {
            s.particular[col] = rows_[r].rhs;
            s.pivot_cols.push_back(col);
        }
        for (std::size_t f = 0; f < cols_; ++f) {
            if (pivot_of_col_.count(f))
                continue;
            std::vector<Field> v(cols_, Field(0));
            v[f] = Field(1);
            for (const auto& [col, r] : pivot_of_col_) {
                Field e = detail::lookup(rows_[r].coeffs, f);
                if (!field_is_zero(e))
                    v[col] = -e;
            }
            s.nullspace.push_back(std::move(v));
        }
        return s;
    }

private:
    struct Row {
        SparseVector<Field> coeffs;
        Field rhs;
        SparseVector<Field> origin;
    };

    std::size_t cols_;
    bool track_;
    std::vector<Row> rows_;
    std::map<std::size_t, std::size_t> pivot_of_col_;
    std::optional<Row> conflict_;
};

/// Exact solve: full solution space, or a certificate built from the first
/// row (in input order) that exposes the inconsistency.
template <class Field>
SolveOutcome<Field> solve(const LinearSystem<Field>& sys)
{
    RowReducer<Field> rr(sys.cols, true);
    for (std::size_t i = 0; i < sys.rows.size(); ++i)
        if (!rr.insert(sys.rows[i], sys.rhs[i], i))
            return Infeasible<Field>{rr.certificate(sys.rows.size())};
    return rr.solution();
}

/// A * x for a dense x.
template <class Field>
std::vector<Field> multiply(const LinearSystem<Field>& sys, const std::vector<Field>& x)
{
    std::vector<Field> out;
    out.reserve(sys.rows.size());
    for (const auto& row : sys.rows) {
        Field acc(0);
        for (const auto& [c, v] : row)
            acc += v * x.at(c);
        out.push_back(std::move(acc));
    }
    return out;
}

/// z*A = 0 and z*b != 0, checked exactly.
template <class Field>
bool certificate_valid(const LinearSystem<Field>& sys, const std::vector<Field>& z)
{
    if (z.size() != sys.rows.size())
        return false;
    std::vector<Field> za(sys.cols, Field(0));
    Field zb(0);
    for (std::size_t i = 0; i < sys.rows.size(); ++i) {
        if (field_is_zero(z[i]))
            continue;
        for (const auto& [c, v] : sys.rows[i])
            za[c] += z[i] * v;
        zb += z[i] * sys.rhs[i];
    }
    for (const auto& v : za)
        if (!field_is_zero(v))
            return false;
    return !field_is_zero(zb);
}

template <class Field>
bool solution_valid(const LinearSystem<Field>& sys, const Solution<Field>& s)
{
    if (multiply(sys, s.particular) != sys.rhs)
        return false;
    for (const auto& v : s.nullspace)
        for (const auto& r : multiply(sys, v))
            if (!field_is_zero(r))
                return false;
    return true;
}

// ---------------------------------------------------------------------------
// Witness problems

struct WitnessOptions {
    Degree slack = 2;
    Degree cap = 64;
    bool include_outer = true;
};

/// Degree bound for the inner part u of a witness at this probe: a term of
/// degree d in u only reaches degrees d + deg(probe), so anything beyond
/// max|target| + max|probe| cannot help; slack pads the boundary.
inline Degree default_support_window(const Element& probe, const Element& target, Degree slack = 2, Degree cap = 64)
{
    return std::min(max_abs_degree(target) + max_abs_degree(probe) + slack, cap);
}

struct WitnessSystem {
    LinearSystem<QSqrt2> system;
    std::vector<BasisSymbol> unknown_symbols;  // column i < unknown_symbols.size() is u's coefficient
    std::vector<BasisSymbol> equation_symbols;  // row i matches the coefficient of this symbol
    bool has_outer = false;                     // last column is the delta_t coefficient
    Degree support_window = 0;
};

struct WitnessResult {
    WitnessSystem witness_system;
    std::variant<DerivationDescriptor, Infeasible<QSqrt2>> outcome;

    bool feasible() const { return std::holds_alternative<DerivationDescriptor>(outcome); }
    const DerivationDescriptor& descriptor() const { return std::get<DerivationDescriptor>(outcome); }
    const std::vector<QSqrt2>& certificate() const { return std::get<Infeasible<QSqrt2>>(outcome).certificate; }
};

/// Builds the coefficient-matching system [u, probe] + c delta_t(probe) = target
/// with u ranging over graded symbols of degree |d| <= support_window (and the
/// centrals of a centered spec, which never enter an equation).
inline WitnessSystem witness_system(const Element& probe, const Element& target, const AlgebraSpec& spec,
                                    Degree support_window, bool include_outer)
{
    require_valid(probe, spec);
    require_valid(target, spec);
    WitnessSystem ws;
    ws.support_window = support_window;
    ws.has_outer = include_outer;
    std::vector<Element> columns;
    for (const auto& s : domain_symbols(spec, support_window)) {
        ws.unknown_symbols.push_back(s);
        columns.push_back(bracket(Element(s), probe, spec));
    }
    if (include_outer)
        columns.push_back(delta_t(probe));

    std::map<BasisSymbol, std::size_t> row_of;
    for (const auto& col : columns)
        for (const auto& [s, c] : col)
            row_of.emplace(s, 0);
    for (const auto& [s, c] : target)
        row_of.emplace(s, 0);
    std::size_t r = 0;
    for (auto& [s, idx] : row_of) {
        idx = r++;
        ws.equation_symbols.push_back(s);
    }

    auto& sys = ws.system;
    sys.cols = columns.size();
    sys.rows.assign(row_of.size(), {});
    sys.rhs.assign(row_of.size(), QSqrt2());
    for (std::size_t j = 0; j < columns.size(); ++j)
        for (const auto& [s, c] : columns[j])
            sys.rows[row_of.at(s)].emplace_back(j, c);  // j increasing, rows stay sorted
    for (const auto& [s, c] : target)
        sys.rhs[row_of.at(s)] = c;
    for (const auto& s : ws.unknown_symbols)
        sys.col_labels.push_back(generic_name(s));
    if (include_outer)
        sys.col_labels.emplace_back("outer");
    for (const auto& s : ws.equation_symbols)
        sys.row_labels.push_back(generic_name(s));
    return ws;
}

inline WitnessResult witness_solve(const Element& probe, const Element& target, const AlgebraSpec& spec,
                                   Degree support_window, bool include_outer)
{
    if (probe.is_zero())
        throw std::invalid_argument("witness probe must be nonzero");
    WitnessResult res{witness_system(probe, target, spec, support_window, include_outer), Infeasible<QSqrt2>{}};
    auto outcome = solve(res.witness_system.system);
    if (auto* inf = std::get_if<Infeasible<QSqrt2>>(&outcome)) {
        res.outcome = std::move(*inf);
        return res;
    }
    const auto& sol = std::get<Solution<QSqrt2>>(outcome);
    DerivationDescriptor d;
    const auto& syms = res.witness_system.unknown_symbols;
    for (std::size_t j = 0; j < syms.size(); ++j)
        d.inner.add(syms[j], sol.particular[j]);
    if (include_outer)
        d.outer = sol.particular.back();
    res.outcome = std::move(d);
    return res;
}

inline WitnessResult witness_solve(const Element& probe, const Element& target, const AlgebraSpec& spec,
                                   const WitnessOptions& opt = {})
{
    return witness_solve(probe, target, spec, default_support_window(probe, target, opt.slack, opt.cap),
                         opt.include_outer);
}

// ---------------------------------------------------------------------------
// Homogeneous derivation spaces

struct DerivationSpace {
    Degree degree = 0;
    Degree window = 0;
    std::vector<WindowedLinearMap> basis;
    std::size_t unknowns = 0;
    std::size_t pairs_checked = 0;

    std::size_t dimension() const { return basis.size(); }
};

/// All maps D of degree d on the window (D(Graded(k,m)) in degree m+d, D(Central)
/// in the center) that satisfy every in-window Leibniz constraint.
inline DerivationSpace derivation_space(const AlgebraSpec& spec, Degree d, Degree window)
{
    if (2 * (d < 0 ? -d : d) > window)
        throw std::invalid_argument("derivation_space needs |d| <= window/2");
    const auto domain = domain_symbols(spec, window);

    // Unknown (x, b): coefficient of b in D(x).
    std::vector<std::pair<BasisSymbol, BasisSymbol>> unknowns;
    std::map<BasisSymbol, std::vector<std::size_t>> unknowns_of;
    auto add_unknown = [&](const BasisSymbol& x, const BasisSymbol& b) {
        unknowns_of[x].push_back(unknowns.size());
        unknowns.emplace_back(x, b);
    };
    for (const auto& x : domain) {
        unknowns_of[x];
        if (x.is_graded()) {
            for (int l = 0; l < spec.order; ++l)
                add_unknown(x, BasisSymbol::graded(l, x.degree + d));
            if (spec.centered && x.degree + d == 0)
                for (int l = 0; l < spec.order; ++l)
                    add_unknown(x, BasisSymbol::central(l));
        } else if (d == 0) {
            for (int l = 0; l < spec.order; ++l)
                add_unknown(x, BasisSymbol::central(l));
        }
    }

    DerivationSpace out;
    out.degree = d;
    out.window = window;
    out.unknowns = unknowns.size();
    RowReducer<QSqrt2> rr(unknowns.size());
    std::set<BasisSymbol> in_domain(domain.begin(), domain.end());

    for (std::size_t i = 0; i < domain.size(); ++i)
        for (std::size_t j = i; j < domain.size(); ++j) {
            const auto& x = domain[i];
            const auto& y = domain[j];
            const Element xy = bracket(x, y, spec);
            bool inside = true;
            for (const auto& [s, c] : xy)
                inside = inside && in_domain.count(s);
            if (!inside)
                continue;
            ++out.pairs_checked;
            // D([x,y]) - [D x, y] - [x, D y] = 0, one equation per output symbol.
            std::map<BasisSymbol, std::map<std::size_t, QSqrt2>> eq;
            auto accumulate = [&](std::size_t u, const Element& contribution, const QSqrt2& w) {
                for (const auto& [s, c] : contribution) {
                    auto& slot = eq[s][u];
                    slot += w * c;
                }
            };
            for (const auto& [z, cz] : xy)
                for (auto u : unknowns_of.at(z))
                    accumulate(u, Element(unknowns[u].second), cz);
            for (auto u : unknowns_of.at(x))
                accumulate(u, bracket(Element(unknowns[u].second), Element(y), spec), QSqrt2(-1));
            for (auto u : unknowns_of.at(y))
                accumulate(u, bracket(Element(x), Element(unknowns[u].second), spec), QSqrt2(-1));
            for (auto& [s, coeffs] : eq) {
                SparseVector<QSqrt2> row;
                for (auto& [u, c] : coeffs)
                    if (!c.is_zero())
                        row.emplace_back(u, std::move(c));
                if (!row.empty())
                    rr.insert(std::move(row), QSqrt2());
            }
        }

    for (const auto& v : rr.solution().nullspace) {
        WindowedLinearMap m(spec, window);
        std::map<BasisSymbol, Element> values;
        for (std::size_t u = 0; u < v.size(); ++u)
            if (!v[u].is_zero())
                values[unknowns[u].first].add(unknowns[u].second, v[u]);
        for (auto& [x, val] : values)
            m.set(x, std::move(val));
        out.basis.push_back(std::move(m));
    }
    return out;
}

/// Whether target is a linear combination of the given maps (all on target's spec and window).
inline bool in_span(const std::vector<WindowedLinearMap>& maps, const WindowedLinearMap& target)
{
    // One equation per (input symbol, output symbol) coordinate, one unknown per map.
    std::map<std::pair<BasisSymbol, BasisSymbol>, SparseVector<QSqrt2>> rows;
    for (std::size_t i = 0; i < maps.size(); ++i)
        for (const auto& [x, v] : maps[i].entries())
            for (const auto& [b, c] : v)
                rows[{x, b}].emplace_back(i, c);
    for (const auto& [x, v] : target.entries())
        for (const auto& [b, c] : v)
            rows[{x, b}];
    LinearSystem<QSqrt2> sys;
    sys.cols = maps.size();
    for (auto& [key, row] : rows) {
        const auto& tv = target.entries().count(key.first) ? target.value(key.first) : Element();
        sys.add_row(std::move(row), tv.coeff(key.second));
    }
    return std::holds_alternative<Solution<QSqrt2>>(solve(sys));
}

}  // namespace truncvir

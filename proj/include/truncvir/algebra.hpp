#pragma once

// Basis symbols, sparse elements and the bracket of the truncated loop
// Virasoro algebras Vir ⊗ C[t, t^-1]/(t^n).
//
// Layer k is the t-degree. Graded(k, m) is the degree-m generator of layer k,
// Central(k) the central charge of layer k. For the named presets:
//   w22   : L_m = Graded(0,m), I_m = Graded(1,m), C = Central(0), C1 = Central(1)
//   bms3  : L_m = Graded(0,m), J_m = Graded(1,m), I_m = Graded(2,m), C, C1, C2

#include "truncvir/scalar.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace truncvir {

using Degree = std::int64_t;

/// Presentation descriptor: truncation order n (layers 0..n-1) and whether
/// the central charges are kept.
struct AlgebraSpec {
    int order = 1;
    bool centered = false;

    AlgebraSpec() = default;
    AlgebraSpec(int n, bool with_center) : order(n), centered(with_center)
    {
        if (n < 1)
            throw std::invalid_argument("truncation order must be at least 1");
    }

    int top_layer() const { return order - 1; }

    friend bool operator==(const AlgebraSpec&, const AlgebraSpec&) = default;
};

struct Preset {
    std::string_view name;
    int order;
    bool centered;
};

inline constexpr std::array<Preset, 6> kPresets{{
    {"witt", 1, false},
    {"virasoro", 1, true},
    {"w22", 2, true},
    {"w22-centerless", 2, false},
    {"bms3", 3, true},
    {"bms3-centerless", 3, false},
}};

/// Resolves a preset name or the generic form "n=K" / "n=K,centerless".
inline AlgebraSpec parse_spec(std::string_view text)
{
    for (const auto& p : kPresets)
        if (p.name == text)
            return {p.order, p.centered};
    if (text.substr(0, 2) == "n=") {
        std::string_view rest = text.substr(2);
        bool centered = true;
        if (auto comma = rest.find(','); comma != std::string_view::npos) {
            if (rest.substr(comma + 1) != "centerless")
                throw std::invalid_argument("unknown algebra spec: " + std::string(text));
            centered = false;
            rest = rest.substr(0, comma);
        }
        if (rest.empty() || !std::all_of(rest.begin(), rest.end(), [](char c) { return c >= '0' && c <= '9'; }))
            throw std::invalid_argument("unknown algebra spec: " + std::string(text));
        int n = std::stoi(std::string(rest));
        return {n, centered};
    }
    throw std::invalid_argument("unknown algebra spec: " + std::string(text));
}

/// Canonical name: the preset name when one matches, else "n=K[,centerless]".
inline std::string spec_name(const AlgebraSpec& spec)
{
    for (const auto& p : kPresets)
        if (p.order == spec.order && p.centered == spec.centered)
            return std::string(p.name);
    return "n=" + std::to_string(spec.order) + (spec.centered ? "" : ",centerless");
}

struct BasisSymbol {
    enum class Kind : std::uint8_t { graded, central };

    Kind kind = Kind::graded;
    int layer = 0;
    Degree degree = 0;  // always 0 for central symbols

    static BasisSymbol graded(int layer, Degree m) { return {Kind::graded, layer, m}; }
    static BasisSymbol central(int layer) { return {Kind::central, layer, 0}; }

    bool is_graded() const { return kind == Kind::graded; }
    bool is_central() const { return kind == Kind::central; }

    bool valid_for(const AlgebraSpec& spec) const
    {
        if (layer < 0 || layer >= spec.order)
            return false;
        return is_graded() || spec.centered;
    }

    friend auto operator<=>(const BasisSymbol&, const BasisSymbol&) = default;
};

/// Generic textual form "g:k:m" / "c:k".
inline std::string generic_name(const BasisSymbol& s)
{
    if (s.is_central())
        return "c:" + std::to_string(s.layer);
    return "g:" + std::to_string(s.layer) + ":" + std::to_string(s.degree);
}

/// Finitely supported linear combination over an ordered key set. Zero
/// coefficients are never stored.
template <class Key, class Scalar>
class LinearCombination {
public:
    using container = std::map<Key, Scalar>;
    using const_iterator = typename container::const_iterator;

    LinearCombination() = default;
    LinearCombination(const Key& k, Scalar c = Scalar(1)) { add(k, std::move(c)); }  // NOLINT

    void add(const Key& k, const Scalar& c)
    {
        if (c.is_zero())
            return;
        auto [it, inserted] = terms_.try_emplace(k, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero())
                terms_.erase(it);
        }
    }

    Scalar coeff(const Key& k) const
    {
        auto it = terms_.find(k);
        return it == terms_.end() ? Scalar() : it->second;
    }

    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const_iterator begin() const { return terms_.begin(); }
    const_iterator end() const { return terms_.end(); }
    const container& terms() const { return terms_; }

    LinearCombination& operator+=(const LinearCombination& o)
    {
        for (const auto& [k, c] : o.terms_)
            add(k, c);
        return *this;
    }
    LinearCombination& operator-=(const LinearCombination& o)
    {
        for (const auto& [k, c] : o.terms_)
            add(k, -c);
        return *this;
    }
    LinearCombination& operator*=(const Scalar& s)
    {
        if (s.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& [k, c] : terms_)
            c *= s;
        return *this;
    }

    /// this += s * o
    void add_scaled(const Scalar& s, const LinearCombination& o)
    {
        if (s.is_zero())
            return;
        for (const auto& [k, c] : o.terms_)
            add(k, s * c);
    }

    friend LinearCombination operator+(LinearCombination a, const LinearCombination& b) { return a += b; }
    friend LinearCombination operator-(LinearCombination a, const LinearCombination& b) { return a -= b; }
    friend LinearCombination operator-(LinearCombination a) { return a *= Scalar(-1); }
    friend LinearCombination operator*(const Scalar& s, LinearCombination a) { return a *= s; }

    friend bool operator==(const LinearCombination& a, const LinearCombination& b) { return a.terms_ == b.terms_; }

private:
    container terms_;
};

using Element = LinearCombination<BasisSymbol, QSqrt2>;

inline Element graded(int layer, Degree m, QSqrt2 c = QSqrt2(1))
{
    return Element(BasisSymbol::graded(layer, m), std::move(c));
}
inline Element central(int layer, QSqrt2 c = QSqrt2(1))
{
    return Element(BasisSymbol::central(layer), std::move(c));
}

/// Throws std::invalid_argument when some symbol of x does not belong to spec.
inline void require_valid(const Element& x, const AlgebraSpec& spec)
{
    for (const auto& [s, c] : x)
        if (!s.valid_for(spec))
            throw std::invalid_argument("symbol " + generic_name(s) + " is not valid for " + spec_name(spec));
}

/// Bracket of two basis symbols, added into out with weight w.
inline void add_basis_bracket(Element& out, const BasisSymbol& a, const BasisSymbol& b, const QSqrt2& w,
                              const AlgebraSpec& spec)
{
    if (a.is_central() || b.is_central())
        return;
    const int layer = a.layer + b.layer;
    if (layer >= spec.order)
        return;
    const Degree m = a.degree;
    const Degree n = b.degree;
    if (m != n)
        out.add(BasisSymbol::graded(layer, m + n), w * QSqrt2(static_cast<long>(m - n)));
    if (spec.centered && m + n == 0 && m * m * m != m)
        out.add(BasisSymbol::central(layer), w * QSqrt2(make_rational(static_cast<long>(m * m * m - m), 12)));
}

inline Element bracket(const Element& x, const Element& y, const AlgebraSpec& spec)
{
    require_valid(x, spec);
    require_valid(y, spec);
    Element out;
    for (const auto& [a, ca] : x)
        for (const auto& [b, cb] : y)
            add_basis_bracket(out, a, b, ca * cb, spec);
    return out;
}

inline Element bracket(const BasisSymbol& a, const BasisSymbol& b, const AlgebraSpec& spec)
{
    return bracket(Element(a), Element(b), spec);
}

/// Graded symbols of every layer with |degree| <= n, in canonical order.
inline std::vector<BasisSymbol> graded_window(const AlgebraSpec& spec, Degree n)
{
    std::vector<BasisSymbol> out;
    for (int k = 0; k < spec.order; ++k)
        for (Degree m = -n; m <= n; ++m)
            out.push_back(BasisSymbol::graded(k, m));
    return out;
}

struct JacobiReport {
    bool pass = true;
    std::size_t triples_checked = 0;
    std::optional<std::array<BasisSymbol, 3>> violation;
    Element residual;
};

/// Exhaustive Jacobi identity check over graded basis triples with degrees in [-n, n].
inline JacobiReport jacobi_check(const AlgebraSpec& spec, Degree n)
{
    if (n < 1)
        throw std::invalid_argument("jacobi_check needs a degree range of at least 1");
    const auto basis = graded_window(spec, n);
    JacobiReport report;
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = i; j < basis.size(); ++j) {
            const Element xy = bracket(basis[i], basis[j], spec);
            for (std::size_t k = j; k < basis.size(); ++k) {
                const Element x(basis[i]), y(basis[j]), z(basis[k]);
                Element sum = bracket(x, bracket(y, z, spec), spec);
                sum += bracket(y, bracket(z, x, spec), spec);
                sum += bracket(z, xy, spec);
                ++report.triples_checked;
                if (!sum.is_zero()) {
                    report.pass = false;
                    report.violation = {basis[i], basis[j], basis[k]};
                    report.residual = std::move(sum);
                    return report;
                }
            }
        }
    return report;
}

struct AntisymmetryReport {
    bool pass = true;
    std::size_t pairs_checked = 0;
    std::optional<std::pair<BasisSymbol, BasisSymbol>> violation;
};

/// [x,y] = -[y,x] over ordered pairs of graded symbols in [-n, n], plus [x,x] = 0.
inline AntisymmetryReport antisymmetry_check(const AlgebraSpec& spec, Degree n)
{
    const auto basis = graded_window(spec, n);
    AntisymmetryReport report;
    for (const auto& x : basis)
        for (const auto& y : basis) {
            ++report.pairs_checked;
            if (!(bracket(x, y, spec) == -bracket(y, x, spec))) {
                report.pass = false;
                report.violation = {x, y};
                return report;
            }
        }
    return report;
}

/// The change-of-basis constructions used to pin higher layers.
enum class Construction {
    lprime,        // L'_m  = L_m + m I_m                       (n >= 2, I = layer 1)
    ldoubleprime,  // L''_m = L_m + sqrt2 m J_m + m^2 I_m       (n >= 3)
    jprime,        // J'_m  = J_m + sqrt2 m I_m                 (n >= 3)
};

inline std::string_view construction_name(Construction c)
{
    switch (c) {
    case Construction::lprime: return "Lprime";
    case Construction::ldoubleprime: return "Ldoubleprime";
    case Construction::jprime: return "Jprime";
    }
    return "?";
}

inline Construction parse_construction(std::string_view s)
{
    for (auto c : {Construction::lprime, Construction::ldoubleprime, Construction::jprime})
        if (construction_name(c) == s)
            return c;
    throw std::invalid_argument("unknown construction: " + std::string(s));
}

inline int construction_min_order(Construction c)
{
    return c == Construction::lprime ? 2 : 3;
}

inline Element primed_basis(const AlgebraSpec& spec, Construction kind, Degree m)
{
    if (spec.order < construction_min_order(kind))
        throw std::invalid_argument(std::string(construction_name(kind)) + " needs truncation order >= " +
                                    std::to_string(construction_min_order(kind)));
    const QSqrt2 mm(static_cast<long>(m));
    Element e;
    switch (kind) {
    case Construction::lprime:
        e = graded(0, m);
        e.add(BasisSymbol::graded(1, m), mm);
        break;
    case Construction::ldoubleprime:
        e = graded(0, m);
        e.add(BasisSymbol::graded(1, m), QSqrt2::sqrt2() * mm);
        e.add(BasisSymbol::graded(2, m), mm * mm);
        break;
    case Construction::jprime:
        e = graded(1, m);
        e.add(BasisSymbol::graded(2, m), QSqrt2::sqrt2() * mm);
        break;
    }
    return e;
}

struct ConstructionReport {
    bool pass = true;
    std::size_t relations_checked = 0;
    std::string failed_relation;  // e.g. "[L'_1,L'_-1]"
    Element lhs;
    Element rhs;
};

/// Checks that the constructed basis obeys the original bracket table on [-n, n]:
///   Lprime        : [L'm,L'n] = (m-n)L'(m+n),  [L'm,In] = (m-n)I(m+n)
///   Ldoubleprime,
///   Jprime        : [L''m,L''n] = (m-n)L''(m+n), [L''m,J'n] = (m-n)J'(m+n),
///                   [L''m,In] = (m-n)I(m+n),     [J'm,J'n] = (m-n)I(m+n)
inline ConstructionReport verify_construction(const AlgebraSpec& spec, Construction kind, Degree n)
{
    using Gen = std::function<Element(Degree)>;
    struct Relation {
        std::string name;
        Gen left, right, result;
    };
    std::vector<Relation> relations;
    auto layer_gen = [](int k) { return Gen([k](Degree m) { return graded(k, m); }); };
    if (kind == Construction::lprime) {
        Gen lp = [&spec](Degree m) { return primed_basis(spec, Construction::lprime, m); };
        relations.push_back({"L'L'", lp, lp, lp});
        relations.push_back({"L'I", lp, layer_gen(1), layer_gen(1)});
    } else {
        Gen lpp = [&spec](Degree m) { return primed_basis(spec, Construction::ldoubleprime, m); };
        Gen jp = [&spec](Degree m) { return primed_basis(spec, Construction::jprime, m); };
        relations.push_back({"L''L''", lpp, lpp, lpp});
        relations.push_back({"L''J'", lpp, jp, jp});
        relations.push_back({"L''I", lpp, layer_gen(2), layer_gen(2)});
        relations.push_back({"J'J'", jp, jp, layer_gen(2)});
    }
    // Surface the order-too-small error before iterating.
    (void)primed_basis(spec, kind, 0);

    ConstructionReport report;
    for (const auto& rel : relations)
        for (Degree a = -n; a <= n; ++a)
            for (Degree b = -n; b <= n; ++b) {
                Element lhs = bracket(rel.left(a), rel.right(b), spec);
                Element rhs = QSqrt2(static_cast<long>(a - b)) * rel.result(a + b);
                ++report.relations_checked;
                if (!(lhs == rhs)) {
                    report.pass = false;
                    report.failed_relation = rel.name + " at (" + std::to_string(a) + "," + std::to_string(b) + ")";
                    report.lhs = std::move(lhs);
                    report.rhs = std::move(rhs);
                    return report;
                }
            }
    return report;
}

/// Residue-class decomposition of the graded support of an element.
struct SupportProfile {
    struct ClassRange {
        Degree min_degree;
        Degree max_degree;
    };
    Degree modulus = 1;
    /// classes[layer][residue in 0..|modulus|-1]; absent residue = class not present.
    std::vector<std::map<Degree, ClassRange>> classes;

    /// Residues present in a layer (F for layer 0, E for layer 1).
    std::vector<Degree> present(int layer) const
    {
        std::vector<Degree> out;
        if (layer < static_cast<int>(classes.size()))
            for (const auto& [r, range] : classes[layer])
                out.push_back(r);
        return out;
    }
    bool empty() const
    {
        return std::all_of(classes.begin(), classes.end(), [](const auto& c) { return c.empty(); });
    }
};

inline SupportProfile support_profile(const Element& x, Degree modulus)
{
    if (modulus == 0)
        throw std::invalid_argument("support_profile needs a nonzero modulus");
    SupportProfile p;
    p.modulus = modulus;
    const Degree mod = modulus < 0 ? -modulus : modulus;
    for (const auto& [s, c] : x) {
        if (!s.is_graded())
            continue;
        if (static_cast<int>(p.classes.size()) <= s.layer)
            p.classes.resize(s.layer + 1);
        Degree r = ((s.degree % mod) + mod) % mod;
        auto [it, inserted] = p.classes[s.layer].try_emplace(r, SupportProfile::ClassRange{s.degree, s.degree});
        if (!inserted) {
            it->second.min_degree = std::min(it->second.min_degree, s.degree);
            it->second.max_degree = std::max(it->second.max_degree, s.degree);
        }
    }
    return p;
}

/// Min / max degree over graded terms; nullopt when there are none.
inline std::optional<std::pair<Degree, Degree>> degree_span(const Element& x)
{
    std::optional<std::pair<Degree, Degree>> span;
    for (const auto& [s, c] : x) {
        if (!s.is_graded())
            continue;
        if (!span)
            span = std::pair{s.degree, s.degree};
        else
            span = std::pair{std::min(span->first, s.degree), std::max(span->second, s.degree)};
    }
    return span;
}

/// Largest |degree| over graded terms (0 for elements without graded terms).
inline Degree max_abs_degree(const Element& x)
{
    Degree out = 0;
    for (const auto& [s, c] : x)
        if (s.is_graded())
            out = std::max(out, s.degree < 0 ? -s.degree : s.degree);
    return out;
}

}  // namespace truncvir

#pragma once

// Linear maps given by their values on a finite degree window, plus the
// inner derivations ad(u), the grading derivation delta_t and the Leibniz checker.

#include "truncvir/algebra.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace truncvir {

/// Every graded symbol with |degree| <= window, then every central symbol
/// of a centered spec (centrals are in the domain regardless of the window).
inline std::vector<BasisSymbol> domain_symbols(const AlgebraSpec& spec, Degree window)
{
    std::vector<BasisSymbol> out = graded_window(spec, window);
    if (spec.centered)
        for (int k = 0; k < spec.order; ++k)
            out.push_back(BasisSymbol::central(k));
    return out;
}

class WindowedLinearMap {
public:
    WindowedLinearMap() = default;
    WindowedLinearMap(AlgebraSpec spec, Degree window) : spec_(spec), window_(window)
    {
        if (window < 0)
            throw std::invalid_argument("window must be non-negative");
        for (const auto& s : domain_symbols(spec_, window_))
            entries_.emplace(s, Element());
    }

    const AlgebraSpec& spec() const { return spec_; }
    Degree window() const { return window_; }
    const std::map<BasisSymbol, Element>& entries() const { return entries_; }

    bool in_domain(const BasisSymbol& s) const { return entries_.count(s) != 0; }

    const Element& value(const BasisSymbol& s) const
    {
        auto it = entries_.find(s);
        if (it == entries_.end())
            throw std::out_of_range("symbol " + generic_name(s) + " outside the map window");
        return it->second;
    }

    void set(const BasisSymbol& s, Element v)
    {
        auto it = entries_.find(s);
        if (it == entries_.end())
            throw std::out_of_range("symbol " + generic_name(s) + " outside the map window");
        require_valid(v, spec_);
        it->second = std::move(v);
    }

    bool is_zero() const
    {
        return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.second.is_zero(); });
    }

    friend bool operator==(const WindowedLinearMap& a, const WindowedLinearMap& b)
    {
        return a.spec_ == b.spec_ && a.window_ == b.window_ && a.entries_ == b.entries_;
    }

private:
    AlgebraSpec spec_;
    Degree window_ = 0;
    std::map<BasisSymbol, Element> entries_;
};

/// Inner part u and outer coefficient c of D = ad(u) + c * delta_t.
struct DerivationDescriptor {
    Element inner;
    QSqrt2 outer;

    friend bool operator==(const DerivationDescriptor&, const DerivationDescriptor&) = default;
};

inline Element apply(const WindowedLinearMap& map, const Element& x)
{
    Element out;
    for (const auto& [s, c] : x)
        out.add_scaled(c, map.value(s));
    return out;
}

inline WindowedLinearMap ad_map(const Element& u, const AlgebraSpec& spec, Degree window)
{
    require_valid(u, spec);
    WindowedLinearMap map(spec, window);
    for (const auto& s : domain_symbols(spec, window))
        if (s.is_graded())
            map.set(s, bracket(u, Element(s), spec));
    return map;
}

/// The loop derivation t^(j+1) d/dt: Graded(k,m) -> k Graded(k+j,m), Central(k) -> k Central(k+j),
/// dropping anything pushed past the top layer. j = 0 is delta_t.
inline WindowedLinearMap loop_derivation(const AlgebraSpec& spec, int shift, Degree window)
{
    if (shift < 0)
        throw std::invalid_argument("loop derivation shift must be non-negative");
    WindowedLinearMap map(spec, window);
    for (const auto& s : domain_symbols(spec, window)) {
        const int target = s.layer + shift;
        if (s.layer == 0 || target >= spec.order)
            continue;
        BasisSymbol image = s;
        image.layer = target;
        map.set(s, Element(image, QSqrt2(static_cast<long>(s.layer))));
    }
    return map;
}

/// Grading derivation: scales layer k by k (centrals included).
inline WindowedLinearMap delta_t(const AlgebraSpec& spec, Degree window)
{
    return loop_derivation(spec, 0, window);
}

/// delta_t applied to a single element, without building a map.
inline Element delta_t(const Element& x)
{
    Element out;
    for (const auto& [s, c] : x)
        if (s.layer != 0)
            out.add(s, c * QSqrt2(static_cast<long>(s.layer)));
    return out;
}

/// Action of a descriptor on one element.
inline Element apply(const DerivationDescriptor& d, const Element& x, const AlgebraSpec& spec)
{
    Element out = bracket(d.inner, x, spec);
    out.add_scaled(d.outer, delta_t(x));
    return out;
}

/// Pointwise combination sum_i coeffs[i] * maps[i] on the smallest window.
inline WindowedLinearMap combine(const AlgebraSpec& spec, Degree window, std::span<const QSqrt2> coeffs,
                                 std::span<const WindowedLinearMap> maps)
{
    if (coeffs.size() != maps.size())
        throw std::invalid_argument("combine: coefficient and map counts differ");
    for (const auto& m : maps) {
        if (!(m.spec() == spec))
            throw std::invalid_argument("combine: spec mismatch");
        window = std::min(window, m.window());
    }
    WindowedLinearMap out(spec, window);
    for (const auto& s : domain_symbols(spec, window)) {
        Element v;
        for (std::size_t i = 0; i < maps.size(); ++i)
            v.add_scaled(coeffs[i], maps[i].value(s));
        out.set(s, std::move(v));
    }
    return out;
}

inline WindowedLinearMap combine(std::span<const QSqrt2> coeffs, std::span<const WindowedLinearMap> maps)
{
    if (maps.empty())
        throw std::invalid_argument("combine: empty map list needs an explicit spec and window");
    return combine(maps.front().spec(), maps.front().window(), coeffs, maps);
}

/// Restriction of the derivation described by d to a window.
inline WindowedLinearMap to_map(const DerivationDescriptor& d, const AlgebraSpec& spec, Degree window)
{
    const std::array<QSqrt2, 2> coeffs{QSqrt2(1), d.outer};
    const std::array<WindowedLinearMap, 2> maps{ad_map(d.inner, spec, window), delta_t(spec, window)};
    return combine(spec, window, coeffs, maps);
}

struct LeibnizViolation {
    BasisSymbol x;
    BasisSymbol y;
    Element lhs;  // D([x,y])
    Element rhs;  // [D(x),y] + [x,D(y)]
};

struct LeibnizReport {
    std::vector<LeibnizViolation> violations;
    std::size_t pairs_checked = 0;
    std::size_t pairs_skipped = 0;  // bracket leaves the window

    bool pass() const { return violations.empty(); }
};

/// Checks D([x,y]) = [D(x),y] + [x,D(y)] on every unordered pair of domain
/// symbols whose bracket stays inside the window.
inline LeibnizReport leibniz_check(const WindowedLinearMap& map)
{
    const auto& spec = map.spec();
    const auto basis = domain_symbols(spec, map.window());
    LeibnizReport report;
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = i; j < basis.size(); ++j) {
            const Element x(basis[i]), y(basis[j]);
            const Element xy = bracket(x, y, spec);
            bool inside = true;
            for (const auto& [s, c] : xy)
                if (!map.in_domain(s))
                    inside = false;
            if (!inside) {
                ++report.pairs_skipped;
                continue;
            }
            ++report.pairs_checked;
            Element lhs = apply(map, xy);
            Element rhs = bracket(map.value(basis[i]), y, spec) + bracket(x, map.value(basis[j]), spec);
            if (!(lhs == rhs))
                report.violations.push_back({basis[i], basis[j], std::move(lhs), std::move(rhs)});
        }
    return report;
}

}  // namespace truncvir

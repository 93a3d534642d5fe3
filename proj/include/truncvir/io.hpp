#pragma once

// Text and JSON formats: scalars, basis aliases, element literals, map files
// and the report payloads of every engine result.

#include "truncvir/localder.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace truncvir {

using json = nlohmann::json;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Scalars: {"rat": ["num", "den"], "irr": ["num", "den"]}

namespace detail {

inline json rational_to_json(const Rational& r)
{
    return json::array({r.get_num().get_str(), r.get_den().get_str()});
}

inline mpz_class integer_from_json(const json& j, const std::string& where)
{
    if (j.is_number_integer())
        return mpz_class(j.dump());
    if (!j.is_string())
        throw ParseError(where + ": expected an integer string");
    const std::string s = j.get<std::string>();
    std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (s.size() == start || !std::all_of(s.begin() + static_cast<long>(start), s.end(), ::isdigit))
        throw ParseError(where + ": '" + s + "' is not a decimal integer");
    return mpz_class(s[0] == '+' ? s.substr(1) : s);
}

inline Rational rational_from_json(const json& j, const std::string& where)
{
    if (!j.is_array() || j.size() != 2)
        throw ParseError(where + ": expected [numerator, denominator]");
    mpz_class num = integer_from_json(j[0], where + "[0]");
    mpz_class den = integer_from_json(j[1], where + "[1]");
    if (den == 0)
        throw ParseError(where + ": zero denominator");
    return make_rational(num, den);
}

}  // namespace detail

inline json scalar_to_json(const QSqrt2& x)
{
    return {{"rat", detail::rational_to_json(x.rat())}, {"irr", detail::rational_to_json(x.irr())}};
}

inline QSqrt2 scalar_from_json(const json& j, const std::string& where = "coeff")
{
    if (!j.is_object() || !j.contains("rat"))
        throw ParseError(where + ": expected {\"rat\": [..], \"irr\": [..]}");
    Rational rat = detail::rational_from_json(j.at("rat"), where + ".rat");
    Rational irr = j.contains("irr") ? detail::rational_from_json(j.at("irr"), where + ".irr") : Rational(0);
    return {rat, irr};
}

// ---------------------------------------------------------------------------
// Basis symbols

namespace detail {

inline std::vector<std::string_view> layer_aliases(const AlgebraSpec& spec)
{
    switch (spec.order) {
    case 1: return {"L"};
    case 2: return {"L", "I"};
    case 3: return {"L", "J", "I"};
    default: return {};
    }
}

inline std::optional<Degree> parse_int(std::string_view s)
{
    if (s.empty())
        return std::nullopt;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size())
        return std::nullopt;
    for (std::size_t k = i; k < s.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(s[k])))
            return std::nullopt;
    try {
        return std::stoll(std::string(s));
    } catch (const std::out_of_range&) {
        return std::nullopt;
    }
}

}  // namespace detail

/// Preset alias ("L:3", "I:-2", "J:1", "C", "C1") when the algebra has one, else "g:k:m" / "c:k".
inline std::string format_basis(const BasisSymbol& s, const AlgebraSpec& spec)
{
    const auto aliases = detail::layer_aliases(spec);
    if (aliases.empty())
        return generic_name(s);
    if (s.is_central())
        return s.layer == 0 ? "C" : "C" + std::to_string(s.layer);
    return std::string(aliases.at(s.layer)) + ":" + std::to_string(s.degree);
}

inline BasisSymbol parse_basis(std::string_view text, const AlgebraSpec& spec)
{
    auto bad = [&](const std::string& why) {
        return ParseError("basis '" + std::string(text) + "': " + why);
    };
    BasisSymbol sym;
    if (text.substr(0, 2) == "g:") {
        auto rest = text.substr(2);
        auto colon = rest.find(':');
        if (colon == std::string_view::npos)
            throw bad("expected g:layer:degree");
        auto k = detail::parse_int(rest.substr(0, colon));
        auto m = detail::parse_int(rest.substr(colon + 1));
        if (!k || !m)
            throw bad("expected g:layer:degree");
        sym = BasisSymbol::graded(static_cast<int>(*k), *m);
    } else if (text.substr(0, 2) == "c:") {
        auto k = detail::parse_int(text.substr(2));
        if (!k)
            throw bad("expected c:layer");
        sym = BasisSymbol::central(static_cast<int>(*k));
    } else if (!text.empty() && text[0] == 'C' && text.find(':') == std::string_view::npos) {
        if (detail::layer_aliases(spec).empty())
            throw bad("no central aliases for " + spec_name(spec) + "; use c:k");
        Degree k = 0;
        if (text.size() > 1) {
            auto parsed = detail::parse_int(text.substr(1));
            if (!parsed || *parsed < 1)
                throw bad("unknown central alias");
            k = *parsed;
        }
        sym = BasisSymbol::central(static_cast<int>(k));
    } else {
        auto colon = text.find(':');
        if (colon == std::string_view::npos)
            throw bad("unknown basis symbol");
        const auto letter = text.substr(0, colon);
        const auto aliases = detail::layer_aliases(spec);
        auto it = std::find(aliases.begin(), aliases.end(), letter);
        if (it == aliases.end())
            throw bad("no '" + std::string(letter) + "' family in " + spec_name(spec));
        auto m = detail::parse_int(text.substr(colon + 1));
        if (!m)
            throw bad("bad degree");
        sym = BasisSymbol::graded(static_cast<int>(it - aliases.begin()), *m);
    }
    if (!sym.valid_for(spec))
        throw bad("not a basis symbol of " + spec_name(spec));
    return sym;
}

// ---------------------------------------------------------------------------
// Element literals: "2*L:3 - 1/2*I:-1 + (1/3+2/5√2)*J:0 + √2*C1"

namespace detail {

class LiteralParser {
public:
    LiteralParser(std::string_view text, const AlgebraSpec& spec) : s_(text), spec_(spec) {}

    Element parse()
    {
        Element out;
        skip_ws();
        if (at_end())
            throw error("empty element literal");
        if (s_.substr(pos_) == "0") {
            pos_ = s_.size();
            return out;
        }
        bool first = true;
        while (!at_end()) {
            QSqrt2 sign(1);
            if (peek() == '+' || peek() == '-') {
                sign = QSqrt2(peek() == '-' ? -1 : 1);
                ++pos_;
                skip_ws();
            } else if (!first) {
                throw error("expected '+' or '-'");
            }
            first = false;
            QSqrt2 coeff(1);
            if (starts_coefficient()) {
                coeff = parse_coefficient();
                skip_ws();
                if (!consume('*'))
                    throw error("expected '*' after coefficient");
                skip_ws();
            }
            out.add(parse_symbol(), sign * coeff);
            skip_ws();
        }
        return out;
    }

    /// Standalone scalar: optional sign, then a coefficient form.
    QSqrt2 parse_scalar()
    {
        skip_ws();
        Rational sign(1);
        if (!at_end() && (peek() == '-' || peek() == '+')) {
            sign = peek() == '-' ? -1 : 1;
            ++pos_;
        }
        if (!starts_coefficient())
            throw error("expected a scalar");
        QSqrt2 v = parse_coefficient();
        skip_ws();
        if (!at_end())
            throw error("trailing characters");
        return QSqrt2(sign) * v;
    }

private:
    bool at_end() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }
    void skip_ws()
    {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek())))
            ++pos_;
    }
    bool consume(char c)
    {
        if (!at_end() && peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    bool consume(std::string_view tok)
    {
        if (s_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }
    bool consume_sqrt2() { return consume("√2") || consume("sqrt2"); }
    bool looking_at_sqrt2() const { return s_.substr(pos_, 4) == "√2" || s_.substr(pos_, 5) == "sqrt2"; }
    bool starts_coefficient() const
    {
        return !at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '(' || looking_at_sqrt2());
    }
    ParseError error(const std::string& why) const
    {
        return ParseError("element literal '" + std::string(s_) + "' at offset " + std::to_string(pos_) + ": " + why);
    }

    std::optional<Rational> parse_rational()
    {
        std::size_t start = pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
            ++pos_;
        if (pos_ == start)
            return std::nullopt;
        mpz_class num(std::string(s_.substr(start, pos_ - start)));
        mpz_class den(1);
        if (consume('/')) {
            std::size_t d0 = pos_;
            while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
                ++pos_;
            if (pos_ == d0)
                throw error("expected denominator");
            den = mpz_class(std::string(s_.substr(d0, pos_ - d0)));
            if (den == 0)
                throw error("zero denominator");
        }
        return make_rational(num, den);
    }

    // a | a/b | a√2 | √2 | a + c√2 | a - c√2, each rational optionally signed inside parentheses
    QSqrt2 parse_coefficient()
    {
        const bool paren = consume('(');
        if (paren)
            skip_ws();
        QSqrt2 value;
        Rational sign(1);
        if (paren && (peek() == '-' || peek() == '+')) {
            sign = peek() == '-' ? -1 : 1;
            ++pos_;
        }
        if (consume_sqrt2()) {
            value = QSqrt2(Rational(0), sign);
        } else {
            auto a = parse_rational();
            if (!a)
                throw error("expected a coefficient");
            if (consume_sqrt2()) {
                value = QSqrt2(Rational(0), sign * *a);
            } else {
                value = QSqrt2(sign * *a);
                // optional "+c/d√2" or "-c/d√2"; backtrack if it is not a sqrt2 part
                const std::size_t save = pos_;
                if (!at_end() && (peek() == '+' || peek() == '-')) {
                    Rational s2 = peek() == '-' ? -1 : 1;
                    ++pos_;
                    if (paren)
                        skip_ws();
                    std::optional<Rational> c;
                    if (looking_at_sqrt2())
                        c = Rational(1);
                    else
                        c = parse_rational();
                    if (c && consume_sqrt2())
                        value = QSqrt2(value.rat(), s2 * *c);
                    else
                        pos_ = save;
                }
            }
        }
        if (paren) {
            skip_ws();
            if (!consume(')'))
                throw error("expected ')'");
        }
        return value;
    }

    BasisSymbol parse_symbol()
    {
        std::size_t start = pos_;
        while (!at_end() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != '+' &&
               !(peek() == '-' && pos_ > start && s_[pos_ - 1] != ':'))
            ++pos_;
        if (pos_ == start)
            throw error("expected a basis symbol");
        return parse_basis(s_.substr(start, pos_ - start), spec_);
    }

    std::string_view s_;
    const AlgebraSpec& spec_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Element parse_element(std::string_view text, const AlgebraSpec& spec)
{
    return detail::LiteralParser(text, spec).parse();
}

inline QSqrt2 parse_scalar(std::string_view text)
{
    const AlgebraSpec spec;
    return detail::LiteralParser(text, spec).parse_scalar();
}

inline std::string format_element(const Element& x, const AlgebraSpec& spec)
{
    if (x.is_zero())
        return "0";
    std::string out;
    for (const auto& [s, c] : x) {
        QSqrt2 coeff = c;
        bool negative = sgn(c.rat()) < 0 || (sgn(c.rat()) == 0 && sgn(c.irr()) < 0);
        if (negative)
            coeff = -c;
        out += out.empty() ? (negative ? "-" : "") : (negative ? " - " : " + ");
        if (!(coeff == QSqrt2(1)))
            out += to_string(coeff) + "*";
        out += format_basis(s, spec);
    }
    return out;
}

inline json element_to_json(const Element& x, const AlgebraSpec& spec)
{
    json arr = json::array();
    for (const auto& [s, c] : x)
        arr.push_back({{"basis", format_basis(s, spec)}, {"coeff", scalar_to_json(c)}});
    return arr;
}

inline Element element_from_json(const json& j, const AlgebraSpec& spec, const std::string& where = "value")
{
    if (!j.is_array())
        throw ParseError(where + ": expected an array of {basis, coeff} records");
    Element out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string at = where + "[" + std::to_string(i) + "]";
        const json& rec = j[i];
        if (!rec.is_object() || !rec.contains("basis") || !rec.at("basis").is_string())
            throw ParseError(at + ": expected {\"basis\": str, \"coeff\": {...}}");
        BasisSymbol s;
        try {
            s = parse_basis(rec.at("basis").get<std::string>(), spec);
        } catch (const ParseError& e) {
            throw ParseError(at + ".basis: " + e.what());
        }
        if (!rec.contains("coeff"))
            throw ParseError(at + ": missing coeff");
        out.add(s, scalar_from_json(rec.at("coeff"), at + ".coeff"));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Map files: {"algebra": name, "window": N, "entries": [{"basis": "L:0", "value": [...]}]}

inline WindowedLinearMap map_from_json(const json& j)
{
    if (!j.is_object())
        throw ParseError("map file: expected a JSON object");
    for (const char* key : {"algebra", "window", "entries"})
        if (!j.contains(key))
            throw ParseError(std::string("map file: missing field '") + key + "'");
    if (!j.at("algebra").is_string())
        throw ParseError("algebra: expected a string");
    AlgebraSpec spec;
    try {
        spec = parse_spec(j.at("algebra").get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("algebra: ") + e.what());
    }
    if (!j.at("window").is_number_integer() || j.at("window").get<long long>() < 0)
        throw ParseError("window: expected a non-negative integer");
    WindowedLinearMap map(spec, j.at("window").get<Degree>());
    const json& entries = j.at("entries");
    if (!entries.is_array())
        throw ParseError("entries: expected an array");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string at = "entries[" + std::to_string(i) + "]";
        const json& e = entries[i];
        if (!e.is_object() || !e.contains("basis") || !e.at("basis").is_string() || !e.contains("value"))
            throw ParseError(at + ": expected {\"basis\": str, \"value\": [...]}");
        BasisSymbol s;
        try {
            s = parse_basis(e.at("basis").get<std::string>(), spec);
        } catch (const ParseError& err) {
            throw ParseError(at + ".basis: " + err.what());
        }
        if (!map.in_domain(s))
            throw ParseError(at + ".basis: " + format_basis(s, spec) + " lies outside window " +
                             std::to_string(map.window()));
        map.set(s, element_from_json(e.at("value"), spec, at + ".value"));
    }
    return map;
}

/// Normalized form: entries in canonical symbol order, zero entries omitted.
inline json map_to_json(const WindowedLinearMap& map)
{
    json entries = json::array();
    for (const auto& [s, v] : map.entries())
        if (!v.is_zero())
            entries.push_back({{"basis", format_basis(s, map.spec())}, {"value", element_to_json(v, map.spec())}});
    return {{"algebra", spec_name(map.spec())}, {"window", map.window()}, {"entries", std::move(entries)}};
}

inline WindowedLinearMap parse_map_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open map file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    try {
        return map_from_json(j);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Result payloads

inline json descriptor_to_json(const DerivationDescriptor& d, const AlgebraSpec& spec)
{
    return {{"inner", element_to_json(d.inner, spec)},
            {"inner_text", format_element(d.inner, spec)},
            {"outer", scalar_to_json(d.outer)},
            {"outer_text", to_string(d.outer)},
            {"outer_basis", "delta_t (eigenvalue k on layer k)"}};
}

inline json system_to_json(const LinearSystem<QSqrt2>& sys)
{
    json rows = json::array();
    for (std::size_t i = 0; i < sys.rows.size(); ++i) {
        json coeffs = json::array();
        for (const auto& [c, v] : sys.rows[i])
            coeffs.push_back({{"col", c}, {"value", scalar_to_json(v)}});
        json row = {{"coeffs", std::move(coeffs)}, {"rhs", scalar_to_json(sys.rhs[i])}};
        if (i < sys.row_labels.size())
            row["label"] = sys.row_labels[i];
        rows.push_back(std::move(row));
    }
    return {{"cols", sys.col_labels}, {"rows", std::move(rows)}};
}

inline LinearSystem<QSqrt2> system_from_json(const json& j)
{
    LinearSystem<QSqrt2> sys;
    sys.col_labels = j.at("cols").get<std::vector<std::string>>();
    sys.cols = sys.col_labels.size();
    for (const auto& row : j.at("rows")) {
        SparseVector<QSqrt2> coeffs;
        for (const auto& c : row.at("coeffs"))
            coeffs.emplace_back(c.at("col").get<std::size_t>(), scalar_from_json(c.at("value")));
        sys.add_row(std::move(coeffs), scalar_from_json(row.at("rhs")), row.value("label", std::string()));
    }
    return sys;
}

inline json certificate_to_json(const std::vector<QSqrt2>& z)
{
    json out = json::array();
    for (std::size_t i = 0; i < z.size(); ++i)
        if (!z[i].is_zero())
            out.push_back({{"row", i}, {"value", scalar_to_json(z[i])}});
    return out;
}

inline std::vector<QSqrt2> certificate_from_json(const json& j, std::size_t rows)
{
    std::vector<QSqrt2> z(rows);
    for (const auto& e : j)
        z.at(e.at("row").get<std::size_t>()) = scalar_from_json(e.at("value"));
    return z;
}

inline json witness_to_json(const WitnessResult& w, const AlgebraSpec& spec)
{
    json out = {{"support_window", w.witness_system.support_window},
                {"ansatz", w.witness_system.has_outer ? "ad(u) + c*delta_t" : "ad(u)"}};
    if (w.feasible()) {
        out["feasible"] = true;
        out["descriptor"] = descriptor_to_json(w.descriptor(), spec);
    } else {
        out["feasible"] = false;
        out["certificate"] = certificate_to_json(w.certificate());
        out["certificate_valid"] = certificate_valid(w.witness_system.system, w.certificate());
        out["system"] = system_to_json(w.witness_system.system);
    }
    return out;
}

inline json probe_to_json(const ProbeSpec& p, const AlgebraSpec& spec)
{
    json params = json::object();
    for (const auto& [k, v] : p.params)
        params[k] = to_string(v);
    return {{"family", p.family}, {"element", format_element(p.element, spec)}, {"params", std::move(params)}};
}

inline json probe_result_to_json(const ProbeResult& r, const AlgebraSpec& spec)
{
    return {{"probe", probe_to_json(r.probe, spec)},
            {"target", format_element(r.target, spec)},
            {"witness", witness_to_json(r.witness, spec)}};
}

inline json finding_to_json(const Finding& f, const AlgebraSpec& spec)
{
    if (const auto* r = std::get_if<Rejection>(&f))
        return {{"kind", "rejected"},
                {"stage", r->stage},
                {"symbol", format_basis(r->symbol, spec)},
                {"residual", format_element(r->residual, spec)},
                {"probe", probe_result_to_json(r->probe, spec)}};
    const auto& u = std::get<Unresolved>(f);
    return {{"kind", "unresolved"},
            {"stage", u.stage},
            {"symbol", format_basis(u.symbol, spec)},
            {"residual", format_element(u.residual, spec)},
            {"probes_tried", u.probes_tried}};
}

inline json decomposition_to_json(const DecompositionReport& r, const AlgebraSpec& spec)
{
    json trace = json::array();
    for (const auto& st : r.trace) {
        json values = json::object();
        for (const auto& [name, v] : st.values)
            values[name] = std::holds_alternative<QSqrt2>(v) ? to_string(std::get<QSqrt2>(v))
                                                             : format_element(std::get<Element>(v), spec);
        trace.push_back({{"stage", st.name}, {"note", st.note}, {"values", std::move(values)}});
    }
    json out = {{"trace", std::move(trace)}, {"window", r.window}};
    if (const auto* s = std::get_if<DecompositionSuccess>(&r.outcome)) {
        out["outcome"] = "success";
        out["descriptor"] = descriptor_to_json(s->descriptor, spec);
        out["residual_zero"] = s->residual_zero;
        out["scope"] = "derivation on window [-" + std::to_string(r.window) + ", " + std::to_string(r.window) + "]";
    } else {
        Finding first = std::holds_alternative<Rejection>(r.outcome) ? Finding(std::get<Rejection>(r.outcome))
                                                                     : Finding(std::get<Unresolved>(r.outcome));
        out["outcome"] = std::holds_alternative<Rejection>(r.outcome) ? "rejected" : "unresolved";
        out["finding"] = finding_to_json(first, spec);
    }
    if (r.findings.size() > 1) {
        json all = json::array();
        for (const auto& f : r.findings)
            all.push_back(finding_to_json(f, spec));
        out["findings"] = std::move(all);
    }
    return out;
}

inline json leibniz_to_json(const LeibnizReport& r, const AlgebraSpec& spec)
{
    json viol = json::array();
    for (const auto& v : r.violations)
        viol.push_back({{"x", format_basis(v.x, spec)},
                        {"y", format_basis(v.y, spec)},
                        {"lhs", format_element(v.lhs, spec)},
                        {"rhs", format_element(v.rhs, spec)}});
    return {{"pairs_checked", r.pairs_checked}, {"pairs_skipped", r.pairs_skipped}, {"violations", std::move(viol)}};
}

inline json center_to_json(const CenterReport& r, const AlgebraSpec& spec)
{
    json viol = json::array();
    for (const auto& v : r.central_violations)
        viol.push_back({{"symbol", format_basis(v.symbol, spec)},
                        {"value", format_element(v.value, spec)},
                        {"pointwise_witness", v.pointwise_witness}});
    json rej = json::array();
    for (const auto& x : r.rejections)
        rej.push_back(finding_to_json(x, spec));
    json witnessed = json::array();
    for (const auto& s : r.witnessed_central_values)
        witnessed.push_back(format_basis(s, spec));
    return {{"central_violations", std::move(viol)},
            {"rejections", std::move(rej)},
            {"witnessed_central_values", std::move(witnessed)}};
}

// ---------------------------------------------------------------------------
// Reports

struct Report {
    std::string command;
    std::string spec;
    std::optional<Degree> window;
    bool pass = false;
    std::string summary;
    json payload = json::object();
    double timing_ms = 0.0;

    friend bool operator==(const Report&, const Report&) = default;
};

inline json report_to_json(const Report& r)
{
    json out = {{"command", r.command}, {"spec", r.spec},         {"status", r.pass ? "pass" : "fail"},
                {"summary", r.summary}, {"payload", r.payload}, {"timing_ms", r.timing_ms}};
    out["window"] = r.window ? json(*r.window) : json(nullptr);
    return out;
}

inline Report report_from_json(const json& j)
{
    Report r;
    r.command = j.at("command").get<std::string>();
    r.spec = j.at("spec").get<std::string>();
    if (!j.at("window").is_null())
        r.window = j.at("window").get<Degree>();
    r.pass = j.at("status").get<std::string>() == "pass";
    r.summary = j.at("summary").get<std::string>();
    r.payload = j.at("payload");
    r.timing_ms = j.at("timing_ms").get<double>();
    return r;
}

inline std::string render_text(const Report& r)
{
    std::ostringstream os;
    os << r.command << " [" << r.spec;
    if (r.window)
        os << ", window " << *r.window;
    os << "]: " << (r.pass ? "PASS" : "FAIL") << "\n";
    if (!r.summary.empty())
        os << r.summary << "\n";
    os << "(" << r.timing_ms << " ms)\n";
    return os.str();
}

}  // namespace truncvir

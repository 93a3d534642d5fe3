#pragma once

// Probe families and the reduction pipeline that splits a candidate map into
// ad(u) + e*delta_t, or certifies that it is not a local derivation at some
// probe element.
//
// Pipeline (w22 / bms3 / generic n):
//   pin-L0     witness at L_0 gives u;            Delta_1 = Delta - ad(u)
//   pin-L1     Delta_1(L_1) = sum_k c_k G(k,1);   Delta_2 = Delta_1 + sum_k c_k ad(G(k,0))
//   layer-0    Delta_2(L_m) = 0 for all |m| <= N
//   top-layer  Delta_2(G(n-1,m)) = (n-1) e G(n-1,m), e read at m = 1
//   layer-k    Delta_2(G(k,m)) = k e G(k,m), k = n-2 .. 1
//   residual   Delta_3 = Delta_2 - e delta_t vanishes on the window, centrals included
// Every failed assertion is handed to the probe families for that symbol; the
// first probe whose witness system is infeasible becomes the rejection.

#include "truncvir/solver.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace truncvir {

struct WindowTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using LocalDerCandidate = WindowedLinearMap;

struct ProbeSpec {
    std::string family;
    Element element;
    std::vector<std::pair<std::string, QSqrt2>> params;
};

/// Image of L_m under one of the basis changes used to transport layer-0 probes.
enum class Frame {
    identity,      // L_m
    top_shift,     // L_m + m G(n-1,m); the L'_m construction when n = 2
    double_prime,  // L''_m = L_m + sqrt2 m J_m + m^2 I_m (n = 3)
};

inline Element frame_image(const AlgebraSpec& spec, Frame frame, Degree m)
{
    switch (frame) {
    case Frame::identity: return graded(0, m);
    case Frame::top_shift: {
        if (spec.order < 2)
            throw std::invalid_argument("top_shift frame needs truncation order >= 2");
        Element e = graded(0, m);
        e.add(BasisSymbol::graded(spec.top_layer(), m), QSqrt2(static_cast<long>(m)));
        return e;
    }
    case Frame::double_prime: return primed_basis(spec, Construction::ldoubleprime, m);
    }
    return {};
}

inline std::string_view frame_tag(Frame f)
{
    switch (f) {
    case Frame::identity: return "";
    case Frame::top_shift: return "-top-shift";
    case Frame::double_prime: return "-double-prime";
    }
    return "";
}

inline std::vector<ProbeSpec> probe_scaled(Degree m, std::span<const QSqrt2> samples, const AlgebraSpec& spec = {},
                                           Frame frame = Frame::identity)
{
    if (m == 0)
        throw std::invalid_argument("probe_scaled needs m != 0");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].is_zero())
            throw std::invalid_argument("probe_scaled samples must be nonzero");
        for (std::size_t j = 0; j < i; ++j)
            if (samples[i] == samples[j])
                throw std::invalid_argument("probe_scaled samples must be distinct");
    }
    std::vector<ProbeSpec> out;
    const Element lm = frame_image(spec, frame, m);
    const Element l0 = frame_image(spec, frame, 0);
    for (const auto& x : samples) {
        Element e = lm;
        e.add_scaled(x, l0);
        out.push_back({"scaled" + std::string(frame_tag(frame)), std::move(e),
                       {{"m", QSqrt2(static_cast<long>(m))}, {"x", x}}});
    }
    return out;
}

/// Number of distinct samples that separates the elimination polynomial from
/// zero: graded degree span of the failing value plus one.
inline std::size_t scaled_sample_count(const Element& value)
{
    auto span = degree_span(value);
    return span ? static_cast<std::size_t>(span->second - span->first + 1) : 1;
}

inline std::vector<QSqrt2> default_samples(std::size_t count)
{
    std::vector<QSqrt2> out;
    for (std::size_t i = 1; i <= count; ++i)
        out.emplace_back(static_cast<long>(i));
    return out;
}

inline ProbeSpec probe_shift(Degree m, const AlgebraSpec& spec = {}, Frame frame = Frame::identity)
{
    if (m == 0 || m == 1)
        throw std::invalid_argument("probe_shift needs m not in {0, 1}");
    Element e = frame_image(spec, frame, m) + frame_image(spec, frame, 1);
    return {"shift" + std::string(frame_tag(frame)), std::move(e), {{"m", QSqrt2(static_cast<long>(m))}}};
}

/// I_0 + L_p + L_q with p = min(s,0) - 1 and q = max(t,0) - p + 1, where s..t is the
/// degree span of Delta(I_0) (I = the given layer, top layer by default).
inline ProbeSpec probe_I0(const LocalDerCandidate& candidate, std::optional<int> layer = std::nullopt)
{
    const auto& spec = candidate.spec();
    if (spec.order < 2)
        throw std::invalid_argument("probe_I0 needs truncation order >= 2");
    const int k = layer.value_or(spec.top_layer());
    const auto span = degree_span(candidate.value(BasisSymbol::graded(k, 0)));
    const Degree s = span ? span->first : 0;
    const Degree t = span ? span->second : 0;
    const Degree p = std::min<Degree>(s, 0) - 1;
    const Degree q = std::max<Degree>(t, 0) - p + 1;
    if (q > candidate.window() || -p > candidate.window())
        throw WindowTooSmall("probe_I0 needs degrees " + std::to_string(p) + " and " + std::to_string(q) +
                             " inside window " + std::to_string(candidate.window()));
    Element e = graded(k, 0) + graded(0, p) + graded(0, q);
    return {"I0", std::move(e),
            {{"p", QSqrt2(static_cast<long>(p))}, {"q", QSqrt2(static_cast<long>(q))}, {"s", QSqrt2(static_cast<long>(s))},
             {"t", QSqrt2(static_cast<long>(t))}}};
}

inline ProbeSpec probe_I0_sum(const AlgebraSpec& spec, std::optional<int> layer = std::nullopt)
{
    if (spec.order < 2)
        throw std::invalid_argument("probe_I0_sum needs truncation order >= 2");
    const int k = layer.value_or(spec.top_layer());
    return {"I0-sum", graded(k, 0) + graded(k, 1) + graded(k, 2), {}};
}

/// J_m + L_1 + L_2 and J_m + I_2m.
inline std::vector<ProbeSpec> probe_J(const AlgebraSpec& spec, Degree m)
{
    if (spec.order < 3)
        throw std::invalid_argument("probe_J needs truncation order >= 3");
    const QSqrt2 mm(static_cast<long>(m));
    return {{"J+L1+L2", graded(1, m) + graded(0, 1) + graded(0, 2), {{"m", mm}}},
            {"J+I2m", graded(1, m) + graded(2, 2 * m), {{"m", mm}}}};
}

/// probe_J analogues for a middle layer k of a generic truncation.
inline std::vector<ProbeSpec> probe_layer_pair(const AlgebraSpec& spec, int k, Degree m)
{
    const QSqrt2 mm(static_cast<long>(m));
    std::vector<ProbeSpec> out{{"G+L1+L2", graded(k, m) + graded(0, 1) + graded(0, 2), {{"m", mm}}}};
    if (2 * k < spec.order)
        out.push_back({"G+G2", graded(k, m) + graded(2 * k, 2 * m), {{"m", mm}}});
    return out;
}

struct ProbeResult {
    ProbeSpec probe;
    Element target;
    WitnessResult witness;
};

/// Solves the witness problem Delta(probe) = D(probe) for D = ad(u) + c delta_t.
inline ProbeResult evaluate_probe(const LocalDerCandidate& candidate, const ProbeSpec& probe,
                                  const WitnessOptions& opt = {})
{
    Element target = apply(candidate, probe.element);
    WitnessResult w = witness_solve(probe.element, target, candidate.spec(), opt);
    return {probe, std::move(target), std::move(w)};
}

// ---------------------------------------------------------------------------

using TraceValue = std::variant<QSqrt2, Element>;

struct TraceStage {
    std::string name;
    std::string note;
    std::vector<std::pair<std::string, TraceValue>> values;
};

struct Rejection {
    std::string stage;
    BasisSymbol symbol;
    Element residual;  // the failing stage-map value at symbol
    ProbeResult probe;
};

struct Unresolved {
    std::string stage;
    BasisSymbol symbol;
    Element residual;
    std::vector<std::string> probes_tried;
};

struct DecompositionSuccess {
    DerivationDescriptor descriptor;
    bool residual_zero = false;
};

using Finding = std::variant<Rejection, Unresolved>;

struct DecompositionReport {
    std::variant<DecompositionSuccess, Rejection, Unresolved> outcome;
    std::vector<TraceStage> trace;
    std::vector<Finding> findings;  // every failure in audit mode, else at most one
    Degree window = 0;

    bool success() const { return std::holds_alternative<DecompositionSuccess>(outcome); }
    bool rejected() const { return std::holds_alternative<Rejection>(outcome); }
};

struct DecomposeOptions {
    WitnessOptions witness;
    bool audit_all = false;
};

namespace detail {

inline std::vector<ProbeSpec> probes_for(const LocalDerCandidate& cand, const BasisSymbol& x, const Element& residual)
{
    const auto& spec = cand.spec();
    const Degree window = cand.window();
    const int n = spec.order;
    std::vector<ProbeSpec> out{{"self", Element(x), {}}};
    if (x.is_central())
        return out;
    const Degree m = x.degree;
    auto add_all = [&out](std::vector<ProbeSpec> more) {
        for (auto& p : more)
            out.push_back(std::move(p));
    };
    // A residual supported on degree m only is the diagonal case: the shift
    // probe (or probe_J) decides it, the scaled probes cannot.
    bool aligned = true;
    for (const auto& [s, c] : residual)
        aligned = aligned && s.is_graded() && s.degree == m;
    auto scaled_and_shift = [&](Frame frame) {
        if (m == 0)
            return;
        std::vector<ProbeSpec> scaled = probe_scaled(m, default_samples(scaled_sample_count(residual)), spec, frame);
        if (!aligned)
            add_all(scaled);
        if (m != 1)
            out.push_back(probe_shift(m, spec, frame));
        if (aligned)
            add_all(scaled);
    };
    if (x.layer == 0) {
        scaled_and_shift(Frame::identity);
    } else if (x.layer == n - 1) {
        if (m != 0) {
            scaled_and_shift(Frame::top_shift);
        } else {
            try {
                out.push_back(probe_I0(cand));
            } catch (const WindowTooSmall&) {
            }
            if (window >= 2)
                out.push_back(probe_I0_sum(spec));
        }
    } else if (n == 3) {
        if (aligned) {
            add_all(probe_J(spec, m));
            scaled_and_shift(Frame::double_prime);
        } else {
            scaled_and_shift(Frame::double_prime);
            add_all(probe_J(spec, m));
        }
    } else {
        add_all(probe_layer_pair(spec, x.layer, m));
    }
    return out;
}

inline bool inside_window(const LocalDerCandidate& cand, const Element& e)
{
    for (const auto& [s, c] : e)
        if (!cand.in_domain(s))
            return false;
    return true;
}

inline Finding investigate(const LocalDerCandidate& cand, const std::string& stage, const BasisSymbol& x,
                           const Element& residual, const WitnessOptions& opt)
{
    Unresolved unresolved{stage, x, residual, {}};
    for (auto& probe : probes_for(cand, x, residual)) {
        if (!inside_window(cand, probe.element))
            continue;
        unresolved.probes_tried.push_back(probe.family);
        ProbeResult r = evaluate_probe(cand, probe, opt);
        if (!r.witness.feasible())
            return Rejection{stage, x, residual, std::move(r)};
    }
    return unresolved;
}

}  // namespace detail

inline DecompositionReport decompose(const LocalDerCandidate& candidate, const DecomposeOptions& opt = {})
{
    const auto& spec = candidate.spec();
    const Degree window = candidate.window();
    if (window < 3)
        throw WindowTooSmall("decompose needs window >= 3");
    const int n = spec.order;

    DecompositionReport report;
    report.window = window;
    bool stopped = false;
    auto fail = [&](Finding f) {
        if (report.findings.empty())
            std::visit([&](auto& v) { report.outcome = v; }, f);
        report.findings.push_back(std::move(f));
        if (!opt.audit_all)
            stopped = true;
    };
    auto check = [&](const std::string& stage, const BasisSymbol& x, const Element& residual) {
        if (!residual.is_zero())
            fail(detail::investigate(candidate, stage, x, residual, opt.witness));
    };

    // pin-L0
    const BasisSymbol l0 = BasisSymbol::graded(0, 0);
    const Element target0 = candidate.value(l0);
    WitnessResult w0 = witness_solve(Element(l0), target0, spec, opt.witness);
    if (!w0.feasible()) {
        bool graded_obstruction = false;
        for (const auto& [s, c] : target0)
            graded_obstruction = graded_obstruction || (s.is_graded() && s.degree == 0);
        report.trace.push_back({"pin-L0",
                                graded_obstruction ? "Delta(L0) has a degree-0 component; [u,L0] never does"
                                                   : "no inner witness at L0",
                                {}});
        Rejection r{"pin-L0", l0, target0, {{"self", Element(l0), {}}, target0, std::move(w0)}};
        report.outcome = r;
        report.findings.emplace_back(std::move(r));
        return report;
    }
    const Element u = w0.descriptor().inner;
    report.trace.push_back({"pin-L0", "Delta_1 = Delta - ad(u)", {{"u", u}}});
    const std::array<QSqrt2, 2> minus{QSqrt2(1), QSqrt2(-1)};
    WindowedLinearMap delta1 = combine(spec, window, minus,
                                       std::array<WindowedLinearMap, 2>{candidate, ad_map(u, spec, window)});

    // pin-L1
    const BasisSymbol l1 = BasisSymbol::graded(0, 1);
    const Element v1 = delta1.value(l1);
    std::vector<QSqrt2> c1(n);
    Element aligned;
    for (int k = 0; k < n; ++k) {
        c1[k] = v1.coeff(BasisSymbol::graded(k, 1));
        aligned.add(BasisSymbol::graded(k, 1), c1[k]);
    }
    TraceStage pin1{"pin-L1", "Delta_1(L1) = sum_k c1[k] G(k,1); Delta_2 = Delta_1 + sum_k c1[k] ad(G(k,0))", {}};
    for (int k = 0; k < n; ++k)
        pin1.values.emplace_back("c1.layer" + std::to_string(k), c1[k]);
    report.trace.push_back(pin1);
    if (!(v1 == aligned)) {
        fail(detail::investigate(candidate, "pin-L1", l1, v1 - aligned, opt.witness));
        return report;  // later stages are meaningless without c1
    }
    Element shift0;
    for (int k = 0; k < n; ++k)
        shift0.add(BasisSymbol::graded(k, 0), c1[k]);
    const std::array<QSqrt2, 2> plus{QSqrt2(1), QSqrt2(1)};
    WindowedLinearMap delta2 = combine(spec, window, plus,
                                       std::array<WindowedLinearMap, 2>{delta1, ad_map(shift0, spec, window)});

    // layer-0
    for (Degree m = -window; m <= window && !stopped; ++m) {
        const BasisSymbol x = BasisSymbol::graded(0, m);
        const Element& r = delta2.value(x);
        if (!r.is_zero() && m != 0) {
            const auto prof = support_profile(r, m);
            std::string f, e;
            for (auto res : prof.present(0))
                f += (f.empty() ? "" : ",") + std::to_string(res);
            for (auto res : prof.present(1))
                e += (e.empty() ? "" : ",") + std::to_string(res);
            report.trace.push_back({"support-profile",
                                    "Delta_2(" + generic_name(x) + ") mod " + std::to_string(m) + ": F={" + f +
                                        "} E={" + e + "}",
                                    {{"value", r}}});
        }
        check("layer-0", x, r);
    }
    if (stopped)
        return report;

    // top layer, then the middle layers downwards
    QSqrt2 e;
    if (n >= 2) {
        const int top = n - 1;
        const QSqrt2 etop = delta2.value(BasisSymbol::graded(top, 1)).coeff(BasisSymbol::graded(top, 1));
        e = etop / QSqrt2(static_cast<long>(top));
        report.trace.push_back({"top-layer", "Delta_2(G(top,1)) = e_top G(top,1); e = e_top/(n-1) in delta_t units",
                                {{"e_top", etop}, {"e", e}}});
        std::vector<Degree> order;
        for (Degree m = 1; m <= window; ++m) {
            order.push_back(m);
            order.push_back(-m);
        }
        order.push_back(0);
        for (int k = top; k >= 1 && !stopped; --k) {
            const std::string stage = k == top ? "top-layer" : "layer-" + std::to_string(k);
            const QSqrt2 eig = e * QSqrt2(static_cast<long>(k));
            for (Degree m : order) {
                if (stopped)
                    break;
                const BasisSymbol x = BasisSymbol::graded(k, m);
                Element r = delta2.value(x);
                r.add(x, -eig);
                check(stage, x, r);
            }
        }
        if (stopped)
            return report;
    }

    // residual
    const std::array<QSqrt2, 2> sub_outer{QSqrt2(1), -e};
    WindowedLinearMap delta3 = combine(spec, window, sub_outer,
                                       std::array<WindowedLinearMap, 2>{delta2, delta_t(spec, window)});
    if (spec.centered)
        for (int k = 0; k < n && !stopped; ++k)
            check("center", BasisSymbol::central(k), delta3.value(BasisSymbol::central(k)));
    if (!report.findings.empty())
        return report;

    DecompositionSuccess ok;
    ok.descriptor.inner = u - shift0;
    ok.descriptor.outer = e;
    ok.residual_zero = delta3.is_zero() && to_map(ok.descriptor, spec, window) == candidate;
    report.trace.push_back({"residual",
                            "Delta - ad(inner) - outer*delta_t vanishes on the window [-" + std::to_string(window) +
                                ", " + std::to_string(window) + "]",
                            {{"inner", ok.descriptor.inner}, {"outer", ok.descriptor.outer}}});
    report.outcome = std::move(ok);
    return report;
}

// ---------------------------------------------------------------------------

struct CentralViolation {
    BasisSymbol symbol;
    Element value;
    bool pointwise_witness = false;  // some ad(u) + c delta_t reproduces the value at this symbol
};

struct CenterReport {
    std::vector<CentralViolation> central_violations;  // Delta(Central(k)) != 0
    std::vector<Rejection> rejections;                 // graded symbols with unwitnessed pure-central values
    std::vector<BasisSymbol> witnessed_central_values;

    bool pass() const { return central_violations.empty() && rejections.empty(); }
};

inline CenterReport check_center(const LocalDerCandidate& candidate, const WitnessOptions& opt = {})
{
    const auto& spec = candidate.spec();
    if (!spec.centered)
        throw std::invalid_argument("check_center needs a centered spec");
    CenterReport report;
    for (const auto& [x, value] : candidate.entries()) {
        if (value.is_zero())
            continue;
        if (x.is_central()) {
            WitnessResult w = witness_solve(Element(x), value, spec, opt);
            report.central_violations.push_back({x, value, w.feasible()});
            continue;
        }
        bool pure_central = true;
        for (const auto& [s, c] : value)
            pure_central = pure_central && s.is_central();
        if (!pure_central)
            continue;
        ProbeResult r = evaluate_probe(candidate, {"self", Element(x), {}}, opt);
        if (r.witness.feasible())
            report.witnessed_central_values.push_back(x);
        else
            report.rejections.push_back({"center", x, value, std::move(r)});
    }
    return report;
}

}  // namespace truncvir

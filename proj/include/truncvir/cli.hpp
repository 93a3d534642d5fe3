#pragma once

// Command dispatch for the truncvir executable.
// Exit codes: 0 pass, 1 violation or rejection, 2 usage or input error.

#include "truncvir/io.hpp"
#include "truncvir/random.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace truncvir {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitUsage = 2 };

struct CliOptions {
    std::string spec;
    std::optional<Degree> range;
    std::string map_path;
    std::optional<std::uint64_t> seed;
    std::string probe;
    std::string target;
    std::string kind;
    Degree degree = 0;
    std::string family;
    std::optional<Degree> m;
    std::string samples;
    std::string frame = "identity";
    Degree support_slack = 2;
    bool json = false;
    bool audit_all = false;
    bool inner_only = false;
};

namespace detail {

inline AlgebraSpec require_spec(const CliOptions& o)
{
    if (o.spec.empty())
        throw ParseError("--spec is required");
    try {
        return parse_spec(o.spec);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("--spec: ") + e.what());
    }
}

/// The candidate map: --map file, or a seeded random inner+outer derivation.
struct LoadedCandidate {
    WindowedLinearMap map;
    std::optional<DerivationDescriptor> generated;
};

inline LoadedCandidate load_candidate(const CliOptions& o)
{
    if (!o.map_path.empty()) {
        if (o.seed)
            throw ParseError("--map and --seed are mutually exclusive");
        WindowedLinearMap map = parse_map_file(o.map_path);
        if (!o.spec.empty() && !(require_spec(o) == map.spec()))
            throw ParseError("--spec " + o.spec + " does not match map algebra " + spec_name(map.spec()));
        return {std::move(map), std::nullopt};
    }
    if (!o.seed)
        throw ParseError("one of --map or --seed is required");
    const AlgebraSpec spec = require_spec(o);
    Rng rng(*o.seed);
    DerivationDescriptor d = random_derivation(spec, rng);
    return {to_map(d, spec, o.range.value_or(8)), d};
}

inline Frame parse_frame(const std::string& s)
{
    if (s == "identity")
        return Frame::identity;
    if (s == "top-shift")
        return Frame::top_shift;
    if (s == "double-prime")
        return Frame::double_prime;
    throw ParseError("--frame: expected identity, top-shift or double-prime");
}

inline std::vector<QSqrt2> parse_samples(const std::string& text)
{
    std::vector<QSqrt2> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_scalar(item));
    return out;
}

inline json map_list_to_json(const std::vector<WindowedLinearMap>& maps)
{
    json out = json::array();
    for (const auto& m : maps)
        out.push_back(map_to_json(m).at("entries"));
    return out;
}

inline Report cmd_verify_algebra(const CliOptions& o)
{
    const AlgebraSpec spec = require_spec(o);
    const Degree n = o.range.value_or(4);
    const JacobiReport jac = jacobi_check(spec, n);
    const AntisymmetryReport anti = antisymmetry_check(spec, n);
    Report r{"verify-algebra", spec_name(spec), n, jac.pass && anti.pass, "", {}, 0.0};
    r.payload["jacobi"] = {{"pass", jac.pass}, {"triples_checked", jac.triples_checked}};
    if (jac.violation) {
        const auto& v = *jac.violation;
        r.payload["jacobi"]["violation"] = {format_basis(v[0], spec), format_basis(v[1], spec), format_basis(v[2], spec)};
        r.payload["jacobi"]["residual"] = format_element(jac.residual, spec);
    }
    r.payload["antisymmetry"] = {{"pass", anti.pass}, {"pairs_checked", anti.pairs_checked}};
    if (anti.violation)
        r.payload["antisymmetry"]["violation"] = {format_basis(anti.violation->first, spec),
                                                  format_basis(anti.violation->second, spec)};
    std::ostringstream s;
    s << "Jacobi: " << jac.triples_checked << " triples, " << (jac.pass ? "ok" : "VIOLATED") << "\n"
      << "antisymmetry: " << anti.pairs_checked << " pairs, " << (anti.pass ? "ok" : "VIOLATED");
    r.summary = s.str();
    return r;
}

inline Report cmd_verify_construction(const CliOptions& o)
{
    const AlgebraSpec spec = require_spec(o);
    if (o.kind.empty())
        throw ParseError("--kind is required (Lprime, Ldoubleprime, Jprime)");
    Construction kind;
    try {
        kind = parse_construction(o.kind);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("--kind: ") + e.what());
    }
    if (spec.order < construction_min_order(kind))
        throw ParseError(std::string(construction_name(kind)) + " needs truncation order >= " +
                         std::to_string(construction_min_order(kind)));
    const Degree n = o.range.value_or(6);
    const ConstructionReport rep = verify_construction(spec, kind, n);
    Report r{"verify-construction", spec_name(spec), n, rep.pass, "", {}, 0.0};
    r.payload = {{"kind", construction_name(kind)}, {"relations_checked", rep.relations_checked}};
    json samples = json::object();
    for (Degree m : {Degree(-1), Degree(1), Degree(2)})
        samples[std::to_string(m)] = format_element(primed_basis(spec, kind, m), spec);
    r.payload["primed_basis"] = std::move(samples);
    if (!rep.pass)
        r.payload["failure"] = {{"relation", rep.failed_relation},
                                {"lhs", format_element(rep.lhs, spec)},
                                {"rhs", format_element(rep.rhs, spec)}};
    r.summary = std::string(construction_name(kind)) + ": " + std::to_string(rep.relations_checked) + " relations, " +
                (rep.pass ? "ok" : "FAILED at " + rep.failed_relation);
    return r;
}

inline Report cmd_check_derivation(const CliOptions& o)
{
    const LoadedCandidate c = load_candidate(o);
    const auto& spec = c.map.spec();
    const LeibnizReport rep = leibniz_check(c.map);
    Report r{"check-derivation", spec_name(spec), c.map.window(), rep.pass(), "", leibniz_to_json(rep, spec), 0.0};
    if (c.generated)
        r.payload["generated"] = descriptor_to_json(*c.generated, spec);
    std::ostringstream s;
    s << rep.pairs_checked << " pairs checked, " << rep.pairs_skipped << " skipped (bracket outside window), "
      << rep.violations.size() << " violations";
    for (std::size_t i = 0; i < rep.violations.size() && i < 5; ++i) {
        const auto& v = rep.violations[i];
        s << "\n  (" << format_basis(v.x, spec) << ", " << format_basis(v.y, spec) << "): D[x,y] = "
          << format_element(v.lhs, spec) << " but [Dx,y]+[x,Dy] = " << format_element(v.rhs, spec);
    }
    r.summary = s.str();
    return r;
}

inline Report cmd_find_witness(const CliOptions& o)
{
    const AlgebraSpec spec = require_spec(o);
    if (o.probe.empty() || o.target.empty())
        throw ParseError("--probe and --target are required");
    const Element probe = parse_element(o.probe, spec);
    const Element target = parse_element(o.target, spec);
    if (probe.is_zero())
        throw ParseError("--probe must be nonzero");
    WitnessOptions opt;
    opt.slack = o.support_slack;
    opt.include_outer = !o.inner_only;
    const WitnessResult w = witness_solve(probe, target, spec, opt);
    Report r{"find-witness", spec_name(spec), w.witness_system.support_window, w.feasible(), "", {}, 0.0};
    r.payload = witness_to_json(w, spec);
    r.payload["probe"] = format_element(probe, spec);
    r.payload["target"] = format_element(target, spec);
    if (w.feasible()) {
        const auto& d = w.descriptor();
        r.summary = "witness: u = " + format_element(d.inner, spec) + ", c = " + to_string(d.outer);
    } else {
        r.summary = "infeasible: certificate with " + std::to_string(certificate_to_json(w.certificate()).size()) +
                    " nonzero rows, " + (certificate_valid(w.witness_system.system, w.certificate()) ? "valid" : "INVALID");
    }
    return r;
}

inline Report cmd_der_space(const CliOptions& o)
{
    const AlgebraSpec spec = require_spec(o);
    const Degree n = o.range.value_or(8);
    const Degree d = o.degree;
    const DerivationSpace ds = derivation_space(spec, d, n);
    std::vector<WindowedLinearMap> known;
    for (int k = 0; k < spec.order; ++k)
        known.push_back(ad_map(graded(k, d), spec, n));
    if (d == 0)
        known.push_back(delta_t(spec, n));
    json contained = json::object();
    bool all = true;
    for (std::size_t i = 0; i < known.size(); ++i) {
        const bool in = in_span(ds.basis, known[i]);
        all = all && in;
        const std::string name = i < static_cast<std::size_t>(spec.order)
                                     ? "ad(" + format_basis(BasisSymbol::graded(static_cast<int>(i), d), spec) + ")"
                                     : std::string("delta_t");
        contained[name] = in;
    }
    Report r{"der-space", spec_name(spec), n, all, "", {}, 0.0};
    r.payload = {{"degree", d},
                 {"dimension", ds.dimension()},
                 {"unknowns", ds.unknowns},
                 {"pairs_checked", ds.pairs_checked},
                 {"known_contained", contained},
                 {"basis", map_list_to_json(ds.basis)},
                 {"scope", "homogeneous degree-" + std::to_string(d) + " derivations on window [-" + std::to_string(n) +
                               ", " + std::to_string(n) + "]"}};
    std::ostringstream s;
    s << "degree " << d << ": dimension " << ds.dimension() << " (" << ds.unknowns << " unknowns, "
      << ds.pairs_checked << " Leibniz pairs)\nknown derivations in span: " << (all ? "yes" : "NO");
    r.summary = s.str();
    return r;
}

inline Report cmd_decompose(const CliOptions& o)
{
    const LoadedCandidate c = load_candidate(o);
    const auto& spec = c.map.spec();
    DecomposeOptions opt;
    opt.audit_all = o.audit_all;
    opt.witness.slack = o.support_slack;
    const DecompositionReport rep = decompose(c.map, opt);
    Report r{"decompose", spec_name(spec), c.map.window(), rep.success(), "", decomposition_to_json(rep, spec), 0.0};
    if (c.generated)
        r.payload["generated"] = descriptor_to_json(*c.generated, spec);
    if (const auto* s = std::get_if<DecompositionSuccess>(&rep.outcome)) {
        r.summary = "success: Delta = ad(" + format_element(s->descriptor.inner, spec) + ") + " +
                    to_string(s->descriptor.outer) + "*delta_t on the window";
    } else if (const auto* x = std::get_if<Rejection>(&rep.outcome)) {
        r.summary = "rejected at " + x->stage + " (" + format_basis(x->symbol, spec) + "): probe " +
                    x->probe.probe.family + " = " + format_element(x->probe.probe.element, spec) +
                    " has no witness; certificate " +
                    (certificate_valid(x->probe.witness.witness_system.system, x->probe.witness.certificate())
                         ? "valid"
                         : "INVALID");
    } else {
        const auto& u = std::get<Unresolved>(rep.outcome);
        r.summary = "unresolved at " + u.stage + " (" + format_basis(u.symbol, spec) + "): residual " +
                    format_element(u.residual, spec) + " survives every probe";
    }
    return r;
}

inline Report cmd_check_center(const CliOptions& o)
{
    const LoadedCandidate c = load_candidate(o);
    const auto& spec = c.map.spec();
    if (!spec.centered)
        throw ParseError("check-center needs a centered algebra, got " + spec_name(spec));
    WitnessOptions opt;
    opt.slack = o.support_slack;
    const CenterReport rep = check_center(c.map, opt);
    Report r{"check-center", spec_name(spec), c.map.window(), rep.pass(), "", center_to_json(rep, spec), 0.0};
    if (c.generated)
        r.payload["generated"] = descriptor_to_json(*c.generated, spec);
    r.summary = std::to_string(rep.central_violations.size()) + " central values nonzero, " +
                std::to_string(rep.rejections.size()) + " graded symbols with central output rejected";
    return r;
}

inline Report cmd_probe(const CliOptions& o)
{
    const LoadedCandidate c = load_candidate(o);
    const auto& spec = c.map.spec();
    const Frame frame = parse_frame(o.frame);
    auto need_m = [&]() {
        if (!o.m)
            throw ParseError("--m is required for family " + o.family);
        return *o.m;
    };
    std::vector<ProbeSpec> probes;
    try {
        if (o.family == "scaled") {
            const auto samples = parse_samples(o.samples.empty() ? "1,2,3" : o.samples);
            probes = probe_scaled(need_m(), samples, spec, frame);
        } else if (o.family == "shift") {
            probes = {probe_shift(need_m(), spec, frame)};
        } else if (o.family == "I0") {
            probes = {probe_I0(c.map)};
        } else if (o.family == "I0-sum") {
            probes = {probe_I0_sum(spec)};
        } else if (o.family == "J") {
            probes = probe_J(spec, need_m());
        } else {
            throw ParseError("--family: expected scaled, shift, I0, I0-sum or J");
        }
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    WitnessOptions opt;
    opt.slack = o.support_slack;
    json results = json::array();
    bool all_feasible = true;
    std::ostringstream s;
    for (const auto& p : probes) {
        const ProbeResult pr = evaluate_probe(c.map, p, opt);
        all_feasible = all_feasible && pr.witness.feasible();
        results.push_back(probe_result_to_json(pr, spec));
        s << p.family << " " << format_element(p.element, spec) << " -> "
          << (pr.witness.feasible() ? "witness found" : "INFEASIBLE (certificate)") << "\n";
    }
    Report r{"probe", spec_name(spec), c.map.window(), all_feasible, "", {{"results", std::move(results)}}, 0.0};
    r.summary = s.str();
    if (!r.summary.empty())
        r.summary.pop_back();
    return r;
}

}  // namespace detail

/// Parses argv, runs one command, writes the report to out and diagnostics to err.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"truncvir: exact computations in truncated loop Virasoro algebras"};
    app.require_subcommand(1);
    CliOptions o;

    auto common = [&](CLI::App* sub, bool with_map) {
        sub->add_option("--spec", o.spec, "witt | virasoro | w22 | w22-centerless | bms3 | bms3-centerless | n=K[,centerless]");
        sub->add_option("--range,-N", o.range, "degree range / window N");
        sub->add_flag("--json", o.json, "JSON report on stdout");
        sub->add_option("--support-slack", o.support_slack, "extra degrees in the witness support window")
            ->check(CLI::NonNegativeNumber);
        if (with_map) {
            sub->add_option("--map", o.map_path, "candidate map file");
            sub->add_option("--seed", o.seed, "use a seeded random inner+outer derivation as the candidate");
        }
    };

    struct Entry {
        CLI::App* sub;
        std::function<Report(const CliOptions&)> run;
    };
    std::vector<Entry> entries;

    auto* va = app.add_subcommand("verify-algebra", "Jacobi identity and antisymmetry on [-N, N]");
    common(va, false);
    entries.push_back({va, detail::cmd_verify_algebra});

    auto* vc = app.add_subcommand("verify-construction", "bracket table of a primed basis on [-N, N]");
    common(vc, false);
    vc->add_option("--kind", o.kind, "Lprime | Ldoubleprime | Jprime");
    entries.push_back({vc, detail::cmd_verify_construction});

    auto* cd = app.add_subcommand("check-derivation", "Leibniz law of a map on its window");
    common(cd, true);
    entries.push_back({cd, detail::cmd_check_derivation});

    auto* fw = app.add_subcommand("find-witness", "solve D(probe) = target for D = ad(u) + c*delta_t");
    common(fw, false);
    fw->add_option("--probe", o.probe, "element literal");
    fw->add_option("--target", o.target, "element literal");
    fw->add_flag("--inner-only", o.inner_only, "drop the delta_t term from the ansatz");
    entries.push_back({fw, detail::cmd_find_witness});

    auto* ds = app.add_subcommand("der-space", "homogeneous derivations of a given degree on the window");
    common(ds, false);
    ds->add_option("--degree,-d", o.degree, "degree d");
    entries.push_back({ds, detail::cmd_der_space});

    auto* dc = app.add_subcommand("decompose", "reduce a candidate to ad(u) + c*delta_t or reject it");
    common(dc, true);
    dc->add_flag("--audit-all", o.audit_all, "collect every failing symbol instead of stopping at the first");
    entries.push_back({dc, detail::cmd_decompose});

    auto* cc = app.add_subcommand("check-center", "central values and central outputs of a candidate");
    common(cc, true);
    entries.push_back({cc, detail::cmd_check_center});

    auto* pr = app.add_subcommand("probe", "evaluate one probe family against a candidate");
    common(pr, true);
    pr->add_option("--family", o.family, "scaled | shift | I0 | I0-sum | J")->required();
    pr->add_option("--m", o.m, "probe index m");
    pr->add_option("--samples", o.samples, "comma-separated nonzero scalars for the scaled family");
    pr->add_option("--frame", o.frame, "identity | top-shift | double-prime");
    entries.push_back({pr, detail::cmd_probe});

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    for (const auto& entry : entries) {
        if (!entry.sub->parsed())
            continue;
        Report report;
        try {
            const auto t0 = std::chrono::steady_clock::now();
            report = entry.run(o);
            report.timing_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        } catch (const ParseError& e) {
            err << "error: " << e.what() << "\n";
            return kExitUsage;
        } catch (const WindowTooSmall& e) {
            err << "error: " << e.what() << "\n";
            return kExitUsage;
        } catch (const std::invalid_argument& e) {
            err << "error: " << e.what() << "\n";
            return kExitUsage;
        } catch (const std::out_of_range& e) {
            err << "error: " << e.what() << "\n";
            return kExitUsage;
        }
        if (o.json)
            out << report_to_json(report).dump(2) << "\n";
        else
            out << render_text(report);
        return report.pass ? kExitPass : kExitFail;
    }
    err << "error: no subcommand\n";
    return kExitUsage;
}

}  // namespace truncvir

// Acceptance suite: one PASS/FAIL line per criterion, exact comparisons only.
// Exit status is nonzero when any criterion fails.

#include "oracle.hpp"
#include "truncvir/io.hpp"
#include "truncvir/random.hpp"

#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace truncvir;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            notes.push_back(what);
        }
    }
};

WindowedLinearMap single(const AlgebraSpec& spec, Degree window, BasisSymbol x, Element v)
{
    WindowedLinearMap m(spec, window);
    m.set(x, std::move(v));
    return m;
}

bool certified(const ProbeResult& r)
{
    return !r.witness.feasible() && certificate_valid(r.witness.witness_system.system, r.witness.certificate());
}

oracle::Table as_table(const Element& x, const AlgebraSpec& spec)
{
    oracle::Table t;
    for (const auto& [s, c] : x)
        t[format_basis(s, spec)] = c.rat();
    return t;
}

Outcome presentation_validity()
{
    Outcome o;
    for (const char* name : {"witt", "virasoro", "w22", "w22-centerless", "bms3", "bms3-centerless", "n=4"}) {
        const auto spec = parse_spec(name);
        o.require(jacobi_check(spec, 4).pass, std::string("Jacobi fails on ") + name);
        o.require(antisymmetry_check(spec, 4).pass, std::string("antisymmetry fails on ") + name);
    }
    const auto w22 = parse_spec("w22");
    const auto bms3 = parse_spec("bms3");
    std::size_t compared = 0;
    for (long m = -3; m <= 3; ++m)
        for (long n = -3; n <= 3; ++n) {
            for (char f : {'L', 'I'})
                for (char g : {'L', 'I'}) {
                    const Element x = parse_element(oracle::name(f, m), w22), y = parse_element(oracle::name(g, n), w22);
                    ++compared;
                    o.require(as_table(bracket(x, y, w22), w22) == oracle::w22({f, m}, {g, n}, true),
                              "w22 table mismatch at " + oracle::name(f, m) + "," + oracle::name(g, n));
                }
            for (char f : {'L', 'J', 'I'})
                for (char g : {'L', 'J', 'I'}) {
                    const Element x = parse_element(oracle::name(f, m), bms3), y = parse_element(oracle::name(g, n), bms3);
                    ++compared;
                    o.require(as_table(bracket(x, y, bms3), bms3) == oracle::bms3({f, m}, {g, n}, true),
                              "bms3 table mismatch at " + oracle::name(f, m) + "," + oracle::name(g, n));
                }
        }
    o.notes.insert(o.notes.begin(), "7 presets on [-4,4]; " + std::to_string(compared) + " table brackets on [-3,3]");
    return o;
}

Outcome key_constructions()
{
    Outcome o;
    o.require(verify_construction(parse_spec("w22-centerless"), Construction::lprime, 6).pass, "L' table fails");
    const auto b = parse_spec("bms3-centerless");
    const auto rep = verify_construction(b, Construction::ldoubleprime, 6);
    o.require(rep.pass, "L''/J' table fails at " + rep.failed_relation);
    o.require(verify_construction(b, Construction::jprime, 6).pass, "J' table fails");
    o.require(!primed_basis(b, Construction::ldoubleprime, 2).coeff(BasisSymbol::graded(1, 2)).is_rational(),
              "L''_2 has no sqrt2 component");
    o.notes.insert(o.notes.begin(), std::to_string(rep.relations_checked) + " L''/J' relations on [-6,6]");
    return o;
}

Outcome outer_derivation()
{
    Outcome o;
    for (const char* name : {"witt", "virasoro", "w22", "w22-centerless", "bms3", "bms3-centerless", "n=4"})
        o.require(leibniz_check(delta_t(parse_spec(name), 6)).pass(), std::string("delta_t not Leibniz on ") + name);

    // Reference derivations written out entrywise: on w22 L,C -> 0 and I,C1 -> itself;
    // on bms3 L,C -> 0, J -> J/2, I -> I, C1 -> C1, C2 -> C2.
    const auto w22 = parse_spec("w22");
    const auto dw = delta_t(w22, 6);
    for (const auto& [s, v] : dw.entries()) {
        const Element expected = s.layer == 1 ? Element(s) : Element();
        o.require(v == expected, "w22 mismatch at " + format_basis(s, w22));
    }
    const auto bms3 = parse_spec("bms3");
    const auto db = delta_t(bms3, 6);
    WindowedLinearMap reference(bms3, 6);
    for (const auto& [s, v] : db.entries()) {
        QSqrt2 e;
        if (s.is_graded())
            e = s.layer == 1 ? QSqrt2(make_rational(1, 2)) : s.layer == 2 ? QSqrt2(1) : QSqrt2(0);
        else
            e = s.layer == 0 ? QSqrt2(0) : QSqrt2(1);
        reference.set(s, Element(s, e));
        o.require(v == QSqrt2(2) * Element(s, e),
                  "bms3: delta_t(" + format_basis(s, bms3) + ") = " + format_element(v, bms3) + " but 2x reference = " +
                      format_element(QSqrt2(2) * Element(s, e), bms3));
    }
    const auto ref_check = leibniz_check(reference);
    if (!ref_check.pass()) {
        const auto& v = ref_check.violations.front();
        o.notes.push_back("the reference map itself is not a derivation: (" + format_basis(v.x, bms3) + ", " +
                          format_basis(v.y, bms3) + ") gives " + format_element(v.lhs, bms3) + " vs " +
                          format_element(v.rhs, bms3));
    }
    return o;
}

Outcome derivation_spaces()
{
    Outcome o;
    auto check = [&](const char* name, Degree d, std::size_t expected) {
        const auto spec = parse_spec(name);
        const auto ds = derivation_space(spec, d, 8);
        std::ostringstream s;
        s << name << " d=" << d << ": dim " << ds.dimension() << " (expected " << expected << ")";
        o.require(ds.dimension() == expected, s.str());
        for (int k = 0; k < spec.order; ++k)
            o.require(in_span(ds.basis, ad_map(graded(k, d), spec, 8)),
                      std::string(name) + ": ad of layer " + std::to_string(k) + " missing at d=" + std::to_string(d));
        if (d == 0)
            o.require(in_span(ds.basis, delta_t(spec, 8)), std::string(name) + ": delta_t missing");
        if (d == 0 && spec.order >= 3 && in_span(ds.basis, loop_derivation(spec, 1, 8)))
            o.notes.push_back(std::string(name) + " d=0 also contains t^2 d/dt (J -> I), which is Leibniz and not inner");
    };
    check("w22-centerless", 0, 3);
    for (Degree d : {-2, -1, 1, 2})
        check("w22-centerless", d, 2);
    check("bms3-centerless", 0, 4);
    for (Degree d : {-2, -1, 1, 2})
        check("bms3-centerless", d, 3);
    return o;
}

Outcome round_trips()
{
    Outcome o;
    for (const char* name : {"w22-centerless", "bms3-centerless"}) {
        const auto spec = parse_spec(name);
        Rng rng(name[0] == 'w' ? 5005 : 5006);
        int ok = 0;
        for (int i = 0; i < 100; ++i) {
            const auto d = random_derivation(spec, rng, 3, 100);
            const auto target = to_map(d, spec, 8);
            const auto rep = decompose(target);
            if (rep.success() && to_map(std::get<DecompositionSuccess>(rep.outcome).descriptor, spec, 8) == target)
                ++ok;
        }
        o.require(ok == 100, std::string(name) + ": only " + std::to_string(ok) + "/100");
        o.notes.push_back(std::string(name) + " " + std::to_string(ok) + "/100");
    }
    return o;
}

Outcome proof_replay_rejections()
{
    Outcome o;
    const auto w22c = parse_spec("w22-centerless");
    const auto bmsc = parse_spec("bms3-centerless");

    auto via = [&](const std::string& label, const WindowedLinearMap& cand, const std::string& family) {
        const auto rep = decompose(cand);
        if (!rep.rejected()) {
            o.require(false, label + ": not rejected");
            return;
        }
        const auto& r = std::get<Rejection>(rep.outcome);
        o.require(r.probe.probe.family == family, label + ": rejected via " + r.probe.probe.family + ", not " + family);
        o.require(certified(r.probe), label + ": certificate does not validate");
    };

    // (a) Delta(L2) = L5
    const auto a = single(w22c, 6, BasisSymbol::graded(0, 2), graded(0, 5));
    via("(a)", a, "scaled");
    bool some = false;
    for (const auto& p : probe_scaled(2, default_samples(3)))
        some = some || certified(evaluate_probe(a, p));
    o.require(some, "(a): no infeasible scaled sample among x = 1,2,3");

    // (b) Delta(I0) = I0
    const auto b = single(w22c, 6, BasisSymbol::graded(1, 0), graded(1, 0));
    via("(b)", b, "I0-sum");
    o.require(certified(evaluate_probe(b, probe_I0_sum(w22c))), "(b): direct I0+I1+I2 probe not certified");

    // (c) Delta(J2) = J2 and Delta(J2) = I2
    const auto cj = single(bmsc, 8, BasisSymbol::graded(1, 2), graded(1, 2));
    const auto ci = single(bmsc, 8, BasisSymbol::graded(1, 2), graded(2, 2));
    via("(c) J->J", cj, "J+I2m");
    via("(c) J->I", ci, "J+L1+L2");
    o.require(certified(evaluate_probe(cj, probe_J(bmsc, 2)[1])), "(c): J2 + I4 not certified");
    o.require(certified(evaluate_probe(ci, probe_J(bmsc, 2)[0])), "(c): J2 + L1 + L2 not certified");

    // (d) Delta(L3) = C
    const auto w22 = parse_spec("w22");
    const auto d = single(w22, 6, BasisSymbol::graded(0, 3), central(0));
    const auto cr = check_center(d);
    o.require(!cr.pass() && cr.rejections.size() == 1 && certified(cr.rejections.front().probe),
              "(d): check_center did not produce a certified rejection");
    o.notes.push_back("(a) scaled, (b) I0-sum, (c) J+I2m / J+L1+L2 at m=2, (d) check_center");
    return o;
}

Outcome solver_audit()
{
    Outcome o;
    Rng rng(777);
    std::uniform_int_distribution<std::size_t> dim(1, 12);
    std::uniform_real_distribution<double> dens(0.15, 0.9);
    int solutions = 0, certificates = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto sys = random_system(rng, dim(rng), dim(rng), 50, dens(rng));
        std::vector<std::vector<QSqrt2>> a(sys.rows.size(), std::vector<QSqrt2>(sys.cols));
        for (std::size_t i = 0; i < sys.rows.size(); ++i)
            for (const auto& [c, v] : sys.rows[i])
                a[i][c] = v;
        const auto out = solve(sys);
        if (const auto* s = std::get_if<Solution<QSqrt2>>(&out)) {
            ++solutions;
            o.require(solution_valid(sys, *s), "system " + std::to_string(t) + ": solution does not substitute");
            o.require(s->nullspace.size() == sys.cols - oracle::rank_reversed(a),
                      "system " + std::to_string(t) + ": nullspace dimension disagrees with reversed elimination");
            o.require(oracle::consistent(a, sys.rhs), "system " + std::to_string(t) + ": oracle says inconsistent");
        } else {
            ++certificates;
            o.require(certificate_valid(sys, std::get<Infeasible<QSqrt2>>(out).certificate),
                      "system " + std::to_string(t) + ": certificate invalid");
            o.require(!oracle::consistent(a, sys.rhs), "system " + std::to_string(t) + ": oracle says consistent");
        }
    }
    o.notes.insert(o.notes.begin(),
                   std::to_string(solutions) + " solutions, " + std::to_string(certificates) + " certificates");
    return o;
}

Outcome generic_order()
{
    Outcome o;
    const auto spec = parse_spec("n=4");
    o.require(jacobi_check(spec, 4).pass, "Jacobi fails");
    o.require(leibniz_check(delta_t(spec, 4)).pass(), "delta_t not Leibniz");
    Rng rng(4444);
    int ok = 0;
    for (int i = 0; i < 10; ++i) {
        const auto d = random_derivation(spec, rng, 3, 100);
        const auto target = to_map(d, spec, 4);
        const auto rep = decompose(target);
        if (rep.success() && to_map(std::get<DecompositionSuccess>(rep.outcome).descriptor, spec, 4) == target)
            ++ok;
    }
    o.require(ok == 10, "round trips " + std::to_string(ok) + "/10");
    o.notes.insert(o.notes.begin(), "round trips " + std::to_string(ok) + "/10");
    return o;
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1 presentation validity", presentation_validity},
        {"AC2 key constructions", key_constructions},
        {"AC3 outer derivation", outer_derivation},
        {"AC4 derivation spaces at window 8", derivation_spaces},
        {"AC5 decomposition round trips", round_trips},
        {"AC6 proof-replay rejections", proof_replay_rejections},
        {"AC7 solver soundness audit", solver_audit},
        {"AC8 generic n=4 smoke", generic_order},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.notes.push_back(std::string("exception: ") + e.what());
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name;
        for (const auto& n : o.notes)
            std::cout << " | " << n;
        std::cout << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << std::endl;
    return failed == 0 ? 0 : 1;
}

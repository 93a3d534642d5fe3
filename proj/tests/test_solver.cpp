#include "oracle.hpp"
#include "truncvir/random.hpp"
#include "truncvir/solver.hpp"

#include <gtest/gtest.h>

using namespace truncvir;

namespace {

std::vector<std::vector<QSqrt2>> dense(const LinearSystem<QSqrt2>& sys)
{
    std::vector<std::vector<QSqrt2>> a(sys.rows.size(), std::vector<QSqrt2>(sys.cols));
    for (std::size_t i = 0; i < sys.rows.size(); ++i)
        for (const auto& [c, v] : sys.rows[i])
            a[i][c] = v;
    return a;
}

}  // namespace

TEST(Solve, RankDeficientTwoByTwo)
{
    const auto sys = LinearSystem<QSqrt2>::from_dense({{1, 1}, {2, 2}}, {1, 2});
    const auto out = solve(sys);
    ASSERT_TRUE(std::holds_alternative<Solution<QSqrt2>>(out));
    const auto& s = std::get<Solution<QSqrt2>>(out);
    EXPECT_EQ(s.particular, (std::vector<QSqrt2>{1, 0}));
    ASSERT_EQ(s.nullspace.size(), 1u);
    EXPECT_EQ(s.nullspace[0], (std::vector<QSqrt2>{-1, 1}));
    EXPECT_EQ(s.pivot_cols, (std::vector<std::size_t>{0}));
}

TEST(Solve, InconsistentGivesCertificate)
{
    const auto sys = LinearSystem<QSqrt2>::from_dense({{1, 1}, {2, 2}}, {1, 3});
    const auto out = solve(sys);
    ASSERT_TRUE(std::holds_alternative<Infeasible<QSqrt2>>(out));
    const auto& z = std::get<Infeasible<QSqrt2>>(out).certificate;
    EXPECT_TRUE(certificate_valid(sys, z));
    EXPECT_FALSE(certificate_valid(sys, std::vector<QSqrt2>{1, 0}));
}

TEST(Solve, SqrtTwoEntries)
{
    const QSqrt2 r2 = QSqrt2::sqrt2();
    const auto sys = LinearSystem<QSqrt2>::from_dense({{r2, 1}, {1, r2}}, {1, 0});
    const auto out = solve(sys);
    ASSERT_TRUE(std::holds_alternative<Solution<QSqrt2>>(out));
    const auto& s = std::get<Solution<QSqrt2>>(out);
    EXPECT_TRUE(s.nullspace.empty());
    EXPECT_EQ(s.particular[0], r2);
    EXPECT_EQ(s.particular[1], QSqrt2(-1));
}

TEST(Solve, EmptySystems)
{
    LinearSystem<QSqrt2> none;
    none.cols = 3;
    const auto out = solve(none);
    ASSERT_TRUE(std::holds_alternative<Solution<QSqrt2>>(out));
    EXPECT_EQ(std::get<Solution<QSqrt2>>(out).nullspace.size(), 3u);
}

TEST(Solve, RationalFieldInstantiation)
{
    const auto sys = LinearSystem<Rational>::from_dense({{2, 4}, {1, 3}}, {2, 2});
    const auto out = solve(sys);
    ASSERT_TRUE(std::holds_alternative<Solution<Rational>>(out));
    EXPECT_EQ(std::get<Solution<Rational>>(out).particular, (std::vector<Rational>{-1, 1}));
}

TEST(SolveProperty, AgreesWithReversedDenseElimination)
{
    Rng rng(424242);
    std::uniform_int_distribution<std::size_t> dim(1, 10);
    for (int t = 0; t < 300; ++t) {
        const auto sys = random_system(rng, dim(rng), dim(rng), 20, 0.4);
        const auto a = dense(sys);
        const auto out = solve(sys);
        const bool consistent = oracle::consistent(a, sys.rhs);
        ASSERT_EQ(std::holds_alternative<Solution<QSqrt2>>(out), consistent);
        if (consistent) {
            const auto& s = std::get<Solution<QSqrt2>>(out);
            EXPECT_TRUE(solution_valid(sys, s));
            EXPECT_EQ(s.nullspace.size(), sys.cols - oracle::rank_reversed(a));
        } else {
            EXPECT_TRUE(certificate_valid(sys, std::get<Infeasible<QSqrt2>>(out).certificate));
        }
    }
}

TEST(Witness, WittInnerSolve)
{
    const auto witt = parse_spec("witt");
    const auto w = witness_solve(graded(0, 0), graded(0, 3), witt, WitnessOptions{});
    ASSERT_TRUE(w.feasible());
    EXPECT_EQ(w.descriptor().inner, graded(0, 3, QSqrt2(make_rational(1, 3))));
    EXPECT_TRUE(w.descriptor().outer.is_zero());
}

TEST(Witness, OuterTermAbsorbsI0)
{
    const auto w22 = parse_spec("w22-centerless");
    const auto with = witness_solve(graded(1, 0), graded(1, 0), w22, WitnessOptions{});
    ASSERT_TRUE(with.feasible());
    EXPECT_EQ(apply(with.descriptor(), graded(1, 0), w22), graded(1, 0));
    WitnessOptions inner_only;
    inner_only.include_outer = false;
    const auto without = witness_solve(graded(1, 0), graded(1, 0), w22, inner_only);
    ASSERT_FALSE(without.feasible());
    EXPECT_TRUE(certificate_valid(without.witness_system.system, without.certificate()));
}

TEST(Witness, ZeroProbeIsAnError)
{
    EXPECT_THROW(witness_solve(Element(), graded(0, 1), parse_spec("witt"), WitnessOptions{}), std::invalid_argument);
}

TEST(Witness, SupportWindowRule)
{
    EXPECT_EQ(default_support_window(graded(0, -2) + graded(0, 1), graded(0, 5)), 5 + 2 + 2);
    EXPECT_EQ(default_support_window(graded(0, 40), graded(0, 40), 2, 64), 64);
}

TEST(WitnessProperty, EveryDescriptorReproducesItsTarget)
{
    Rng rng(17);
    const auto spec = parse_spec("bms3");
    for (int i = 0; i < 30; ++i) {
        const auto d = random_derivation(spec, rng, 2, 20);
        const Element probe = random_element(spec, rng, 2, 20, 0.3) + graded(0, 1);
        const Element target = apply(d, probe, spec);
        const auto w = witness_solve(probe, target, spec, WitnessOptions{});
        ASSERT_TRUE(w.feasible());
        EXPECT_EQ(apply(w.descriptor(), probe, spec), target);
    }
}

TEST(DerivationSpace, W22CenterlessDimensions)
{
    const auto spec = parse_spec("w22-centerless");
    const auto d0 = derivation_space(spec, 0, 8);
    EXPECT_EQ(d0.dimension(), 3u);
    EXPECT_TRUE(in_span(d0.basis, ad_map(graded(0, 0), spec, 8)));
    EXPECT_TRUE(in_span(d0.basis, ad_map(graded(1, 0), spec, 8)));
    EXPECT_TRUE(in_span(d0.basis, delta_t(spec, 8)));
    for (Degree d : {-2, -1, 1, 2}) {
        const auto sp = derivation_space(spec, d, 8);
        EXPECT_EQ(sp.dimension(), 2u) << d;
        EXPECT_TRUE(in_span(sp.basis, ad_map(graded(0, d), spec, 8)));
        EXPECT_TRUE(in_span(sp.basis, ad_map(graded(1, d), spec, 8)));
    }
    for (const auto& m : d0.basis)
        EXPECT_TRUE(leibniz_check(m).pass());
}

TEST(DerivationSpace, WittIsInner)
{
    const auto spec = parse_spec("witt");
    const auto d0 = derivation_space(spec, 0, 8);
    EXPECT_EQ(d0.dimension(), 1u);
    EXPECT_TRUE(in_span(d0.basis, ad_map(graded(0, 0), spec, 8)));
}

TEST(DerivationSpace, Bms3CenterlessIncludesTheLoopShift)
{
    // Degree 0 holds ad(L0), ad(J0), ad(I0), delta_t and t^2 d/dt.
    const auto spec = parse_spec("bms3-centerless");
    const auto d0 = derivation_space(spec, 0, 8);
    EXPECT_EQ(d0.dimension(), 5u);
    EXPECT_TRUE(in_span(d0.basis, loop_derivation(spec, 1, 8)));
    EXPECT_EQ(derivation_space(spec, 1, 8).dimension(), 3u);
}

TEST(DerivationSpace, RejectsDegreeBeyondHalfWindow)
{
    EXPECT_THROW(derivation_space(parse_spec("witt"), 5, 8), std::invalid_argument);
}

TEST(InSpan, DetectsNonMembers)
{
    const auto spec = parse_spec("w22-centerless");
    const std::vector<WindowedLinearMap> maps{ad_map(graded(0, 0), spec, 4)};
    EXPECT_TRUE(in_span(maps, ad_map(graded(0, 0, QSqrt2(5)), spec, 4)));
    EXPECT_FALSE(in_span(maps, delta_t(spec, 4)));
}

#include "truncvir/linear_map.hpp"
#include "truncvir/random.hpp"

#include <gtest/gtest.h>

#include <array>

using namespace truncvir;

namespace {

const AlgebraSpec kW22c = parse_spec("w22-centerless");

Element L(Degree m) { return graded(0, m); }
Element I(Degree m) { return graded(1, m); }

}  // namespace

TEST(WindowedMap, DomainAndZeroFill)
{
    WindowedLinearMap m(parse_spec("w22"), 2);
    EXPECT_EQ(m.entries().size(), 2u * 5u + 2u);
    EXPECT_TRUE(m.is_zero());
    EXPECT_TRUE(m.in_domain(BasisSymbol::central(1)));
    EXPECT_FALSE(m.in_domain(BasisSymbol::graded(0, 3)));
    EXPECT_THROW(static_cast<void>(m.value(BasisSymbol::graded(0, 3))), std::out_of_range);
    EXPECT_THROW(m.set(BasisSymbol::graded(0, 1), graded(2, 1)), std::invalid_argument);
    EXPECT_THROW(apply(m, L(5)), std::out_of_range);
}

TEST(AdMap, Formulas)
{
    const auto adL0 = ad_map(L(0), kW22c, 5);
    const auto adI0 = ad_map(I(0), kW22c, 5);
    for (Degree m = -5; m <= 5; ++m) {
        EXPECT_EQ(adL0.value(BasisSymbol::graded(0, m)), QSqrt2(static_cast<long>(-m)) * L(m));
        EXPECT_EQ(adL0.value(BasisSymbol::graded(1, m)), QSqrt2(static_cast<long>(-m)) * I(m));
        EXPECT_EQ(adI0.value(BasisSymbol::graded(0, m)), QSqrt2(static_cast<long>(-m)) * I(m));
    }
    const auto w22 = parse_spec("w22");
    const auto adu = ad_map(L(2) + I(-1), w22, 4);
    EXPECT_TRUE(adu.value(BasisSymbol::central(0)).is_zero());
    EXPECT_TRUE(adu.value(BasisSymbol::central(1)).is_zero());
}

TEST(DeltaT, EigenvaluesPerLayer)
{
    const auto w22 = parse_spec("w22");
    const auto d = delta_t(w22, 6);
    EXPECT_EQ(d.value(BasisSymbol::graded(1, 5)), I(5));
    EXPECT_TRUE(d.value(BasisSymbol::graded(0, 3)).is_zero());
    EXPECT_TRUE(d.value(BasisSymbol::central(0)).is_zero());
    EXPECT_EQ(d.value(BasisSymbol::central(1)), central(1));

    const auto bms3 = parse_spec("bms3");
    const auto db = delta_t(bms3, 6);
    EXPECT_EQ(db.value(BasisSymbol::graded(1, 4)), graded(1, 4));
    EXPECT_EQ(db.value(BasisSymbol::graded(2, 4)), graded(2, 4, QSqrt2(2)));
    EXPECT_EQ(db.value(BasisSymbol::central(2)), central(2, QSqrt2(2)));
    EXPECT_EQ(delta_t(graded(2, 1) + graded(1, 0)), graded(2, 1, QSqrt2(2)) + graded(1, 0));
}

TEST(Combine, EntryFormula)
{
    const QSqrt2 c1(make_rational(3, 7)), d1(Rational(1), Rational(-2));
    const std::array<QSqrt2, 2> coeffs{c1, d1};
    const std::array<WindowedLinearMap, 2> maps{ad_map(L(0), kW22c, 4), ad_map(I(0), kW22c, 4)};
    const auto m = combine(coeffs, maps);
    EXPECT_EQ(m.value(BasisSymbol::graded(0, 1)), -c1 * L(1) - d1 * I(1));
    EXPECT_THROW(combine(std::span<const QSqrt2>(), std::span<const WindowedLinearMap>()), std::invalid_argument);
    const std::array<WindowedLinearMap, 2> mixed{ad_map(L(0), kW22c, 4), delta_t(parse_spec("w22"), 4)};
    EXPECT_THROW(combine(coeffs, mixed), std::invalid_argument);
}

TEST(Combine, UsesTheSmallerWindow)
{
    const std::array<QSqrt2, 2> coeffs{QSqrt2(1), QSqrt2(1)};
    const std::array<WindowedLinearMap, 2> maps{ad_map(L(1), kW22c, 6), delta_t(kW22c, 3)};
    EXPECT_EQ(combine(coeffs, maps).window(), 3);
}

TEST(CombineProperty, Linearity)
{
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        const Element u = random_element(kW22c, rng, 3, 30), v = random_element(kW22c, rng, 3, 30);
        const QSqrt2 a = random_scalar(rng, 30), b = random_scalar(rng, 30);
        const std::array<QSqrt2, 2> coeffs{a, b};
        const std::array<WindowedLinearMap, 2> maps{ad_map(u, kW22c, 5), ad_map(v, kW22c, 5)};
        EXPECT_EQ(combine(coeffs, maps), ad_map(a * u + b * v, kW22c, 5));
        const Element x = random_element(kW22c, rng, 5, 30);
        EXPECT_EQ(apply(combine(coeffs, maps), x), a * apply(maps[0], x) + b * apply(maps[1], x));
    }
}

TEST(Leibniz, DeltaTOnW22Window5)
{
    const auto d = delta_t(kW22c, 5);
    EXPECT_EQ(apply(d, bracket(L(1), I(2), kW22c)), QSqrt2(-1) * I(3));
    EXPECT_TRUE(leibniz_check(d).pass());
}

TEST(Leibniz, DeltaTIsADerivationOnEveryPreset)
{
    for (const char* name : {"witt", "virasoro", "w22", "w22-centerless", "bms3", "bms3-centerless", "n=4"}) {
        const auto rep = leibniz_check(delta_t(parse_spec(name), 6));
        EXPECT_TRUE(rep.pass()) << name;
        EXPECT_GT(rep.pairs_checked, 0u);
    }
}

TEST(Leibniz, FlagsANonDerivation)
{
    WindowedLinearMap m(kW22c, 4);
    m.set(BasisSymbol::graded(0, 0), L(1));
    const auto rep = leibniz_check(m);
    ASSERT_FALSE(rep.pass());
    bool found = false;
    for (const auto& v : rep.violations)
        if (v.x == BasisSymbol::graded(0, 0) && v.y == BasisSymbol::graded(0, 2)) {
            found = true;
            EXPECT_TRUE(v.lhs.is_zero());               // Delta(-2 L2) = 0
            EXPECT_EQ(v.rhs, QSqrt2(-1) * L(3));       // [L1, L2] + [L0, 0]
        }
    EXPECT_TRUE(found);
}

TEST(LeibnizProperty, AdIsAlwaysADerivation)
{
    Rng rng(99);
    for (const auto& spec : {kW22c, parse_spec("w22"), parse_spec("bms3"), parse_spec("n=4,centerless")})
        for (int i = 0; i < 5; ++i)
            EXPECT_TRUE(leibniz_check(ad_map(random_element(spec, rng, 3, 100), spec, 5)).pass());
}

TEST(LoopDerivation, TopShiftIsOuterOnBms3)
{
    const auto bms3 = parse_spec("bms3-centerless");
    const auto t2 = loop_derivation(bms3, 1, 6);
    EXPECT_TRUE(leibniz_check(t2).pass());
    EXPECT_EQ(t2.value(BasisSymbol::graded(1, 0)), graded(2, 0));
    EXPECT_TRUE(t2.value(BasisSymbol::graded(2, 0)).is_zero());
    // every degree-0 inner derivation kills J_0, so J_0 -> I_0 is not inner
    for (int k = 0; k < 3; ++k)
        EXPECT_TRUE(bracket(graded(k, 0), graded(1, 0), bms3).is_zero());
}

TEST(Descriptor, ApplyMatchesToMap)
{
    Rng rng(3);
    const auto spec = parse_spec("bms3");
    for (int i = 0; i < 10; ++i) {
        const auto d = random_derivation(spec, rng);
        const auto m = to_map(d, spec, 5);
        for (const auto& [s, v] : m.entries())
            EXPECT_EQ(v, apply(d, Element(s), spec));
    }
}

#pragma once

// Exact scalars: GMP rationals and the quadratic field Q(sqrt 2).

#include <gmpxx.h>

#include <compare>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace truncvir {

/// Arbitrary-precision rational in canonical form (reduced, positive denominator).
using Rational = mpq_class;

/// Builds a canonical rational from integer parts; throws on a zero denominator.
inline Rational make_rational(const mpz_class& num, const mpz_class& den)
{
    if (den == 0)
        throw std::domain_error("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational make_rational(long num, long den = 1)
{
    return make_rational(mpz_class(num), mpz_class(den));
}

inline std::string to_string(const Rational& r)
{
    return r.get_str();
}

/// Element rat + irr*sqrt(2) of Q(sqrt 2).
///
/// Both components are kept canonical, so equality is componentwise and
/// zero is exactly (0, 0).
class QSqrt2 {
public:
    QSqrt2() = default;
    QSqrt2(long v) : rat_(v) {}  // NOLINT(google-explicit-constructor)
    QSqrt2(Rational rat) : rat_(std::move(rat)) {}  // NOLINT(google-explicit-constructor)
    QSqrt2(Rational rat, Rational irr) : rat_(std::move(rat)), irr_(std::move(irr)) {}

    static QSqrt2 sqrt2() { return {Rational(0), Rational(1)}; }

    const Rational& rat() const { return rat_; }
    const Rational& irr() const { return irr_; }

    bool is_zero() const { return sgn(rat_) == 0 && sgn(irr_) == 0; }
    bool is_rational() const { return sgn(irr_) == 0; }

    /// Field norm a^2 - 2 b^2; nonzero for every nonzero element.
    Rational norm() const { return rat_ * rat_ - 2 * irr_ * irr_; }
    QSqrt2 conjugate() const { return {rat_, -irr_}; }

    QSqrt2& operator+=(const QSqrt2& o)
    {
        rat_ += o.rat_;
        if (sgn(o.irr_) != 0)
            irr_ += o.irr_;
        return *this;
    }
    QSqrt2& operator-=(const QSqrt2& o)
    {
        rat_ -= o.rat_;
        if (sgn(o.irr_) != 0)
            irr_ -= o.irr_;
        return *this;
    }
    QSqrt2& operator*=(const QSqrt2& o)
    {
        if (is_rational() && o.is_rational()) {
            rat_ *= o.rat_;
            return *this;
        }
        Rational a = rat_ * o.rat_ + 2 * irr_ * o.irr_;
        Rational b = rat_ * o.irr_ + irr_ * o.rat_;
        rat_ = std::move(a);
        irr_ = std::move(b);
        return *this;
    }
    QSqrt2& operator/=(const QSqrt2& o) { return *this *= o.inverse(); }

    /// Multiplicative inverse (a - b sqrt2) / (a^2 - 2 b^2).
    QSqrt2 inverse() const
    {
        if (is_zero())
            throw std::domain_error("division by zero in Q(sqrt 2)");
        if (is_rational())
            return QSqrt2(Rational(1) / rat_);
        Rational n = norm();
        return {rat_ / n, -irr_ / n};
    }

    friend QSqrt2 operator-(const QSqrt2& x) { return {-x.rat_, -x.irr_}; }
    friend QSqrt2 operator+(QSqrt2 x, const QSqrt2& y) { return x += y; }
    friend QSqrt2 operator-(QSqrt2 x, const QSqrt2& y) { return x -= y; }
    friend QSqrt2 operator*(QSqrt2 x, const QSqrt2& y) { return x *= y; }
    friend QSqrt2 operator/(QSqrt2 x, const QSqrt2& y) { return x /= y; }

    friend bool operator==(const QSqrt2& x, const QSqrt2& y)
    {
        return x.rat_ == y.rat_ && x.irr_ == y.irr_;
    }

    /// Structural (lexicographic) order, used only for deterministic containers.
    friend bool structural_less(const QSqrt2& x, const QSqrt2& y)
    {
        if (x.rat_ != y.rat_)
            return x.rat_ < y.rat_;
        return x.irr_ < y.irr_;
    }

private:
    Rational rat_{0};
    Rational irr_{0};
};

inline QSqrt2 field_add(const QSqrt2& x, const QSqrt2& y) { return x + y; }
inline QSqrt2 field_mul(const QSqrt2& x, const QSqrt2& y) { return x * y; }
inline QSqrt2 field_inv(const QSqrt2& x) { return x.inverse(); }

/// Renders as "a/b", "c/d√2" or "(a/b+c/d√2)" depending on which parts are nonzero.
inline std::string to_string(const QSqrt2& x)
{
    if (x.is_rational())
        return to_string(x.rat());
    std::string irr = x.irr() == 1 ? std::string() : x.irr() == -1 ? std::string("-") : to_string(x.irr());
    irr += "√2";
    if (sgn(x.rat()) == 0)
        return irr;
    std::string out = "(" + to_string(x.rat());
    if (sgn(x.irr()) > 0)
        out += "+";
    return out + irr + ")";
}

inline std::ostream& operator<<(std::ostream& os, const QSqrt2& x)
{
    return os << to_string(x);
}

}  // namespace truncvir

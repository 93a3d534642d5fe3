#pragma once

// Seeded generators for property tests and the CLI --seed mode.

#include "truncvir/linear_map.hpp"
#include "truncvir/solver.hpp"

#include <random>

namespace truncvir {

using Rng = std::mt19937_64;

/// p/q with |p| <= bound and 1 <= q <= bound.
inline Rational random_rational(Rng& rng, long bound)
{
    std::uniform_int_distribution<long> num(-bound, bound);
    std::uniform_int_distribution<long> den(1, bound);
    return make_rational(num(rng), den(rng));
}

inline QSqrt2 random_scalar(Rng& rng, long bound)
{
    Rational a = random_rational(rng, bound);
    Rational b = random_rational(rng, bound);
    return {a, b};
}

inline QSqrt2 random_nonzero_scalar(Rng& rng, long bound)
{
    for (;;) {
        QSqrt2 x = random_scalar(rng, bound);
        if (!x.is_zero())
            return x;
    }
}

/// Graded element with each symbol of degree in [-max_deg, max_deg] present with probability density.
inline Element random_element(const AlgebraSpec& spec, Rng& rng, Degree max_deg, long bound, double density = 0.5)
{
    std::bernoulli_distribution keep(density);
    Element out;
    for (const auto& s : graded_window(spec, max_deg))
        if (keep(rng))
            out.add(s, random_nonzero_scalar(rng, bound));
    return out;
}

/// D = ad(u) + c delta_t with u supported in [-max_deg, max_deg] and nonzero c.
inline DerivationDescriptor random_derivation(const AlgebraSpec& spec, Rng& rng, Degree max_deg = 3, long bound = 100)
{
    return {random_element(spec, rng, max_deg, bound), random_nonzero_scalar(rng, bound)};
}

/// rows x cols system over Q(sqrt2); density controls sparsity, rank is left to chance.
inline LinearSystem<QSqrt2> random_system(Rng& rng, std::size_t rows, std::size_t cols, long bound, double density = 0.5)
{
    std::bernoulli_distribution keep(density);
    LinearSystem<QSqrt2> sys;
    sys.cols = cols;
    for (std::size_t i = 0; i < rows; ++i) {
        SparseVector<QSqrt2> row;
        for (std::size_t j = 0; j < cols; ++j)
            if (keep(rng))
                row.emplace_back(j, random_nonzero_scalar(rng, bound));
        sys.add_row(std::move(row), keep(rng) ? random_scalar(rng, bound) : QSqrt2());
    }
    for (std::size_t j = 0; j < cols; ++j)
        sys.col_labels.push_back("x" + std::to_string(j));
    return sys;
}

}  // namespace truncvir

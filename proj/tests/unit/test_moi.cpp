#include <gtest/gtest.h>

#include <cmath>

#include "moi_oracle.hpp"
#include "random_matrices.hpp"
#include "schatten/errors.hpp"
#include "schatten/moi.hpp"
#include "schatten/spectral.hpp"

using namespace schatten;
using schatten::testing::KnownSpectrum;
using schatten::testing::Rng;

TEST(Moi, ZeroPerturbationsIsMatrixFunction) {
    Rng rng(1);
    const auto a = schatten::testing::random_hermitian(3, rng);
    const auto phi = MultiSymbol::divided_difference(ScalarSymbol::exponential(), 0);
    const std::vector<ComplexMatrix> ops{a};
    const auto got = moi_apply(phi, ops, std::vector<ComplexMatrix>{});
    EXPECT_LE(max_abs_diff(got, matrix_function(a, ScalarSymbol::exponential())), 1e-12);
}

TEST(Moi, FirstOrderSquareIsAnticommutator) {
    // For f(x) = x^2, f^[1](a, b) = a + b, so T(B) = AB + BA.
    Rng rng(2);
    const auto a = schatten::testing::random_hermitian(4, rng);
    const auto b = schatten::testing::random_hermitian(4, rng);
    const auto phi = MultiSymbol::divided_difference(ScalarSymbol::power(2), 1);
    const std::vector<ComplexMatrix> ops{a, a};
    const std::vector<ComplexMatrix> bs{b};
    EXPECT_LE(max_abs_diff(moi_apply(phi, ops, bs), a * b + b * a), 1e-12);
}

TEST(Moi, SecondOrderCubeIsSymmetricProductSum) {
    // f(x) = x^3: f^[2](a, b, c) = a + b + c, so
    // T(B1, B2) = A B1 B2 + B1 A B2 + B1 B2 A.
    Rng rng(3);
    const auto a = schatten::testing::random_hermitian(3, rng);
    const auto b1 = schatten::testing::random_hermitian(3, rng);
    const auto b2 = schatten::testing::random_hermitian(3, rng);
    const auto phi = MultiSymbol::divided_difference(ScalarSymbol::power(3), 2);
    const std::vector<ComplexMatrix> ops{a, a, a};
    const std::vector<ComplexMatrix> bs{b1, b2};
    EXPECT_LE(max_abs_diff(moi_apply(phi, ops, bs), a * b1 * b2 + b1 * a * b2 + b1 * b2 * a), 1e-11);
}

TEST(Moi, MatchesNestedSumWithDistinctOperatorsAndDegeneracy) {
    Rng rng(4);
    const auto phi = MultiSymbol::divided_difference(ScalarSymbol::exponential(), 2);
    std::vector<KnownSpectrum> ops{schatten::testing::with_spectrum({0.5, 0.5, -1.0}, rng),
                                   schatten::testing::with_spectrum({1.0, 2.0, 3.0}, rng),
                                   schatten::testing::with_spectrum({-0.3, 0.2, 0.2}, rng)};
    std::vector<ComplexMatrix> bs{schatten::testing::random_complex_matrix(3, rng),
                                  schatten::testing::random_complex_matrix(3, rng)};
    std::vector<ComplexMatrix> mats;
    for (const auto& k : ops) mats.push_back(k.matrix);
    const auto oracle =
        schatten::testing::moi_nested_sum([&](std::span<const double> l) { return phi(l); }, ops, bs);
    EXPECT_LE(max_abs_diff(moi_apply(phi, mats, bs), oracle), 1e-11);
}

TEST(Moi, ProjectionFamilyResolvesIdentity) {
    Rng rng(5);
    const auto k = schatten::testing::with_spectrum({1.0, 1.0, 2.0, -4.0}, rng);
    const auto family = projection_family(k.matrix);
    EXPECT_EQ(family.size(), 3u);
    EXPECT_LE(family.defect(), 1e-10);
}

TEST(Moi, ArityAndDimensionErrors) {
    const auto phi = MultiSymbol::constant(2, 1.0);
    const std::vector<ComplexMatrix> ops{ComplexMatrix::identity(2), ComplexMatrix::identity(2)};
    const std::vector<ComplexMatrix> two{ComplexMatrix::identity(2), ComplexMatrix::identity(2)};
    try {
        moi_apply(phi, ops, two);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ArityMismatch);
    }
    const std::vector<ComplexMatrix> wrong{ComplexMatrix::identity(3)};
    try {
        moi_apply(phi, ops, wrong);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(Moi, ConstantSymbolGivesPlainProduct) {
    Rng rng(6);
    const auto a = schatten::testing::random_hermitian(3, rng);
    const auto b = schatten::testing::random_complex_matrix(3, rng);
    const auto phi = MultiSymbol::constant(2, 2.5);
    const std::vector<ComplexMatrix> ops{a, a};
    const std::vector<ComplexMatrix> bs{b};
    EXPECT_LE(max_abs_diff(moi_apply(phi, ops, bs), 2.5 * b), 1e-12);
}

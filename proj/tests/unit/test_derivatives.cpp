#include <gtest/gtest.h>

#include <cmath>

#include "random_matrices.hpp"
#include "schatten/derivatives.hpp"
#include "schatten/errors.hpp"
#include "schatten/spectral.hpp"

using namespace schatten;
using schatten::testing::Rng;

namespace {

double trace_of_function(const ScalarSymbol& f, const ComplexMatrix& m) {
    double s = 0.0;
    for (double v : hermitian_eigenvalues(m)) s += f(v);
    return s;
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no schatten::Error thrown";
    return ErrorKind::InvalidArgument;
}

} // namespace

TEST(TraceDerivative, PolynomialIsExact) {
    // Tr (A + tB)^2: first derivative 2 Re Tr(AB), second 2 Tr(B^2).
    Rng rng(1);
    const auto a = schatten::testing::random_hermitian(4, rng);
    const auto b = schatten::testing::random_hermitian(4, rng);
    const auto f = ScalarSymbol::power(2);
    EXPECT_NEAR(trace_derivative(f, a, b, 1), 2 * (a * b).trace().real(), 1e-11);
    EXPECT_NEAR(trace_derivative(f, a, b, 2), 2 * (b * b).trace().real(), 1e-11);
    EXPECT_NEAR(trace_derivative(f, a, b, 0), (a * a).trace().real(), 1e-11);
}

TEST(TraceDerivative, ExponentialAgainstFiniteDifferences) {
    Rng rng(2);
    const auto f = ScalarSymbol::exponential();
    for (int trial = 0; trial < 10; ++trial) {
        const auto a =
            schatten::testing::with_spectrum(schatten::testing::gapped_spectrum(4, -1, 1, 0.2, rng), rng).matrix;
        const auto b = schatten::testing::random_hermitian(4, rng, 0.5);
        const auto g = [&](double t) { return trace_of_function(f, a + t * b); };
        for (int r : {1, 2}) {
            const double h = r == 1 ? 1e-4 : 1e-3;
            const auto rep = DerivativeReport::compare(r, trace_derivative(f, a, b, r), finite_difference(g, 0, r, h));
            EXPECT_LE(rep.rel_err, 1e-5) << "r=" << r;
        }
    }
}

TEST(TraceDerivative, RejectsTooHighOrder) {
    const auto f = ScalarSymbol::abs_power(0.5, 0.1, 1);
    EXPECT_EQ(kind_of([&] { trace_derivative(f, ComplexMatrix::identity(2), ComplexMatrix::identity(2), 2); }),
              ErrorKind::OrderTooLow);
}

TEST(SchattenFirstDerivative, DiagonalOracle) {
    // A = diag(a), B = diag(b): d/dt sum |a_k + t b_k|^p = p sum |a_k|^{p-1} sgn(a_k) b_k.
    const auto a = ComplexMatrix::diagonal({2.0, -0.5});
    const auto b = ComplexMatrix::diagonal({1.0, 3.0});
    const double p = 0.5;
    const double want = p * (std::pow(2.0, p - 1) * 1.0 - std::pow(0.5, p - 1) * 3.0);
    EXPECT_NEAR(schatten_first_derivative(a, b, p), want, 1e-13);
}

TEST(SchattenFirstDerivative, AgainstFiniteDifferences) {
    Rng rng(3);
    for (double p : {0.3, 0.5, 0.7, 1.0}) {
        for (int trial = 0; trial < 5; ++trial) {
            auto spec = schatten::testing::gapped_spectrum(3, 0.3, 2.0, 0.1, rng);
            spec[1] = -spec[1];
            const auto a = schatten::testing::with_spectrum(spec, rng).matrix;
            const auto b = schatten::testing::random_hermitian(3, rng, 0.5);
            const auto g = [&](double t) { return schatten_norm_pow(a + t * b, p); };
            const auto rep = DerivativeReport::compare(1, schatten_first_derivative(a, b, p), finite_difference(g, 0, 1, 1e-4));
            EXPECT_LE(rep.rel_err, 1e-5) << "p=" << p;
        }
    }
}

TEST(SchattenFirstDerivative, SingularOperand) {
    EXPECT_EQ(kind_of([] {
                  schatten_first_derivative(ComplexMatrix::diagonal({1.0, 0.0}), ComplexMatrix::identity(2), 0.5);
              }),
              ErrorKind::SingularOperand);
}

TEST(SchattenSecondDerivative, CommutingCaseMatchesCoordinateFormula) {
    const std::vector<double> a{1.5, 0.4, 2.0};
    const std::vector<double> b{0.3, -1.0, 0.7};
    const double p = 0.4;
    EXPECT_NEAR(schatten_second_derivative(ComplexMatrix::diagonal(a), ComplexMatrix::diagonal(b), p),
                commutative_second_derivative(a, b, p), 1e-12);
}

TEST(SchattenSecondDerivative, NegativeForDefiniteAAndMatchesFd) {
    Rng rng(4);
    for (double p : {0.3, 0.5, 0.7}) {
        for (int trial = 0; trial < 5; ++trial) {
            const auto a =
                schatten::testing::with_spectrum(schatten::testing::gapped_spectrum(3, 0.5, 2.0, 0.05, rng), rng).matrix;
            const auto b = schatten::testing::random_hermitian(3, rng, 0.5);
            const double d2 = schatten_second_derivative(a, b, p);
            EXPECT_LT(d2, 0.0);
            const auto g = [&](double t) { return schatten_norm_pow(a + t * b, p); };
            EXPECT_LE(DerivativeReport::compare(2, d2, finite_difference(g, 0, 2, 1e-3)).rel_err, 1e-4);
        }
    }
}

TEST(SchattenSecondDerivative, IndefiniteAStillMatchesFd) {
    Rng rng(5);
    const auto a = schatten::testing::with_spectrum({-1.2, 0.6, 1.9}, rng).matrix;
    const auto b = schatten::testing::random_hermitian(3, rng, 0.5);
    const auto g = [&](double t) { return schatten_norm_pow(a + t * b, 0.5); };
    EXPECT_LE(DerivativeReport::compare(2, schatten_second_derivative(a, b, 0.5), finite_difference(g, 0, 2, 1e-3)).rel_err,
              1e-4);
}

TEST(SchattenSecondDerivative, EpsOutsideRange) {
    const auto a = ComplexMatrix::diagonal({1.0, 2.0});
    EXPECT_EQ(kind_of([&] { schatten_second_derivative(a, ComplexMatrix::identity(2), 0.5, 1.5); }),
              ErrorKind::DomainError);
    EXPECT_EQ(kind_of([&] { schatten_second_derivative(a, ComplexMatrix::identity(2), 0.5, 0.0); }),
              ErrorKind::DomainError);
}

TEST(ConfluentDiagonal, RecursionValueIsHalfSecondDerivative) {
    const double d = 1.7, p = 0.4;
    const auto term = abs_power_diagonal_term(d, p);
    EXPECT_NEAR(term.from_recursion, p * (p - 1) * std::pow(d, p - 2) / 2, 1e-14);
    EXPECT_NEAR(term.alternative_closed_form, p * (p - 1) * std::pow(d, p - 1), 1e-14);
}

TEST(FiniteDifference, ExactOnQuartics) {
    // One Richardson step cancels the h^2 term, leaving O(h^4): exact for
    // polynomials up to degree 4 (first order) and 5 (second order).
    const auto g = [](double t) { return 3 * t * t * t * t - t * t * t + 2 * t; };
    EXPECT_NEAR(finite_difference(g, 0.5, 1, 1e-2), 12 * 0.125 - 3 * 0.25 + 2, 1e-10);
    EXPECT_NEAR(finite_difference(g, 0.5, 2, 1e-2), 36 * 0.25 - 6 * 0.5, 1e-8);
}

TEST(Probe, ClassifiesStandardFunctions) {
    EXPECT_EQ(differentiability_probe([](double t) { return std::abs(t); }, 0.0), 0);
    EXPECT_EQ(differentiability_probe([](double t) { return t * std::abs(t); }, 0.0), 1);
    EXPECT_EQ(differentiability_probe([](double t) { return t * t * std::abs(t); }, 0.0), 2);
    EXPECT_EQ(differentiability_probe([](double t) { return std::exp(t); }, 0.0), 5);
    EXPECT_EQ(differentiability_probe([](double t) { return std::pow(std::abs(t), 1.5); }, 0.0), 1);
    EXPECT_EQ(differentiability_probe(
                  [](double t) { return std::pow(1 + std::sqrt(std::abs(t)), 1.0 / 3) - std::pow(std::abs(t), 0.25); },
                  0.0),
              0);
    EXPECT_EQ(differentiability_probe([](double t) { return std::abs(t); }, 1.0), 5);
}

TEST(CommutativeSecondDerivative, AgainstFdAndSign) {
    const std::vector<double> a{0.8, -1.1, 0.5};
    const std::vector<double> b{0.2, 0.4, -0.9};
    const double p = 0.6;
    const auto g = [&](double t) {
        double s = 0;
        for (std::size_t k = 0; k < a.size(); ++k) s += std::pow(std::abs(a[k] + t * b[k]), p);
        return s;
    };
    const double closed = commutative_second_derivative(a, b, p);
    EXPECT_LT(closed, 0.0);
    EXPECT_LE(DerivativeReport::compare(2, closed, finite_difference(g, 0, 2, 1e-3)).rel_err, 1e-5);
    const std::vector<double> zero{0.0, 1.0, 1.0};
    EXPECT_EQ(kind_of([&] { commutative_second_derivative(zero, b, p); }), ErrorKind::ZeroCoordinate);
}

#pragma once

#include <functional>
#include <span>

#include "schatten/matrix.hpp"
#include "schatten/scalar_symbol.hpp"

namespace schatten {

/// Tolerances and step sizes for derivative checks.
struct DerivativeTolerances {
    double fd_rel = 1e-5;
    double fd2_rel = 1e-4;
    double h1 = 1e-4;
    double h2 = 1e-3;
    /// Relative to ||A||_max.
    double sing_rel = 1e-8;
    double probe_tol = 0.05;
};

/// A closed-form derivative set against its finite-difference estimate.
struct DerivativeReport {
    int order = 0;
    double closed_form = 0.0;
    double finite_difference = 0.0;
    double abs_err = 0.0;
    /// abs_err / max(1, |closed_form|)
    double rel_err = 0.0;

    static DerivativeReport compare(int order, double closed_form, double finite_difference);
};

using RealFunction = std::function<double(double)>;

/// d^r/dt^r at t = 0 of Tr f(A + tB), as r! Tr T^{A,...,A}_{f^[r]}(B, ..., B).
double trace_derivative(const ScalarSymbol& f, const ComplexMatrix& a, const ComplexMatrix& b, int r);

/// d/dt at t = 0 of ||A + tB||_p^p = p Tr(B |A|^{p-1} sgn(A)), 0 < p <= 1.
/// Throws SingularOperand when min |eig(A)| <= sing_rel * ||A||_max.
double schatten_first_derivative(const ComplexMatrix& a, const ComplexMatrix& b, double p);

/// d^2/dt^2 at t = 0 of ||A + tB||_p^p for invertible Hermitian A, built from
/// the entries b_lk of B in A's eigenbasis:
///   2 * ( sum_l |b_ll|^2 f^[2](d_l,d_l,d_l)
///       + sum_{l<k} |b_lk|^2 (f^[2](d_l,d_k,d_k) + f^[2](d_k,d_l,d_l)) )
/// with f = |x|^p on |x| >= eps. The bracket is Tr T^{A,A,A}_{f^[2]}(B,B),
/// i.e. half the second derivative.
///
/// Throws SingularOperand, and DomainError unless 0 < eps < min |eig(A)|.
double schatten_second_derivative(const ComplexMatrix& a, const ComplexMatrix& b, double p,
                                  double eps);
/// eps defaults to half the smallest |eigenvalue| of A.
double schatten_second_derivative(const ComplexMatrix& a, const ComplexMatrix& b, double p);

/// The two candidate values of the confluent diagonal term f^[2](d,d,d) for
/// f = |x|^p: the divided-difference recursion value f''(d)/2 and the
/// alternative closed form p(p-1)|d|^{p-1}. Only `from_recursion` is used in
/// computations.
struct ConfluentDiagonalTerm {
    double from_recursion = 0.0;
    double alternative_closed_form = 0.0;
};
ConfluentDiagonalTerm abs_power_diagonal_term(double d, double p);

/// Central difference with one Richardson step, R = (4 D(h) - D(2h)) / 3,
/// where D(h) = (g(t+h) - g(t-h)) / 2h for order 1 and
/// (g(t+h) - 2g(t) + g(t-h)) / h^2 for order 2.
double finite_difference(const RealFunction& g, double t0, int order, double h);

/// Largest k in 0..4 such that derivatives of orders 1..k exist at t0, or 5
/// when order 5 also passes. A derivative of order k "exists" when the
/// forward and backward k-th difference quotients over h = 2^-j both settle
/// (spread over the last three steps below probe_tol * max(1, |limit|)) and
/// agree with each other within the same tolerance.
int differentiability_probe(const RealFunction& g, double t0,
                            double probe_tol = DerivativeTolerances{}.probe_tol);

/// d^2/dt^2 at t = 0 of sum_k |a_k + t b_k|^p = p(p-1) sum_k |a_k|^{p-2} b_k^2.
/// Throws ZeroCoordinate if some a_k == 0.
double commutative_second_derivative(std::span<const double> a, std::span<const double> b, double p);

} // namespace schatten

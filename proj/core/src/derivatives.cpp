#include "schatten/derivatives.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <vector>

#include "schatten/divided_difference.hpp"
#include "schatten/errors.hpp"
#include "schatten/moi.hpp"
#include "schatten/spectral.hpp"

namespace schatten {

DerivativeReport DerivativeReport::compare(int order, double closed_form, double finite_difference) {
    DerivativeReport r;
    r.order = order;
    r.closed_form = closed_form;
    r.finite_difference = finite_difference;
    r.abs_err = std::abs(closed_form - finite_difference);
    r.rel_err = r.abs_err / std::max(1.0, std::abs(closed_form));
    return r;
}

double trace_derivative(const ScalarSymbol& f, const ComplexMatrix& a, const ComplexMatrix& b, int r) {
    if (r < 0) throw Error(ErrorKind::InvalidArgument, "derivative order must be >= 0");
    if (r > f.max_order()) {
        throw Error(ErrorKind::OrderTooLow, f.name() + " lacks derivatives of order " + std::to_string(r));
    }
    if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "A and B differ in size");
    if (!b.is_hermitian()) throw Error(ErrorKind::NotHermitian, "perturbation B");

    const auto family = projection_family(a);
    const std::vector<ProjectionFamily> families(static_cast<std::size_t>(r) + 1, family);
    const std::vector<ComplexMatrix> perturbations(static_cast<std::size_t>(r), b);
    const auto phi = MultiSymbol::divided_difference(f, static_cast<std::size_t>(r));
    const Complex tr = moi_apply(phi, std::span<const ProjectionFamily>(families), perturbations).trace();

    double factorial = 1.0;
    for (int k = 2; k <= r; ++k) factorial *= k;
    return factorial * tr.real();
}

namespace {

double min_abs(const std::vector<double>& values) {
    double m = kInfinity;
    for (double v : values) m = std::min(m, std::abs(v));
    return m;
}

void require_invertible(const ComplexMatrix& a, const std::vector<double>& eigenvalues) {
    const double floor = DerivativeTolerances{}.sing_rel * a.max_abs();
    const double smallest = min_abs(eigenvalues);
    if (!(smallest > floor)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "min |eigenvalue| %.3e <= %.3e", smallest, floor);
        throw Error(ErrorKind::SingularOperand, buf);
    }
}

void require_pair(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "A and B differ in size");
    if (!b.is_hermitian()) throw Error(ErrorKind::NotHermitian, "perturbation B");
}

} // namespace

double schatten_first_derivative(const ComplexMatrix& a, const ComplexMatrix& b, double p) {
    if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "needs 0 < p <= 1");
    require_pair(a, b);
    const auto spectrum = spectral_decompose(a);
    require_invertible(a, spectrum.eigenvalues);
    const auto weight = matrix_function(spectrum, ScalarSymbol::signed_abs_power(p, 0.0));
    return p * (b * weight).trace().real();
}

double schatten_second_derivative(const ComplexMatrix& a, const ComplexMatrix& b, double p, double eps) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidArgument, "needs 0 < p < 1");
    require_pair(a, b);
    const auto spectrum = spectral_decompose(a);
    require_invertible(a, spectrum.eigenvalues);
    const double smallest = min_abs(spectrum.eigenvalues);
    if (!(eps > 0.0 && eps < smallest)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "eps = %.3e must lie in (0, %.3e)", eps, smallest);
        throw Error(ErrorKind::DomainError, buf);
    }

    const auto f = ScalarSymbol::abs_power(p, eps);
    const auto& d = spectrum.eigenvalues;
    const ComplexMatrix& u = spectrum.eigenvectors;
    const ComplexMatrix rotated = u.adjoint() * b * u;
    const std::size_t n = d.size();

    double sum = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        const std::array<double, 3> diag{d[l], d[l], d[l]};
        sum += std::norm(rotated(l, l)) * divided_difference(f, diag);
        for (std::size_t k = l + 1; k < n; ++k) {
            const double weight = std::norm(rotated(l, k));
            if (weight == 0.0) continue;
            const std::array<double, 3> lkk{d[l], d[k], d[k]};
            const std::array<double, 3> kll{d[k], d[l], d[l]};
            sum += weight * (divided_difference(f, lkk) + divided_difference(f, kll));
        }
    }
    return 2.0 * sum;
}

double schatten_second_derivative(const ComplexMatrix& a, const ComplexMatrix& b, double p) {
    const auto eigenvalues = hermitian_eigenvalues(a);
    require_invertible(a, eigenvalues);
    return schatten_second_derivative(a, b, p, 0.5 * min_abs(eigenvalues));
}

ConfluentDiagonalTerm abs_power_diagonal_term(double d, double p) {
    if (d == 0.0) throw Error(ErrorKind::DomainError, "diagonal node must be nonzero");
    const auto f = ScalarSymbol::abs_power(p, 0.5 * std::abs(d));
    const std::array<double, 3> nodes{d, d, d};
    return {divided_difference(f, nodes), p * (p - 1.0) * std::pow(std::abs(d), p - 1.0)};
}

namespace {

double central_difference(const RealFunction& g, double t0, int order, double h) {
    if (order == 1) return (g(t0 + h) - g(t0 - h)) / (2.0 * h);
    return (g(t0 + h) - 2.0 * g(t0) + g(t0 - h)) / (h * h);
}

} // namespace

double finite_difference(const RealFunction& g, double t0, int order, double h) {
    if (order != 1 && order != 2) throw Error(ErrorKind::InvalidArgument, "order must be 1 or 2");
    if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "step must be positive");
    const double fine = central_difference(g, t0, order, h);
    const double coarse = central_difference(g, t0, order, 2.0 * h);
    return (4.0 * fine - coarse) / 3.0;
}

namespace {

// k-th forward (direction +1) or backward (-1) difference quotient.
double one_sided_quotient(const RealFunction& g, double t0, int k, double h, int direction) {
    double sum = 0.0;
    double binom = 1.0;
    for (int i = 0; i <= k; ++i) {
        const double sign = ((k - i) % 2 == 0) ? 1.0 : -1.0;
        sum += sign * binom * g(t0 + direction * i * h);
        binom = binom * (k - i) / (i + 1);
    }
    if (direction < 0 && k % 2 == 1) sum = -sum;
    return sum / std::pow(h, k);
}

struct Settled {
    bool ok = false;
    double limit = 0.0;
};

Settled settle(const std::array<double, 3>& values, double tol) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double limit = values.back();
    if (!std::isfinite(*lo) || !std::isfinite(*hi)) return {};
    return {(*hi - *lo) <= tol * std::max(1.0, std::abs(limit)), limit};
}

} // namespace

int differentiability_probe(const RealFunction& g, double t0, double probe_tol) {
    // Smallest dyadic exponent per order, chosen so rounding stays well under
    // probe_tol for O(1) functions.
    constexpr std::array<int, 6> finest{0, 20, 14, 11, 9, 8};
    for (int k = 1; k <= 5; ++k) {
        std::array<double, 3> forward{};
        std::array<double, 3> backward{};
        for (int s = 0; s < 3; ++s) {
            const double h = std::ldexp(1.0, -(finest[static_cast<std::size_t>(k)] - 2 + s));
            forward[static_cast<std::size_t>(s)] = one_sided_quotient(g, t0, k, h, +1);
            backward[static_cast<std::size_t>(s)] = one_sided_quotient(g, t0, k, h, -1);
        }
        const Settled f = settle(forward, probe_tol);
        const Settled b = settle(backward, probe_tol);
        const bool agree =
            f.ok && b.ok &&
            std::abs(f.limit - b.limit) <= probe_tol * std::max(1.0, 0.5 * std::abs(f.limit + b.limit));
        if (!agree) return k - 1;
    }
    return 5;
}

double commutative_second_derivative(std::span<const double> a, std::span<const double> b, double p) {
    if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "a and b differ in length");
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidArgument, "needs 0 < p < 1");
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] == 0.0) throw Error(ErrorKind::ZeroCoordinate, "a_" + std::to_string(k) + " = 0");
        sum += std::pow(std::abs(a[k]), p - 2.0) * b[k] * b[k];
    }
    return p * (p - 1.0) * sum;
}

} // namespace schatten

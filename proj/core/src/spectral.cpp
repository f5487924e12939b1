#include "schatten/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "schatten/errors.hpp"

namespace schatten {

namespace {

double off_diagonal_norm(const ComplexMatrix& h) {
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i)
        for (std::size_t j = 0; j < h.size(); ++j)
            if (i != j) s += std::norm(h(i, j));
    return std::sqrt(s);
}

void require_hermitian(const ComplexMatrix& h) {
    const double tol = LinalgTolerances{}.herm_rel * h.max_abs();
    const double defect = h.hermitian_defect();
    if (defect > tol) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "self-adjointness defect %.3e exceeds %.3e", defect, tol);
        throw Error(ErrorKind::NotHermitian, buf);
    }
}

// Diagonalizes `h` in place; accumulates rotations into `vectors` if given.
void jacobi(ComplexMatrix& h, ComplexMatrix* vectors, double tol) {
    const std::size_t n = h.size();
    const double threshold = tol * h.frobenius();
    for (int sweep = 0; sweep < kJacobiSweepLimit; ++sweep) {
        if (off_diagonal_norm(h) <= threshold) return;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex hpq = h(p, q);
                const double g = std::abs(hpq);
                if (g == 0.0) continue;
                const Complex phase = hpq / g;
                const double app = h(p, p).real();
                const double aqq = h(q, q).real();
                const double theta = (aqq - app) / (2.0 * g);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // J = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane.
                const Complex jpp(c, 0.0);
                const Complex jpq(s, 0.0);
                const Complex jqp = -std::conj(phase) * s;
                const Complex jqq = std::conj(phase) * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const Complex hkp = h(k, p);
                    const Complex hkq = h(k, q);
                    h(k, p) = hkp * jpp + hkq * jqp;
                    h(k, q) = hkp * jpq + hkq * jqq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex hpk = h(p, k);
                    const Complex hqk = h(q, k);
                    h(p, k) = std::conj(jpp) * hpk + std::conj(jqp) * hqk;
                    h(q, k) = std::conj(jpq) * hpk + std::conj(jqq) * hqk;
                }
                h(p, p) = Complex(app - t * g, 0.0);
                h(q, q) = Complex(aqq + t * g, 0.0);
                h(p, q) = Complex(0.0, 0.0);
                h(q, p) = Complex(0.0, 0.0);

                if (vectors != nullptr) {
                    ComplexMatrix& v = *vectors;
                    for (std::size_t k = 0; k < n; ++k) {
                        const Complex vkp = v(k, p);
                        const Complex vkq = v(k, q);
                        v(k, p) = vkp * jpp + vkq * jqp;
                        v(k, q) = vkp * jpq + vkq * jqq;
                    }
                }
            }
        }
    }
    if (off_diagonal_norm(h) <= threshold) return;
    throw Error(ErrorKind::NoConvergence,
                "Jacobi sweep limit " + std::to_string(kJacobiSweepLimit) + " exceeded");
}

std::vector<std::size_t> ascending_order(const ComplexMatrix& diag) {
    std::vector<std::size_t> order(diag.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return diag(a, a).real() < diag(b, b).real();
    });
    return order;
}

} // namespace

ComplexMatrix SpectralDecomposition::assemble(const std::function<double(double)>& g) const {
    const std::size_t n = size();
    ComplexMatrix out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = g(eigenvalues[k]);
        if (w == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const Complex uik = eigenvectors(i, k) * w;
            for (std::size_t j = 0; j < n; ++j) out(i, j) += uik * std::conj(eigenvectors(j, k));
        }
    }
    return out;
}

ComplexMatrix SpectralDecomposition::reconstruct() const {
    return assemble([](double x) { return x; });
}

double SpectralDecomposition::orthogonality_defect() const {
    return max_abs_diff(eigenvectors.adjoint() * eigenvectors, ComplexMatrix::identity(size()));
}

SpectralDecomposition spectral_decompose(const ComplexMatrix& h, double tol) {
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
    require_hermitian(h);
    const std::size_t n = h.size();
    ComplexMatrix work = h.hermitian_part();
    ComplexMatrix vectors = ComplexMatrix::identity(n);
    jacobi(work, &vectors, tol);

    const auto order = ascending_order(work);
    SpectralDecomposition out{std::vector<double>(n), ComplexMatrix(n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = work(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = vectors(i, order[k]);
    }
    return out;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h, double tol) {
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
    require_hermitian(h);
    ComplexMatrix work = h.hermitian_part();
    jacobi(work, nullptr, tol);
    std::vector<double> values(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) values[k] = work(k, k).real();
    std::sort(values.begin(), values.end());
    return values;
}

ComplexMatrix matrix_function(const SpectralDecomposition& spectrum, const ScalarSymbol& f) {
    for (double lambda : spectrum.eigenvalues) {
        if (!f.in_domain(lambda)) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "eigenvalue %.17g", lambda);
            throw Error(ErrorKind::DomainError, f.name() + " is undefined at " + buf);
        }
    }
    return spectrum.assemble([&](double x) { return f.eval(0, x); });
}

ComplexMatrix matrix_function(const ComplexMatrix& h, const ScalarSymbol& f) {
    return matrix_function(spectral_decompose(h), f);
}

std::vector<double> singular_values(const ComplexMatrix& m) {
    std::vector<double> s;
    if (m.hermitian_defect() <= 1e-15 * m.max_abs()) {
        s = hermitian_eigenvalues(m);
        for (double& x : s) x = std::abs(x);
    } else {
        s = hermitian_eigenvalues(m.adjoint() * m);
        for (double& x : s) x = std::sqrt(std::max(x, 0.0));
    }
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
}

double schatten_norm_pow(std::span<const double> singular_values, double p) {
    if (!(p > 0.0) || std::isinf(p)) {
        throw Error(ErrorKind::InvalidArgument, "p-th power form needs 0 < p < inf");
    }
    double s = 0.0;
    for (double x : singular_values)
        if (x > 0.0) s += std::pow(x, p);
    return s;
}

double schatten_norm_pow(const ComplexMatrix& m, double p) {
    return schatten_norm_pow(singular_values(m), p);
}

double schatten_norm(const ComplexMatrix& m, double p) {
    if (!(p > 0.0)) throw Error(ErrorKind::InvalidArgument, "Schatten index must be positive");
    const auto s = singular_values(m);
    if (std::isinf(p)) return s.empty() ? 0.0 : s.front();
    return std::pow(schatten_norm_pow(s, p), 1.0 / p);
}

bool quasi_triangle_check(const ComplexMatrix& a, const ComplexMatrix& b, double p, double slack) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidArgument, "quasi-triangle needs 0 < p < 1");
    const double lhs = schatten_norm(a + b, p);
    const double rhs = std::pow(2.0, 1.0 / p - 1.0) * (schatten_norm(a, p) + schatten_norm(b, p));
    return lhs <= rhs + slack;
}

} // namespace schatten

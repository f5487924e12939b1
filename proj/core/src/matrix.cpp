#include "schatten/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "schatten/errors.hpp"

namespace schatten {

namespace {

void require_same_size(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::DimensionMismatch,
                    std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
}

} // namespace

ComplexMatrix::ComplexMatrix(std::size_t n) : n_(n), data_(n * n, Complex(0.0, 0.0)) {}

ComplexMatrix::ComplexMatrix(std::size_t n, std::vector<Complex> entries)
    : n_(n), data_(std::move(entries)) {
    if (data_.size() != n_ * n_) {
        throw Error(ErrorKind::DimensionMismatch,
                    "expected " + std::to_string(n_ * n_) + " entries, got " +
                        std::to_string(data_.size()));
    }
    for (const Complex& z : data_) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw Error(ErrorKind::DomainError, "matrix entries must be finite");
        }
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) throw Error(ErrorKind::DomainError, "non-finite diagonal");
        m(i, i) = values[i];
    }
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::initializer_list<double> values) {
    return diagonal(std::span<const double>(values.begin(), values.size()));
}

ComplexMatrix ComplexMatrix::from_real(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t n = rows.size();
    std::vector<Complex> entries;
    entries.reserve(n * n);
    for (const auto& row : rows) {
        if (row.size() != n) throw Error(ErrorKind::DimensionMismatch, "rows must form a square");
        for (double x : row) entries.emplace_back(x, 0.0);
    }
    return ComplexMatrix(n, std::move(entries));
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
}

Complex ComplexMatrix::trace() const {
    Complex t(0.0, 0.0);
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const Complex& z : data_) m = std::max(m, std::abs(z));
    return m;
}

double ComplexMatrix::frobenius() const {
    double s = 0.0;
    for (const Complex& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

double ComplexMatrix::hermitian_defect() const {
    double m = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i; j < n_; ++j)
            m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return m;
}

bool ComplexMatrix::is_hermitian(double tol) const {
    if (tol < 0.0) tol = 1e-12 * max_abs();
    return hermitian_defect() <= tol;
}

ComplexMatrix ComplexMatrix::hermitian_part() const {
    ComplexMatrix out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        out(i, i) = Complex((*this)(i, i).real(), 0.0);
        for (std::size_t j = i + 1; j < n_; ++j) {
            const Complex z = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
            out(i, j) = z;
            out(j, i) = std::conj(z);
        }
    }
    return out;
}

bool ComplexMatrix::is_diagonal(double tol) const {
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            if (i != j && std::abs((*this)(i, j)) > tol) return false;
    return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    require_same_size(*this, other);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    require_same_size(*this, other);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
    for (Complex& z : data_) z *= scale;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
    require_same_size(lhs, rhs);
    const std::size_t n = lhs.size();
    ComplexMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const Complex a = lhs(i, k);
            if (a == Complex(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < n; ++j) out(i, j) += a * rhs(k, j);
        }
    }
    return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_size(a, b);
    double m = 0.0;
    for (std::size_t k = 0; k < a.entries().size(); ++k)
        m = std::max(m, std::abs(a.entries()[k] - b.entries()[k]));
    return m;
}

ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t n = a.size() + b.size();
    ComplexMatrix out(n);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) out(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out(a.size() + i, a.size() + j) = b(i, j);
    return out;
}

} // namespace schatten

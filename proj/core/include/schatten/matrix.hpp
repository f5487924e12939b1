#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace schatten {

using Complex = std::complex<double>;

/// Dense square complex matrix stored row-major.
///
/// Construction rejects non-finite entries; arithmetic assumes matching
/// dimensions and throws DimensionMismatch otherwise.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t n);
    ComplexMatrix(std::size_t n, std::vector<Complex> entries);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix zero(std::size_t n) { return ComplexMatrix(n); }
    static ComplexMatrix diagonal(std::span<const double> values);
    static ComplexMatrix diagonal(std::initializer_list<double> values);
    /// Builds from nested real rows, e.g. {{0, 1}, {1, 0}}.
    static ComplexMatrix from_real(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t size() const noexcept { return n_; }
    bool empty() const noexcept { return n_ == 0; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    std::span<const Complex> entries() const noexcept { return data_; }

    ComplexMatrix adjoint() const;
    Complex trace() const;
    double max_abs() const;
    double frobenius() const;

    /// max_{i,j} |M_ij - conj(M_ji)|
    double hermitian_defect() const;
    /// Self-adjointness within `tol`; a negative tol selects 1e-12 * max_abs().
    bool is_hermitian(double tol = -1.0) const;
    /// (M + M^*) / 2
    ComplexMatrix hermitian_part() const;

    bool is_diagonal(double tol = 0.0) const;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(Complex scale);

    friend ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
    friend ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
    friend ComplexMatrix operator*(ComplexMatrix m, Complex s) { return m *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix m) { return m *= s; }
    friend ComplexMatrix operator*(double s, ComplexMatrix m) { return m *= Complex(s, 0.0); }
    friend ComplexMatrix operator-(ComplexMatrix m) { return m *= Complex(-1.0, 0.0); }
    friend ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<Complex> data_;
};

/// max_{i,j} |A_ij - B_ij|
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Block-diagonal direct sum diag(a, b).
ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b);

} // namespace schatten

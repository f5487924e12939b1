#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "schatten/matrix.hpp"
#include "schatten/scalar_symbol.hpp"

namespace schatten {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Default tolerances of the dense linear-algebra layer.
struct LinalgTolerances {
    /// Relative to max_abs(H).
    double herm_rel = 1e-12;
    double ortho = 1e-10;
    double recon = 1e-10;
    double slack = 1e-12;
};

/// Eigen-pairs of a Hermitian matrix: eigenvalues ascending, eigenvectors as
/// the columns of a unitary matrix.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    ComplexMatrix eigenvectors;

    std::size_t size() const noexcept { return eigenvalues.size(); }
    /// U diag(g(lambda)) U^*
    ComplexMatrix assemble(const std::function<double(double)>& g) const;
    ComplexMatrix reconstruct() const;
    /// ||U^*U - I||_max
    double orthogonality_defect() const;
};

inline constexpr int kJacobiSweepLimit = 64;

/// Cyclic complex Jacobi on a Hermitian matrix.
///
/// Iterates sweeps until the off-diagonal Frobenius norm drops below
/// tol * ||H||_F. Eigenvalues are sorted ascending with ties kept in the
/// column order the sweep left them in.
///
/// Throws NotHermitian if the self-adjointness defect exceeds
/// herm_rel * ||H||_max, NoConvergence after kJacobiSweepLimit sweeps.
SpectralDecomposition spectral_decompose(const ComplexMatrix& h, double tol = 1e-14);

/// Eigenvalues only (ascending); same algorithm without accumulating U.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h, double tol = 1e-14);

/// f(H) = U f(Lambda) U^*. Throws DomainError when f is undefined at an
/// eigenvalue.
ComplexMatrix matrix_function(const ComplexMatrix& h, const ScalarSymbol& f);
ComplexMatrix matrix_function(const SpectralDecomposition& spectrum, const ScalarSymbol& f);

/// Singular values, descending. Hermitian inputs use |eigenvalues|; other
/// inputs use the eigenvalues of M^*M, clipped at zero before the square root.
std::vector<double> singular_values(const ComplexMatrix& m);

/// sum_k s_k^p, the p-th power of the Schatten quasi-norm (p < inf).
double schatten_norm_pow(const ComplexMatrix& m, double p);
double schatten_norm_pow(std::span<const double> singular_values, double p);

/// (sum_k s_k^p)^{1/p} for 0 < p < inf; max_k s_k for p = inf.
double schatten_norm(const ComplexMatrix& m, double p);

/// True iff ||A+B||_p <= 2^{1/p-1}(||A||_p + ||B||_p) + slack.
bool quasi_triangle_check(const ComplexMatrix& a, const ComplexMatrix& b, double p,
                          double slack = LinalgTolerances{}.slack);

} // namespace schatten

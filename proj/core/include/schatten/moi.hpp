#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "schatten/divided_difference.hpp"
#include "schatten/matrix.hpp"
#include "schatten/spectral.hpp"

namespace schatten {

/// Symbol phi(l_0, ..., l_n) of a discrete multiple operator integral.
class MultiSymbol {
public:
    using Evaluator = std::function<double(std::span<const double>)>;

    MultiSymbol(std::size_t arity, Evaluator eval, std::string name = "phi");

    std::size_t arity() const noexcept { return arity_; }
    const std::string& name() const noexcept { return name_; }
    double operator()(std::span<const double> lambdas) const;

    /// phi = f^[r], arity r + 1.
    static MultiSymbol divided_difference(ScalarSymbol f, std::size_t order,
                                          double group_tol = kDefaultGroupTol);
    static MultiSymbol constant(std::size_t arity, double value);

private:
    std::size_t arity_;
    Evaluator eval_;
    std::string name_;
};

/// Spectral projections E_A({lambda}) onto the eigenspaces of a Hermitian
/// matrix, one per cluster of eigenvalues within group_tol.
struct ProjectionFamily {
    std::vector<double> distinct_eigenvalues;
    std::vector<ComplexMatrix> projections;

    std::size_t size() const noexcept { return projections.size(); }
    /// Largest violation of idempotence, self-adjointness, completeness and
    /// mutual orthogonality.
    double defect() const;
};

ProjectionFamily projection_family(const ComplexMatrix& a, double group_tol = kDefaultGroupTol);
ProjectionFamily projection_family(const SpectralDecomposition& spectrum,
                                   double group_tol = kDefaultGroupTol);

/// T^{A_0..A_n}_phi(B_1..B_n) =
///   sum phi(l_{i_0}, ..., l_{i_n}) E_0(l_{i_0}) B_1 E_1(l_{i_1}) ... B_n E_n(l_{i_n})
/// over the distinct eigenvalues of each A_j. Tuples are enumerated in a
/// fixed lexicographic order, so the result is deterministic.
///
/// Throws ArityMismatch, NotHermitian, DimensionMismatch.
ComplexMatrix moi_apply(const MultiSymbol& phi, std::span<const ComplexMatrix> operators,
                        std::span<const ComplexMatrix> perturbations,
                        double group_tol = kDefaultGroupTol);

/// Same operation with precomputed projection families.
ComplexMatrix moi_apply(const MultiSymbol& phi, std::span<const ProjectionFamily> families,
                        std::span<const ComplexMatrix> perturbations);

} // namespace schatten

#include "schatten/moi.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "schatten/errors.hpp"

namespace schatten {

MultiSymbol::MultiSymbol(std::size_t arity, Evaluator eval, std::string name)
    : arity_(arity), eval_(std::move(eval)), name_(std::move(name)) {
    if (arity_ == 0) throw Error(ErrorKind::InvalidArgument, "symbol arity must be >= 1");
    if (!eval_) throw Error(ErrorKind::InvalidArgument, "symbol needs an evaluator");
}

double MultiSymbol::operator()(std::span<const double> lambdas) const {
    if (lambdas.size() != arity_) {
        throw Error(ErrorKind::ArityMismatch, name_ + " expects " + std::to_string(arity_) +
                                                  " arguments, got " +
                                                  std::to_string(lambdas.size()));
    }
    return eval_(lambdas);
}

MultiSymbol MultiSymbol::divided_difference(ScalarSymbol f, std::size_t order, double group_tol) {
    std::string name = f.name() + "^[" + std::to_string(order) + "]";
    return MultiSymbol(
        order + 1,
        [f = std::move(f), group_tol](std::span<const double> lambdas) {
            return schatten::divided_difference(f, lambdas, group_tol);
        },
        std::move(name));
}

MultiSymbol MultiSymbol::constant(std::size_t arity, double value) {
    return MultiSymbol(
        arity, [value](std::span<const double>) { return value; }, "const");
}

double ProjectionFamily::defect() const {
    if (projections.empty()) return 0.0;
    const std::size_t n = projections.front().size();
    double worst = 0.0;
    ComplexMatrix total(n);
    for (std::size_t a = 0; a < projections.size(); ++a) {
        const ComplexMatrix& p = projections[a];
        worst = std::max(worst, max_abs_diff(p * p, p));
        worst = std::max(worst, p.hermitian_defect());
        total += p;
        for (std::size_t b = a + 1; b < projections.size(); ++b)
            worst = std::max(worst, (p * projections[b]).max_abs());
    }
    return std::max(worst, max_abs_diff(total, ComplexMatrix::identity(n)));
}

ProjectionFamily projection_family(const SpectralDecomposition& spectrum, double group_tol) {
    ProjectionFamily family;
    const std::size_t n = spectrum.size();
    std::size_t start = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        const bool split =
            k == n || spectrum.eigenvalues[k] - spectrum.eigenvalues[k - 1] > group_tol;
        if (!split) continue;
        double mean = 0.0;
        ComplexMatrix projection(n);
        for (std::size_t c = start; c < k; ++c) {
            mean += spectrum.eigenvalues[c];
            for (std::size_t i = 0; i < n; ++i) {
                const Complex uic = spectrum.eigenvectors(i, c);
                for (std::size_t j = 0; j < n; ++j)
                    projection(i, j) += uic * std::conj(spectrum.eigenvectors(j, c));
            }
        }
        family.distinct_eigenvalues.push_back(mean / static_cast<double>(k - start));
        family.projections.push_back(std::move(projection));
        start = k;
    }
    return family;
}

ProjectionFamily projection_family(const ComplexMatrix& a, double group_tol) {
    return projection_family(spectral_decompose(a), group_tol);
}

namespace {

struct Accumulator {
    const MultiSymbol& phi;
    std::span<const ProjectionFamily> families;
    // right_factors[k][i] = B_k E_k(i) for slots k = 1..n
    std::vector<std::vector<ComplexMatrix>> right_factors;
    std::vector<double> lambdas;
    ComplexMatrix result;

    // `prefix` = E_0(i_0) B_1 E_1(i_1) ... B_{slot-1} E_{slot-1}(i_{slot-1})
    void descend(std::size_t slot, const ComplexMatrix& prefix) {
        const std::size_t last = families.size() - 1;
        if (slot == last) {
            // Collapse the final sum into one weighted factor.
            const std::size_t n = prefix.size();
            ComplexMatrix weighted(n);
            const auto& family = families[last];
            for (std::size_t i = 0; i < family.size(); ++i) {
                lambdas[last] = family.distinct_eigenvalues[i];
                const double w = phi(lambdas);
                if (w != 0.0) weighted += right_factors[last][i] * Complex(w, 0.0);
            }
            result += prefix * weighted;
            return;
        }
        const auto& family = families[slot];
        for (std::size_t i = 0; i < family.size(); ++i) {
            lambdas[slot] = family.distinct_eigenvalues[i];
            descend(slot + 1, prefix * right_factors[slot][i]);
        }
    }
};

} // namespace

ComplexMatrix moi_apply(const MultiSymbol& phi, std::span<const ProjectionFamily> families,
                        std::span<const ComplexMatrix> perturbations) {
    if (families.size() != perturbations.size() + 1 || phi.arity() != families.size()) {
        throw Error(ErrorKind::ArityMismatch,
                    "need n+1 operators for n perturbations and a symbol of arity n+1 (got " +
                        std::to_string(families.size()) + " operators, " +
                        std::to_string(perturbations.size()) + " perturbations, arity " +
                        std::to_string(phi.arity()) + ")");
    }
    const std::size_t n = families.front().projections.empty()
                              ? 0
                              : families.front().projections.front().size();
    for (const auto& family : families)
        for (const auto& p : family.projections)
            if (p.size() != n) throw Error(ErrorKind::DimensionMismatch, "operator sizes differ");
    for (const auto& b : perturbations)
        if (b.size() != n) throw Error(ErrorKind::DimensionMismatch, "perturbation size differs");

    if (families.size() == 1) {
        ComplexMatrix out(n);
        std::vector<double> lambda(1);
        for (std::size_t i = 0; i < families[0].size(); ++i) {
            lambda[0] = families[0].distinct_eigenvalues[i];
            out += families[0].projections[i] * Complex(phi(lambda), 0.0);
        }
        return out;
    }

    Accumulator acc{phi, families, {}, std::vector<double>(families.size()), ComplexMatrix(n)};
    acc.right_factors.resize(families.size());
    for (std::size_t k = 1; k < families.size(); ++k)
        for (const auto& e : families[k].projections)
            acc.right_factors[k].push_back(perturbations[k - 1] * e);

    for (std::size_t i = 0; i < families[0].size(); ++i) {
        acc.lambdas[0] = families[0].distinct_eigenvalues[i];
        acc.descend(1, families[0].projections[i]);
    }
    return acc.result;
}

ComplexMatrix moi_apply(const MultiSymbol& phi, std::span<const ComplexMatrix> operators,
                        std::span<const ComplexMatrix> perturbations, double group_tol) {
    if (operators.size() != perturbations.size() + 1 || phi.arity() != operators.size()) {
        throw Error(ErrorKind::ArityMismatch,
                    "need n+1 operators for n perturbations and a symbol of arity n+1");
    }
    for (const auto& a : operators)
        if (a.size() != operators.front().size())
            throw Error(ErrorKind::DimensionMismatch, "operator sizes differ");
    std::vector<ProjectionFamily> families;
    families.reserve(operators.size());
    for (std::size_t k = 0; k < operators.size(); ++k) {
        // Identical operands share one decomposition.
        std::size_t same = k;
        for (std::size_t j = 0; j < k; ++j)
            if (operators[j] == operators[k]) {
                same = j;
                break;
            }
        families.push_back(same == k ? projection_family(operators[k], group_tol) : families[same]);
    }
    return moi_apply(phi, std::span<const ProjectionFamily>(families), perturbations);
}

} // namespace schatten

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "schatten/matrix.hpp"

namespace schatten {

struct BranchTolerances {
    double zero_tol = 1e-8;
    double mu_floor = 1e-6;
    /// Maximum |slope - round(slope)| accepted for a multiplicity.
    double slope_spread = 0.25;
    /// Nearest and farthest grid offsets (in steps from the center) used by
    /// the log-log fit.
    std::size_t fit_inner = 3;
    std::size_t fit_outer = 12;
};

/// Eigenvalue curves of t -> A + tB on a grid symmetric about t_center,
/// matched into index-consistent branches.
struct BranchFamily {
    std::vector<double> t_grid;
    /// branches[k][j] = lambda_k(t_grid[j])
    std::vector<std::vector<double>> branches;
    double t_center = 0.0;
    double half_width = 0.0;
    /// Total deviation from the linear predictions over all matching steps.
    double match_cost = 0.0;
    /// Steps at which a different assignment was within 1e-12 of the chosen one.
    std::size_t ambiguous_steps = 0;

    std::size_t branch_count() const noexcept { return branches.size(); }
    std::size_t center_index() const noexcept { return t_grid.size() / 2; }
    double step() const;

    /// Builds a family from already-sampled curves (synthetic data or
    /// external input). The grid must be odd-sized and symmetric about
    /// its middle node.
    static BranchFamily from_samples(std::vector<double> t_grid, std::vector<std::vector<double>> branches);
};

/// Tracks the eigenvalues of A + tB over `points` equally spaced nodes on
/// [t_center - half_width, t_center + half_width].
///
/// Matching starts at the center, where branches inside a degenerate
/// eigenvalue cluster are ordered by their first-order slopes (eigenvalues of
/// B compressed to the eigenspace), then proceeds outward solving an
/// assignment problem against linear predictions 2 lambda(t_j) - lambda(t_{j-1}).
///
/// Requires odd points >= 11. Throws NotHermitian.
BranchFamily track_branches(const ComplexMatrix& a, const ComplexMatrix& b, double t_center,
                            double half_width, std::size_t points);

/// Largest |sorted branch values - sorted eigenvalues of A + tB| over the grid.
double spectral_consistency_error(const BranchFamily& family, const ComplexMatrix& a,
                                  const ComplexMatrix& b);

/// Order of vanishing of one branch at the center: lambda(t) ~ mu0 (t - t_c)^m.
struct MultiplicityEstimate {
    std::size_t branch_index = 0;
    int m = 0;
    double mu0 = 0.0;
    double slope = 0.0;
    double fit_residual = 0.0;
    double confidence = 0.0;
};

bool is_identically_zero(const BranchFamily& family, std::size_t branch_index,
                         const BranchTolerances& tol = {});

/// Branches that vanish at the center but are not identically zero.
std::vector<std::size_t> vanishing_branches(const BranchFamily& family,
                                            const BranchTolerances& tol = {});

/// Fits log|lambda| against log|t - t_c| on both sides of the center.
///
/// Throws NotVanishing if |lambda(t_c)| >= zero_tol, IllConditioned if the
/// slope is not within slope_spread of a positive integer, the window is too
/// small, or the branch is identically zero.
MultiplicityEstimate estimate_zero_multiplicity(const BranchFamily& family, std::size_t branch_index,
                                                const BranchTolerances& tol = {});

/// Estimates for every vanishing, not identically zero branch.
std::vector<MultiplicityEstimate> estimate_all(const BranchFamily& family,
                                               const BranchTolerances& tol = {});

/// Generalized binomial coefficient rho (rho-1) ... (rho-k+1) / k!.
double binomial_alpha(double rho, int k);

struct SeriesCondition {
    std::string id;
    bool satisfied = false;
    double residual = 0.0;
    std::string detail;
};

/// Necessary conditions for (1 + |t|^q)^{p/q} - 1 to match
/// sum_k |t|^{m_k p} |mu_k(0)|^p up to a differentiable remainder.
struct SeriesConditionReport {
    double q = 0.0;
    double p = 0.0;
    std::vector<double> exponents; // m_k p, in estimate order
    std::vector<double> alphas;    // alpha_1, alpha_2, ...
    std::vector<SeriesCondition> conditions;
    /// alpha_2 < 0 while the branches with m_k p = 2q contribute a positive sum.
    bool sign_obstruction = false;

    const SeriesCondition* find(const std::string& id) const;
};

inline constexpr double kExponentTol = 0.05;
inline constexpr double kCoefficientTol = 1e-2;

/// Evaluates, for the given estimates:
///   exponent_q       every m_k p equals q
///   alpha1_sum       alpha_1 = sum over {m_k p = q} of |mu_k|^p
///   exponent_q_2q    every m_k p lies in {q, 2q}
///   alpha2_sum       alpha_2 = sum over {m_k p = 2q} of |mu_k|^p
///   nonsmooth_matched every exponent <= 1 equals some j q
/// and raises the sign obstruction flag.
SeriesConditionReport series_condition_check(const BranchFamily& family,
                                             const std::vector<MultiplicityEstimate>& estimates,
                                             double q, double p);

/// CSV export: a "# n=..,t_center=..,half_width=..,points=.." line, a column
/// header "t,branch_0,...", then one row per grid node, shortest round-trip decimals.
void write_branches_csv(std::ostream& out, const BranchFamily& family);

} // namespace schatten

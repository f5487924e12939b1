#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace schatten {

struct NelderMeadOptions {
    std::size_t max_evals = 2000;
    /// Edge length of the initial simplex (per coordinate).
    double initial_step = 0.5;
    /// Edge length of simplices rebuilt after a collapse; 0 reuses initial_step.
    double rebuild_step = 0.0;
    /// Simplex is collapsed when the value spread is below f_tol_abs +
    /// f_tol_rel |f_best| and every vertex lies within x_tol of the best.
    double f_tol_abs = 1e-13;
    double f_tol_rel = 1e-10;
    double x_tol = 1e-9;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t evaluations = 0;
    /// A rebuilt simplex around the optimum collapsed without improvement.
    bool converged = false;
};

/// Adaptive Nelder-Mead: reflection 1, expansion 1 + 2/d, contraction
/// 0.75 - 1/(2d), shrink 1 - 1/d. On collapse the simplex is rebuilt around
/// the best vertex; the run counts as converged once a rebuilt simplex
/// collapses again without improving the best value by more than f_tol.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> x0, const NelderMeadOptions& options = {});

} // namespace schatten

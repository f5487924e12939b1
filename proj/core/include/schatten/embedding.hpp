#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "schatten/matrix.hpp"
#include "schatten/nelder_mead.hpp"

namespace schatten {

inline constexpr double kNormTol = 1e-9;
inline constexpr double kDisjointTol = 1e-12;

inline constexpr const char* kFloorBanner =
    "residual floor is a numerical corroboration of non-existence, not a proof";

/// A candidate witness: A diagonal real, B self-adjoint, both of unit
/// p-quasi-norm, tested against ||A + tB||_p = ||(1, t)||_q on t_samples.
struct EmbeddingInstance {
    double q = 0.0; // may be kInfinity
    double p = 0.0;
    ComplexMatrix a;
    ComplexMatrix b;
    std::vector<double> t_samples;

    /// Human-readable invariant violations; empty when the instance is valid.
    std::vector<std::string> violations(double norm_tol = kNormTol) const;
};

struct ResidualSample {
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
};

struct ResidualReport {
    double max_residual = 0.0;
    double residual_at = 0.0;
    std::vector<ResidualSample> per_t;
    std::size_t restarts = 0;
    double best_over_restarts = 0.0;
};

/// {+-0.1, +-0.25, +-0.5, +-1, +-2, +-5}, plus +-10 for q = inf.
std::vector<double> default_t_samples(double q);

/// (1 + |t|^q)^{p/q}, or max(1, |t|)^p for q = inf.
double iqp_rhs(double t, double q, double p);

/// | ||A + tB||_p^p - (1 + |t|^q)^{p/q} | on every sample. Does not enforce
/// the instance invariants (see EmbeddingInstance::violations); A and B
/// only need to be square and of equal size.
ResidualReport iqp_residual(const EmbeddingInstance& inst);

/// True when ||AB||_max <= 1e-12.
bool disjoint_support_check(const ComplexMatrix& a, const ComplexMatrix& b);

/// [[0, 2^{-1/p} A], [2^{-1/p} A^*, 0]] and likewise for B.
std::pair<ComplexMatrix, ComplexMatrix> reduce_to_selfadjoint(const ComplexMatrix& a, const ComplexMatrix& b,
                                                               double p);

/// Simplex settings tuned for the max-residual objective: wide first
/// simplex, frequent rebuilds at step 0.1 after loose collapses.
inline NelderMeadOptions falsifier_simplex_defaults() {
    NelderMeadOptions o;
    o.initial_step = 1.0;
    o.rebuild_step = 0.1;
    o.x_tol = 1e-4;
    o.f_tol_abs = 1e-8;
    return o;
}

struct SearchConfig {
    std::size_t restarts = 50;
    std::size_t max_evals = 2000; // per restart
    std::uint64_t seed = 0;
    /// 0 selects std::thread::hardware_concurrency().
    std::size_t threads = 0;
    /// Empty selects default_t_samples(q).
    std::vector<double> t_samples;
    /// Restart 0 starts from the disjoint-support pair instead of a random point.
    bool seed_disjoint_witness = true;
    /// Simplex settings; max_evals above overrides optimizer.max_evals.
    NelderMeadOptions optimizer = falsifier_simplex_defaults();
};

struct RestartOutcome {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    double floor = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

struct SearchReport {
    double q = 0.0;
    double p = 0.0;
    std::size_t n = 0;
    std::uint64_t master_seed = 0;
    bool commutative = false;
    bool complex_mode = false;
    /// Best restart: residual table plus restart count and floor.
    ResidualReport best;
    /// Matrix mode: best instance. Commutative mode: diag(a), diag(b).
    ComplexMatrix a;
    ComplexMatrix b;
    /// Sorted by (floor, seed).
    std::vector<RestartOutcome> outcomes;
    std::size_t evaluations = 0;
    /// No restart converged before its evaluation budget ran out. The report
    /// still holds the best point found.
    bool budget_exhausted = false;

    double floor() const noexcept { return best.best_over_restarts; }
};

/// Multi-start simplex search for a pair with ||A + tB||_p^p = (1 + |t|^q)^{p/q}
/// among n x n matrices: A = diag(a) real, B self-adjoint, both rescaled to
/// unit p-quasi-norm before each evaluation.
///
/// Requires 0 < p < 1, q > 0 (inf allowed), q != p, n >= 2.
SearchReport falsify(double q, double p, std::size_t n, const SearchConfig& config = {});

/// Same search over vectors: sum_k |a_k + t b_k|^p against (1 + |t|^q)^{p/q},
/// with a, b real or (complex_mode) complex.
SearchReport falsify_commutative(double q, double p, std::size_t n, const SearchConfig& config = {},
                                 bool complex_mode = false);

struct ObstructionReport {
    bool applicable = false;
    std::string reason;
    /// +1 for A > 0, -1 for A < 0.
    int definite_sign = 0;
    double second_derivative = 0.0;
    /// (p/q) lim_{t->0} |t|^{q-2}: 0 for q > 2, p/2 for q = 2, inf for q < 2.
    double limit = 0.0;
    /// Max residual of the identity on default_t_samples(q).
    double identity_residual = 0.0;
    bool identity_holds = false;
    /// Negative second derivative against a nonnegative forced limit.
    bool sign_conflict = false;
    /// sign_conflict while the identity holds within tolerance.
    bool contradiction = false;
};

inline constexpr double kIdentityTol = 1e-6;

/// Second-derivative sign test for semidefinite invertible A.
///
/// Not applicable (reported, not thrown) when A is indefinite or AB = 0.
/// Throws SingularOperand for semidefinite singular A.
ObstructionReport positivity_obstruction_check(const ComplexMatrix& a, const ComplexMatrix& b, double q,
                                               double p);

/// Structured run report (JSON): q ("inf" when infinite), p, n, seed,
/// restarts, floor, banner, best instance matrices, per-t table, restart outcomes.
void write_run_report(std::ostream& out, const SearchReport& report);

/// "q,p,n,seed,floor"
void write_sweep_csv_header(std::ostream& out);
void write_sweep_csv_row(std::ostream& out, const SearchReport& report);

/// Shortest decimal that round-trips, "inf" for infinity.
std::string format_real(double x);

} // namespace schatten

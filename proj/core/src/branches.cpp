#include "schatten/branches.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>

#include "schatten/errors.hpp"
#include "schatten/spectral.hpp"

namespace schatten {

namespace {

constexpr double kTieTol = 1e-12;

// Shortest text that reads back to the same double.
std::string format_shortest(double x) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

// For |x - y| costs on the line, matching sorted predictions to sorted values
// solves the assignment problem exactly. Ties between predictions go to the
// lower branch index. Returns assignment[branch] = index into `sorted_values`.
std::vector<std::size_t> rank_match(const std::vector<double>& predictions,
                                    const std::vector<double>& sorted_values, bool& ambiguous) {
    std::vector<std::size_t> order(predictions.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return predictions[a] < predictions[b]; });
    std::vector<std::size_t> assignment(predictions.size());
    ambiguous = false;
    for (std::size_t r = 0; r < order.size(); ++r) {
        assignment[order[r]] = r;
        if (r > 0 && predictions[order[r]] - predictions[order[r - 1]] <= kTieTol &&
            sorted_values[r] - sorted_values[r - 1] > kTieTol) {
            ambiguous = true;
        }
    }
    return assignment;
}

} // namespace

double BranchFamily::step() const {
    if (t_grid.size() < 2) return 0.0;
    return (t_grid.back() - t_grid.front()) / static_cast<double>(t_grid.size() - 1);
}

BranchFamily BranchFamily::from_samples(std::vector<double> t_grid,
                                        std::vector<std::vector<double>> branches) {
    if (t_grid.size() < 3 || t_grid.size() % 2 == 0) {
        throw Error(ErrorKind::InvalidArgument, "grid must have an odd number (>= 3) of nodes");
    }
    for (const auto& branch : branches)
        if (branch.size() != t_grid.size())
            throw Error(ErrorKind::DimensionMismatch, "branch length differs from grid");
    BranchFamily family;
    family.t_center = t_grid[t_grid.size() / 2];
    family.half_width = 0.5 * (t_grid.back() - t_grid.front());
    family.t_grid = std::move(t_grid);
    family.branches = std::move(branches);
    return family;
}

BranchFamily track_branches(const ComplexMatrix& a, const ComplexMatrix& b, double t_center,
                            double half_width, std::size_t points) {
    if (points < 11 || points % 2 == 0) {
        throw Error(ErrorKind::InvalidArgument, "points must be odd and >= 11");
    }
    if (!(half_width > 0.0)) throw Error(ErrorKind::InvalidArgument, "half_width must be positive");
    if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "A and B differ in size");
    if (!a.is_hermitian()) throw Error(ErrorKind::NotHermitian, "A");
    if (!b.is_hermitian()) throw Error(ErrorKind::NotHermitian, "B");

    const std::size_t n = a.size();
    const std::size_t mid = points / 2;
    BranchFamily family;
    family.t_center = t_center;
    family.half_width = half_width;
    family.t_grid.resize(points);
    for (std::size_t j = 0; j < points; ++j) {
        const double offset = (static_cast<double>(j) - static_cast<double>(mid)) / static_cast<double>(mid);
        family.t_grid[j] = j == mid ? t_center : t_center + half_width * offset;
    }
    family.branches.assign(n, std::vector<double>(points, 0.0));
    if (n == 0) return family;

    // Center: order branches by value, and inside degenerate clusters by the
    // first-order slopes from B compressed to the cluster's eigenspace.
    const auto center = spectral_decompose(a + t_center * b);
    const ComplexMatrix rotated_b = center.eigenvectors.adjoint() * b * center.eigenvectors;
    double scale = 1.0;
    for (double v : center.eigenvalues) scale = std::max(scale, std::abs(v));
    const double cluster_tol = 1e-9 * scale;

    std::vector<double> center_values(n);
    std::vector<double> slopes(n);
    std::size_t start = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        if (k < n && center.eigenvalues[k] - center.eigenvalues[k - 1] <= cluster_tol) continue;
        const std::size_t m = k - start;
        ComplexMatrix block(m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) block(i, j) = rotated_b(start + i, start + j);
        const auto block_slopes = hermitian_eigenvalues(block.hermitian_part());
        for (std::size_t i = 0; i < m; ++i) {
            center_values[start + i] = center.eigenvalues[start + i];
            slopes[start + i] = block_slopes[i];
            if (i > 0 && block_slopes[i] - block_slopes[i - 1] <= kTieTol) ++family.ambiguous_steps;
        }
        start = k;
    }
    for (std::size_t k = 0; k < n; ++k) family.branches[k][mid] = center_values[k];

    const double dt = half_width / static_cast<double>(mid);
    for (int direction : {+1, -1}) {
        for (std::size_t s = 1; s <= mid; ++s) {
            const std::size_t j = direction > 0 ? mid + s : mid - s;
            const std::size_t prev = direction > 0 ? j - 1 : j + 1;
            std::vector<double> predictions(n);
            for (std::size_t k = 0; k < n; ++k) {
                if (s == 1) {
                    predictions[k] = center_values[k] + direction * slopes[k] * dt;
                } else {
                    const std::size_t prev2 = direction > 0 ? prev - 1 : prev + 1;
                    predictions[k] = 2.0 * family.branches[k][prev] - family.branches[k][prev2];
                }
            }
            const auto values = hermitian_eigenvalues(a + family.t_grid[j] * b);
            bool ambiguous = false;
            const auto assignment = rank_match(predictions, values, ambiguous);
            if (ambiguous) ++family.ambiguous_steps;
            for (std::size_t k = 0; k < n; ++k) {
                const double v = values[assignment[k]];
                family.branches[k][j] = v;
                family.match_cost += std::abs(v - predictions[k]);
            }
        }
    }
    return family;
}

double spectral_consistency_error(const BranchFamily& family, const ComplexMatrix& a,
                                  const ComplexMatrix& b) {
    double worst = 0.0;
    for (std::size_t j = 0; j < family.t_grid.size(); ++j) {
        const auto values = hermitian_eigenvalues(a + family.t_grid[j] * b);
        std::vector<double> column(family.branch_count());
        for (std::size_t k = 0; k < column.size(); ++k) column[k] = family.branches[k][j];
        std::sort(column.begin(), column.end());
        for (std::size_t k = 0; k < column.size(); ++k)
            worst = std::max(worst, std::abs(column[k] - values[k]));
    }
    return worst;
}

bool is_identically_zero(const BranchFamily& family, std::size_t branch_index,
                         const BranchTolerances& tol) {
    const auto& branch = family.branches.at(branch_index);
    return std::all_of(branch.begin(), branch.end(),
                       [&](double v) { return std::abs(v) < tol.zero_tol; });
}

std::vector<std::size_t> vanishing_branches(const BranchFamily& family, const BranchTolerances& tol) {
    std::vector<std::size_t> out;
    const std::size_t mid = family.center_index();
    for (std::size_t k = 0; k < family.branch_count(); ++k) {
        if (std::abs(family.branches[k][mid]) < tol.zero_tol && !is_identically_zero(family, k, tol))
            out.push_back(k);
    }
    return out;
}

MultiplicityEstimate estimate_zero_multiplicity(const BranchFamily& family, std::size_t branch_index,
                                                const BranchTolerances& tol) {
    if (branch_index >= family.branch_count()) {
        throw Error(ErrorKind::InvalidArgument, "branch index out of range");
    }
    const auto& branch = family.branches[branch_index];
    const std::size_t mid = family.center_index();
    if (std::abs(branch[mid]) >= tol.zero_tol) {
        throw Error(ErrorKind::NotVanishing, "|lambda(t_c)| = " + format_shortest(std::abs(branch[mid])));
    }
    if (is_identically_zero(family, branch_index, tol)) {
        throw Error(ErrorKind::IllConditioned, "branch is identically zero on the grid");
    }
    const std::size_t outer = std::min(tol.fit_outer, mid);
    if (outer < tol.fit_inner + 2) {
        throw Error(ErrorKind::IllConditioned, "grid too coarse for the fitting window");
    }

    std::vector<double> xs;
    std::vector<double> ys;
    double right_sign = 0.0;
    for (std::size_t s = tol.fit_inner; s <= outer; ++s) {
        for (std::size_t j : {mid + s, mid - s}) {
            const double v = branch[j];
            if (v == 0.0) continue;
            xs.push_back(std::log(std::abs(family.t_grid[j] - family.t_center)));
            ys.push_back(std::log(std::abs(v)));
            if (j > mid && right_sign == 0.0) right_sign = v > 0.0 ? 1.0 : -1.0;
        }
    }
    if (xs.size() < 3 || right_sign == 0.0) {
        throw Error(ErrorKind::IllConditioned, "branch vanishes across the fitting window");
    }

    const double count = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / count;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / count;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;

    MultiplicityEstimate est;
    est.branch_index = branch_index;
    est.slope = slope;
    for (std::size_t i = 0; i < xs.size(); ++i)
        est.fit_residual = std::max(est.fit_residual, std::abs(ys[i] - (slope * xs[i] + intercept)));

    const double rounded = std::round(slope);
    if (rounded < 1.0 || std::abs(slope - rounded) > tol.slope_spread) {
        throw Error(ErrorKind::IllConditioned, "log-log slope " + format_shortest(slope) +
                                                   " is not close to a positive integer");
    }
    est.m = static_cast<int>(rounded);

    // Geometric mean of |lambda| / |t - t_c|^m over the symmetric window;
    // odd-order corrections cancel between the two sides.
    double log_mu = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) log_mu += ys[i] - est.m * xs[i];
    est.mu0 = right_sign * std::exp(log_mu / count);
    est.confidence = std::exp(-est.fit_residual / 0.05);
    if (std::abs(est.mu0) <= tol.mu_floor) est.confidence = 0.0;
    return est;
}

std::vector<MultiplicityEstimate> estimate_all(const BranchFamily& family, const BranchTolerances& tol) {
    std::vector<MultiplicityEstimate> out;
    for (std::size_t k : vanishing_branches(family, tol)) out.push_back(estimate_zero_multiplicity(family, k, tol));
    return out;
}

double binomial_alpha(double rho, int k) {
    if (k < 0) throw Error(ErrorKind::InvalidArgument, "binomial index must be >= 0");
    double alpha = 1.0;
    for (int i = 1; i <= k; ++i) alpha = alpha * (rho - i + 1) / i;
    return alpha;
}

const SeriesCondition* SeriesConditionReport::find(const std::string& id) const {
    for (const auto& c : conditions)
        if (c.id == id) return &c;
    return nullptr;
}

SeriesConditionReport series_condition_check(const BranchFamily& family,
                                             const std::vector<MultiplicityEstimate>& estimates,
                                             double q, double p) {
    if (!(q > 0.0) || std::isinf(q) || !(p > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "series conditions need finite q > 0 and p > 0");
    }
    for (const auto& e : estimates)
        if (e.branch_index >= family.branch_count())
            throw Error(ErrorKind::InvalidArgument, "estimate refers to a missing branch");

    SeriesConditionReport report;
    report.q = q;
    report.p = p;
    const double rho = p / q;
    // Terms alpha_j |t|^{jq} with jq <= 1 are the non-differentiable ones;
    // always keep alpha_1 and alpha_2.
    const int terms = std::max(2, static_cast<int>(std::floor(1.0 / q)) + 1);
    for (int j = 1; j <= std::min(terms, 64); ++j) report.alphas.push_back(binomial_alpha(rho, j));

    double sum_q = 0.0;
    double sum_2q = 0.0;
    bool any_2q = false;
    double worst_q = 0.0;
    double worst_q2q = 0.0;
    double worst_nonsmooth = 0.0;
    bool nonsmooth_ok = true;
    for (const auto& e : estimates) {
        const double x = e.m * p;
        report.exponents.push_back(x);
        const double weight = std::pow(std::abs(e.mu0), p);
        const double dq = std::abs(x - q);
        const double d2q = std::abs(x - 2.0 * q);
        worst_q = std::max(worst_q, dq);
        worst_q2q = std::max(worst_q2q, std::min(dq, d2q));
        if (dq <= kExponentTol) sum_q += weight;
        if (d2q <= kExponentTol) {
            sum_2q += weight;
            any_2q = true;
        }
        if (x <= 1.0 + kExponentTol) {
            const double j = std::max(1.0, std::round(x / q));
            const double gap = std::abs(x - j * q);
            worst_nonsmooth = std::max(worst_nonsmooth, gap);
            if (gap > kExponentTol) nonsmooth_ok = false;
        }
    }
    const bool have = !estimates.empty();
    const double alpha1 = report.alphas[0];
    const double alpha2 = report.alphas[1];

    auto add = [&](std::string id, bool ok, double residual, std::string detail) {
        report.conditions.push_back({std::move(id), ok, residual, std::move(detail)});
    };
    add("exponent_q", have && worst_q <= kExponentTol, worst_q, "max |m_k p - q|");
    add("alpha1_sum", std::abs(alpha1 - sum_q) <= kCoefficientTol, std::abs(alpha1 - sum_q),
        "|alpha_1 - sum_{m_k p = q} |mu_k|^p|");
    add("exponent_q_2q", have && worst_q2q <= kExponentTol, worst_q2q, "max dist(m_k p, {q, 2q})");
    add("alpha2_sum", std::abs(alpha2 - sum_2q) <= kCoefficientTol, std::abs(alpha2 - sum_2q),
        "|alpha_2 - sum_{m_k p = 2q} |mu_k|^p|");
    add("nonsmooth_matched", nonsmooth_ok, worst_nonsmooth, "exponents <= 1 must be multiples of q");
    report.sign_obstruction = alpha2 < 0.0 && any_2q && sum_2q > 0.0;
    return report;
}

void write_branches_csv(std::ostream& out, const BranchFamily& family) {
    out << "# n=" << family.branch_count() << ",t_center=" << format_shortest(family.t_center)
        << ",half_width=" << format_shortest(family.half_width) << ",points=" << family.t_grid.size() << '\n';
    out << 't';
    for (std::size_t k = 0; k < family.branch_count(); ++k) out << ",branch_" << k;
    out << '\n';
    for (std::size_t j = 0; j < family.t_grid.size(); ++j) {
        out << format_shortest(family.t_grid[j]);
        for (const auto& branch : family.branches) out << ',' << format_shortest(branch[j]);
        out << '\n';
    }
}

} // namespace schatten

#include "schatten/embedding.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include <json.hpp>

#include "schatten/derivatives.hpp"
#include "schatten/errors.hpp"
#include "schatten/nelder_mead.hpp"
#include "schatten/spectral.hpp"

namespace schatten {

std::string format_real(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::vector<std::string> EmbeddingInstance::violations(double norm_tol) const {
    std::vector<std::string> out;
    if (!(p > 0.0 && p < 1.0)) out.emplace_back("p must lie in (0, 1)");
    if (!(q > 0.0)) out.emplace_back("q must be positive");
    if (a.size() != b.size() || a.empty()) {
        out.emplace_back("A and B must be nonempty and of equal size");
        return out;
    }
    if (!a.is_diagonal()) out.emplace_back("A is not diagonal");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a(i, i).imag() != 0.0) {
            out.emplace_back("A has a non-real diagonal entry");
            break;
        }
    if (!b.is_hermitian()) out.emplace_back("B is not self-adjoint");
    if (p > 0.0) {
        if (std::abs(schatten_norm(a, p) - 1.0) > norm_tol) out.emplace_back("||A||_p != 1");
        if (std::abs(schatten_norm(b, p) - 1.0) > norm_tol) out.emplace_back("||B||_p != 1");
    }
    return out;
}

std::vector<double> default_t_samples(double q) {
    std::vector<double> base{0.1, 0.25, 0.5, 1.0, 2.0, 5.0};
    if (std::isinf(q)) base.push_back(10.0);
    std::vector<double> out;
    for (auto it = base.rbegin(); it != base.rend(); ++it) out.push_back(-*it);
    out.insert(out.end(), base.begin(), base.end());
    return out;
}

double iqp_rhs(double t, double q, double p) {
    const double at = std::abs(t);
    if (std::isinf(q)) return std::pow(std::max(1.0, at), p);
    return std::pow(1.0 + std::pow(at, q), p / q);
}

namespace {

ResidualReport tabulate(const std::vector<double>& ts, const std::function<double(double)>& lhs_at, double q,
                        double p) {
    ResidualReport r;
    for (double t : ts) {
        ResidualSample s;
        s.t = t;
        s.lhs = lhs_at(t);
        s.rhs = iqp_rhs(t, q, p);
        s.residual = std::abs(s.lhs - s.rhs);
        if (r.per_t.empty() || s.residual > r.max_residual) {
            r.max_residual = s.residual;
            r.residual_at = t;
        }
        r.per_t.push_back(s);
    }
    r.restarts = 1;
    r.best_over_restarts = r.max_residual;
    return r;
}

double pow_sum_abs(const std::vector<double>& values, double p) {
    double s = 0.0;
    for (double v : values) {
        const double a = std::abs(v);
        if (a > 0.0) s += std::pow(a, p);
    }
    return s;
}

} // namespace

ResidualReport iqp_residual(const EmbeddingInstance& inst) {
    if (inst.a.size() != inst.b.size()) throw Error(ErrorKind::DimensionMismatch, "A and B differ in size");
    const auto ts = inst.t_samples.empty() ? default_t_samples(inst.q) : inst.t_samples;
    return tabulate(
        ts, [&](double t) { return schatten_norm_pow(inst.a + t * inst.b, inst.p); }, inst.q, inst.p);
}

bool disjoint_support_check(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a * b).max_abs() <= kDisjointTol;
}

std::pair<ComplexMatrix, ComplexMatrix> reduce_to_selfadjoint(const ComplexMatrix& a, const ComplexMatrix& b,
                                                               double p) {
    if (!(p > 0.0)) throw Error(ErrorKind::InvalidArgument, "p must be positive");
    if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "A and B differ in size");
    const double c = std::pow(2.0, -1.0 / p);
    const std::size_t n = a.size();
    auto lift = [&](const ComplexMatrix& m) {
        ComplexMatrix out(2 * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                out(i, n + j) = c * m(i, j);
                out(n + i, j) = c * std::conj(m(j, i));
            }
        return out;
    };
    return {lift(a), lift(b)};
}

namespace {

// Large but finite so the simplex can still rank degenerate points.
constexpr double kDegeneratePenalty = 1e3;

void require_search_args(double q, double p, std::size_t n, const SearchConfig& config) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidArgument, "falsifier needs 0 < p < 1");
    if (!(q > 0.0)) throw Error(ErrorKind::InvalidArgument, "q must be positive (inf allowed)");
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "n must be at least 2");
    if (config.restarts == 0) throw Error(ErrorKind::InvalidArgument, "need at least one restart");
}

// A search problem: parameter count, objective, decoder to a residual table
// and an (A, B) pair, and the disjoint-support starting point.
struct Problem {
    std::size_t dim = 0;
    std::function<double(std::span<const double>)> objective;
    std::function<std::pair<ComplexMatrix, ComplexMatrix>(std::span<const double>)> decode;
    std::vector<double> witness;
};

double rhs_max_residual(const std::vector<double>& ts, const std::vector<double>& rhs,
                        const std::function<double(double)>& lhs_at) {
    double worst = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) worst = std::max(worst, std::abs(lhs_at(ts[i]) - rhs[i]));
    return worst;
}

// Two charts for the same coordinates. The raw chart uses a parameter as
// is; the power chart maps z to z |z|^{1/p - 1}, so |z|^p becomes |theta| and
// loses its cusp at zero. Restarts alternate between them.
enum class Chart { Power, Raw };
inline constexpr std::array<Chart, 2> kCharts{Chart::Power, Chart::Raw};

Complex chart_map(Complex z, double p, Chart chart) {
    if (chart == Chart::Raw) return z;
    return z * std::pow(std::abs(z), 1.0 / p - 1.0);
}

// Layout: diag(A) (n), diag(B) (n), Re B_ij for i<j, Im B_ij for i<j. Only
// diag(A) goes through the chart.
std::pair<std::vector<double>, ComplexMatrix> unpack_matrix(std::span<const double> x, std::size_t n, double p,
                                                            Chart chart) {
    std::vector<double> a(n);
    for (std::size_t k = 0; k < n; ++k) a[k] = chart_map(x[k], p, chart).real();
    ComplexMatrix b(n);
    for (std::size_t i = 0; i < n; ++i) b(i, i) = x[n + i];
    const std::size_t pairs = n * (n - 1) / 2;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j, ++k) {
            const Complex z(x[2 * n + k], x[2 * n + pairs + k]);
            b(i, j) = z;
            b(j, i) = std::conj(z);
        }
    return {std::move(a), std::move(b)};
}

// Rescales to unit p-norm; false when either operand vanishes.
bool normalize(std::vector<double>& a, ComplexMatrix& b, double p) {
    const double na = std::pow(pow_sum_abs(a, p), 1.0 / p);
    const double nb = std::pow(pow_sum_abs(hermitian_eigenvalues(b), p), 1.0 / p);
    if (!(na > 0.0) || !(nb > 0.0) || !std::isfinite(na) || !std::isfinite(nb)) return false;
    for (double& v : a) v /= na;
    b *= Complex(1.0 / nb, 0.0);
    return true;
}

Problem matrix_problem(double q, double p, std::size_t n, const std::vector<double>& ts, Chart chart) {
    Problem prob;
    prob.dim = n + n * n;
    std::vector<double> rhs;
    for (double t : ts) rhs.push_back(iqp_rhs(t, q, p));
    prob.objective = [=](std::span<const double> x) {
        auto [a, b] = unpack_matrix(x, n, p, chart);
        if (!normalize(a, b, p)) return kDegeneratePenalty;
        const ComplexMatrix da = ComplexMatrix::diagonal(a);
        return rhs_max_residual(ts, rhs, [&](double t) { return pow_sum_abs(hermitian_eigenvalues(da + t * b), p); });
    };
    prob.decode = [=](std::span<const double> x) {
        auto [a, b] = unpack_matrix(x, n, p, chart);
        normalize(a, b, p);
        return std::make_pair(ComplexMatrix::diagonal(a), b);
    };
    prob.witness.assign(prob.dim, 0.0);
    prob.witness[0] = 1.0;
    prob.witness[n + 1] = 1.0;
    return prob;
}

// Layout: a (n), b (n); complex mode appends Im a (n), Im b (n).
std::pair<std::vector<Complex>, std::vector<Complex>> unpack_vectors(std::span<const double> x, std::size_t n,
                                                                     bool complex_mode, double p, Chart chart) {
    std::vector<Complex> a(n), b(n);
    for (std::size_t k = 0; k < n; ++k) {
        a[k] = chart_map({x[k], complex_mode ? x[2 * n + k] : 0.0}, p, chart);
        b[k] = chart_map({x[n + k], complex_mode ? x[3 * n + k] : 0.0}, p, chart);
    }
    return {std::move(a), std::move(b)};
}

bool normalize(std::vector<Complex>& v, double p) {
    double s = 0.0;
    for (const Complex& z : v) {
        const double m = std::abs(z);
        if (m > 0.0) s += std::pow(m, p);
    }
    const double norm = std::pow(s, 1.0 / p);
    if (!(norm > 0.0) || !std::isfinite(norm)) return false;
    for (Complex& z : v) z /= norm;
    return true;
}

ComplexMatrix diag_of(const std::vector<Complex>& v) {
    ComplexMatrix m(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) m(k, k) = v[k];
    return m;
}

Problem vector_problem(double q, double p, std::size_t n, const std::vector<double>& ts, bool complex_mode,
                       Chart chart) {
    Problem prob;
    prob.dim = complex_mode ? 4 * n : 2 * n;
    std::vector<double> rhs;
    for (double t : ts) rhs.push_back(iqp_rhs(t, q, p));
    prob.objective = [=](std::span<const double> x) {
        auto [a, b] = unpack_vectors(x, n, complex_mode, p, chart);
        if (!normalize(a, p) || !normalize(b, p)) return kDegeneratePenalty;
        return rhs_max_residual(ts, rhs, [&](double t) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double m = std::abs(a[k] + t * b[k]);
                if (m > 0.0) s += std::pow(m, p);
            }
            return s;
        });
    };
    prob.decode = [=](std::span<const double> x) {
        auto [a, b] = unpack_vectors(x, n, complex_mode, p, chart);
        normalize(a, p);
        normalize(b, p);
        return std::make_pair(diag_of(a), diag_of(b));
    };
    prob.witness.assign(prob.dim, 0.0);
    prob.witness[0] = 1.0;
    prob.witness[n + 1] = 1.0;
    return prob;
}

struct RestartRun {
    RestartOutcome outcome;
    std::size_t chart = 0;
    std::vector<double> x;
};

std::uint64_t derive_seed(std::uint64_t master, std::size_t counter) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32)};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

RestartRun run_restart(const std::vector<Problem>& charts, const SearchConfig& config, std::size_t index) {
    RestartRun run;
    run.chart = index % charts.size();
    const Problem& prob = charts[run.chart];
    run.outcome.index = index;
    run.outcome.seed = derive_seed(config.seed, index);
    std::vector<double> x0(prob.dim);
    if (index == 0 && config.seed_disjoint_witness) {
        x0 = prob.witness;
    } else {
        std::mt19937_64 rng(run.outcome.seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (double& v : x0) v = normal(rng);
    }
    NelderMeadOptions opt = config.optimizer;
    opt.max_evals = config.max_evals;
    const auto res = nelder_mead(prob.objective, std::move(x0), opt);
    run.outcome.floor = res.value;
    run.outcome.evaluations = res.evaluations;
    run.outcome.converged = res.converged;
    run.x = res.x;
    return run;
}

SearchReport search(const std::vector<Problem>& charts, double q, double p, std::size_t n, const SearchConfig& config,
                    const std::vector<double>& ts) {
    std::vector<RestartRun> runs(config.restarts);
    std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, config.restarts);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < runs.size(); i = next++) {
            try {
                runs[i] = run_restart(charts, config, i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::stable_sort(runs.begin(), runs.end(), [](const RestartRun& l, const RestartRun& r) {
        if (l.outcome.floor != r.outcome.floor) return l.outcome.floor < r.outcome.floor;
        return l.outcome.seed < r.outcome.seed;
    });

    SearchReport report;
    report.q = q;
    report.p = p;
    report.n = n;
    report.master_seed = config.seed;
    bool any_converged = false;
    for (const auto& r : runs) {
        report.outcomes.push_back(r.outcome);
        report.evaluations += r.outcome.evaluations;
        any_converged = any_converged || r.outcome.converged;
    }
    report.budget_exhausted = !any_converged;

    auto [a, b] = charts[runs.front().chart].decode(runs.front().x);
    report.a = std::move(a);
    report.b = std::move(b);
    report.best = tabulate(
        ts, [&](double t) { return schatten_norm_pow(report.a + t * report.b, p); }, q, p);
    report.best.restarts = config.restarts;
    report.best.best_over_restarts = report.best.max_residual;
    return report;
}

} // namespace

SearchReport falsify(double q, double p, std::size_t n, const SearchConfig& config) {
    require_search_args(q, p, n, config);
    const auto ts = config.t_samples.empty() ? default_t_samples(q) : config.t_samples;
    std::vector<Problem> charts;
    for (Chart c : kCharts) charts.push_back(matrix_problem(q, p, n, ts, c));
    return search(charts, q, p, n, config, ts);
}

SearchReport falsify_commutative(double q, double p, std::size_t n, const SearchConfig& config,
                                 bool complex_mode) {
    require_search_args(q, p, n, config);
    const auto ts = config.t_samples.empty() ? default_t_samples(q) : config.t_samples;
    std::vector<Problem> charts;
    for (Chart c : kCharts) charts.push_back(vector_problem(q, p, n, ts, complex_mode, c));
    auto report = search(charts, q, p, n, config, ts);
    report.commutative = true;
    report.complex_mode = complex_mode;
    return report;
}

ObstructionReport positivity_obstruction_check(const ComplexMatrix& a, const ComplexMatrix& b, double q,
                                               double p) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidArgument, "needs 0 < p < 1");
    if (!(q > 0.0)) throw Error(ErrorKind::InvalidArgument, "q must be positive");
    if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "A and B differ in size");
    if (!a.is_hermitian()) throw Error(ErrorKind::NotHermitian, "operand A");
    if (!b.is_hermitian()) throw Error(ErrorKind::NotHermitian, "perturbation B");

    ObstructionReport r;
    if (disjoint_support_check(a, b)) {
        r.reason = "AB = 0: excluded by the AB != 0 necessity gate";
        return r;
    }
    const auto eig = hermitian_eigenvalues(a);
    const double floor = DerivativeTolerances{}.sing_rel * a.max_abs();
    const bool nonneg = eig.front() >= -floor;
    const bool nonpos = eig.back() <= floor;
    if (!nonneg && !nonpos) {
        r.reason = "A is indefinite: check not applicable";
        return r;
    }
    double smallest = kInfinity;
    for (double v : eig) smallest = std::min(smallest, std::abs(v));
    if (!(smallest > floor)) throw Error(ErrorKind::SingularOperand, "A is semidefinite but singular");

    r.applicable = true;
    r.definite_sign = nonneg ? 1 : -1;
    r.second_derivative = schatten_second_derivative(a, b, p);
    if (std::isinf(q) || q > 2.0)
        r.limit = 0.0;
    else if (q == 2.0)
        r.limit = p / 2.0;
    else
        r.limit = kInfinity;
    EmbeddingInstance inst{q, p, a, b, default_t_samples(q)};
    r.identity_residual = iqp_residual(inst).max_residual;
    r.identity_holds = r.identity_residual <= kIdentityTol;
    r.sign_conflict = r.second_derivative < 0.0 && r.limit >= 0.0;
    r.contradiction = r.sign_conflict && r.identity_holds;
    if (r.contradiction)
        r.reason = "identity forces a nonnegative limit against a negative second derivative";
    else if (r.sign_conflict)
        r.reason = "no contradiction: identity does not hold on the samples";
    else
        r.reason = "second derivative is not negative";
    return r;
}

namespace {

nlohmann::json real_json(double x) {
    if (std::isinf(x)) return format_real(x);
    return x;
}

nlohmann::json matrix_json(const ComplexMatrix& m) {
    nlohmann::json entries = nlohmann::json::array();
    for (const Complex& z : m.entries()) entries.push_back({z.real(), z.imag()});
    return {{"n", m.size()}, {"entries", std::move(entries)}};
}

} // namespace

void write_run_report(std::ostream& out, const SearchReport& report) {
    nlohmann::ordered_json doc;
    doc["banner"] = kFloorBanner;
    doc["mode"] = report.commutative ? (report.complex_mode ? "commutative-complex" : "commutative-real")
                                     : "matrix";
    doc["q"] = real_json(report.q);
    doc["p"] = report.p;
    doc["n"] = report.n;
    doc["seed"] = report.master_seed;
    doc["restarts"] = report.best.restarts;
    doc["floor"] = report.floor();
    doc["residual_at"] = report.best.residual_at;
    doc["evaluations"] = report.evaluations;
    doc["budget_exhausted"] = report.budget_exhausted;
    doc["parameterization"] = report.commutative ? "vectors a, b rescaled to unit p-norm"
                                                 : "A diagonal real, B self-adjoint, both rescaled to unit p-norm";
    doc["best_instance"] = {{"A", matrix_json(report.a)}, {"B", matrix_json(report.b)}};
    auto table = nlohmann::ordered_json::array();
    for (const auto& s : report.best.per_t)
        table.push_back({{"t", s.t}, {"lhs", s.lhs}, {"rhs", s.rhs}, {"residual", s.residual}});
    doc["per_t"] = std::move(table);
    auto outcomes = nlohmann::ordered_json::array();
    for (const auto& o : report.outcomes)
        outcomes.push_back({{"restart", o.index},
                            {"seed", o.seed},
                            {"floor", o.floor},
                            {"evaluations", o.evaluations},
                            {"converged", o.converged}});
    doc["restart_outcomes"] = std::move(outcomes);
    out << doc.dump(2) << '\n';
}

void write_sweep_csv_header(std::ostream& out) { out << "q,p,n,seed,floor\n"; }

void write_sweep_csv_row(std::ostream& out, const SearchReport& report) {
    out << format_real(report.q) << ',' << format_real(report.p) << ',' << report.n << ',' << report.master_seed
        << ',' << format_real(report.floor()) << '\n';
}

} // namespace schatten

#include "schatten/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "schatten/errors.hpp"

namespace schatten {

namespace {

class BudgetedObjective {
public:
    BudgetedObjective(const std::function<double(std::span<const double>)>& f, std::size_t budget)
        : f_(f), budget_(budget) {}

    bool exhausted() const noexcept { return used_ >= budget_; }
    std::size_t used() const noexcept { return used_; }

    double operator()(const std::vector<double>& x) {
        ++used_;
        const double v = f_(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    }

private:
    const std::function<double(std::span<const double>)>& f_;
    std::size_t budget_;
    std::size_t used_ = 0;
};

struct Simplex {
    std::vector<std::vector<double>> x;
    std::vector<double> f;

    void sort() {
        std::vector<std::size_t> order(f.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
        std::vector<std::vector<double>> xs;
        std::vector<double> fs;
        for (std::size_t i : order) {
            xs.push_back(std::move(x[i]));
            fs.push_back(f[i]);
        }
        x = std::move(xs);
        f = std::move(fs);
    }
};

std::vector<double> affine(const std::vector<double>& base, const std::vector<double>& toward, double scale) {
    std::vector<double> out(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) out[i] = base[i] + scale * (toward[i] - base[i]);
    return out;
}

bool collapsed(const Simplex& s, const NelderMeadOptions& opt) {
    const double spread = s.f.back() - s.f.front();
    if (!(spread <= opt.f_tol_abs + opt.f_tol_rel * std::abs(s.f.front()))) return false;
    for (std::size_t v = 1; v < s.x.size(); ++v)
        for (std::size_t i = 0; i < s.x[v].size(); ++i)
            if (std::abs(s.x[v][i] - s.x[0][i]) > opt.x_tol * (1.0 + std::abs(s.x[0][i]))) return false;
    return true;
}

// Runs until the simplex collapses or the budget ends. Returns true on collapse.
bool run_simplex(Simplex& s, BudgetedObjective& f, const NelderMeadOptions& opt) {
    const std::size_t d = s.x.front().size();
    const double dd = static_cast<double>(d);
    const double reflect = 1.0;
    const double expand = 1.0 + 2.0 / dd;
    const double contract = 0.75 - 1.0 / (2.0 * dd);
    const double shrink = d > 1 ? 1.0 - 1.0 / dd : 0.5;

    s.sort();
    while (!f.exhausted()) {
        if (collapsed(s, opt)) return true;
        std::vector<double> centroid(d, 0.0);
        for (std::size_t v = 0; v < d; ++v)
            for (std::size_t i = 0; i < d; ++i) centroid[i] += s.x[v][i] / dd;

        const auto xr = affine(centroid, s.x[d], -reflect);
        const double fr = f(xr);
        if (fr < s.f[0]) {
            const auto xe = affine(centroid, s.x[d], -expand);
            const double fe = f.exhausted() ? fr + 1.0 : f(xe);
            if (fe < fr) {
                s.x[d] = xe;
                s.f[d] = fe;
            } else {
                s.x[d] = xr;
                s.f[d] = fr;
            }
        } else if (fr < s.f[d - 1]) {
            s.x[d] = xr;
            s.f[d] = fr;
        } else {
            const bool outside = fr < s.f[d];
            const auto xc = outside ? affine(centroid, s.x[d], -contract) : affine(centroid, s.x[d], contract);
            const double fc = f(xc);
            if (fc < (outside ? fr : s.f[d])) {
                s.x[d] = xc;
                s.f[d] = fc;
            } else {
                for (std::size_t v = 1; v <= d && !f.exhausted(); ++v) {
                    s.x[v] = affine(s.x[0], s.x[v], shrink);
                    s.f[v] = f(s.x[v]);
                }
            }
        }
        s.sort();
    }
    return collapsed(s, opt);
}

Simplex build_simplex(const std::vector<double>& center, double center_value, double step,
                      BudgetedObjective& f) {
    Simplex s;
    s.x.push_back(center);
    s.f.push_back(center_value);
    for (std::size_t i = 0; i < center.size() && !f.exhausted(); ++i) {
        auto x = center;
        x[i] += step;
        s.f.push_back(f(x));
        s.x.push_back(std::move(x));
    }
    while (s.x.size() < center.size() + 1) {
        // Budget ran out while building; pad with copies of the center.
        s.x.push_back(center);
        s.f.push_back(center_value);
    }
    return s;
}

} // namespace

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> x0, const NelderMeadOptions& options) {
    if (x0.empty()) throw Error(ErrorKind::InvalidArgument, "Nelder-Mead needs at least one parameter");
    if (options.max_evals < x0.size() + 2) throw Error(ErrorKind::InvalidArgument, "evaluation budget too small");

    BudgetedObjective f(objective, options.max_evals);
    NelderMeadResult result;
    result.x = x0;
    result.value = f(x0);

    double previous_best = result.value;
    bool first_round = true;
    while (!f.exhausted()) {
        const double step = first_round || options.rebuild_step <= 0.0 ? options.initial_step : options.rebuild_step;
        Simplex s = build_simplex(result.x, result.value, step, f);
        const bool collapse = run_simplex(s, f, options);
        if (s.f.front() < result.value) {
            result.x = s.x.front();
            result.value = s.f.front();
        }
        if (!collapse) break;
        const double gain = previous_best - result.value;
        if (!first_round && gain <= options.f_tol_abs + options.f_tol_rel * std::abs(result.value)) {
            result.converged = true;
            break;
        }
        first_round = false;
        previous_best = result.value;
    }
    result.evaluations = f.used();
    return result;
}

} // namespace schatten

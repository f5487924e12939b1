#include "schatten/divided_difference.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>

#include "schatten/errors.hpp"

namespace schatten {

namespace {

// Windows narrower than this (relative to max(1, |center|)) are also tried
// through a Taylor expansion, where the quotient recursion loses digits.
constexpr double kTaylorSpread = 0.5;
constexpr int kTaylorExtraTerms = 40;

// sum_{k >= w} f^(k)(c) / k! h_{k-w}(x_i - c, ..., x_j - c), with h_m the
// complete homogeneous symmetric polynomial. Empty when the series has not
// settled within the available derivative orders.
std::optional<double> taylor_window(const ScalarSymbol& f, std::span<const double> x) {
    const int w = static_cast<int>(x.size()) - 1;
    const double c = 0.5 * (x.front() + x.back());
    const int last = std::min(f.max_order(), w + kTaylorExtraTerms);
    if (last < w) return std::nullopt;
    const int terms = last - w + 1;

    std::vector<double> h(static_cast<std::size_t>(terms), 0.0);
    h[0] = 1.0;
    for (double xi : x)
        for (int m = 1; m < terms; ++m) h[static_cast<std::size_t>(m)] += (xi - c) * h[static_cast<std::size_t>(m - 1)];

    double sum = 0.0, inv_factorial = 1.0;
    for (int k = 1; k <= w; ++k) inv_factorial /= k;
    int quiet = 0;
    for (int m = 0; m < terms; ++m) {
        const int k = w + m;
        if (m > 0) inv_factorial /= k;
        const double term = f.eval(k, c) * inv_factorial * h[static_cast<std::size_t>(m)];
        sum += term;
        quiet = std::abs(term) <= 1e-17 * std::abs(sum) ? quiet + 1 : 0;
        if (quiet == 2) return sum;
    }
    return std::nullopt;
}

} // namespace

std::vector<double> NodeList::canonical() const {
    if (nodes.empty()) throw Error(ErrorKind::InvalidArgument, "divided difference needs a node");
    if (group_tol < 0.0) throw Error(ErrorKind::InvalidArgument, "group_tol must be >= 0");
    std::vector<double> sorted = nodes;
    std::sort(sorted.begin(), sorted.end());

    std::size_t start = 0;
    for (std::size_t k = 1; k <= sorted.size(); ++k) {
        const bool split = k == sorted.size() || sorted[k] - sorted[k - 1] > group_tol;
        if (!split) continue;
        if (k - start > 1) {
            double mean = 0.0;
            for (std::size_t i = start; i < k; ++i) mean += sorted[i];
            mean /= static_cast<double>(k - start);
            std::fill(sorted.begin() + static_cast<std::ptrdiff_t>(start),
                      sorted.begin() + static_cast<std::ptrdiff_t>(k), mean);
        }
        start = k;
    }
    return sorted;
}

DividedDifferenceTable::DividedDifferenceTable(const ScalarSymbol& f, const NodeList& nodes)
    : nodes_(nodes.canonical()) {
    const std::size_t m = nodes_.size();
    table_.assign(m * m, 0.0);
    std::vector<double> factorial(m, 1.0);
    for (std::size_t k = 1; k < m; ++k) factorial[k] = factorial[k - 1] * static_cast<double>(k);

    for (std::size_t i = 0; i < m; ++i) table_[i * m + i] = f.eval(0, nodes_[i]);
    for (std::size_t width = 1; width < m; ++width) {
        for (std::size_t i = 0; i + width < m; ++i) {
            const std::size_t j = i + width;
            double value;
            if (nodes_[j] == nodes_[i]) {
                // Sorted nodes: equal endpoints mean the whole window repeats.
                value = f.eval(static_cast<int>(width), nodes_[i]) / factorial[width];
            } else {
                value = (table_[(i + 1) * m + j] - table_[i * m + (j - 1)]) / (nodes_[j] - nodes_[i]);
                const double c = 0.5 * (nodes_[i] + nodes_[j]);
                if (nodes_[j] - nodes_[i] <= kTaylorSpread * std::max(1.0, std::abs(c)) &&
                    f.in_domain(c)) {
                    const std::span<const double> window(nodes_.data() + i, width + 1);
                    if (const auto t = taylor_window(f, window)) value = *t;
                }
            }
            table_[i * m + j] = value;
        }
    }
}

double DividedDifferenceTable::at(std::size_t i, std::size_t j) const {
    if (i > j || j >= nodes_.size()) throw Error(ErrorKind::InvalidArgument, "table index out of range");
    return table_[i * nodes_.size() + j];
}

double divided_difference(const ScalarSymbol& f, const NodeList& nodes) {
    return DividedDifferenceTable(f, nodes).top();
}

double divided_difference(const ScalarSymbol& f, std::span<const double> nodes, double group_tol) {
    return divided_difference(f, NodeList{{nodes.begin(), nodes.end()}, group_tol});
}

DividedDifferenceTable confluent_table(const ScalarSymbol& f, const NodeList& nodes) {
    return DividedDifferenceTable(f, nodes);
}

} // namespace schatten

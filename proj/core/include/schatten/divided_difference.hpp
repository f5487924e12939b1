#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "schatten/scalar_symbol.hpp"

namespace schatten {

inline constexpr double kDefaultGroupTol = 1e-9;

/// Interpolation nodes. Nodes closer than group_tol (chained through sorted
/// neighbours) are treated as one repeated node and snapped to their mean.
struct NodeList {
    std::vector<double> nodes;
    double group_tol = kDefaultGroupTol;

    /// Sorted, snapped copy of the nodes.
    std::vector<double> canonical() const;
};

/// Triangular table of divided differences over consecutive windows of the
/// canonical (sorted, snapped) nodes: at(i, j) = f^[j-i](x_i, ..., x_j).
class DividedDifferenceTable {
public:
    DividedDifferenceTable(const ScalarSymbol& f, const NodeList& nodes);

    std::size_t order() const noexcept { return nodes_.size() - 1; }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    double at(std::size_t i, std::size_t j) const;
    /// f^[r] over all nodes.
    double top() const { return at(0, order()); }

private:
    std::vector<double> nodes_;
    std::vector<double> table_; // row-major upper triangle in an (r+1)x(r+1) block
};

/// f^[r](x_0, ..., x_r). Repeated nodes use f^(k)(x)/k! for a block of k+1
/// equal nodes; otherwise the quotient recursion
/// (f[x_{i+1}..x_j] - f[x_i..x_{j-1}]) / (x_j - x_i).
/// Narrow windows of distinct nodes use a Taylor expansion about the window
/// midpoint instead whenever the available derivatives make it converge.
///
/// Throws OrderTooLow when a repeated block needs a derivative beyond
/// f.max_order(), DomainError for nodes outside f's domain.
double divided_difference(const ScalarSymbol& f, const NodeList& nodes);
double divided_difference(const ScalarSymbol& f, std::span<const double> nodes,
                          double group_tol = kDefaultGroupTol);

DividedDifferenceTable confluent_table(const ScalarSymbol& f, const NodeList& nodes);

} // namespace schatten

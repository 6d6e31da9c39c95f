#pragma once

#include <cstddef>
#include <vector>

namespace ppthin {

/// Minimum total cost over perfect matchings of an n x n cost matrix
/// (row-major), solved exactly by the shortest-augmenting-path method with
/// potentials in O(n^3).
double min_cost_assignment(const std::vector<double>& cost, std::size_t n);

/// Same, also returning the matched column for each row.
double min_cost_assignment(const std::vector<double>& cost, std::size_t n,
                           std::vector<std::size_t>& row_to_col);

}  // namespace ppthin

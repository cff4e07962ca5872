#pragma once

#include <vector>

#include "multiaspect/matrix.hpp"

namespace multiaspect {

/// A row -> column bijection and its summed weight.
struct Cover {
  std::vector<int> assignment;  // assignment[row] = column
  double value = 0.0;
};

/// Maximum-weight perfect matching on a square matrix (Kuhn-Munkres with
/// potentials, O(n³)). Among optimal covers the lexicographically smallest
/// assignment vector is returned. Throws std::invalid_argument if the matrix
/// is not square or has non-finite entries.
Cover kuhn_munkres(const Matrix& weights);

}  // namespace multiaspect

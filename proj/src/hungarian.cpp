#include "multiaspect/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace multiaspect {

namespace {

// Minimum-cost assignment with row/column potentials. On return
// cost(i, j) - u[i] - v[j] >= 0 everywhere and == 0 on matched edges.
struct Potentials {
  std::vector<double> u;
  std::vector<double> v;
  std::vector<int> row_to_col;
};

Potentials min_cost_assignment(const Matrix& cost) {
  const int n = cost.rows();
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; index 0 is a virtual row/column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> owner(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    owner[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = owner[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const int j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Potentials out;
  out.u.assign(u.begin() + 1, u.end());
  out.v.assign(v.begin() + 1, v.end());
  out.row_to_col.assign(n, -1);
  for (int j = 1; j <= n; ++j) out.row_to_col[owner[j] - 1] = j - 1;
  return out;
}

// Rewrites a perfect matching of the tight-edge graph into the
// lexicographically smallest one. Rows < `row` are locked.
class LexicographicRefiner {
 public:
  LexicographicRefiner(const std::vector<std::vector<char>>& tight, std::vector<int>& row_to_col)
      : tight_(tight), row_to_col_(row_to_col), n_(static_cast<int>(row_to_col.size())) {
    col_to_row_.assign(n_, -1);
    for (int i = 0; i < n_; ++i) col_to_row_[row_to_col_[i]] = i;
    locked_col_.assign(n_, 0);
  }

  void run() {
    for (int i = 0; i < n_; ++i) {
      const int current = row_to_col_[i];
      for (int j = 0; j < current; ++j) {
        if (!tight_[i][j] || locked_col_[j]) continue;
        if (try_move(i, j)) break;
      }
      locked_col_[row_to_col_[i]] = 1;
    }
  }

 private:
  // Move row i to column j, re-matching j's owner along an alternating path
  // of tight edges that ends at i's old column.
  bool try_move(int i, int j) {
    const int freed = row_to_col_[i];
    const int displaced = col_to_row_[j];
    visited_.assign(n_, 0);
    visited_[j] = 1;
    path_.clear();
    if (!augment(displaced, freed, i)) return false;
    // path_ holds (row, col) pairs in order from `displaced`.
    for (const auto& [r, c] : path_) {
      row_to_col_[r] = c;
      col_to_row_[c] = r;
    }
    row_to_col_[i] = j;
    col_to_row_[j] = i;
    return true;
  }

  bool augment(int row, int target, int locked_row) {
    for (int c = 0; c < n_; ++c) {
      if (!tight_[row][c] || visited_[c] || locked_col_[c]) continue;
      visited_[c] = 1;
      if (c == target) {
        path_.insert(path_.begin(), {row, c});
        return true;
      }
      const int next = col_to_row_[c];
      if (next == locked_row) continue;
      if (augment(next, target, locked_row)) {
        path_.insert(path_.begin(), {row, c});
        return true;
      }
    }
    return false;
  }

  const std::vector<std::vector<char>>& tight_;
  std::vector<int>& row_to_col_;
  int n_;
  std::vector<int> col_to_row_;
  std::vector<char> locked_col_;
  std::vector<char> visited_;
  std::vector<std::pair<int, int>> path_;
};

}  // namespace

Cover kuhn_munkres(const Matrix& weights) {
  if (!weights.square()) throw std::invalid_argument("kuhn_munkres: matrix must be square");
  const int n = weights.rows();
  Cover cover;
  if (n == 0) return cover;

  double scale = 1.0;
  for (const double x : weights.data()) {
    if (!std::isfinite(x)) throw std::invalid_argument("kuhn_munkres: non-finite weight");
    scale = std::max(scale, std::abs(x));
  }

  Matrix cost(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cost(i, j) = -weights(i, j);

  auto pot = min_cost_assignment(cost);

  const double eps = 1e-9 * scale * n;
  std::vector<std::vector<char>> tight(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) tight[i][j] = cost(i, j) - pot.u[i] - pot.v[j] <= eps;
  for (int i = 0; i < n; ++i) tight[i][pot.row_to_col[i]] = 1;

  LexicographicRefiner(tight, pot.row_to_col).run();

  cover.assignment = std::move(pot.row_to_col);
  for (int i = 0; i < n; ++i) cover.value += weights(i, cover.assignment[i]);
  return cover;
}

}  // namespace multiaspect

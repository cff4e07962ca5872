#include "multiaspect/assignment.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

#include "multiaspect/errors.hpp"

namespace multiaspect {

namespace {

int row_argmax(std::span<const double> row) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(row.size()); ++k)
    if (row[k] > row[best]) best = k;
  return best;
}

// Cover over the rows `rows` of `compat`: one pinned column per aspect in
// `required`, then enough unconstrained columns to give every row a slot,
// plus `extra` spare unconstrained columns.
CoverProblem build_problem(const Matrix& compat, std::span<const int> rows,
                           std::span<const int> required, int extra) {
  const int n = static_cast<int>(rows.size());
  const int pinned = static_cast<int>(required.size());
  const int cols = n + extra;
  CoverProblem problem;
  problem.weights = Matrix(n, cols);
  problem.column_aspect.assign(cols, kUnconstrainedColumn);
  std::copy(required.begin(), required.end(), problem.column_aspect.begin());
  problem.row_best.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto row = compat.row(rows[i]);
    const int best = row_argmax(row);
    problem.row_best[i] = best;
    for (int l = 0; l < cols; ++l)
      problem.weights(i, l) = l < pinned ? row[required[l]] : row[best];
  }
  return problem;
}

}  // namespace

std::vector<int> argmax_labels(const Matrix& compat) {
  std::vector<int> labels(compat.rows());
  for (int s = 0; s < compat.rows(); ++s) labels[s] = row_argmax(compat.row(s));
  return labels;
}

CoverProblem segmentation_problem(const Matrix& compat) {
  const int n = compat.rows();
  const int K = compat.cols();
  if (n < K)
    throw std::invalid_argument("segmentation_problem: fewer sentences than aspects");
  std::vector<int> rows(n), aspects(K);
  for (int i = 0; i < n; ++i) rows[i] = i;
  for (int k = 0; k < K; ++k) aspects[k] = k;
  return build_problem(compat, rows, aspects, 0);
}

CoverProblem relax(CoverProblem problem, int extra) {
  if (extra < 0) throw std::invalid_argument("relax: negative count");
  if (extra == 0) return problem;
  const int n = problem.weights.rows();
  const int old_cols = problem.weights.cols();
  Matrix widened(n, old_cols + extra);
  for (int i = 0; i < n; ++i) {
    double best = problem.weights(i, 0);
    for (int l = 0; l < old_cols; ++l) {
      widened(i, l) = problem.weights(i, l);
      best = std::max(best, problem.weights(i, l));
    }
    for (int l = old_cols; l < old_cols + extra; ++l) widened(i, l) = best;
  }
  problem.weights = std::move(widened);
  problem.column_aspect.resize(old_cols + extra, kUnconstrainedColumn);
  return problem;
}

Cover solve_cover(const CoverProblem& problem) {
  const int n = problem.weights.rows();
  const int m = problem.weights.cols();
  if (m < n) throw std::invalid_argument("solve_cover: more rows than columns");
  Matrix square(m, m, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) square(i, j) = problem.weights(i, j);
  Cover full = kuhn_munkres(square);
  Cover cover;
  cover.assignment.assign(full.assignment.begin(), full.assignment.begin() + n);
  for (int i = 0; i < n; ++i) cover.value += problem.weights(i, cover.assignment[i]);
  return cover;
}

std::vector<int> cover_labels(const CoverProblem& problem, const Cover& cover) {
  std::vector<int> labels(problem.weights.rows());
  for (int i = 0; i < problem.weights.rows(); ++i) {
    const int aspect = problem.column_aspect.at(cover.assignment.at(i));
    labels[i] = aspect == kUnconstrainedColumn ? problem.row_best[i] : aspect;
  }
  return labels;
}

std::vector<int> segment_compat(const Matrix& compat, const SegmentOptions& options,
                                std::span<const int> fixed) {
  const int n = compat.rows();
  const int K = compat.cols();
  if (options.relax < 0) throw UsageError("relax must be non-negative");
  if (!fixed.empty() && static_cast<int>(fixed.size()) != n)
    throw std::invalid_argument("segment_compat: fixed labels size mismatch");

  std::vector<int> labels = argmax_labels(compat);
  std::vector<char> covered(K, 0);
  std::vector<int> free_rows;
  for (int s = 0; s < n; ++s) {
    if (!fixed.empty() && fixed[s] >= 0) {
      labels[s] = fixed[s];
      covered.at(fixed[s]) = 1;
    } else {
      free_rows.push_back(s);
    }
  }
  if (!options.diversity) return labels;

  std::vector<int> required;
  for (int k = 0; k < K; ++k)
    if (!covered[k]) required.push_back(k);
  const int relax_count = std::min<int>(options.relax, static_cast<int>(required.size()));
  if (required.empty() || relax_count == static_cast<int>(required.size())) return labels;
  // Too few free sentences: the constraint is discarded for this review.
  if (static_cast<int>(free_rows.size()) + relax_count < static_cast<int>(required.size()))
    return labels;

  auto problem = build_problem(compat, free_rows, required, relax_count);
  const auto cover = solve_cover(problem);
  const auto free_labels = cover_labels(problem, cover);
  for (std::size_t i = 0; i < free_rows.size(); ++i) labels[free_rows[i]] = free_labels[i];
  return labels;
}

Matrix compatibility_matrix(const ModelParams& params, const AspectSchema& schema,
                            const Review& review) {
  const int n = review.num_sentences();
  const int K = params.num_aspects();
  Matrix compat(n, K);
  for (int s = 0; s < n; ++s) {
    const auto c = compatibility(params, schema, review, s);
    std::copy(c.begin(), c.end(), compat.row(s).begin());
  }
  return compat;
}

std::vector<int> segment_review(const ModelParams& params, const AspectSchema& schema,
                                const Review& review, const SegmentOptions& options) {
  return segment_compat(compatibility_matrix(params, schema, review), options);
}

std::vector<int> summarize_compat(const Matrix& compat) {
  const int n = compat.rows();
  const int K = compat.cols();
  if (n < K)
    throw SummaryTooShort(
        fmt::format("summarization needs at least {} sentences, review has {}", K, n));
  Matrix square(n, n, 0.0);
  for (int s = 0; s < n; ++s)
    for (int k = 0; k < K; ++k) square(s, k) = compat(s, k);
  const auto cover = kuhn_munkres(square);
  std::vector<int> chosen(K, -1);
  for (int s = 0; s < n; ++s)
    if (cover.assignment[s] < K) chosen[cover.assignment[s]] = s;
  return chosen;
}

std::vector<int> summarize_review(const ModelParams& params, const AspectSchema& schema,
                                  const Review& review) {
  if (review.num_sentences() < schema.num_aspects())
    throw SummaryTooShort(fmt::format("review '{}' has {} sentences, fewer than {} aspects",
                                      review.review_id, review.num_sentences(),
                                      schema.num_aspects()));
  return summarize_compat(compatibility_matrix(params, schema, review));
}

}  // namespace multiaspect

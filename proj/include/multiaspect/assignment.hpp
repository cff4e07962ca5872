#pragma once

#include <span>
#include <vector>

#include "multiaspect/corpus.hpp"
#include "multiaspect/hungarian.hpp"
#include "multiaspect/matrix.hpp"
#include "multiaspect/model.hpp"

namespace multiaspect {

inline constexpr int kUnconstrainedColumn = -1;

/// Weighted bipartite cover between sentences (rows) and aspect slots
/// (columns). Pinned columns carry an aspect index; unconstrained columns
/// score each row at its best aspect.
struct CoverProblem {
  Matrix weights;
  std::vector<int> column_aspect;  // aspect or kUnconstrainedColumn
  std::vector<int> row_best;       // argmax aspect of each row, lowest index on ties
};

/// Per-row argmax over the n×K compatibility matrix; ties go to the lowest aspect.
std::vector<int> argmax_labels(const Matrix& compat);

/// Segmentation graph for an n×K compatibility matrix (n >= K): K pinned
/// columns followed by n-K unconstrained ones.
CoverProblem segmentation_problem(const Matrix& compat);

/// Append `extra` unconstrained columns, so at most `extra` pinned aspects
/// may go unmatched.
CoverProblem relax(CoverProblem problem, int extra);

/// Pad with zero rows to square and solve.
Cover solve_cover(const CoverProblem& problem);

/// Aspect per sentence induced by a cover of `problem`.
std::vector<int> cover_labels(const CoverProblem& problem, const Cover& cover);

struct SegmentOptions {
  bool diversity = true;
  int relax = 0;  // extra unconstrained nodes
};

/// Diversity-constrained labeling of an n×K compatibility matrix.
///
/// `fixed[s] >= 0` clamps sentence s to that aspect; clamped sentences still
/// count towards covering their aspect. Falls back to per-row argmax when the
/// free sentences cannot cover the remaining aspects.
std::vector<int> segment_compat(const Matrix& compat, const SegmentOptions& options = {},
                                std::span<const int> fixed = {});

/// n×K matrix of compatibilities c_sk for every sentence of `review`.
Matrix compatibility_matrix(const ModelParams& params, const AspectSchema& schema,
                            const Review& review);

std::vector<int> segment_review(const ModelParams& params, const AspectSchema& schema,
                                const Review& review, const SegmentOptions& options = {});

/// One distinct sentence per aspect maximizing total compatibility.
/// Throws SummaryTooShort when the review has fewer than K sentences.
std::vector<int> summarize_compat(const Matrix& compat);
std::vector<int> summarize_review(const ModelParams& params, const AspectSchema& schema,
                                  const Review& review);

}  // namespace multiaspect

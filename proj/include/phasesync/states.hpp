#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "phasesync/rng.hpp"
#include "phasesync/types.hpp"

namespace phasesync::states {

// Pair-space observations concatenated across subjects. Columns containing
// missing entries are dropped before concatenation; col_subject/col_time
// record each kept column's provenance and dropped_per_subject the audit
// counts.
struct GroupMatrix {
  Matrix values;  // [P x total kept columns]
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pair_index;
  std::uint32_t n_regions = 0;
  MetricId metric = MetricId::kCrp;
  std::vector<std::size_t> subject_boundaries;  // first kept column per subject
  std::vector<std::uint32_t> col_subject;
  std::vector<std::uint32_t> col_time;  // absolute time index within the subject
  std::vector<std::size_t> dropped_per_subject;
};

// Row r of the result is pair_index[r]'s series; bijective with the tensor.
Matrix vectorize_lower(const PsTensor& tensor);

// Inverse of vectorize_lower given the tensor's metadata.
PsTensor devectorize(const Matrix& rows, std::uint32_t n_regions, MetricId metric,
                     std::optional<WindowSpec> window, std::size_t time_offset);

GroupMatrix concatenate_subjects(std::span<const PsTensor> tensors);

struct KmeansResult {
  std::size_t k = 0;
  Matrix centroids;  // [k x P]
  std::vector<std::uint32_t> labels;
  double inertia = 0.0;
  std::size_t restarts_used = 0;
  std::size_t best_restart = 0;
};

// Lloyd's algorithm over the columns of data (squared Euclidean distance in
// pair space). Each restart initializes centroids from k distinct uniformly
// drawn columns (or D^2-weighted draws when plus_plus_init is set) and
// iterates to an assignment fixed point or 300 sweeps; empty clusters are
// re-seeded with the column farthest from its centroid. The restart with
// minimum inertia wins; ties break to the lowest restart index, so the
// result is independent of scheduling.
KmeansResult kmeans(const Matrix& data, std::size_t k, std::size_t restarts, Rng& rng,
                    bool plus_plus_init = false);

// Davies-Bouldin index: mean over clusters of max_{j != i} (s_i + s_j) / d_ij
// with s the mean member-to-centroid distance and d the centroid
// separation. Coincident centroids report +infinity.
double davies_bouldin(const Matrix& data, const KmeansResult& result);

struct StateResult {
  std::size_t k = 0;
  Matrix centroids;  // [k x P]
  std::vector<std::uint32_t> labels;
  double inertia = 0.0;
  std::map<std::size_t, double> dbi_by_k;
  std::size_t restarts_used = 0;
  std::vector<Matrix> state_matrices;  // k symmetric [R x R] with unit diagonal
};

struct StatePipelineResult {
  StateResult state;
  GroupMatrix group;
};

// vectorize -> concatenate -> k-means sweep over k_range -> pick k by
// minimum DBI (or the forced k when given) -> reshape centroids back to
// symmetric region-by-region matrices with unit diagonal.
StatePipelineResult run_state_pipeline(std::span<const PsTensor> tensors,
                                       std::pair<std::size_t, std::size_t> k_range,
                                       std::size_t restarts, Rng& rng,
                                       std::optional<std::size_t> forced_k = std::nullopt,
                                       bool plus_plus_init = false);

}  // namespace phasesync::states

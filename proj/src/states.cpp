#include "phasesync/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "phasesync/error.hpp"
#include "phasesync/kernels.hpp"
#include "phasesync/parallel.hpp"

namespace phasesync::states {

namespace {

constexpr std::size_t kMaxLloydIterations = 300;

// Observations as contiguous rows: points[i] = column i of data.
Matrix transpose(const Matrix& data) {
  Matrix out(data.cols(), data.rows());
  for (std::size_t r = 0; r < data.rows(); ++r)
    for (std::size_t c = 0; c < data.cols(); ++c) out.at(c, r) = data.at(r, c);
  return out;
}

struct RestartOutcome {
  double inertia = std::numeric_limits<double>::infinity();
  Matrix centroids;
  std::vector<std::uint32_t> labels;
};

RestartOutcome lloyd_once(const Matrix& points, std::size_t k, Rng rng, bool plus_plus_init) {
  const kernels::Ops& ops = kernels::active_ops();
  const std::size_t n = points.rows();
  const std::size_t dim = points.cols();

  std::vector<std::size_t> chosen;
  if (plus_plus_init) {
    // D^2-weighted seeding: each next centroid is drawn with probability
    // proportional to the squared distance to its nearest chosen one.
    chosen.push_back(static_cast<std::size_t>(rng.uniform_below(n)));
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    while (chosen.size() < k) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = ops.sqdist(points.row(i).data(), points.row(chosen.back()).data(), dim);
        d2[i] = std::min(d2[i], d);
        total += d2[i];
      }
      std::size_t pick = 0;
      if (total > 0.0) {
        double target = rng.uniform01() * total;
        for (std::size_t i = 0; i < n; ++i) {
          target -= d2[i];
          if (target <= 0.0) {
            pick = i;
            break;
          }
        }
      } else {
        pick = static_cast<std::size_t>(rng.uniform_below(n));
      }
      chosen.push_back(pick);
    }
  } else {
    // k distinct uniformly drawn observations as the initial centroids
    while (chosen.size() < k) {
      const std::size_t idx = static_cast<std::size_t>(rng.uniform_below(n));
      if (std::find(chosen.begin(), chosen.end(), idx) == chosen.end()) chosen.push_back(idx);
    }
  }
  Matrix centroids(k, dim);
  for (std::size_t c = 0; c < k; ++c) {
    const auto src = points.row(chosen[c]);
    std::copy(src.begin(), src.end(), centroids.row(c).begin());
  }

  std::vector<std::uint32_t> labels(n, 0);
  std::vector<double> dist_to_own(n, 0.0);
  std::vector<std::size_t> counts(k, 0);

  for (std::size_t iter = 0; iter < kMaxLloydIterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double* p = points.row(i).data();
      std::uint32_t best = 0;
      double best_d = ops.sqdist(p, centroids.row(0).data(), dim);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = ops.sqdist(p, centroids.row(c).data(), dim);
        if (d < best_d) {
          best_d = d;
          best = static_cast<std::uint32_t>(c);
        }
      }
      dist_to_own[i] = best_d;
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }

    std::fill(counts.begin(), counts.end(), 0);
    for (std::uint32_t l : labels) ++counts[l];
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      // Re-seed an empty cluster with the farthest observation whose donor
      // cluster keeps at least one member.
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[labels[i]] < 2) continue;
        if (far == n || dist_to_own[i] > dist_to_own[far]) far = i;
      }
      if (far == n) fail(ErrorCode::infeasible, "kmeans: cannot populate empty cluster");
      --counts[labels[far]];
      labels[far] = static_cast<std::uint32_t>(c);
      counts[c] = 1;
      dist_to_own[far] = 0.0;
      changed = true;
    }

    centroids = Matrix(k, dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = centroids.row(labels[i]);
      const auto p = points.row(i);
      for (std::size_t d = 0; d < dim; ++d) row[d] += p[d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      const double inv = 1.0 / static_cast<double>(counts[c]);
      for (double& v : centroids.row(c)) v *= inv;
    }
    if (!changed && iter > 0) break;
  }

  RestartOutcome out;
  out.centroids = std::move(centroids);
  out.labels = std::move(labels);
  out.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    out.inertia += ops.sqdist(points.row(i).data(), out.centroids.row(out.labels[i]).data(), dim);
  return out;
}

}  // namespace

Matrix vectorize_lower(const PsTensor& tensor) {
  Matrix out(tensor.n_pairs(), tensor.n_times());
  out.data() = tensor.values.data();
  return out;
}

PsTensor devectorize(const Matrix& rows, std::uint32_t n_regions, MetricId metric,
                     std::optional<WindowSpec> window, std::size_t time_offset) {
  PsTensor tensor;
  tensor.values = rows;
  tensor.valid.assign(rows.rows() * rows.cols(), 1);
  tensor.pair_index = lower_triangle_pairs(n_regions);
  if (tensor.pair_index.size() != rows.rows())
    fail(ErrorCode::shape_mismatch, "devectorize: row count is not R*(R-1)/2");
  tensor.metric = metric;
  tensor.window = window;
  tensor.time_offset = time_offset;
  tensor.n_regions = n_regions;
  return tensor;
}

GroupMatrix concatenate_subjects(std::span<const PsTensor> tensors) {
  if (tensors.empty()) fail(ErrorCode::invalid_input, "concatenate_subjects: no tensors");
  const PsTensor& first = tensors.front();
  for (const PsTensor& t : tensors) {
    if (t.n_regions != first.n_regions || t.metric != first.metric)
      fail(ErrorCode::shape_mismatch, "concatenate_subjects: inconsistent region count/metric");
  }

  GroupMatrix group;
  group.pair_index = first.pair_index;
  group.n_regions = first.n_regions;
  group.metric = first.metric;

  const std::size_t n_pairs = first.n_pairs();
  std::size_t kept_total = 0;
  std::vector<std::vector<std::size_t>> kept_cols(tensors.size());
  for (std::size_t s = 0; s < tensors.size(); ++s) {
    const PsTensor& t = tensors[s];
    std::size_t dropped = 0;
    for (std::size_t c = 0; c < t.n_times(); ++c) {
      bool all_valid = true;
      for (std::size_t p = 0; p < n_pairs && all_valid; ++p)
        all_valid = t.valid[p * t.n_times() + c] != 0;
      if (all_valid)
        kept_cols[s].push_back(c);
      else
        ++dropped;
    }
    group.dropped_per_subject.push_back(dropped);
    kept_total += kept_cols[s].size();
  }
  if (kept_total == 0) fail(ErrorCode::degenerate_series, "concatenate_subjects: no valid columns");

  group.values = Matrix(n_pairs, kept_total);
  std::size_t col = 0;
  for (std::size_t s = 0; s < tensors.size(); ++s) {
    group.subject_boundaries.push_back(col);
    const PsTensor& t = tensors[s];
    for (std::size_t c : kept_cols[s]) {
      for (std::size_t p = 0; p < n_pairs; ++p) group.values.at(p, col) = t.values.at(p, c);
      group.col_subject.push_back(static_cast<std::uint32_t>(s));
      group.col_time.push_back(static_cast<std::uint32_t>(c + t.time_offset));
      ++col;
    }
  }
  return group;
}

KmeansResult kmeans(const Matrix& data, std::size_t k, std::size_t restarts, Rng& rng,
                    bool plus_plus_init) {
  if (k < 2) fail(ErrorCode::invalid_input, "kmeans: k must be >= 2");
  if (restarts < 1) fail(ErrorCode::invalid_input, "kmeans: need at least 1 restart");
  if (data.cols() < k)
    fail(ErrorCode::infeasible, "kmeans: fewer observations than clusters");

  const Matrix points = transpose(data);
  const std::uint64_t substream_base = rng.next_u64();

  std::vector<double> inertias(restarts, std::numeric_limits<double>::infinity());
  parallel_for(restarts, [&](std::size_t r) {
    inertias[r] = lloyd_once(points, k, make_rng(substream_base, r), plus_plus_init).inertia;
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r)
    if (inertias[r] < inertias[best]) best = r;

  // Re-run the winning restart to reconstruct labels and centroids; the
  // stream is the same, so this is exact.
  RestartOutcome outcome = lloyd_once(points, k, make_rng(substream_base, best), plus_plus_init);

  KmeansResult result;
  result.k = k;
  result.centroids = std::move(outcome.centroids);
  result.labels = std::move(outcome.labels);
  result.inertia = outcome.inertia;
  result.restarts_used = restarts;
  result.best_restart = best;
  return result;
}

double davies_bouldin(const Matrix& data, const KmeansResult& result) {
  const Matrix points = transpose(data);
  const kernels::Ops& ops = kernels::active_ops();
  const std::size_t k = result.k;
  const std::size_t dim = points.cols();

  std::vector<double> scatter(k, 0.0);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const std::uint32_t c = result.labels[i];
    scatter[c] += std::sqrt(ops.sqdist(points.row(i).data(), result.centroids.row(c).data(), dim));
    ++counts[c];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) fail(ErrorCode::invalid_input, "davies_bouldin: empty cluster");
    scatter[c] /= static_cast<double>(counts[c]);
  }

  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i) continue;
      const double sep =
          std::sqrt(ops.sqdist(result.centroids.row(i).data(), result.centroids.row(j).data(), dim));
      if (sep == 0.0) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, (scatter[i] + scatter[j]) / sep);
    }
    total += worst;
  }
  return total / static_cast<double>(k);
}

StatePipelineResult run_state_pipeline(std::span<const PsTensor> tensors,
                                       std::pair<std::size_t, std::size_t> k_range,
                                       std::size_t restarts, Rng& rng,
                                       std::optional<std::size_t> forced_k,
                                       bool plus_plus_init) {
  if (k_range.first < 2 || k_range.second < k_range.first)
    fail(ErrorCode::bad_config, "run_state_pipeline: bad k range");
  if (forced_k && (*forced_k < k_range.first || *forced_k > k_range.second))
    fail(ErrorCode::bad_config, "run_state_pipeline: forced k outside k range");

  StatePipelineResult out;
  out.group = concatenate_subjects(tensors);

  std::map<std::size_t, KmeansResult> by_k;
  for (std::size_t k = k_range.first; k <= k_range.second; ++k) {
    KmeansResult r = kmeans(out.group.values, k, restarts, rng, plus_plus_init);
    out.state.dbi_by_k[k] = davies_bouldin(out.group.values, r);
    by_k.emplace(k, std::move(r));
  }

  std::size_t chosen = forced_k.value_or(k_range.first);
  if (!forced_k) {
    for (const auto& [k, dbi] : out.state.dbi_by_k)
      if (dbi < out.state.dbi_by_k.at(chosen)) chosen = k;
  }

  KmeansResult& winner = by_k.at(chosen);
  out.state.k = chosen;
  out.state.centroids = std::move(winner.centroids);
  out.state.labels = std::move(winner.labels);
  out.state.inertia = winner.inertia;
  out.state.restarts_used = restarts;

  // Centroids back to symmetric R x R matrices; the diagonal is the metric's
  // self-synchronization value, 1 for every supported metric.
  const std::uint32_t n_regions = out.group.n_regions;
  for (std::size_t c = 0; c < chosen; ++c) {
    Matrix m(n_regions, n_regions, 0.0);
    for (std::uint32_t r = 0; r < n_regions; ++r) m.at(r, r) = 1.0;
    for (std::size_t p = 0; p < out.group.pair_index.size(); ++p) {
      const auto [i, j] = out.group.pair_index[p];
      m.at(i, j) = m.at(j, i) = out.state.centroids.at(c, p);
    }
    out.state.state_matrices.push_back(std::move(m));
  }
  return out;
}

}  // namespace phasesync::states

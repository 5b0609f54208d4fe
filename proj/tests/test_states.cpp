#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "phasesync/error.hpp"
#include "phasesync/rng.hpp"
#include "phasesync/states.hpp"
#include "phasesync/types.hpp"

using namespace phasesync;
namespace st = phasesync::states;

namespace {

// Two P-dimensional Gaussian clouds centered 'separation' sigmas apart,
// interleaved column order; returns data plus the planted labels.
std::pair<Matrix, std::vector<std::uint32_t>> two_clouds(std::size_t dim, std::size_t n_cols,
                                                         double separation, Rng& rng) {
  Matrix data(dim, n_cols);
  std::vector<std::uint32_t> truth(n_cols);
  for (std::size_t c = 0; c < n_cols; ++c) {
    const bool second = (c % 2) == 1;
    truth[c] = second ? 1 : 0;
    for (std::size_t d = 0; d < dim; ++d)
      data.at(d, c) = rng.normal() + (second ? separation : 0.0);
  }
  return {std::move(data), std::move(truth)};
}

double agreement(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::size_t same = 0, flip = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) ++same;
    if (a[i] == 1 - b[i]) ++flip;
  }
  return static_cast<double>(std::max(same, flip)) / static_cast<double>(a.size());
}

PsTensor tensor_from(const Matrix& rows, std::uint32_t n_regions, MetricId metric) {
  return st::devectorize(rows, n_regions, metric, std::nullopt, 0);
}

}  // namespace

TEST_CASE("vectorize round-trips the tensor") {
  Rng rng = make_rng(3, 0);
  Matrix rows(3, 17);
  for (double& v : rows.data()) v = rng.uniform01() * 2.0 - 1.0;
  const PsTensor t = tensor_from(rows, 3, MetricId::kCrp);
  const Matrix back = st::vectorize_lower(t);
  CHECK(back.data() == rows.data());
  const PsTensor again = st::devectorize(back, 3, t.metric, t.window, t.time_offset);
  CHECK(again.values.data() == t.values.data());
  CHECK(again.pair_index == t.pair_index);
  // documented ordering for R = 3
  CHECK(t.pair_index[0] == std::pair<std::uint32_t, std::uint32_t>{0, 1});
  CHECK(t.pair_index[1] == std::pair<std::uint32_t, std::uint32_t>{0, 2});
  CHECK(t.pair_index[2] == std::pair<std::uint32_t, std::uint32_t>{1, 2});
}

TEST_CASE("concatenation drops missing columns with an audit trail") {
  Matrix rows_a(3, 5, 0.5);
  PsTensor a = tensor_from(rows_a, 3, MetricId::kCrp);
  a.valid[1 * 5 + 2] = 0;  // pair 1, column 2
  Matrix rows_b(3, 4, -0.25);
  const PsTensor b = tensor_from(rows_b, 3, MetricId::kCrp);

  const st::GroupMatrix group = st::concatenate_subjects(std::vector<PsTensor>{a, b});
  CHECK(group.values.cols() == 4 + 4);
  CHECK(group.dropped_per_subject == std::vector<std::size_t>{1, 0});
  CHECK(group.subject_boundaries == std::vector<std::size_t>{0, 4});
  CHECK(group.col_subject[4] == 1);
  CHECK(group.col_time[0] == 0);
  CHECK(group.col_time[2] == 3);  // column 2 was dropped

  Matrix rows_c(6, 4, 0.0);
  const PsTensor c = tensor_from(rows_c, 4, MetricId::kCrp);
  CHECK_THROWS_AS(st::concatenate_subjects(std::vector<PsTensor>{a, c}), Error);
}

TEST_CASE("kmeans recovers a planted partition exactly at 10-sigma separation") {
  Rng data_rng = make_rng(17, 0);
  auto [data, truth] = two_clouds(6, 300, 10.0, data_rng);
  Rng rng = make_rng(17, 1);
  const st::KmeansResult result = st::kmeans(data, 2, 20, rng);
  CHECK(result.k == 2);
  CHECK(result.labels.size() == 300);
  CHECK(agreement(result.labels, truth) == 1.0);
}

TEST_CASE("kmeans++ seeding recovers the planted partition too") {
  Rng data_rng = make_rng(53, 0);
  auto [data, truth] = two_clouds(6, 200, 10.0, data_rng);
  Rng rng = make_rng(53, 1);
  const st::KmeansResult result = st::kmeans(data, 2, 10, rng, /*plus_plus_init=*/true);
  CHECK(agreement(result.labels, truth) == 1.0);
}

TEST_CASE("kmeans contract errors") {
  Matrix data(4, 10, 1.0);
  Rng rng = make_rng(19, 0);
  CHECK_THROWS_AS(st::kmeans(data, 1, 5, rng), Error);
  Matrix narrow(4, 3, 1.0);
  CHECK_THROWS_AS(st::kmeans(narrow, 4, 5, rng), Error);
  try {
    st::kmeans(narrow, 4, 5, rng);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::infeasible);
  }
}

TEST_CASE("duplicating every column keeps the centroids and doubles the inertia") {
  Rng data_rng = make_rng(23, 0);
  auto [data, truth] = two_clouds(5, 120, 10.0, data_rng);
  (void)truth;
  Matrix doubled(5, 240);
  for (std::size_t d = 0; d < 5; ++d)
    for (std::size_t c = 0; c < 240; ++c) doubled.at(d, c) = data.at(d, c % 120);

  Rng rng_a = make_rng(23, 1);
  Rng rng_b = make_rng(23, 1);
  const st::KmeansResult base = st::kmeans(data, 2, 30, rng_a);
  const st::KmeansResult twice = st::kmeans(doubled, 2, 30, rng_b);

  // align clusters by nearest centroid
  const double d00 = std::fabs(base.centroids.at(0, 0) - twice.centroids.at(0, 0));
  const double d01 = std::fabs(base.centroids.at(0, 0) - twice.centroids.at(1, 0));
  const std::size_t map0 = d00 <= d01 ? 0 : 1;
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t d = 0; d < 5; ++d)
      CHECK(base.centroids.at(c, d) ==
            doctest::Approx(twice.centroids.at(c == 0 ? map0 : 1 - map0, d)).epsilon(1e-9));
  CHECK(twice.inertia == doctest::Approx(2.0 * base.inertia).epsilon(1e-9));
}

TEST_CASE("kmeans inertia never increases across lloyd iterations") {
  // weaker observable proxy: the best restart's inertia is <= any single
  // restart's inertia, and reruns are deterministic
  Rng data_rng = make_rng(29, 0);
  auto [data, truth] = two_clouds(4, 100, 2.0, data_rng);
  (void)truth;
  Rng rng_a = make_rng(29, 1);
  const st::KmeansResult best = st::kmeans(data, 3, 25, rng_a);
  for (std::size_t r = 0; r < 5; ++r) {
    Rng rng_single = make_rng(29, 1);
    const st::KmeansResult one = st::kmeans(data, 3, 1, rng_single);
    CHECK(best.inertia <= one.inertia + 1e-12);
  }
  Rng rng_b = make_rng(29, 1);
  const st::KmeansResult again = st::kmeans(data, 3, 25, rng_b);
  CHECK(best.inertia == again.inertia);
  CHECK(best.labels == again.labels);
  CHECK(best.best_restart == again.best_restart);
}

TEST_CASE("davies-bouldin prefers the planted k and flags coincident centroids") {
  Rng data_rng = make_rng(31, 0);
  auto [data, truth] = two_clouds(5, 240, 10.0, data_rng);
  (void)truth;

  Rng rng = make_rng(31, 1);
  std::vector<double> dbi_by_k;
  for (std::size_t k = 2; k <= 6; ++k) {
    const st::KmeansResult r = st::kmeans(data, k, 25, rng);
    dbi_by_k.push_back(st::davies_bouldin(data, r));
  }
  for (std::size_t i = 1; i < dbi_by_k.size(); ++i) CHECK(dbi_by_k[0] < dbi_by_k[i]);
  CHECK(dbi_by_k[0] < 0.2);  // two tight clouds far apart

  // coincident centroids -> +inf
  st::KmeansResult fake;
  fake.k = 2;
  fake.centroids = Matrix(2, 5, 1.0);
  fake.labels.assign(240, 0);
  for (std::size_t i = 0; i < 240; i += 2) fake.labels[i] = 1;
  CHECK(std::isinf(st::davies_bouldin(data, fake)));
}

TEST_CASE("label permutation leaves inertia and dbi unchanged") {
  Rng data_rng = make_rng(37, 0);
  auto [data, truth] = two_clouds(4, 150, 6.0, data_rng);
  (void)truth;
  Rng rng = make_rng(37, 1);
  const st::KmeansResult r = st::kmeans(data, 2, 15, rng);

  st::KmeansResult swapped = r;
  for (auto& l : swapped.labels) l = 1 - l;
  swapped.centroids = Matrix(2, 4);
  for (std::size_t d = 0; d < 4; ++d) {
    swapped.centroids.at(0, d) = r.centroids.at(1, d);
    swapped.centroids.at(1, d) = r.centroids.at(0, d);
  }
  CHECK(st::davies_bouldin(data, swapped) == doctest::Approx(st::davies_bouldin(data, r)));
}

TEST_CASE("state pipeline emits symmetric unit-diagonal matrices") {
  Rng data_rng = make_rng(41, 0);
  // 2 subjects, R = 4 -> P = 6 pairs
  std::vector<PsTensor> tensors;
  for (int s = 0; s < 2; ++s) {
    auto [rows, truth] = two_clouds(6, 80, 8.0, data_rng);
    (void)truth;
    tensors.push_back(tensor_from(rows, 4, MetricId::kCrp));
  }
  Rng rng = make_rng(41, 1);
  const st::StatePipelineResult result =
      st::run_state_pipeline(tensors, {2, 4}, 20, rng, std::size_t{2});

  CHECK(result.state.k == 2);
  CHECK(result.state.dbi_by_k.size() == 3);
  REQUIRE(result.state.state_matrices.size() == 2);
  for (const Matrix& m : result.state.state_matrices) {
    REQUIRE(m.rows() == 4);
    for (std::size_t r = 0; r < 4; ++r) {
      CHECK(m.at(r, r) == 1.0);
      for (std::size_t c = 0; c < 4; ++c) CHECK(m.at(r, c) == m.at(c, r));
    }
  }
  CHECK(result.state.labels.size() == 160);
  CHECK(result.group.col_subject.back() == 1);
}

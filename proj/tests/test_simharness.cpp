#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "phasesync/error.hpp"
#include "phasesync/rng.hpp"
#include "phasesync/simharness.hpp"
#include "phasesync/types.hpp"

using namespace phasesync;
namespace sim = phasesync::simharness;

TEST_CASE("null pair: moments, independence, reproducibility") {
  sim::SimConfig config;
  config.n_samples = 210;

  // sample means stay within 4/sqrt(T)
  {
    Rng rng = make_rng(5, 0);
    const auto [x, y] = sim::gen_null_pair(config, rng);
    REQUIRE(x.size() == 210);
    double mx = 0.0, my = 0.0;
    for (double v : x) mx += v;
    for (double v : y) my += v;
    mx /= 210.0;
    my /= 210.0;
    const double bound = 4.0 / std::sqrt(210.0);
    CHECK(std::fabs(mx) < bound);
    CHECK(std::fabs(my) < bound);
  }

  // lag-0 cross-correlation averages to ~0 over replicates
  {
    double corr_sum = 0.0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
      Rng rng = make_rng(5, static_cast<std::uint64_t>(r));
      const auto [x, y] = sim::gen_null_pair(config, rng);
      double sxy = 0.0, sxx = 0.0, syy = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += x[i] * y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
      }
      corr_sum += sxy / std::sqrt(sxx * syy);
    }
    CHECK(std::fabs(corr_sum / reps) < 4.0 / std::sqrt(210.0));
  }

  // fixed seed, fixed pair
  {
    Rng a = make_rng(77, 9);
    Rng b = make_rng(77, 9);
    const auto pa = sim::gen_null_pair(config, a);
    const auto pb = sim::gen_null_pair(config, b);
    CHECK(pa.first == pb.first);
    CHECK(pa.second == pb.second);
  }
}

TEST_CASE("ramp pair shift trajectory") {
  sim::SimConfig config;
  config.sim_id = sim::SimId::kRamp;
  config.noise_sd = 0.0;

  // before t0 the pair is identical
  Rng rng = make_rng(1, 0);
  const auto [x, y] = sim::gen_ramp_pair(config, rng);
  const std::size_t t0_sample = static_cast<std::size_t>(config.t0_seconds / config.tr_seconds);
  for (std::size_t t = 0; t <= t0_sample; ++t) CHECK(x[t] == doctest::Approx(y[t]).epsilon(1e-12));

  // normalization: the shift reaches exactly 4*pi at the final sample
  CHECK(sim::ramp_shift(config, config.n_samples - 1) == doctest::Approx(4.0 * kPi));
  CHECK(sim::ramp_shift(config, t0_sample) == 0.0);

  // where the shift is 2*pi the signals coincide again (period)
  for (std::size_t t = t0_sample; t < config.n_samples; ++t) {
    if (std::fabs(sim::ramp_shift(config, t) - kTwoPi) < 1e-12) {
      CHECK(std::fabs(y[t] - x[t]) < 1e-9);
    }
  }
  // with the default grid the 2*pi crossing lands exactly on sample 147
  CHECK(sim::ramp_shift(config, 147) == doctest::Approx(kTwoPi));

  // raw-formula alternative keeps growing past 4*pi
  sim::SimConfig raw = config;
  raw.raw_ramp = true;
  CHECK(sim::ramp_shift(raw, raw.n_samples - 1) > 4.0 * kPi);
}

TEST_CASE("sigmoid pair shift trajectory") {
  sim::SimConfig config;
  config.sim_id = sim::SimId::kSigmoid;

  // anti-phase exactly at t0: a/2 = pi
  const std::size_t t0_sample = static_cast<std::size_t>(config.t0_seconds / config.tr_seconds);
  CHECK(sim::sigmoid_shift(config, t0_sample) == kPi);

  // monotone increasing (b < 0)
  for (std::size_t t = 0; t + 1 < config.n_samples; ++t)
    CHECK(sim::sigmoid_shift(config, t + 1) > sim::sigmoid_shift(config, t));

  // -> 2*pi in the far tail
  CHECK(std::fabs(sim::sigmoid_shift(config, 100000) - kTwoPi) < 1e-12);
}

TEST_CASE("summarize: constant stack, two-replicate arithmetic, all-missing") {
  {
    Matrix stack(5, 4, 3.25);
    const std::vector<std::uint8_t> valid(20, 1);
    const sim::SummaryRows rows = sim::summarize(stack, valid);
    for (std::size_t c = 0; c < 4; ++c) {
      CHECK(rows.mean[c] == 3.25);
      CHECK(rows.lower95[c] == 3.25);
      CHECK(rows.upper95[c] == 3.25);
      CHECK(rows.n_valid[c] == 5);
    }
  }
  {
    Matrix stack(2, 1);
    stack.at(0, 0) = 0.0;
    stack.at(1, 0) = 1.0;
    const std::vector<std::uint8_t> valid(2, 1);
    const sim::SummaryRows rows = sim::summarize(stack, valid);
    CHECK(rows.mean[0] == doctest::Approx(0.5));
    const double sd = std::sqrt(0.5);
    CHECK(rows.lower95[0] == doctest::Approx(0.5 - 1.96 * sd).epsilon(1e-12));
    CHECK(rows.upper95[0] == doctest::Approx(0.5 + 1.96 * sd).epsilon(1e-12));
    CHECK(rows.lower95[0] == doctest::Approx(-0.886).epsilon(1e-3));
    CHECK(rows.upper95[0] == doctest::Approx(1.886).epsilon(1e-3));
  }
  {
    Matrix stack(3, 2, 1.0);
    std::vector<std::uint8_t> valid(6, 1);
    valid[1] = valid[3] = valid[5] = 0;  // column 1 entirely missing
    const sim::SummaryRows rows = sim::summarize(stack, valid);
    CHECK(rows.n_valid[1] == 0);
    CHECK(std::isnan(rows.mean[1]));
    CHECK(rows.n_valid[0] == 3);
  }
  {
    Matrix stack(1, 1, 0.0);
    CHECK_THROWS_AS(sim::summarize(stack, std::vector<std::uint8_t>(1, 1)), Error);
  }
}

TEST_CASE("band coverage approximates 95% on gaussian columns") {
  Rng rng = make_rng(13, 0);
  const std::size_t reps = 500, cols = 40;
  Matrix stack(reps, cols);
  for (double& v : stack.data()) v = rng.normal();
  const sim::SummaryRows rows = sim::summarize(stack, std::vector<std::uint8_t>(reps * cols, 1));
  std::size_t inside = 0;
  for (std::size_t r = 0; r < reps; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (stack.at(r, c) >= rows.lower95[c] && stack.at(r, c) <= rows.upper95[c]) ++inside;
  const double cover = static_cast<double>(inside) / static_cast<double>(reps * cols);
  CHECK(cover > 0.93);
  CHECK(cover < 0.97);
}

TEST_CASE("run_simulation produces complete, deterministic summaries") {
  sim::SimConfig config;
  config.sim_id = sim::SimId::kNullCpp;
  config.n_realizations = 24;
  config.seed = 4242;
  config.windows = {30, 60};

  const sim::SimSummary a = sim::run_simulation(config);
  // 3 windowed metrics x 2 windows + 2 instantaneous
  CHECK(a.cells.size() == 8);

  const sim::SimCell* plv30 = a.find(MetricId::kPlv, 30);
  REQUIRE(plv30 != nullptr);
  CHECK(plv30->mean.size() == 210 - 30 + 1);
  CHECK(plv30->time_offset == 29);
  const sim::SimCell* crp = a.find(MetricId::kCrp, std::nullopt);
  REQUIRE(crp != nullptr);
  CHECK(crp->mean.size() == 210);
  for (std::size_t t = 0; t < crp->mean.size(); ++t) {
    CHECK(crp->lower95[t] <= crp->mean[t]);
    CHECK(crp->mean[t] <= crp->upper95[t]);
    CHECK(crp->n_valid[t] == 24);
  }

  // bit-identical rerun under the same seed
  const sim::SimSummary b = sim::run_simulation(config);
  REQUIRE(b.cells.size() == a.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].mean == b.cells[i].mean);
    CHECK(a.cells[i].lower95 == b.cells[i].lower95);
    CHECK(a.cells[i].upper95 == b.cells[i].upper95);
  }
  CHECK(a.surrogate_retries == b.surrogate_retries);
}

TEST_CASE("run_simulation unfiltered arm works end to end") {
  sim::SimConfig config;
  config.sim_id = sim::SimId::kRamp;
  config.filtering = false;
  config.n_realizations = 8;
  config.windows = {30};
  config.metrics = {MetricId::kPlv, MetricId::kCrp};
  const sim::SimSummary s = sim::run_simulation(config);
  CHECK(s.cells.size() == 2);
  CHECK(s.surrogate_retries == 0);  // cpp only applies to the null sim
}

TEST_CASE("run_simulation validates the configuration") {
  sim::SimConfig bad;
  bad.t0_seconds = 1e9;
  CHECK_THROWS_AS(sim::run_simulation(bad), Error);

  sim::SimConfig bad_band;
  bad_band.band.high_hz = 0.4;  // at TR 2 the Nyquist is 0.25
  CHECK_THROWS_AS(sim::run_simulation(bad_band), Error);

  sim::SimConfig bad_metric;
  bad_metric.metrics = {MetricId::kCsw};
  CHECK_THROWS_AS(sim::run_simulation(bad_metric), Error);
}

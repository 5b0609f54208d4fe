#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "phasesync/rng.hpp"

namespace phasesync::surrogates {

// Partition of a wrapped phase series at its wrap events (jumps < -pi).
// head + cycles + tail concatenated reproduce the input exactly.
struct CycleSegments {
  std::vector<double> head;
  std::vector<std::vector<double>> cycles;
  std::vector<double> tail;

  std::size_t total_samples() const;
};

// Splits at wrap events: a complete cycle is the run between consecutive
// events; head/tail are the partial runs outside the first/last event.
// Fewer than 3 wrap events leave nothing to permute and throw
// too_few_cycles.
CycleSegments segment_cycles(std::span<const double> phase);

// Uniform random permutation of [0, n) (Fisher-Yates).
std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

// head + cycles reordered by `order` + tail.
std::vector<double> assemble(const CycleSegments& segments, std::span<const std::size_t> order);

// Cyclic phase permutation surrogate: complete cycles uniformly permuted,
// head and tail fixed in place. Destroys cross-series phase dependence
// while preserving the single-series cycle content.
std::vector<double> cpp_surrogate(std::span<const double> phase, Rng& rng);

}  // namespace phasesync::surrogates

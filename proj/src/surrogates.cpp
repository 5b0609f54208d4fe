#include "phasesync/surrogates.hpp"

#include <cmath>

#include "phasesync/error.hpp"
#include "phasesync/types.hpp"

namespace phasesync::surrogates {

std::size_t CycleSegments::total_samples() const {
  std::size_t n = head.size() + tail.size();
  for (const auto& c : cycles) n += c.size();
  return n;
}

CycleSegments segment_cycles(std::span<const double> phase) {
  for (double v : phase)
    if (!std::isfinite(v)) fail(ErrorCode::invalid_input, "segment_cycles: non-finite phase");

  // Wrap event between t and t+1 when the phase jumps by less than -pi.
  std::vector<std::size_t> events;
  for (std::size_t t = 0; t + 1 < phase.size(); ++t)
    if (phase[t + 1] - phase[t] < -kPi) events.push_back(t);

  if (events.size() < 3)
    fail(ErrorCode::too_few_cycles, "segment_cycles: fewer than 3 wrap events");

  CycleSegments out;
  out.head.assign(phase.begin(), phase.begin() + static_cast<std::ptrdiff_t>(events[0] + 1));
  for (std::size_t e = 0; e + 1 < events.size(); ++e)
    out.cycles.emplace_back(phase.begin() + static_cast<std::ptrdiff_t>(events[e] + 1),
                            phase.begin() + static_cast<std::ptrdiff_t>(events[e + 1] + 1));
  out.tail.assign(phase.begin() + static_cast<std::ptrdiff_t>(events.back() + 1), phase.end());
  return out;
}

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_below(i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

std::vector<double> assemble(const CycleSegments& segments, std::span<const std::size_t> order) {
  if (order.size() != segments.cycles.size())
    fail(ErrorCode::invalid_input, "assemble: order length does not match cycle count");
  std::vector<double> out;
  out.reserve(segments.total_samples());
  out.insert(out.end(), segments.head.begin(), segments.head.end());
  for (std::size_t idx : order) {
    const auto& c = segments.cycles.at(idx);
    out.insert(out.end(), c.begin(), c.end());
  }
  out.insert(out.end(), segments.tail.begin(), segments.tail.end());
  return out;
}

std::vector<double> cpp_surrogate(std::span<const double> phase, Rng& rng) {
  const CycleSegments segments = segment_cycles(phase);
  const std::vector<std::size_t> order = random_permutation(segments.cycles.size(), rng);
  return assemble(segments, order);
}

}  // namespace phasesync::surrogates

#include "phasesync/types.hpp"

namespace phasesync {

const char* metric_name(MetricId id) {
  switch (id) {
    case MetricId::kPlv: return "plv";
    case MetricId::kCircCirc: return "circ";
    case MetricId::kToroidal: return "toroidal";
    case MetricId::kCoherence: return "coherence";
    case MetricId::kCrp: return "crp";
    case MetricId::kCsw: return "csw";
    case MetricId::kPwCsw: return "pwcsw";
  }
  return "unknown";
}

std::optional<MetricId> metric_from_name(const std::string& name) {
  if (name == "plv") return MetricId::kPlv;
  if (name == "circ" || name == "circcirc" || name == "circular") return MetricId::kCircCirc;
  if (name == "toroidal" || name == "tor") return MetricId::kToroidal;
  if (name == "coherence" || name == "coh") return MetricId::kCoherence;
  if (name == "crp") return MetricId::kCrp;
  if (name == "csw") return MetricId::kCsw;
  if (name == "pwcsw" || name == "pw-csw") return MetricId::kPwCsw;
  return std::nullopt;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> lower_triangle_pairs(
    std::uint32_t n_regions) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(static_cast<std::size_t>(n_regions) * (n_regions - 1) / 2);
  for (std::uint32_t i = 0; i < n_regions; ++i)
    for (std::uint32_t j = i + 1; j < n_regions; ++j) pairs.emplace_back(i, j);
  return pairs;
}

}  // namespace phasesync

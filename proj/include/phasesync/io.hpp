#pragma once

#include <string>
#include <vector>

#include "phasesync/simharness.hpp"
#include "phasesync/types.hpp"

namespace phasesync::io {

// 17 significant digits: round-trip exact for 64-bit floats.
std::string format_double(double v);

// Write-temp-then-rename so readers never observe partial files.
void write_file_atomic(const std::string& path, const std::string& content);

// ROI CSV layout: rows = time points, columns = regions, header row =
// region labels.
RoiDataset read_roi_csv(const std::string& path, double tr_seconds);
void write_roi_csv(const std::string& path, const RoiDataset& data);
void write_phase_csv(const std::string& path, const PhaseMatrix& phases,
                     const std::vector<std::string>& region_labels);

struct SubjectManifest {
  double tr_seconds = 0.0;
  std::vector<std::string> csv_paths;  // resolved against the manifest location
};
SubjectManifest read_subject_manifest(const std::string& path);

// Tensor CSV: one row per pair with an i,j prefix, one column per time
// point; missing entries serialize as nan.
void write_tensor_csv(const std::string& path, const PsTensor& tensor);

// Compact binary container (little-endian): magic "PSTNSR1\0", u32 R,
// u32 T', u32 metric_id, u32 window length (0 = instantaneous), then
// R(R-1)/2 x T' float64 row-major, then the validity bitmask (bit b of
// byte i flags element 8i+b).
void write_tensor_binary(const std::string& path, const PsTensor& tensor);
PsTensor read_tensor_binary(const std::string& path);

// Simulation cell CSV: time_s, mean, lower95, upper95, n_valid.
void write_sim_cell_csv(const std::string& path, const simharness::SimCell& cell,
                        double tr_seconds);

}  // namespace phasesync::io

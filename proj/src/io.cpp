#include "phasesync/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "phasesync/error.hpp"

namespace phasesync::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io_failure, "cannot open for writing: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(ErrorCode::io_failure, "write failed: " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::io_failure, "rename failed: " + path + " (" + ec.message() + ")");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) fail(ErrorCode::io_failure, context + ": trailing junk in '" + s + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail(ErrorCode::io_failure, context + ": cannot parse number '" + s + "'");
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_failure, "cannot open: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void append_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t read_u32(const std::string& buf, std::size_t& pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf.at(pos++))) << (8 * i);
  return v;
}

constexpr char kTensorMagic[8] = {'P', 'S', 'T', 'N', 'S', 'R', '1', '\0'};

}  // namespace

RoiDataset read_roi_csv(const std::string& path, double tr_seconds) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_failure, "cannot open: " + path);

  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::io_failure, path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> labels = split_csv_line(line);
  const std::size_t n_regions = labels.size();
  if (n_regions == 0) fail(ErrorCode::io_failure, path + ": no header columns");

  std::vector<std::vector<double>> time_rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != n_regions)
      fail(ErrorCode::io_failure,
           path + ": row " + std::to_string(time_rows.size() + 2) + " has " +
               std::to_string(fields.size()) + " fields, expected " + std::to_string(n_regions));
    std::vector<double> row(n_regions);
    for (std::size_t c = 0; c < n_regions; ++c) row[c] = parse_double(fields[c], path);
    time_rows.push_back(std::move(row));
  }

  RoiDataset data;
  data.tr_seconds = tr_seconds;
  data.region_labels = labels;
  data.values = Matrix(n_regions, time_rows.size());
  for (std::size_t t = 0; t < time_rows.size(); ++t)
    for (std::size_t r = 0; r < n_regions; ++r) data.values.at(r, t) = time_rows[t][r];
  data.validate();
  return data;
}

void write_roi_csv(const std::string& path, const RoiDataset& data) {
  std::string out;
  for (std::size_t r = 0; r < data.n_regions(); ++r) {
    if (r) out += ',';
    out += data.region_labels.empty() ? "region_" + std::to_string(r) : data.region_labels[r];
  }
  out += '\n';
  for (std::size_t t = 0; t < data.n_samples(); ++t) {
    for (std::size_t r = 0; r < data.n_regions(); ++r) {
      if (r) out += ',';
      out += format_double(data.values.at(r, t));
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

void write_phase_csv(const std::string& path, const PhaseMatrix& phases,
                     const std::vector<std::string>& region_labels) {
  std::string out;
  for (std::size_t r = 0; r < phases.n_regions(); ++r) {
    if (r) out += ',';
    out += (r < region_labels.size()) ? region_labels[r] : "region_" + std::to_string(r);
  }
  out += '\n';
  for (std::size_t t = 0; t < phases.n_samples(); ++t) {
    for (std::size_t r = 0; r < phases.n_regions(); ++r) {
      if (r) out += ',';
      out += format_double(phases.phases.at(r, t));
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

SubjectManifest read_subject_manifest(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::bad_config, path + ": invalid JSON (" + e.what() + ")");
  }
  if (!doc.contains("tr_seconds") || !doc["tr_seconds"].is_number())
    fail(ErrorCode::bad_config, path + ": manifest needs numeric tr_seconds");
  if (!doc.contains("subjects") || !doc["subjects"].is_array() || doc["subjects"].empty())
    fail(ErrorCode::bad_config, path + ": manifest needs a non-empty subjects array");

  SubjectManifest manifest;
  manifest.tr_seconds = doc["tr_seconds"].get<double>();
  const fs::path base = fs::path(path).parent_path();
  for (const auto& entry : doc["subjects"]) {
    if (!entry.is_string()) fail(ErrorCode::bad_config, path + ": subject entries must be paths");
    fs::path p = entry.get<std::string>();
    if (p.is_relative()) p = base / p;
    manifest.csv_paths.push_back(p.string());
  }
  return manifest;
}

void write_tensor_csv(const std::string& path, const PsTensor& tensor) {
  std::string out;
  out += "# phasesync tensor, metric=" + std::string(metric_name(tensor.metric)) +
         " regions=" + std::to_string(tensor.n_regions) +
         " window=" + std::to_string(tensor.window ? tensor.window->length : 0) +
         " time_offset=" + std::to_string(tensor.time_offset) + "\n";
  if (tensor.window)
    out += "# trailing window: the value at column t covers samples [t-L+1 .. t]\n";
  out += "i,j";
  for (std::size_t c = 0; c < tensor.n_times(); ++c)
    out += ",t" + std::to_string(tensor.time_offset + c);
  out += '\n';
  for (std::size_t p = 0; p < tensor.n_pairs(); ++p) {
    const auto [i, j] = tensor.pair_index[p];
    out += std::to_string(i) + ',' + std::to_string(j);
    for (std::size_t c = 0; c < tensor.n_times(); ++c) {
      out += ',';
      out += tensor.valid[p * tensor.n_times() + c] ? format_double(tensor.values.at(p, c))
                                                    : "nan";
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

void write_tensor_binary(const std::string& path, const PsTensor& tensor) {
  std::string buf(kTensorMagic, sizeof(kTensorMagic));
  append_u32(buf, tensor.n_regions);
  append_u32(buf, static_cast<std::uint32_t>(tensor.n_times()));
  append_u32(buf, static_cast<std::uint32_t>(tensor.metric));
  append_u32(buf, tensor.window ? static_cast<std::uint32_t>(tensor.window->length) : 0u);

  const std::size_t n = tensor.n_pairs() * tensor.n_times();
  buf.reserve(buf.size() + 8 * n + (n + 7) / 8);
  for (double v : tensor.values.data()) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    for (int b = 0; b < 8; ++b) buf.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
  }
  for (std::size_t i = 0; i < (n + 7) / 8; ++i) {
    unsigned char byte = 0;
    for (std::size_t b = 0; b < 8 && i * 8 + b < n; ++b)
      if (tensor.valid[i * 8 + b]) byte |= static_cast<unsigned char>(1u << b);
    buf.push_back(static_cast<char>(byte));
  }
  write_file_atomic(path, buf);
}

PsTensor read_tensor_binary(const std::string& path) {
  const std::string buf = read_text_file(path);
  if (buf.size() < 24 || std::memcmp(buf.data(), kTensorMagic, sizeof(kTensorMagic)) != 0)
    fail(ErrorCode::io_failure, path + ": not a phasesync tensor file");
  std::size_t pos = sizeof(kTensorMagic);
  const std::uint32_t n_regions = read_u32(buf, pos);
  const std::uint32_t n_times = read_u32(buf, pos);
  const std::uint32_t metric_raw = read_u32(buf, pos);
  const std::uint32_t window_len = read_u32(buf, pos);
  if (n_regions < 2 || metric_raw > static_cast<std::uint32_t>(MetricId::kPwCsw))
    fail(ErrorCode::io_failure, path + ": corrupt tensor header");

  PsTensor tensor;
  tensor.n_regions = n_regions;
  tensor.metric = static_cast<MetricId>(metric_raw);
  if (window_len > 0) tensor.window = WindowSpec{window_len};
  tensor.time_offset = (window_len > 0 ? window_len - 1 : 0) +
                       (tensor.metric == MetricId::kPwCsw ? 1 : 0);
  tensor.pair_index = lower_triangle_pairs(n_regions);

  const std::size_t n_pairs = tensor.pair_index.size();
  const std::size_t n = n_pairs * n_times;
  if (buf.size() != pos + 8 * n + (n + 7) / 8)
    fail(ErrorCode::io_failure, path + ": truncated tensor payload");

  tensor.values = Matrix(n_pairs, n_times);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos++])) << (8 * b);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    tensor.values.data()[i] = v;
  }
  tensor.valid.assign(n, 0);
  for (std::size_t i = 0; i < (n + 7) / 8; ++i) {
    const auto byte = static_cast<unsigned char>(buf[pos++]);
    for (std::size_t b = 0; b < 8 && i * 8 + b < n; ++b)
      tensor.valid[i * 8 + b] = (byte >> b) & 1u;
  }
  return tensor;
}

void write_sim_cell_csv(const std::string& path, const simharness::SimCell& cell,
                        double tr_seconds) {
  std::string out = "time_s,mean,lower95,upper95,n_valid\n";
  for (std::size_t i = 0; i < cell.mean.size(); ++i) {
    out += format_double(static_cast<double>(cell.time_offset + i) * tr_seconds);
    out += ',';
    out += cell.n_valid[i] ? format_double(cell.mean[i]) : "nan";
    out += ',';
    out += cell.n_valid[i] ? format_double(cell.lower95[i]) : "nan";
    out += ',';
    out += cell.n_valid[i] ? format_double(cell.upper95[i]) : "nan";
    out += ',';
    out += std::to_string(cell.n_valid[i]);
    out += '\n';
  }
  write_file_atomic(path, out);
}

}  // namespace phasesync::io

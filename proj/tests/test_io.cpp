#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "phasesync/error.hpp"
#include "phasesync/io.hpp"
#include "phasesync/rng.hpp"
#include "phasesync/states.hpp"
#include "phasesync/types.hpp"

using namespace phasesync;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("phasesync_io_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("format_double survives a parse round trip") {
  Rng rng = make_rng(3, 0);
  for (int i = 0; i < 2000; ++i) {
    const double v = (rng.uniform01() - 0.5) * std::pow(10.0, rng.uniform_below(12));
    CHECK(std::stod(io::format_double(v)) == v);
  }
  CHECK(io::format_double(0.0) == "0");
}

TEST_CASE("roi csv round trip") {
  TempDir dir;
  Rng rng = make_rng(5, 0);
  RoiDataset data;
  data.tr_seconds = 2.0;
  data.values = Matrix(3, 32);
  for (double& v : data.values.data()) v = rng.normal();
  data.region_labels = {"front", "mid", "back"};

  io::write_roi_csv(dir.file("roi.csv"), data);
  const RoiDataset back = io::read_roi_csv(dir.file("roi.csv"), 2.0);
  CHECK(back.n_regions() == 3);
  CHECK(back.n_samples() == 32);
  CHECK(back.region_labels == data.region_labels);
  CHECK(back.values.data() == data.values.data());  // 17 digits: exact

  CHECK_THROWS_AS(io::read_roi_csv(dir.file("nope.csv"), 2.0), Error);
}

TEST_CASE("phase csv uses the roi orientation") {
  TempDir dir;
  PhaseMatrix phases;
  phases.tr_seconds = 2.0;
  phases.phases = Matrix(2, 20);
  for (std::size_t i = 0; i < 40; ++i) phases.phases.data()[i] = 0.05 * static_cast<double>(i);
  io::write_phase_csv(dir.file("ph.csv"), phases, {"left", "right"});
  const RoiDataset back = io::read_roi_csv(dir.file("ph.csv"), 2.0);
  CHECK(back.n_regions() == 2);
  CHECK(back.n_samples() == 20);
  CHECK(back.region_labels == std::vector<std::string>{"left", "right"});
  CHECK(back.values.data() == phases.phases.data());
}

TEST_CASE("roi csv rejects ragged rows") {
  TempDir dir;
  std::ofstream out(dir.file("bad.csv"));
  out << "a,b\n1.0,2.0\n3.0\n";
  out.close();
  CHECK_THROWS_AS(io::read_roi_csv(dir.file("bad.csv"), 2.0), Error);
}

TEST_CASE("tensor binary round trip preserves bits and flags") {
  TempDir dir;
  Rng rng = make_rng(7, 0);
  Matrix rows(6, 23);
  for (double& v : rows.data()) v = rng.normal();
  PsTensor t = states::devectorize(rows, 4, MetricId::kToroidal, WindowSpec{9}, 8);
  t.valid[17] = 0;
  t.valid[100] = 0;

  io::write_tensor_binary(dir.file("t.pst"), t);
  const PsTensor back = io::read_tensor_binary(dir.file("t.pst"));
  CHECK(back.n_regions == 4);
  CHECK(back.metric == MetricId::kToroidal);
  REQUIRE(back.window.has_value());
  CHECK(back.window->length == 9);
  CHECK(back.time_offset == 8);
  CHECK(back.values.data() == t.values.data());
  CHECK(back.valid == t.valid);
  CHECK(back.pair_index == t.pair_index);

  // corrupt magic
  std::string bytes = slurp(dir.file("t.pst"));
  bytes[0] = 'X';
  std::ofstream bad(dir.file("bad.pst"), std::ios::binary);
  bad.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  bad.close();
  CHECK_THROWS_AS(io::read_tensor_binary(dir.file("bad.pst")), Error);

  // truncated payload
  std::ofstream trunc(dir.file("trunc.pst"), std::ios::binary);
  trunc.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  trunc.close();
  CHECK_THROWS_AS(io::read_tensor_binary(dir.file("trunc.pst")), Error);
}

TEST_CASE("tensor csv layout") {
  TempDir dir;
  Matrix rows(3, 4);
  for (std::size_t i = 0; i < rows.data().size(); ++i)
    rows.data()[i] = static_cast<double>(i) * 0.25;
  PsTensor t = states::devectorize(rows, 3, MetricId::kCrp, std::nullopt, 0);
  t.valid[5] = 0;
  io::write_tensor_csv(dir.file("t.csv"), t);
  const std::string text = slurp(dir.file("t.csv"));
  CHECK(text.find("i,j,t0,t1,t2,t3") != std::string::npos);
  CHECK(text.find("0,1,") != std::string::npos);
  CHECK(text.find("1,2,") != std::string::npos);
  CHECK(text.find("nan") != std::string::npos);
  CHECK(text.find("metric=crp") != std::string::npos);
}

TEST_CASE("subject manifest resolves relative paths") {
  TempDir dir;
  {
    std::ofstream m(dir.file("manifest.json"));
    m << R"({"tr_seconds": 2.0, "subjects": ["a.csv", "sub/b.csv"]})";
  }
  const io::SubjectManifest manifest = io::read_subject_manifest(dir.file("manifest.json"));
  CHECK(manifest.tr_seconds == 2.0);
  REQUIRE(manifest.csv_paths.size() == 2);
  CHECK(manifest.csv_paths[0] == (dir.path / "a.csv").string());
  CHECK(manifest.csv_paths[1] == (dir.path / "sub" / "b.csv").string());

  {
    std::ofstream m(dir.file("bad.json"));
    m << R"({"subjects": []})";
  }
  CHECK_THROWS_AS(io::read_subject_manifest(dir.file("bad.json")), Error);
}

TEST_CASE("sim cell csv carries the time axis in seconds") {
  TempDir dir;
  simharness::SimCell cell;
  cell.metric = MetricId::kPlv;
  cell.window = WindowSpec{30};
  cell.time_offset = 29;
  cell.mean = {0.5, 0.6};
  cell.lower95 = {0.4, 0.5};
  cell.upper95 = {0.6, 0.7};
  cell.n_valid = {10, 10};
  io::write_sim_cell_csv(dir.file("cell.csv"), cell, 2.0);
  const std::string text = slurp(dir.file("cell.csv"));
  CHECK(text.find("time_s,mean,lower95,upper95,n_valid") == 0);
  CHECK(text.find("\n58,") != std::string::npos);  // (29+0)*2
  CHECK(text.find("\n60,") != std::string::npos);  // (29+1)*2
}

TEST_CASE("atomic write leaves no temp file behind") {
  TempDir dir;
  io::write_file_atomic(dir.file("out.txt"), "payload");
  CHECK(slurp(dir.file("out.txt")) == "payload");
  CHECK_FALSE(fs::exists(dir.file("out.txt.tmp")));
}

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pkattract/cloud.hpp"
#include "pkattract/verification.hpp"

namespace pkattract {

/// Header `dim,weight,c0_re,c0_im,...`, one normalized point per row, every
/// number printed with 17 significant digits.
void write_cloud_csv(const Cloud& cloud, const std::string& path);
/// Throws MalformedRow (with the 1-based line number) on bad rows, including
/// all-zero coordinates.
Cloud read_cloud_csv(const std::string& path);

/// One real axis of a chart window: Re or Im of chart coordinate `coord`
/// (an index of the homogeneous vector other than the chart index).
struct HistogramAxis {
  int coord = 0;
  bool imag = false;
  double lo = -1.0;
  double hi = 1.0;
};

struct HistogramWindow {
  int chart = 0;
  HistogramAxis x, y;
  int nx = 256;
  int ny = 256;
};

struct HistogramSummary {
  std::size_t in_window = 0;
  std::size_t out_of_window = 0;  // including points where the chart is undefined
  std::size_t nonzero_cells = 0;
  std::size_t max_count = 0;
  bool empty_window = false;  // more than 99% outside
};

/// Counts per cell, row 0 at the top (largest y).
std::vector<std::vector<std::size_t>> histogram_counts(const Cloud& cloud, const HistogramWindow& w,
                                                       HistogramSummary* summary = nullptr);
/// Writes `<prefix>.pgm` (plain P2, max 255, log-scaled) and
/// `<prefix>.counts.csv` (raw counts, one grid row per line). Throws
/// InvalidParams for resolutions beyond 4096 x 4096.
HistogramSummary write_histogram(const Cloud& cloud, const HistogramWindow& w, const std::string& prefix);

/// 64-bit FNV-1a of a file's bytes, as 16 lowercase hex digits.
std::string fnv1a_file(const std::string& path);

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  int k = 2;
  double lambda_re = 0.0;
  double lambda_im = 0.0;
  double rho = 0.0;
  std::uint64_t seed = 0;
  int workers = 1;
  std::map<std::string, long long> sizes;          // depths, sample counts, ...
  std::map<std::string, std::string> artifacts;    // path -> fnv1a hash
  std::string tool_version = kToolVersion;

  void add_artifact(const std::string& path) { artifacts[path] = fnv1a_file(path); }
  std::string to_json() const;
  void write(const std::string& path) const;
};

std::string lemma_reports_json(const std::vector<LemmaReport>& reports);

}  // namespace pkattract

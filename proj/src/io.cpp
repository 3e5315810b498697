#include "pkattract/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pkattract/error.hpp"

namespace pkattract {

namespace {

void put_double(std::string& out, double x) {
  char buf[32];
  int n = std::snprintf(buf, sizeof buf, "%.17g", x);
  out.append(buf, static_cast<std::size_t>(n));
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Usage, "cannot write '" + path + "'");
  return os;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(v);
}

}  // namespace

void write_cloud_csv(const Cloud& cloud, const std::string& path) {
  std::ofstream os = open_out(path);
  std::string buf = "dim,weight";
  for (int i = 0; i <= cloud.dim; ++i) buf += ",c" + std::to_string(i) + "_re,c" + std::to_string(i) + "_im";
  buf += '\n';
  for (std::size_t r = 0; r < cloud.size(); ++r) {
    ProjPoint p = normalize(cloud.points[r]);
    buf += std::to_string(cloud.dim);
    buf += ',';
    put_double(buf, cloud.weights[r]);
    for (const cplx& c : p.coords()) {
      buf += ',';
      put_double(buf, c.real());
      buf += ',';
      put_double(buf, c.imag());
    }
    buf += '\n';
    if (buf.size() > (1u << 20)) {
      os << buf;
      buf.clear();
    }
  }
  os << buf;
  if (!os) throw Error(ErrorCode::Usage, "write to '" + path + "' failed");
}

Cloud read_cloud_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Usage, "cannot read '" + path + "'");
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::MalformedRow, "line 1: missing header");
  auto head = split_commas(line);
  if (head.size() < 6 || head[0] != "dim" || head[1] != "weight" || head.size() % 2 != 0)
    throw Error(ErrorCode::MalformedRow, "line 1: bad header");
  const int dim = static_cast<int>(head.size() - 2) / 2 - 1;
  Cloud cloud;
  cloud.dim = dim;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto f = split_commas(line);
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (f.size() != head.size())
      throw Error(ErrorCode::MalformedRow, where + "expected " + std::to_string(head.size()) + " fields");
    double d = 0.0, w = 0.0;
    if (!parse_double(f[0], d) || static_cast<int>(d) != dim) throw Error(ErrorCode::MalformedRow, where + "bad dim");
    if (!parse_double(f[1], w) || w < 0.0) throw Error(ErrorCode::MalformedRow, where + "bad weight");
    CVec c(static_cast<std::size_t>(dim) + 1);
    for (int i = 0; i <= dim; ++i) {
      double re = 0.0, im = 0.0;
      if (!parse_double(f[2 + 2 * i], re) || !parse_double(f[3 + 2 * i], im))
        throw Error(ErrorCode::MalformedRow, where + "bad coordinate");
      c[static_cast<std::size_t>(i)] = {re, im};
    }
    if (max_norm(c) == 0.0) throw Error(ErrorCode::MalformedRow, where + "all coordinates are zero");
    cloud.points.emplace_back(std::move(c));
    cloud.weights.push_back(w);
  }
  return cloud;
}

std::vector<std::vector<std::size_t>> histogram_counts(const Cloud& cloud, const HistogramWindow& w,
                                                       HistogramSummary* summary) {
  if (w.nx < 1 || w.ny < 1 || w.nx > 4096 || w.ny > 4096)
    throw Error(ErrorCode::InvalidParams, "resolution must be within 1..4096 per axis");
  if (!(w.x.hi > w.x.lo) || !(w.y.hi > w.y.lo)) throw Error(ErrorCode::InvalidParams, "empty axis range");
  for (int c : {w.chart, w.x.coord, w.y.coord})
    if (c < 0 || c > cloud.dim) throw Error(ErrorCode::DimensionMismatch, "coordinate index out of range");
  if (w.x.coord == w.chart || w.y.coord == w.chart)
    throw Error(ErrorCode::InvalidParams, "axes must use coordinates other than the chart index");

  std::vector<std::vector<std::size_t>> grid(static_cast<std::size_t>(w.ny),
                                             std::vector<std::size_t>(static_cast<std::size_t>(w.nx), 0));
  HistogramSummary s;
  auto value = [](cplx z, const HistogramAxis& a) { return a.imag ? z.imag() : z.real(); };
  for (const auto& p : cloud.points) {
    const cplx piv = p[w.chart];
    if (piv == cplx(0.0)) {
      ++s.out_of_window;
      continue;
    }
    const double x = value(p[w.x.coord] / piv, w.x);
    const double y = value(p[w.y.coord] / piv, w.y);
    if (!(x >= w.x.lo && x < w.x.hi && y >= w.y.lo && y < w.y.hi)) {
      ++s.out_of_window;
      continue;
    }
    auto ix = static_cast<std::size_t>((x - w.x.lo) / (w.x.hi - w.x.lo) * w.nx);
    auto iy = static_cast<std::size_t>((y - w.y.lo) / (w.y.hi - w.y.lo) * w.ny);
    ix = std::min(ix, static_cast<std::size_t>(w.nx - 1));
    iy = std::min(iy, static_cast<std::size_t>(w.ny - 1));
    ++grid[static_cast<std::size_t>(w.ny) - 1 - iy][ix];
    ++s.in_window;
  }
  for (const auto& row : grid)
    for (std::size_t c : row) {
      if (c) ++s.nonzero_cells;
      s.max_count = std::max(s.max_count, c);
    }
  s.empty_window = cloud.size() > 0 && s.out_of_window > 0.99 * static_cast<double>(cloud.size());
  if (summary) *summary = s;
  return grid;
}

HistogramSummary write_histogram(const Cloud& cloud, const HistogramWindow& w, const std::string& prefix) {
  HistogramSummary s;
  auto grid = histogram_counts(cloud, w, &s);
  {
    std::ofstream os = open_out(prefix + ".pgm");
    os << "P2\n" << w.nx << ' ' << w.ny << "\n255\n";
    const double top = std::log1p(static_cast<double>(s.max_count));
    for (const auto& row : grid) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        int v = top > 0.0 ? static_cast<int>(std::lround(255.0 * std::log1p(static_cast<double>(row[i])) / top)) : 0;
        os << (i ? " " : "") << v;
      }
      os << '\n';
    }
  }
  {
    std::ofstream os = open_out(prefix + ".counts.csv");
    for (const auto& row : grid) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
      os << '\n';
    }
  }
  return s;
}

std::string fnv1a_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Usage, "cannot read '" + path + "'");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (is) {
    is.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < is.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["argv"] = argv;
  j["params"] = {{"k", k}, {"lambda_re", lambda_re}, {"lambda_im", lambda_im}, {"rho", rho}};
  j["seed"] = seed;
  j["worker_count"] = workers;
  j["sizes"] = sizes;
  j["artifacts"] = artifacts;
  j["tool_version"] = tool_version;
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::string& path) const {
  std::ofstream os = open_out(path);
  os << to_json();
}

std::string lemma_reports_json(const std::vector<LemmaReport>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    arr.push_back({{"lemma_id", r.lemma_id},
                   {"passed", r.passed},
                   {"min_residual", r.min_residual},
                   {"threshold", r.threshold},
                   {"precision_bits", r.precision_used},
                   {"advisory", r.advisory},
                   {"witnesses", r.witnesses}});
  }
  return arr.dump(2) + "\n";
}

}  // namespace pkattract

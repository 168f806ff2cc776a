#include "lipwalk/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lipwalk/config.hpp"
#include "lipwalk/error.hpp"

namespace lipwalk {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string field_csv(const Field& field, const std::string& config_digest) {
  if (field.empty()) fail(ErrorKind::kInvalidArgument, "cannot emit an empty field");
  const int d = field.dim();
  std::ostringstream out;
  out << "# " << kToolVersion << " config_digest=" << (config_digest.empty() ? "none" : config_digest) << '\n';
  for (int k = 0; k < d; ++k) out << 'x' << (k + 1) << ',';
  out << "value\n";
  for (std::size_t i = 0; i < field.size(); ++i) {
    const LatticePoint& p = field.support()[i];
    for (int k = 0; k < d; ++k) out << p[k] << ',';
    out << format_double(field[i]) << '\n';
  }
  return out.str();
}

void write_field_csv(const Field& field, const std::string& path, const std::string& config_digest) {
  write_text(path, field_csv(field, config_digest));
}

Field parse_field_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int dim = -1;
  std::vector<LatticePoint> pts;
  std::vector<double> vals;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    if (dim < 0) {
      if (cells.size() < 2 || cells.back() != "value") {
        fail(ErrorKind::kIo, "line " + std::to_string(lineno) + ": expected header x1,...,xd,value");
      }
      dim = static_cast<int>(cells.size()) - 1;
      continue;
    }
    if (static_cast<int>(cells.size()) != dim + 1) {
      fail(ErrorKind::kIo, "line " + std::to_string(lineno) + ": expected " + std::to_string(dim + 1) + " cells");
    }
    std::vector<std::int64_t> c(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) {
      char* end = nullptr;
      errno = 0;
      c[static_cast<std::size_t>(k)] = std::strtoll(cells[static_cast<std::size_t>(k)].c_str(), &end, 10);
      if (errno || end == cells[static_cast<std::size_t>(k)].c_str() || *end) {
        fail(ErrorKind::kIo, "line " + std::to_string(lineno) + ": bad coordinate");
      }
    }
    char* end = nullptr;
    const double v = std::strtod(cells.back().c_str(), &end);
    if (end == cells.back().c_str() || *end) fail(ErrorKind::kIo, "line " + std::to_string(lineno) + ": bad value");
    pts.emplace_back(std::span<const std::int64_t>(c));
    vals.push_back(v);
  }
  if (dim < 0) fail(ErrorKind::kIo, "CSV has no header");
  // PointSet sorts; carry values along by point.
  PointSet support(pts);
  if (support.size() != pts.size()) fail(ErrorKind::kIo, "CSV lists a point twice");
  std::vector<double> ordered(vals.size());
  for (std::size_t i = 0; i < pts.size(); ++i) ordered[*support.find(pts[i])] = vals[i];
  return Field(std::move(support), std::move(ordered));
}

Field read_field_csv(const std::string& path) { return parse_field_csv(read_text(path)); }

void write_text(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot open " + path + " for writing");
  out << content;
  out.close();
  if (!out) fail(ErrorKind::kIo, "write to " + path + " failed");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace lipwalk

#include "lipwalk/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "lipwalk/error.hpp"

namespace lipwalk {

LatticePoint::LatticePoint(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) {
    fail(ErrorKind::kInvalidArgument, "dimension must lie in [1, " + std::to_string(kMaxDim) + "]");
  }
}

LatticePoint::LatticePoint(std::initializer_list<std::int64_t> coords)
    : LatticePoint(std::span<const std::int64_t>(coords.begin(), coords.size())) {}

LatticePoint::LatticePoint(std::span<const std::int64_t> coords) : LatticePoint(static_cast<int>(coords.size())) {
  std::copy(coords.begin(), coords.end(), c_.begin());
}

LatticePoint LatticePoint::unit(int dim, int axis) {
  LatticePoint p(dim);
  p[axis] = 1;
  return p;
}

LatticePoint LatticePoint::operator+(const LatticePoint& o) const {
  LatticePoint r = *this;
  for (int k = 0; k < dim_; ++k) r[k] += o[k];
  return r;
}

LatticePoint LatticePoint::operator-(const LatticePoint& o) const {
  LatticePoint r = *this;
  for (int k = 0; k < dim_; ++k) r[k] -= o[k];
  return r;
}

LatticePoint LatticePoint::operator-() const {
  LatticePoint r = *this;
  for (int k = 0; k < dim_; ++k) r[k] = -r[k];
  return r;
}

LatticePoint LatticePoint::operator*(std::int64_t s) const {
  LatticePoint r = *this;
  for (int k = 0; k < dim_; ++k) r[k] *= s;
  return r;
}

std::int64_t LatticePoint::norm_sq() const {
  std::int64_t s = 0;
  for (int k = 0; k < dim_; ++k) s += (*this)[k] * (*this)[k];
  return s;
}

double LatticePoint::norm() const { return std::sqrt(static_cast<double>(norm_sq())); }

bool LatticePoint::is_zero() const {
  for (int k = 0; k < dim_; ++k) {
    if ((*this)[k] != 0) return false;
  }
  return true;
}

std::string LatticePoint::to_string() const {
  std::string s = "(";
  for (int k = 0; k < dim_; ++k) {
    if (k) s += ",";
    s += std::to_string((*this)[k]);
  }
  return s + ")";
}

std::size_t LatticePointHash::operator()(const LatticePoint& p) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (int k = 0; k < kMaxDim; ++k) {
    h ^= static_cast<std::uint64_t>(k < p.dim() ? p[k] : 0) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

std::int64_t distance_sq(const LatticePoint& a, const LatticePoint& b) { return (a - b).norm_sq(); }

LatticePoint parse_point(const std::string& text) {
  std::vector<std::int64_t> coords;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    std::int64_t v = 0;
    const char* first = text.data() + pos;
    const char* last = text.data() + next;
    while (first < last && *first == ' ') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail(ErrorKind::kInvalidArgument, "bad lattice point '" + text + "'");
    coords.push_back(v);
    pos = next + 1;
  }
  return LatticePoint(std::span<const std::int64_t>(coords));
}

PointSet::PointSet(std::vector<LatticePoint> points) : points_(std::move(points)) {
  std::sort(points_.begin(), points_.end());
  points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
  index_.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) index_.emplace(points_[i], i);
}

std::optional<std::size_t> PointSet::find(const LatticePoint& p) const {
  auto it = index_.find(p);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

PointSet PointSet::set_union(const PointSet& o) const {
  std::vector<LatticePoint> out;
  std::set_union(points_.begin(), points_.end(), o.points_.begin(), o.points_.end(), std::back_inserter(out));
  return PointSet(std::move(out));
}

PointSet PointSet::set_difference(const PointSet& o) const {
  std::vector<LatticePoint> out;
  std::set_difference(points_.begin(), points_.end(), o.points_.begin(), o.points_.end(), std::back_inserter(out));
  return PointSet(std::move(out));
}

PointSet PointSet::set_intersection(const PointSet& o) const {
  std::vector<LatticePoint> out;
  std::set_intersection(points_.begin(), points_.end(), o.points_.begin(), o.points_.end(),
                        std::back_inserter(out));
  return PointSet(std::move(out));
}

}  // namespace lipwalk

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lipwalk {

inline constexpr int kMaxDim = 4;

/// A point of Z^d, 1 <= d <= kMaxDim. Unused trailing coordinates are zero so
/// that equality and hashing can look at the whole array.
class LatticePoint {
 public:
  LatticePoint() = default;
  explicit LatticePoint(int dim);
  LatticePoint(std::initializer_list<std::int64_t> coords);
  explicit LatticePoint(std::span<const std::int64_t> coords);

  static LatticePoint unit(int dim, int axis);

  int dim() const { return dim_; }
  std::int64_t operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
  std::int64_t& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }

  LatticePoint operator+(const LatticePoint& o) const;
  LatticePoint operator-(const LatticePoint& o) const;
  LatticePoint operator-() const;
  LatticePoint operator*(std::int64_t s) const;

  std::int64_t norm_sq() const;
  double norm() const;
  bool is_zero() const;

  std::string to_string() const;

  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
  // Lexicographic on coordinates; points of different dimension are never compared.
  friend std::strong_ordering operator<=>(const LatticePoint& a, const LatticePoint& b) {
    for (int k = 0; k < kMaxDim; ++k) {
      if (auto c = a.c_[static_cast<std::size_t>(k)] <=> b.c_[static_cast<std::size_t>(k)]; c != 0) return c;
    }
    return a.dim_ <=> b.dim_;
  }

 private:
  std::array<std::int64_t, kMaxDim> c_{};
  int dim_ = 0;
};

struct LatticePointHash {
  std::size_t operator()(const LatticePoint& p) const noexcept;
};

std::int64_t distance_sq(const LatticePoint& a, const LatticePoint& b);

/// Parses "3,0" or "-1,2,5".
LatticePoint parse_point(const std::string& text);

/// Finite set of lattice points kept in lexicographic order with O(1) lookup
/// of a point's position.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::vector<LatticePoint> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const LatticePoint& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<LatticePoint>& points() const { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  bool contains(const LatticePoint& p) const { return index_.contains(p); }
  std::optional<std::size_t> find(const LatticePoint& p) const;

  PointSet set_union(const PointSet& o) const;
  PointSet set_difference(const PointSet& o) const;
  PointSet set_intersection(const PointSet& o) const;

  friend bool operator==(const PointSet& a, const PointSet& b) { return a.points_ == b.points_; }

 private:
  std::vector<LatticePoint> points_;
  std::unordered_map<LatticePoint, std::size_t, LatticePointHash> index_;
};

}  // namespace lipwalk

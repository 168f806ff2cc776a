#pragma once

#include <cstddef>
#include <vector>

#include "lipwalk/lattice.hpp"

namespace lipwalk {

/// Real values on a finite lattice point set. Support order is the
/// lexicographic order of PointSet; reading a point outside the support is
/// an incomplete-field error, never an implicit zero.
class Field {
 public:
  Field() = default;
  Field(PointSet support, std::vector<double> values);
  Field(PointSet support, double fill);

  const PointSet& support() const { return support_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  int dim() const { return support_.empty() ? 0 : support_[0].dim(); }

  bool contains(const LatticePoint& p) const { return support_.contains(p); }
  double at(const LatticePoint& p) const;
  double& at(const LatticePoint& p);
  double operator[](std::size_t i) const { return values_[i]; }

  double max_value() const;
  double min_value() const;

  /// Values on `points`, which must all lie in the support.
  Field restrict_to(const PointSet& points) const;

 private:
  PointSet support_;
  std::vector<double> values_;
};

}  // namespace lipwalk

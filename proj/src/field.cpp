#include "lipwalk/field.hpp"

#include <algorithm>

#include "lipwalk/error.hpp"

namespace lipwalk {

Field::Field(PointSet support, std::vector<double> values) : support_(std::move(support)), values_(std::move(values)) {
  if (support_.size() != values_.size()) fail(ErrorKind::kInvalidArgument, "field support/value size mismatch");
}

Field::Field(PointSet support, double fill) : support_(std::move(support)), values_(support_.size(), fill) {}

double Field::at(const LatticePoint& p) const {
  auto i = support_.find(p);
  if (!i) fail(ErrorKind::kIncompleteField, "no value at " + p.to_string());
  return values_[*i];
}

double& Field::at(const LatticePoint& p) {
  auto i = support_.find(p);
  if (!i) fail(ErrorKind::kIncompleteField, "no value at " + p.to_string());
  return values_[*i];
}

double Field::max_value() const {
  if (values_.empty()) fail(ErrorKind::kIncompleteField, "max of empty field");
  return *std::max_element(values_.begin(), values_.end());
}

double Field::min_value() const {
  if (values_.empty()) fail(ErrorKind::kIncompleteField, "min of empty field");
  return *std::min_element(values_.begin(), values_.end());
}

Field Field::restrict_to(const PointSet& points) const {
  std::vector<double> v;
  v.reserve(points.size());
  for (const auto& p : points) v.push_back(at(p));
  return Field(points, std::move(v));
}

}  // namespace lipwalk

#include "lipwalk/linalg.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lipwalk/error.hpp"

namespace lipwalk::linalg {

EllMatrix::EllMatrix(std::size_t rows, std::vector<Entry> entries) : rows_(rows) {
  if (rows > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    fail(ErrorKind::kInvalidArgument, "system too large for 32-bit indices");
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  // Merge duplicates.
  std::vector<Entry> merged;
  merged.reserve(entries.size());
  for (const Entry& e : entries) {
    if (e.row < 0 || static_cast<std::size_t>(e.row) >= rows || e.col < 0 || static_cast<std::size_t>(e.col) >= rows) {
      fail(ErrorKind::kInvalidArgument, "matrix entry out of range");
    }
    if (!merged.empty() && merged.back().row == e.row && merged.back().col == e.col) {
      merged.back().value += e.value;
    } else {
      merged.push_back(e);
    }
  }
  std::vector<std::size_t> count(rows, 0);
  for (const Entry& e : merged) ++count[static_cast<std::size_t>(e.row)];
  width_ = rows == 0 ? 0 : *std::max_element(count.begin(), count.end());
  col_.assign(width_ * rows_, 0);
  weight_.assign(width_ * rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < width_; ++j) col_[j * rows_ + i] = static_cast<std::int32_t>(i);
  }
  std::fill(count.begin(), count.end(), 0);
  for (const Entry& e : merged) {
    auto i = static_cast<std::size_t>(e.row);
    std::size_t k = count[i]++ * rows_ + i;
    col_[k] = e.col;
    weight_[k] = e.value;
  }
}

std::vector<EllMatrix::Entry> EllMatrix::row_entries(std::size_t i) const {
  std::vector<Entry> out;
  for (std::size_t j = 0; j < width_; ++j) {
    std::size_t k = j * rows_ + i;
    if (weight_[k] != 0.0) out.push_back({static_cast<std::int32_t>(i), col_[k], weight_[k]});
  }
  return out;
}

std::vector<EllMatrix::Entry> EllMatrix::entries() const {
  std::vector<Entry> out;
  out.reserve(rows_ * width_);
  for (std::size_t i = 0; i < rows_; ++i) {
    auto r = row_entries(i);
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

EllMatrix EllMatrix::transpose() const {
  auto e = entries();
  for (Entry& x : e) std::swap(x.row, x.col);
  return EllMatrix(rows_, std::move(e));
}

IterativeResult bicgstab(const EllMatrix& q, std::span<const double> b, std::span<double> x, double target,
                         std::size_t max_iterations, const simd::KernelTable& kt) {
  const std::size_t n = q.rows();
  if (b.size() != n || x.size() != n) fail(ErrorKind::kInvalidArgument, "bicgstab: size mismatch");
  IterativeResult res;
  if (n == 0) {
    res.converged = true;
    return res;
  }
  const simd::EllView a = q.view();
  std::vector<double> r(n), rhat(n), p(n, 0.0), v(n, 0.0), s(n), t(n);

  kt.residual(a, b.data(), x.data(), r.data());
  res.residual = kt.norm_inf(r.data(), n);
  if (res.residual <= target) {
    res.converged = true;
    return res;
  }

  auto restart = [&] {
    rhat = r;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
  };
  restart();
  double rho = 1.0, alpha = 1.0, omega = 1.0;

  while (res.iterations < max_iterations) {
    ++res.iterations;
    double rho_new = kt.dot(rhat.data(), r.data(), n);
    if (!std::isfinite(rho_new)) break;
    if (std::fabs(rho_new) < 1e-300) {
      restart();
      rho = alpha = omega = 1.0;
      rho_new = kt.dot(rhat.data(), r.data(), n);
      if (std::fabs(rho_new) < 1e-300) break;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    kt.axpy(-omega, v.data(), p.data(), n);
    kt.xpay(r.data(), beta, p.data(), n);  // p = r + beta (p - omega v)
    kt.apply_a(a, p.data(), v.data());
    const double rv = kt.dot(rhat.data(), v.data(), n);
    if (rv == 0.0 || !std::isfinite(rv)) {
      restart();
      rho = alpha = omega = 1.0;
      continue;
    }
    alpha = rho / rv;
    s = r;
    kt.axpy(-alpha, v.data(), s.data(), n);
    bool done = kt.norm_inf(s.data(), n) <= target;
    if (done) {
      kt.axpy(alpha, p.data(), x.data(), n);
    } else {
      kt.apply_a(a, s.data(), t.data());
      const double tt = kt.dot(t.data(), t.data(), n);
      omega = tt > 0.0 ? kt.dot(t.data(), s.data(), n) / tt : 0.0;
      kt.axpy(alpha, p.data(), x.data(), n);
      kt.axpy(omega, s.data(), x.data(), n);
      r = s;
      kt.axpy(-omega, t.data(), r.data(), n);
      done = kt.norm_inf(r.data(), n) <= target;
      if (omega == 0.0) {
        kt.residual(a, b.data(), x.data(), r.data());
        restart();
        rho = alpha = omega = 1.0;
        continue;
      }
    }
    if (done) {
      // The recurrence residual drifts; only the recomputed one counts.
      kt.residual(a, b.data(), x.data(), r.data());
      res.residual = kt.norm_inf(r.data(), n);
      if (res.residual <= target) {
        res.converged = true;
        return res;
      }
      restart();
      rho = alpha = omega = 1.0;
    }
  }
  kt.residual(a, b.data(), x.data(), r.data());
  res.residual = kt.norm_inf(r.data(), n);
  res.converged = res.residual <= target;
  return res;
}

std::vector<double> dense_system(const EllMatrix& q) {
  const std::size_t n = q.rows();
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] = 1.0;
  for (const auto& e : q.entries()) a[static_cast<std::size_t>(e.row) * n + static_cast<std::size_t>(e.col)] -= e.value;
  return a;
}

DenseLU::DenseLU(std::vector<double> a, std::size_t n) : n_(n), lu_(std::move(a)), piv_(n) {
  if (lu_.size() != n * n) fail(ErrorKind::kInvalidArgument, "DenseLU: matrix is not square");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::fabs(lu_[k * n + k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      double v = std::fabs(lu_[i * n + k]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best == 0.0) fail(ErrorKind::kDegenerate, "DenseLU: singular matrix at column " + std::to_string(k));
    piv_[k] = p;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_[k * n + j], lu_[p * n + j]);
    }
    const double inv = 1.0 / lu_[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      double f = lu_[i * n + k] * inv;
      lu_[i * n + k] = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_[i * n + j] -= f * lu_[k * n + j];
    }
  }
}

void DenseLU::solve(std::span<double> b) const {
  const std::size_t n = n_;
  if (b.size() != n) fail(ErrorKind::kInvalidArgument, "DenseLU: rhs size mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t j = 0; j < i; ++j) s -= lu_[i * n + j] * b[j];
    b[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu_[i * n + j] * b[j];
    b[i] = s / lu_[i * n + i];
  }
}

struct SparseDirect::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  std::size_t n = 0;
};

SparseDirect::SparseDirect(const EllMatrix& q) : impl_(std::make_unique<Impl>()) {
  const std::size_t n = q.rows();
  impl_->n = n;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(n * (q.width() + 1));
  for (std::size_t i = 0; i < n; ++i) trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
  for (const auto& e : q.entries()) trip.emplace_back(e.row, e.col, -e.value);
  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  impl_->lu.compute(a);
  if (impl_->lu.info() != Eigen::Success) {
    fail(ErrorKind::kDegenerate, "sparse LU factorization failed: " + impl_->lu.lastErrorMessage());
  }
}

SparseDirect::~SparseDirect() = default;
SparseDirect::SparseDirect(SparseDirect&&) noexcept = default;
SparseDirect& SparseDirect::operator=(SparseDirect&&) noexcept = default;

std::size_t SparseDirect::size() const { return impl_->n; }

void SparseDirect::solve(std::span<double> block, std::size_t count) const {
  const auto n = static_cast<Eigen::Index>(impl_->n);
  if (block.size() != impl_->n * count) fail(ErrorKind::kInvalidArgument, "SparseDirect: block size mismatch");
  if (count == 0 || n == 0) return;
  Eigen::Map<Eigen::MatrixXd> b(block.data(), n, static_cast<Eigen::Index>(count));
  Eigen::MatrixXd x = impl_->lu.solve(b);
  b = x;
}

void SparseDirect::solve_transpose(std::span<double> block, std::size_t count) const {
  const auto n = static_cast<Eigen::Index>(impl_->n);
  if (block.size() != impl_->n * count) fail(ErrorKind::kInvalidArgument, "SparseDirect: block size mismatch");
  if (count == 0 || n == 0) return;
  Eigen::Map<Eigen::MatrixXd> b(block.data(), n, static_cast<Eigen::Index>(count));
  Eigen::MatrixXd x = impl_->lu.transpose().solve(b);
  b = x;
}

}  // namespace lipwalk::linalg

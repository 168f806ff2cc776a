#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "lipwalk/simd/kernels.hpp"

namespace lipwalk::linalg {

/// Sparse n×n matrix Q in column-major ELLPACK layout. The systems solved
/// here are always (I - Q) x = b with Q nonnegative and substochastic.
class EllMatrix {
 public:
  struct Entry {
    std::int32_t row;
    std::int32_t col;
    double value;
  };

  EllMatrix() = default;
  /// Entries may come in any order; duplicates are summed.
  EllMatrix(std::size_t rows, std::vector<Entry> entries);

  std::size_t rows() const { return rows_; }
  std::size_t width() const { return width_; }
  simd::EllView view() const { return {col_.data(), weight_.data(), rows_, width_, rows_}; }

  /// Entries of row i with nonzero weight, in storage order.
  std::vector<Entry> row_entries(std::size_t i) const;
  std::vector<Entry> entries() const;
  EllMatrix transpose() const;

 private:
  std::size_t rows_ = 0;
  std::size_t width_ = 0;
  std::vector<std::int32_t> col_;
  std::vector<double> weight_;
};

struct IterativeResult {
  bool converged = false;
  std::size_t iterations = 0;
  double residual = 0.0;  // true residual max-norm at exit
};

/// BiCGSTAB for (I - Q) x = b, starting from the contents of x. Stops once
/// the recomputed residual satisfies |b - (I - Q) x|_∞ <= target.
IterativeResult bicgstab(const EllMatrix& q, std::span<const double> b, std::span<double> x, double target,
                         std::size_t max_iterations, const simd::KernelTable& kt = simd::active());

/// Row-major dense I - Q.
std::vector<double> dense_system(const EllMatrix& q);

/// LU with partial pivoting of a dense square matrix.
class DenseLU {
 public:
  DenseLU(std::vector<double> a, std::size_t n);
  std::size_t size() const { return n_; }
  /// Overwrites b with the solution of A x = b.
  void solve(std::span<double> b) const;

 private:
  std::size_t n_;
  std::vector<double> lu_;
  std::vector<std::size_t> piv_;
};

/// Sparse LU factorization of I - Q (Eigen SparseLU, COLAMD ordering). One
/// factorization serves forward and transposed solves for any number of
/// right-hand sides.
class SparseDirect {
 public:
  explicit SparseDirect(const EllMatrix& q);
  ~SparseDirect();
  SparseDirect(SparseDirect&&) noexcept;
  SparseDirect& operator=(SparseDirect&&) noexcept;

  std::size_t size() const;
  /// Column-major block of `count` right-hand sides, overwritten by solutions.
  void solve(std::span<double> block, std::size_t count) const;
  void solve_transpose(std::span<double> block, std::size_t count) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lipwalk::linalg

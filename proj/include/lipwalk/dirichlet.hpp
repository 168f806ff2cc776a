#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "lipwalk/field.hpp"
#include "lipwalk/geometry.hpp"
#include "lipwalk/kernel.hpp"
#include "lipwalk/lattice.hpp"
#include "lipwalk/linalg.hpp"

namespace lipwalk {

enum class SolveMethod { kAuto, kIterative, kDense, kSparseDirect };
std::string to_string(SolveMethod m);

/// Interior sizes up to this use the dense LU fallback.
inline constexpr std::size_t kDenseLimit = 500;

struct SolveOptions {
  double tol = 1e-10;
  SolveMethod method = SolveMethod::kAuto;
  /// 0 picks a budget from the system size.
  std::size_t max_iterations = 0;
};

struct SolveInfo {
  SolveMethod method = SolveMethod::kAuto;
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// The linear system behind every Dirichlet problem on a finite interior I:
///   u(x) = Σ_e π(x, e) u(x + e),  x ∈ I,
/// with u given on ∂I. A lazy step (e = 0) is eliminated by dividing row x
/// by 1 - π(x, 0), so the system reads (I - Q) u_I = B g with Q
/// substochastic and B coupling rows to boundary values g.
class DirichletOperator {
 public:
  struct Coupling {
    std::int32_t boundary;  // index into boundary()
    double weight;          // already divided by 1 - π(x, 0)
  };

  DirichletOperator(PointSet interior, const TransitionKernel& kernel);

  const PointSet& interior() const { return interior_; }
  const PointSet& boundary() const { return boundary_; }
  const linalg::EllMatrix& q() const { return q_; }
  /// 1 / (1 - π(x, 0)) per interior row.
  const std::vector<double>& scale() const { return scale_; }
  std::span<const Coupling> coupling(std::size_t row) const {
    return {coupling_.data() + cptr_[row], cptr_[row + 1] - cptr_[row]};
  }

  /// B g for boundary values g (ordered as boundary()).
  std::vector<double> rhs(std::span<const double> boundary_values) const;

  /// Solves (I - Q) x = b.
  std::vector<double> solve(std::span<const double> b, const SolveOptions& opts, SolveInfo* info = nullptr) const;
  /// Solves (I - Q)^T x = b.
  std::vector<double> solve_transpose(std::span<const double> b, const SolveOptions& opts,
                                      SolveInfo* info = nullptr) const;

  /// Sparse LU of I - Q, built on first use and shared afterwards.
  const linalg::SparseDirect& factorization() const;

  /// max_x |Lu(x)| over the interior for u given on I and on ∂I.
  double max_abs_L(std::span<const double> interior_values, std::span<const double> boundary_values) const;

 private:
  std::vector<double> solve_impl(std::span<const double> b, bool transposed, const SolveOptions& opts,
                                 SolveInfo* info) const;
  const linalg::EllMatrix& q_transpose() const;
  /// |(I - Q)^{-1}|_∞ (or of the transpose), from one solve against the
  /// all-ones vector; the inverse is entrywise nonnegative.
  double inverse_norm(bool transposed) const;

  PointSet interior_;
  PointSet boundary_;
  linalg::EllMatrix q_;
  std::vector<double> scale_;
  std::vector<std::size_t> cptr_;
  std::vector<Coupling> coupling_;
  std::vector<double> lazy_;  // π(x, 0)

  mutable std::mutex cache_mutex_;
  mutable std::shared_ptr<const linalg::SparseDirect> lu_;
  mutable std::shared_ptr<const linalg::EllMatrix> qt_;
  mutable double inv_norm_[2] = {-1.0, -1.0};
};

/// Interior set, kernel and boundary data covering ∂I exactly.
class DirichletProblem {
 public:
  DirichletProblem(PointSet interior, TransitionKernel kernel, Field boundary_data);

  const PointSet& interior() const { return interior_; }
  const TransitionKernel& kernel() const { return kernel_; }
  const Field& boundary_data() const { return data_; }

 private:
  PointSet interior_;
  TransitionKernel kernel_;
  Field data_;
};

/// Harmonic extension of the boundary data; the result lives on I ∪ ∂I.
/// Throws convergence-failure (with the final residual) when no method
/// reaches |Lu| <= tol (1 + |u|_∞).
Field solve_dirichlet(const DirichletProblem& p, const SolveOptions& opts = {}, SolveInfo* info = nullptr);

/// x ↦ P_x[S(τ_I) ∈ T] on I. T must lie in ∂I (invalid-target otherwise).
Field harmonic_measure(const PointSet& interior, const TransitionKernel& kernel, const PointSet& target,
                       const SolveOptions& opts = {});

/// x ↦ G_x^y = Σ_n P_x(S_n = y, τ_I > n) on I; y ∈ I (invalid-source otherwise).
Field green_function(const PointSet& interior, const TransitionKernel& kernel, const LatticePoint& y,
                     const SolveOptions& opts = {});

/// x ↦ G_y^x on I, the walk started at y; one transposed solve.
Field green_from(const PointSet& interior, const TransitionKernel& kernel, const LatticePoint& y,
                 const SolveOptions& opts = {});

/// Single-point harmonic measures H(x, b) = P_x[S(τ_I) = b] for x in
/// `rows` (interior indices) and b in `cols` (boundary indices), row-major.
/// Uses the sparse factorization, solving by columns or by rows, whichever
/// set is smaller.
std::vector<double> harmonic_measure_matrix(const DirichletOperator& op, std::span<const std::size_t> rows,
                                            std::span<const std::size_t> cols);

/// Exit split of the collar W = C_{Kr,r}(y): top = ∂W ∩ D_{Kr,r}(y),
/// side = (∂W ∩ C) \ D_{Kr,r}(y), bottom = ∂W ∩ C^c. Fields live on the
/// evaluation set C ∩ B_r(y).
struct ExitSplit {
  PointSet eval;
  Field top, side, bottom, ratio;
  double min_ratio = 0.0;
  LatticePoint argmin;
  std::size_t collar_size = 0;
  std::size_t top_count = 0, side_count = 0, bottom_count = 0;
};

/// Exit probabilities through a thin collar span many orders of magnitude;
/// elimination on the M-matrix keeps them accurate entrywise, while an
/// iterative solve only bounds the absolute error. kAuto resolves to sparse
/// LU here.
SolveOptions collar_options(SolveOptions opts);

ExitSplit exit_split(const LatticePoint& y, const Rational& K, const Rational& r, const LipschitzDomain& domain,
                     const TransitionKernel& kernel, const SolveOptions& opts = {});

/// Top / side / bottom partition of the boundary of the collar C_{Kr,r}(y).
struct CollarGeometry {
  PointSet collar;
  PointSet top, side, bottom;
};
CollarGeometry collar_geometry(const LatticePoint& y, const Rational& K, const Rational& r,
                               const LipschitzDomain& domain);

}  // namespace lipwalk

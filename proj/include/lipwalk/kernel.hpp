#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lipwalk/field.hpp"
#include "lipwalk/lattice.hpp"
#include "lipwalk/rational.hpp"

namespace lipwalk {

/// Finite step set Γ ⊂ Z^d. Steps are distinct, sorted lexicographically and
/// must include every positive unit vector. The zero step (lazy walk) is
/// allowed.
class StepSet {
 public:
  StepSet() = default;
  explicit StepSet(std::vector<LatticePoint> steps);

  /// ±e_k for k = 1..d, in lexicographic order.
  static StepSet nearest_neighbour(int dim);

  int dim() const { return dim_; }
  std::size_t size() const { return steps_.size(); }
  const LatticePoint& operator[](std::size_t i) const { return steps_[i]; }
  const std::vector<LatticePoint>& steps() const { return steps_; }
  auto begin() const { return steps_.begin(); }
  auto end() const { return steps_.end(); }
  std::optional<std::size_t> index_of(const LatticePoint& e) const;
  double max_length() const;

 private:
  std::vector<LatticePoint> steps_;
  int dim_ = 0;
};

/// Largest α for which some weighting π on Γ satisfies Σπ = 1, Σπe = 0 and
/// π(e) >= α for every e. Zero means no centered elliptic weighting exists.
double max_ellipticity_floor(const StepSet& steps);

enum class KernelKind { kHomogeneous, kPeriodic, kFormula };

/// π(x, ·) on a fixed step set. Weights come from a small table indexed by
/// x mod period (homogeneous kernels use a single table) or from a bounded
/// cosine formula:
///   π(x, ±e_k) = (1 + ε cos(2πk/d + ω·x)) / (2d),
/// which is normalized and centered for d >= 2 with floor (1 - ε)/(2d).
class TransitionKernel {
 public:
  struct CosineFormula {
    double amplitude = 0.0;
    std::vector<double> wavenumber;
  };

  static TransitionKernel simple_random_walk(int dim);
  static TransitionKernel homogeneous(StepSet steps, std::vector<double> weights, double alpha);
  static TransitionKernel homogeneous_exact(StepSet steps, std::vector<Rational> weights, Rational alpha);
  /// `tables` holds one weight vector per residue class of x mod `period`,
  /// classes ordered lexicographically by residue.
  static TransitionKernel periodic(StepSet steps, std::vector<std::int64_t> period,
                                   std::vector<std::vector<double>> tables, double alpha);
  static TransitionKernel periodic_exact(StepSet steps, std::vector<std::int64_t> period,
                                         std::vector<std::vector<Rational>> tables, Rational alpha);
  static TransitionKernel cosine(int dim, double amplitude, std::vector<double> wavenumber);

  KernelKind kind() const { return kind_; }
  const StepSet& steps() const { return steps_; }
  int dim() const { return steps_.dim(); }
  double alpha() const { return alpha_; }
  std::optional<Rational> exact_alpha() const { return exact_alpha_; }
  bool is_exact() const { return !exact_tables_.empty(); }
  const std::vector<std::int64_t>& period() const { return period_; }
  const std::vector<std::vector<double>>& tables() const { return tables_; }
  const std::vector<std::vector<Rational>>& exact_tables() const { return exact_tables_; }
  const CosineFormula& formula() const { return formula_; }

  /// Writes π(x, e) for every e in step order. `out` must have size |Γ|.
  void weights_at(const LatticePoint& x, std::span<double> out) const;
  std::vector<double> weights_at(const LatticePoint& x) const;
  /// Exact weights at x; only for kernels built from rationals.
  std::vector<Rational> exact_weights_at(const LatticePoint& x) const;

  /// Number of distinct weight vectors (table kinds) or nullopt (formula).
  std::optional<std::size_t> table_count() const;
  std::size_t table_index(const LatticePoint& x) const;

  /// Replaces the table entry used at sites of residue `table`; for tests of
  /// defective kernels. No validation is performed.
  TransitionKernel with_table_entry(std::size_t table, std::size_t step, double w) const;

 private:
  KernelKind kind_ = KernelKind::kHomogeneous;
  StepSet steps_;
  double alpha_ = 0.0;
  std::optional<Rational> exact_alpha_;
  std::vector<std::int64_t> period_;
  std::vector<std::vector<double>> tables_;
  std::vector<std::vector<Rational>> exact_tables_;
  CosineFormula formula_;
};

enum class KernelCondition { kNormalization, kCentering, kEllipticity };
std::string to_string(KernelCondition c);

struct KernelViolation {
  LatticePoint site;
  KernelCondition condition;
  double magnitude = 0.0;
  std::vector<double> drift;  // filled for centering violations
};

struct KernelValidationReport {
  bool exact = false;        // checked in rational arithmetic
  std::size_t sites_checked = 0;
  double worst_normalization = 0.0;  // max |Σπ - 1|
  double worst_drift = 0.0;          // max |Σπe|_∞
  double min_weight = 0.0;           // min π(x, e) over the window
  double max_feasible_alpha = 0.0;   // for the step set alone
  std::optional<KernelViolation> violation;
  bool ok() const { return !violation.has_value(); }
};

inline constexpr double kKernelTolerance = 1e-12;

/// Checks normalization, centering and ellipticity at every site of `window`
/// (exactly for rational kernels, to kKernelTolerance otherwise).
KernelValidationReport check_kernel(const TransitionKernel& k, const PointSet& window);

/// As check_kernel, but throws invalid-kernel carrying the witness site.
KernelValidationReport validate_kernel(const TransitionKernel& k, const PointSet& window);

/// Σ_e π(x, e) e.
std::vector<double> drift(const TransitionKernel& k, const LatticePoint& x);

/// Lu(x) = Σ_e π(x, e) u(x + e) - u(x).
double apply_L(const TransitionKernel& k, const Field& u, const LatticePoint& x);

}  // namespace lipwalk

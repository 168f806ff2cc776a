#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lipwalk/dirichlet.hpp"
#include "lipwalk/field.hpp"
#include "lipwalk/geometry.hpp"
#include "lipwalk/kernel.hpp"

namespace lipwalk {

/// Outer boundary data on the sphere part of ∂(C ∩ B_R(y*)); the ∂C part
/// always gets 0.
///  - cap: 1 where the height z_1 - φ(z') is at least R/2, else 0;
///  - sphere: 1 everywhere on the sphere part;
///  - height: z_1 - φ(z').
enum class OuterData { kCap, kSphere, kHeight };
std::string to_string(OuterData d);
OuterData parse_outer_data(const std::string& s);

inline constexpr std::int64_t kDefaultReferenceHeight = 8;

struct ExhaustionSchedule {
  std::vector<std::int64_t> radii;  // strictly increasing
  LatticePoint anchor;              // y*, a point of ∂C
  LatticePoint reference;           // x0
  std::int64_t inner_radius = 0;    // 0 means radii.front()
  OuterData data = OuterData::kCap;

  /// Anchor at the origin and x0 = 8 e_1.
  static ExhaustionSchedule standard(int dim, std::vector<std::int64_t> radii);
};

/// Normalized solution on the window C ∩ B_R(y*), stored on the window and
/// its Γ-boundary, with value exactly 1 at the reference point.
struct HarmonicCandidate {
  Field field;
  std::int64_t window_radius = 0;
  LatticePoint anchor;
  LatticePoint reference;
  OuterData data = OuterData::kCap;
  std::size_t interior_size = 0;
  SolveInfo solve;
};

HarmonicCandidate harmonic_candidate(const LipschitzDomain& domain, const TransitionKernel& kernel,
                                     const LatticePoint& anchor, std::int64_t radius, const LatticePoint& reference,
                                     OuterData data, const SolveOptions& opts = {});

struct ConvergenceEntry {
  std::int64_t radius_from = 0;
  std::int64_t radius_to = 0;
  double deviation = 0.0;  // max |h_to / h_from - 1| on the inner window
  LatticePoint witness;
};

struct Construction {
  HarmonicCandidate candidate;  // at the largest radius
  std::vector<ConvergenceEntry> log;
  std::vector<double> residuals;  // max |Lh| per radius
};

/// Exhaustion over the schedule. Non-convergence error when the deviation
/// fails to decrease across three consecutive radii.
Construction construct_harmonic(const ExhaustionSchedule& schedule, const LipschitzDomain& domain,
                                const TransitionKernel& kernel, const SolveOptions& opts = {});

/// k_y^x = G_y^x / G_y^{x0} for every x in `eval`, computed with the walk
/// killed on leaving C ∩ window.
struct MartinResult {
  Field values;
  std::string window;
  std::size_t window_size = 0;
};

MartinResult martin_kernel_field(const LatticePoint& y, const PointSet& eval, const Region& window,
                                 const LipschitzDomain& domain, const TransitionKernel& kernel,
                                 const LatticePoint& x0, const SolveOptions& opts = {});

double martin_kernel(const LatticePoint& y, const LatticePoint& x, const Region& window,
                     const LipschitzDomain& domain, const TransitionKernel& kernel, const LatticePoint& x0,
                     const SolveOptions& opts = {});

/// Ball around `anchor` of radius 4|y - anchor|.
Region martin_window(const LatticePoint& y, const LatticePoint& anchor);

struct CollapseEntry {
  LatticePoint y;
  double deviation = 0.0;  // sup over eval of |k_y^x / h(x) - 1|
  LatticePoint witness;
  std::string window;
};

std::vector<CollapseEntry> martin_collapse(const std::vector<LatticePoint>& ys, const PointSet& eval,
                                           const Field& h, const LipschitzDomain& domain,
                                           const TransitionKernel& kernel, const LatticePoint& anchor,
                                           const LatticePoint& x0, const SolveOptions& opts = {});

struct PairDeviation {
  std::size_t a = 0, b = 0;
  double deviation = 0.0;  // max over inner of |h_a / h_b - 1|
  LatticePoint witness;
};

struct UniquenessReport {
  std::vector<PairDeviation> pairs;
  double max_deviation = 0.0;
};

/// Compares candidates pairwise on `inner` after renormalizing each at x0.
/// Degenerate-candidate error when a candidate is not positive there.
UniquenessReport uniqueness_check(const std::vector<HarmonicCandidate>& candidates, const PointSet& inner,
                                  const LatticePoint& x0);

}  // namespace lipwalk

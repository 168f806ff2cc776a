#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lipwalk/kernel.hpp"
#include "lipwalk/lattice.hpp"

namespace lipwalk {

struct SimulationConfig {
  TransitionKernel kernel;
  LatticePoint start;
  PointSet stop_region;
  /// Step cap per path; 0 means 100 · diam(stop_region)^2, with the
  /// diameter taken as the bounding-box diagonal (never smaller).
  std::uint64_t path_cap = 0;
  std::uint64_t seed = 0;
  std::uint64_t n_paths = 1;
  /// Worker threads (0 = the library-wide count); results do not depend
  /// on this.
  unsigned threads = 1;
};

struct PathOutcome {
  LatticePoint exit;         // first point outside the stop region (last point if truncated)
  std::uint64_t steps = 0;   // exit time τ, or the cap
  bool truncated = false;
};

struct EstimatorResult {
  double point_estimate = 0.0;
  double half_width_95 = 0.0;
  std::uint64_t n_effective = 0;  // completed paths
  std::uint64_t truncated_paths = 0;
};

/// Effective step cap for a configuration.
std::uint64_t effective_path_cap(const SimulationConfig& cfg);

/// One outcome per path, in path order. Inconclusive-simulation error when
/// every path hits the cap.
std::vector<PathOutcome> simulate_exit(const SimulationConfig& cfg);

/// Fraction of completed paths exiting into `target` ⊆ ∂(stop region),
/// with half width 1.96 sqrt(p(1 - p)/n).
EstimatorResult estimate_exit_probability(const SimulationConfig& cfg, const PointSet& target);

/// Mean number of visits to y at times n < τ (time 0 included), with a
/// normal-approximation 95% half width.
EstimatorResult estimate_green(const SimulationConfig& cfg, const LatticePoint& y);

}  // namespace lipwalk

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lipwalk/geometry.hpp"
#include "lipwalk/kernel.hpp"
#include "lipwalk/lattice.hpp"

namespace lipwalk {

inline constexpr const char* kToolVersion = "lipwalk 0.1.0";

/// A parsed experiment configuration. Every field of the JSON document maps
/// to a member here; unknown keys at any level are rejected with the path of
/// the offending key.
///
/// Top-level keys: experiment, kernel, domain, grid, tolerance, seed,
/// threads, paths, anchor, reference, start, region, data, target,
/// outer_data, inner_radius, escape, window, band, outputs.
struct ExperimentConfig {
  std::string experiment;
  TransitionKernel kernel;
  LipschitzDomain domain;

  /// Scale grids keyed by R, K, r, radii or n.
  std::map<std::string, std::vector<double>> grid;
  double tolerance = 1e-10;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
  std::uint64_t paths = 100000;

  std::optional<LatticePoint> anchor;     // default: origin
  std::optional<LatticePoint> reference;  // default: 8 e_1
  std::optional<LatticePoint> start;
  std::optional<std::string> region;
  std::string data = "one";
  std::string target = "top";
  std::vector<std::string> outer_data = {"cap"};
  std::int64_t inner_radius = 0;
  std::vector<LatticePoint> escape;  // Martin escape directions
  std::int64_t window = 8;           // half-width of the kernel sample cube
  double band = 2.0;

  std::map<std::string, std::string> outputs;

  /// Canonical JSON text (sorted keys, no whitespace) and its FNV-1a-64 hex
  /// digest. Overrides applied after loading update both.
  std::string canonical;
  std::string digest;

  ExperimentConfig();

  LatticePoint anchor_or_origin() const;
  LatticePoint reference_or_default() const;
  std::string output(const std::string& key, const std::string& fallback) const;
};

/// Parses configuration text. Malformed JSON raises invalid-config with the
/// line and column of the error; schema violations name the field path.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Applies a JSON object of top-level overrides (same schema) and refreshes
/// the canonical text and digest.
void apply_overrides(ExperimentConfig& cfg, const std::string& overrides_json);

/// FNV-1a 64-bit hash as 16 lowercase hex digits.
std::string fnv1a64_hex(const std::string& bytes);

/// Byte offset to 1-based (line, column).
std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset);

}  // namespace lipwalk

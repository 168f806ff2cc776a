#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lipwalk/dirichlet.hpp"
#include "lipwalk/field.hpp"
#include "lipwalk/geometry.hpp"
#include "lipwalk/kernel.hpp"

namespace lipwalk {

/// Harmonic-measure basis on a finite window W: column b is the harmonic
/// measure of the single boundary point b, sampled at the evaluation points.
/// Every nonnegative harmonic function on W with data on the chosen sources
/// is a nonnegative combination of these columns.
struct HarmonicBasis {
  PointSet window;
  PointSet boundary;                 // ∂W
  std::vector<std::size_t> sources;  // indices into boundary
  PointSet eval;
  std::vector<double> values;  // eval.size() × sources.size(), row-major

  std::size_t columns() const { return sources.size(); }
  double operator()(std::size_t e, std::size_t s) const { return values[e * sources.size() + s]; }
  double& operator()(std::size_t e, std::size_t s) { return values[e * sources.size() + s]; }
  const LatticePoint& source(std::size_t s) const { return boundary[sources[s]]; }
  /// Multiplies column s by c (used by homogeneity checks).
  void scale_column(std::size_t s, double c);
};

/// `allowed` selects which boundary points may carry data. `eval` must lie
/// inside the window.
HarmonicBasis harmonic_basis(const PointSet& window, const TransitionKernel& kernel,
                             const std::function<bool(const LatticePoint&)>& allowed, const PointSet& eval);

/// A measured quantity with the witness that attains it.
struct Measurement {
  double value = 0.0;
  std::vector<LatticePoint> witness;  // meaning depends on the experiment
  std::map<std::string, double> extra;
};

// --- Interior Harnack -------------------------------------------------------

struct HarnackResult {
  Measurement constant;  // max_b max_{B_R} u_b / min_{B_R} u_b; witness {b, argmax, argmin}
  Measurement local;     // max one-step ratio u(ζ + e) / u(ζ); witness {b, ζ + e, ζ}
  double inverse_alpha = 0.0;
  std::size_t window_size = 0;
  std::size_t basis_size = 0;
};

/// Basis on B_{2R}(y) ⊂ Z^d, evaluated on B_R(y).
HarnackResult harnack_constant(const LatticePoint& y, const Rational& R, const TransitionKernel& kernel);

/// max over basis columns of W and pairs (ζ, ζ + e), both in W, of
/// u(ζ + e) / u(ζ). One-step ellipticity bounds it by 1/α.
Measurement local_harnack_constant(const PointSet& window, const TransitionKernel& kernel);
Measurement local_harnack_from(const HarmonicBasis& basis, const TransitionKernel& kernel);

// --- Boundary estimates -----------------------------------------------------

/// Basis on C ∩ B_{outer}(y) with data off ∂C ∩ B_{vanish}(y), evaluated on
/// `eval` (radii squared, exact).
HarmonicBasis vanishing_basis(const LatticePoint& y, const Rational& outer_sq, const Rational& vanish_sq,
                              const LipschitzDomain& domain, const TransitionKernel& kernel, const PointSet& eval);

/// y + R e_1 if it lies in C (Carleson / boundary Harnack anchor).
LatticePoint boundary_anchor(const LatticePoint& y, std::int64_t R, const LipschitzDomain& domain);

/// max_b max_{C ∩ B_R(y)} u_b / u_b(y + R e_1) over the basis of C ∩ B_{3R}(y)
/// vanishing on ∂C ∩ B_{2R}(y). Witness {b, argmax}.
Measurement carleson_constant(const LatticePoint& y, std::int64_t R, const LipschitzDomain& domain,
                              const TransitionKernel& kernel);
Measurement carleson_from(const HarmonicBasis& basis, const PointSet& region, const LatticePoint& anchor);

/// Single-field Carleson ratio max_{region} u / u(anchor).
double carleson_ratio(const Field& u, const PointSet& region, const LatticePoint& anchor);

/// ρ̂ = max_b max_{closure(C ∩ B_R)} u_b / max_{closure(C ∩ B_{2√d R})} u_b over
/// the basis of C ∩ B_{3√d R}(y) vanishing on ∂C ∩ B_{2√d R}(y).
/// Witness {b, argmax inner, argmax outer}; extra["margin"] = 1 - ρ̂.
Measurement prop1_contraction(const LatticePoint& y, std::int64_t R, const LipschitzDomain& domain,
                              const TransitionKernel& kernel);

/// max over pairs (u, v) of [max_{C ∩ B_R} u/v] / [u/v at y + R e_1] over the
/// basis of C ∩ B_{3KR}(y) vanishing on ∂C ∩ B_{2KR}(y). Witness {u source,
/// v source, argmax}.
Measurement boundary_harnack_constant(const LatticePoint& y, std::int64_t R, std::int64_t K,
                                      const LipschitzDomain& domain, const TransitionKernel& kernel);
Measurement boundary_harnack_from(const HarmonicBasis& basis, const PointSet& region, const LatticePoint& anchor);

// --- Collar experiments -----------------------------------------------------

struct OnsetRow {
  Rational K;
  double min_ratio = 0.0;
  LatticePoint argmin;
};

struct OnsetResult {
  std::vector<OnsetRow> table;
  std::optional<Rational> onset;
};

/// Runs exit_split for every K; onset is the first K with min ratio >= 1.
OnsetResult lemma2_sweep(const LatticePoint& y, const Rational& r, const LipschitzDomain& domain,
                         const TransitionKernel& kernel, const std::vector<Rational>& K_grid,
                         const SolveOptions& opts = {});
/// As lemma2_sweep; onset-not-found error (carrying the table) if none.
OnsetResult lemma2_onset(const LatticePoint& y, const Rational& r, const LipschitzDomain& domain,
                         const TransitionKernel& kernel, const std::vector<Rational>& K_grid,
                         const SolveOptions& opts = {});

struct DecayFit {
  double beta = 0.0;        // fitted exponent
  double intercept = 0.0;   // least-squares log-intercept
  double floor = 0.0;       // largest c with u >= c (δ/r)^β at every level
  std::size_t levels = 0;
  std::vector<std::pair<double, double>> envelope;  // (δ/r, min u) per δ level
};

inline constexpr std::int64_t kDefaultDecayK = 8;

/// u = harmonic measure of the top set of C_{Kr,r}(y); fits the lower
/// envelope of log u against log(δ/r) on C ∩ B_r(y).
DecayFit boundary_decay_profile(const LatticePoint& y, const Rational& r, const LipschitzDomain& domain,
                                const TransitionKernel& kernel, const Rational& K = Rational(kDefaultDecayK),
                                const SolveOptions& opts = {});
/// Envelope fit of a given field over `points`; insufficient-data error with
/// fewer than five distinct δ levels.
DecayFit fit_decay(const Field& u, const PointSet& points, const LipschitzDomain& domain, const Rational& r);

struct LateralRow {
  Rational K;
  double max_v = 0.0;
  LatticePoint argmax;
};

struct LateralResult {
  std::vector<LateralRow> table;
  double slope = 0.0;  // least-squares slope of log max v against K
  double worst_step_slope = 0.0;  // max over consecutive grid pairs
};

/// v = harmonic measure of the side set of C_{Kr,r}(y), maximized over the
/// closure of C_{r,r}(y). Empty-geometry error when the side set is empty.
LateralResult lateral_decay(const LatticePoint& y, const Rational& r, const LipschitzDomain& domain,
                            const TransitionKernel& kernel, const std::vector<Rational>& K_grid,
                            const SolveOptions& opts = {});

struct GrowthFit {
  double gamma = 0.0;
  double constant = 0.0;  // smallest C with envelope <= C (R/δ)^γ
  std::vector<std::pair<double, double>> envelope;  // (R/δ, max u/u(anchor))
};

/// Upper envelope of u(x)/u(y + R e_1) against R/δ(x) on C ∩ B_R(y) over the
/// Carleson basis.
GrowthFit interior_growth_exponent(const LatticePoint& y, std::int64_t R, const LipschitzDomain& domain,
                                   const TransitionKernel& kernel);

// --- Reports ----------------------------------------------------------------

inline constexpr double kUniformityBand = 2.0;

/// max / min of positive values (or of |values| when all share one sign);
/// infinity on mixed signs or zeros.
double band_ratio(const std::vector<double>& values);

/// Least-squares slope and intercept of y against x.
std::pair<double, double> least_squares(const std::vector<double>& x, const std::vector<double>& y);

struct LabConstant {
  std::string name;
  double value = 0.0;
  std::map<std::string, double> scale;
};

struct LabWitness {
  std::string name;
  std::vector<LatticePoint> points;
};

struct LabReport {
  std::string experiment;
  std::string config_digest;
  std::map<std::string, std::vector<double>> grid;
  std::vector<LabConstant> constants;
  std::vector<LabWitness> witnesses;
  double tolerance = 1e-10;
  double band = kUniformityBand;
  std::vector<std::string> checks_failed;
  bool ok() const { return checks_failed.empty(); }
};

}  // namespace lipwalk

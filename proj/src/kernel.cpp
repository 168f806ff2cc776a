#include "lipwalk/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lipwalk/error.hpp"

namespace lipwalk {

// ---------------------------------------------------------------------------
// StepSet

StepSet::StepSet(std::vector<LatticePoint> steps) {
  if (steps.empty()) fail(ErrorKind::kInvalidStepSet, "empty step set");
  dim_ = steps.front().dim();
  for (const auto& e : steps) {
    if (e.dim() != dim_) fail(ErrorKind::kInvalidStepSet, "steps of mixed dimension");
  }
  std::sort(steps.begin(), steps.end());
  if (std::adjacent_find(steps.begin(), steps.end()) != steps.end()) {
    fail(ErrorKind::kInvalidStepSet, "duplicate step");
  }
  steps_ = std::move(steps);
  for (int k = 0; k < dim_; ++k) {
    if (!index_of(LatticePoint::unit(dim_, k))) {
      fail(ErrorKind::kInvalidStepSet, "step set lacks unit vector e_" + std::to_string(k + 1));
    }
  }
}

StepSet StepSet::nearest_neighbour(int dim) {
  std::vector<LatticePoint> s;
  for (int k = 0; k < dim; ++k) {
    s.push_back(LatticePoint::unit(dim, k));
    s.push_back(-LatticePoint::unit(dim, k));
  }
  return StepSet(std::move(s));
}

std::optional<std::size_t> StepSet::index_of(const LatticePoint& e) const {
  auto it = std::lower_bound(steps_.begin(), steps_.end(), e);
  if (it == steps_.end() || *it != e) return std::nullopt;
  return static_cast<std::size_t>(it - steps_.begin());
}

double StepSet::max_length() const {
  double m = 0.0;
  for (const auto& e : steps_) m = std::max(m, e.norm());
  return m;
}

// ---------------------------------------------------------------------------
// Feasibility LP: maximize t subject to
//   |Γ| t + Σ s_e = 1,   (Σ e) t + Σ s_e e = 0,   t, s >= 0,
// where π(e) = t + s_e. Dense two-phase simplex with Bland's rule; the
// problem has d + 1 rows and a handful of columns.

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows + 1, std::vector<double>(cols + 1)) {}

  double& at(std::size_t r, std::size_t c) { return a_[r][c]; }
  double& rhs(std::size_t r) { return a_[r][cols_]; }
  double& obj(std::size_t c) { return a_[rows_][c]; }
  double obj_value() { return a_[rows_][cols_]; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    double p = a_[r][c];
    for (auto& v : a_[r]) v /= p;
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      double f = a_[i][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) a_[i][j] -= f * a_[r][j];
    }
    basis_[r] = c;
  }

  // Maximizes with the objective row already expressed in reduced costs.
  // Columns >= allowed_cols never enter.
  void run(std::size_t allowed_cols) {
    constexpr double eps = 1e-12;
    for (int guard = 0; guard < 10000; ++guard) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < allowed_cols; ++j) {
        if (a_[rows_][j] < -eps) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return;
      std::size_t leave = rows_;
      double best = 0.0;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (a_[i][enter] > eps) {
          double ratio = a_[i][cols_] / a_[i][enter];
          if (leave == rows_ || ratio < best - eps || (std::abs(ratio - best) <= eps && basis_[i] < basis_[leave])) {
            leave = i;
            best = ratio;
          }
        }
      }
      if (leave == rows_) return;  // unbounded; cannot happen here since Σπ = 1
      pivot(leave, enter);
    }
  }

 private:
  std::size_t rows_, cols_;
  std::vector<std::vector<double>> a_;
  std::vector<std::size_t> basis_;
};

}  // namespace

double max_ellipticity_floor(const StepSet& steps) {
  const std::size_t m = steps.size();
  const std::size_t d = static_cast<std::size_t>(steps.dim());
  const std::size_t rows = d + 1;
  const std::size_t nvar = 1 + m;
  Tableau tab(rows, nvar + rows);

  tab.at(0, 0) = static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) tab.at(0, 1 + i) = 1.0;
  tab.rhs(0) = 1.0;
  for (std::size_t k = 0; k < d; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double ek = static_cast<double>(steps[i][static_cast<int>(k)]);
      tab.at(1 + k, 1 + i) = ek;
      sum += ek;
    }
    tab.at(1 + k, 0) = sum;
  }
  tab.basis().resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    tab.at(r, nvar + r) = 1.0;
    tab.basis()[r] = nvar + r;
  }

  // Phase 1: maximize -Σ artificials; reduced costs are minus the column sums.
  for (std::size_t j = 0; j <= nvar + rows; ++j) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += (j == nvar + rows) ? tab.rhs(r) : tab.at(r, j);
    if (j < nvar) tab.obj(j) = -s;
    else if (j < nvar + rows) tab.obj(j) = 0.0;
    else tab.obj(j) = -s;
  }
  tab.run(nvar + rows);
  if (tab.obj_value() < -1e-10) return 0.0;  // no centered distribution at all

  // Drive remaining artificials out of the basis where possible.
  for (std::size_t r = 0; r < rows; ++r) {
    if (tab.basis()[r] >= nvar) {
      for (std::size_t j = 0; j < nvar; ++j) {
        if (std::abs(tab.at(r, j)) > 1e-12) {
          tab.pivot(r, j);
          break;
        }
      }
    }
  }

  // Phase 2: maximize t.
  for (std::size_t j = 0; j <= nvar + rows; ++j) tab.obj(j) = 0.0;
  tab.obj(0) = -1.0;
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t b = tab.basis()[r];
    double f = tab.obj(b);
    if (f != 0.0) {
      for (std::size_t j = 0; j <= nvar + rows; ++j) {
        tab.obj(j) -= f * (j == nvar + rows ? tab.rhs(r) : tab.at(r, j));
      }
    }
  }
  tab.run(nvar);
  return std::max(0.0, tab.obj_value());
}

// ---------------------------------------------------------------------------
// TransitionKernel

namespace {

std::size_t residue_classes(const std::vector<std::int64_t>& period) {
  std::size_t n = 1;
  for (auto p : period) n *= static_cast<std::size_t>(p);
  return n;
}

void check_table_shapes(const StepSet& steps, const std::vector<std::int64_t>& period, std::size_t tables,
                        const std::vector<std::size_t>& widths) {
  if (!period.empty() && static_cast<int>(period.size()) != steps.dim()) {
    fail(ErrorKind::kInvalidKernel, "period must have one entry per dimension");
  }
  for (auto p : period) {
    if (p < 1) fail(ErrorKind::kInvalidKernel, "period entries must be >= 1");
  }
  if (tables != residue_classes(period)) {
    fail(ErrorKind::kInvalidKernel, "expected " + std::to_string(residue_classes(period)) +
                                        " weight tables, got " + std::to_string(tables));
  }
  for (auto w : widths) {
    if (w != steps.size()) fail(ErrorKind::kInvalidKernel, "weight table size differs from step count");
  }
}

}  // namespace

TransitionKernel TransitionKernel::simple_random_walk(int dim) {
  StepSet steps = StepSet::nearest_neighbour(dim);
  std::vector<Rational> w(steps.size(), Rational(1, 2 * dim));
  return homogeneous_exact(std::move(steps), std::move(w), Rational(1, 2 * dim));
}

TransitionKernel TransitionKernel::homogeneous(StepSet steps, std::vector<double> weights, double alpha) {
  return periodic(std::move(steps), {}, {std::move(weights)}, alpha);
}

TransitionKernel TransitionKernel::homogeneous_exact(StepSet steps, std::vector<Rational> weights, Rational alpha) {
  return periodic_exact(std::move(steps), {}, {std::move(weights)}, alpha);
}

TransitionKernel TransitionKernel::periodic(StepSet steps, std::vector<std::int64_t> period,
                                            std::vector<std::vector<double>> tables, double alpha) {
  std::vector<std::size_t> widths;
  for (const auto& t : tables) widths.push_back(t.size());
  check_table_shapes(steps, period, tables.size(), widths);
  TransitionKernel k;
  k.kind_ = period.empty() ? KernelKind::kHomogeneous : KernelKind::kPeriodic;
  k.steps_ = std::move(steps);
  k.period_ = std::move(period);
  k.tables_ = std::move(tables);
  k.alpha_ = alpha;
  return k;
}

TransitionKernel TransitionKernel::periodic_exact(StepSet steps, std::vector<std::int64_t> period,
                                                  std::vector<std::vector<Rational>> tables, Rational alpha) {
  std::vector<std::vector<double>> dtables;
  for (const auto& t : tables) {
    std::vector<double> row;
    for (const auto& w : t) row.push_back(w.to_double());
    dtables.push_back(std::move(row));
  }
  TransitionKernel k = periodic(std::move(steps), std::move(period), std::move(dtables), alpha.to_double());
  k.exact_tables_ = std::move(tables);
  k.exact_alpha_ = alpha;
  return k;
}

TransitionKernel TransitionKernel::cosine(int dim, double amplitude, std::vector<double> wavenumber) {
  if (dim < 2) fail(ErrorKind::kInvalidKernel, "cosine formula kernel needs d >= 2");
  if (!(amplitude >= 0.0 && amplitude < 1.0)) fail(ErrorKind::kInvalidKernel, "cosine amplitude must lie in [0, 1)");
  if (static_cast<int>(wavenumber.size()) != dim) fail(ErrorKind::kInvalidKernel, "wavenumber needs d entries");
  TransitionKernel k;
  k.kind_ = KernelKind::kFormula;
  k.steps_ = StepSet::nearest_neighbour(dim);
  k.alpha_ = (1.0 - amplitude) / (2.0 * dim);
  k.formula_ = {amplitude, std::move(wavenumber)};
  return k;
}

std::size_t TransitionKernel::table_index(const LatticePoint& x) const {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < period_.size(); ++k) {
    std::int64_t p = period_[k];
    std::int64_t r = ((x[static_cast<int>(k)] % p) + p) % p;
    idx = idx * static_cast<std::size_t>(p) + static_cast<std::size_t>(r);
  }
  return idx;
}

std::optional<std::size_t> TransitionKernel::table_count() const {
  if (kind_ == KernelKind::kFormula) return std::nullopt;
  return tables_.size();
}

void TransitionKernel::weights_at(const LatticePoint& x, std::span<double> out) const {
  if (kind_ != KernelKind::kFormula) {
    const auto& t = tables_[table_index(x)];
    std::copy(t.begin(), t.end(), out.begin());
    return;
  }
  const int d = dim();
  double phase = 0.0;
  for (int k = 0; k < d; ++k) phase += formula_.wavenumber[static_cast<std::size_t>(k)] * static_cast<double>(x[k]);
  for (int k = 0; k < d; ++k) {
    double w = (1.0 + formula_.amplitude * std::cos(2.0 * std::numbers::pi * k / d + phase)) / (2.0 * d);
    out[*steps_.index_of(LatticePoint::unit(d, k))] = w;
    out[*steps_.index_of(-LatticePoint::unit(d, k))] = w;
  }
}

std::vector<double> TransitionKernel::weights_at(const LatticePoint& x) const {
  std::vector<double> w(steps_.size());
  weights_at(x, w);
  return w;
}

std::vector<Rational> TransitionKernel::exact_weights_at(const LatticePoint& x) const {
  if (!is_exact()) fail(ErrorKind::kInvalidArgument, "kernel has no exact weights");
  return exact_tables_[table_index(x)];
}

TransitionKernel TransitionKernel::with_table_entry(std::size_t table, std::size_t step, double w) const {
  if (kind_ == KernelKind::kFormula) fail(ErrorKind::kInvalidArgument, "formula kernels have no tables");
  TransitionKernel k = *this;
  k.tables_.at(table).at(step) = w;
  k.exact_tables_.clear();
  k.exact_alpha_.reset();
  return k;
}

// ---------------------------------------------------------------------------
// Validation

std::string to_string(KernelCondition c) {
  switch (c) {
    case KernelCondition::kNormalization: return "normalization";
    case KernelCondition::kCentering: return "centering";
    case KernelCondition::kEllipticity: return "ellipticity";
  }
  return "?";
}

namespace {

struct Worst {
  double magnitude = 0.0;
  std::optional<LatticePoint> site;
  std::vector<double> drift;
  void offer(double m, const LatticePoint& x, const std::vector<double>& dr = {}) {
    if (!site || m > magnitude) {
      magnitude = m;
      site = x;
      drift = dr;
    }
  }
};

}  // namespace

KernelValidationReport check_kernel(const TransitionKernel& k, const PointSet& window) {
  KernelValidationReport rep;
  rep.exact = k.is_exact();
  rep.max_feasible_alpha = max_ellipticity_floor(k.steps());
  rep.min_weight = 1.0;
  const int d = k.dim();
  const std::size_t m = k.steps().size();

  Worst norm_bad, drift_bad, ellip_bad;
  std::vector<double> w(m);
  for (const auto& x : window) {
    if (x.dim() != d) fail(ErrorKind::kInvalidArgument, "window dimension differs from kernel");
    ++rep.sites_checked;
    k.weights_at(x, w);
    std::vector<double> dr = drift(k, x);
    double sum = 0.0;
    double mn = 1.0;
    for (double v : w) {
      sum += v;
      mn = std::min(mn, v);
    }
    double dmax = 0.0;
    for (double v : dr) dmax = std::max(dmax, std::abs(v));
    rep.worst_normalization = std::max(rep.worst_normalization, std::abs(sum - 1.0));
    rep.worst_drift = std::max(rep.worst_drift, dmax);
    rep.min_weight = std::min(rep.min_weight, mn);

    bool norm_ok, drift_ok, ellip_ok;
    if (rep.exact) {
      auto ew = k.exact_weights_at(x);
      Rational s(0);
      std::vector<Rational> edr(static_cast<std::size_t>(d), Rational(0));
      bool floor_ok = true;
      for (std::size_t i = 0; i < m; ++i) {
        s += ew[i];
        for (int c = 0; c < d; ++c) edr[static_cast<std::size_t>(c)] += ew[i] * Rational(k.steps()[i][c]);
        if (ew[i] < *k.exact_alpha()) floor_ok = false;
      }
      norm_ok = s == Rational(1);
      drift_ok = std::all_of(edr.begin(), edr.end(), [](const Rational& r) { return r == Rational(0); });
      ellip_ok = floor_ok;
    } else {
      norm_ok = std::abs(sum - 1.0) <= kKernelTolerance;
      drift_ok = dmax <= kKernelTolerance;
      ellip_ok = mn >= k.alpha() - kKernelTolerance;
    }
    if (!norm_ok) norm_bad.offer(std::abs(sum - 1.0), x);
    if (!drift_ok) drift_bad.offer(dmax, x, dr);
    if (!ellip_ok) ellip_bad.offer(k.alpha() - mn, x);
  }

  if (norm_bad.site) {
    rep.violation = KernelViolation{*norm_bad.site, KernelCondition::kNormalization, norm_bad.magnitude, {}};
  } else if (drift_bad.site) {
    rep.violation = KernelViolation{*drift_bad.site, KernelCondition::kCentering, drift_bad.magnitude, drift_bad.drift};
  } else if (ellip_bad.site || !(k.alpha() > 0.0)) {
    LatticePoint site = ellip_bad.site ? *ellip_bad.site : (window.empty() ? LatticePoint(d) : window[0]);
    rep.violation = KernelViolation{site, KernelCondition::kEllipticity, ellip_bad.magnitude, {}};
  }
  return rep;
}

KernelValidationReport validate_kernel(const TransitionKernel& k, const PointSet& window) {
  KernelValidationReport rep = check_kernel(k, window);
  if (rep.max_feasible_alpha <= 1e-12) {
    fail(ErrorKind::kInvalidStepSet, "no centered elliptic weighting exists on this step set");
  }
  if (rep.violation) {
    const auto& v = *rep.violation;
    std::string msg = to_string(v.condition) + " violated at x=" + v.site.to_string() +
                      " (magnitude " + std::to_string(v.magnitude) + ")";
    if (!v.drift.empty()) {
      msg += " drift=(";
      for (std::size_t i = 0; i < v.drift.size(); ++i) msg += (i ? "," : "") + std::to_string(v.drift[i]);
      msg += ")";
    }
    fail(ErrorKind::kInvalidKernel, msg);
  }
  return rep;
}

std::vector<double> drift(const TransitionKernel& k, const LatticePoint& x) {
  const int d = k.dim();
  std::vector<double> w = k.weights_at(x);
  std::vector<double> out(static_cast<std::size_t>(d), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (int c = 0; c < d; ++c) out[static_cast<std::size_t>(c)] += w[i] * static_cast<double>(k.steps()[i][c]);
  }
  return out;
}

double apply_L(const TransitionKernel& k, const Field& u, const LatticePoint& x) {
  std::vector<double> w = k.weights_at(x);
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * u.at(x + k.steps()[i]);
  return acc - u.at(x);
}

}  // namespace lipwalk

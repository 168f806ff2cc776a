#include "lipwalk/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "lipwalk/error.hpp"
#include "lipwalk/parallel.hpp"
#include "lipwalk/rng.hpp"

namespace lipwalk {

namespace {

/// Cumulative step tables, built once per distinct weight vector for table
/// kernels and on the fly for formula kernels.
class StepSampler {
 public:
  explicit StepSampler(const TransitionKernel& k) : k_(k), m_(k.steps().size()) {
    if (k.table_count()) {
      cumulative_.resize(k.tables().size() * m_);
      for (std::size_t t = 0; t < k.tables().size(); ++t) fill(k.tables()[t], cumulative_.data() + t * m_);
    }
  }

  std::size_t sample(const LatticePoint& x, double u, std::vector<double>& scratch) const {
    const double* c;
    if (!cumulative_.empty()) {
      c = cumulative_.data() + k_.table_index(x) * m_;
    } else {
      scratch.resize(2 * m_);
      k_.weights_at(x, std::span<double>(scratch.data(), m_));
      fill(std::span<const double>(scratch.data(), m_), scratch.data() + m_);
      c = scratch.data() + m_;
    }
    const double v = u * c[m_ - 1];
    for (std::size_t s = 0; s + 1 < m_; ++s) {
      if (v < c[s]) return s;
    }
    return m_ - 1;
  }

 private:
  static void fill(std::span<const double> w, double* out) {
    double acc = 0.0;
    for (std::size_t s = 0; s < w.size(); ++s) out[s] = acc += w[s];
  }

  const TransitionKernel& k_;
  std::size_t m_;
  std::vector<double> cumulative_;
};

void check_config(const SimulationConfig& cfg) {
  if (cfg.n_paths < 1) fail(ErrorKind::kInvalidArgument, "n_paths must be at least 1");
  if (cfg.stop_region.empty()) fail(ErrorKind::kInvalidArgument, "stop region is empty");
  if (cfg.start.dim() != cfg.kernel.dim()) fail(ErrorKind::kInvalidArgument, "start point has the wrong dimension");
  if (!cfg.stop_region.contains(cfg.start)) {
    fail(ErrorKind::kInvalidArgument, "start " + cfg.start.to_string() + " is not in the stop region");
  }
}

struct PathRecord {
  PathOutcome outcome;
  std::uint64_t visits = 0;
};

PathRecord run_path(const SimulationConfig& cfg, const StepSampler& sampler, std::uint64_t cap, std::uint64_t path,
                    const LatticePoint* watch, std::vector<double>& scratch) {
  PathStream rng(cfg.seed, path);
  PathRecord rec;
  LatticePoint x = cfg.start;
  const auto& steps = cfg.kernel.steps();
  std::uint64_t n = 0;
  while (true) {
    if (!cfg.stop_region.contains(x)) {
      rec.outcome = {x, n, false};
      return rec;
    }
    if (watch && x == *watch) ++rec.visits;
    if (n == cap) {
      rec.outcome = {x, n, true};
      return rec;
    }
    x = x + steps[sampler.sample(x, rng.uniform(), scratch)];
    ++n;
  }
}

std::vector<PathRecord> run_all(const SimulationConfig& cfg, const LatticePoint* watch) {
  check_config(cfg);
  const std::uint64_t cap = effective_path_cap(cfg);
  StepSampler sampler(cfg.kernel);
  std::vector<PathRecord> out(cfg.n_paths);
  const unsigned want = cfg.threads ? cfg.threads : thread_count();
  const unsigned threads = std::max(1u, std::min<unsigned>(want, static_cast<unsigned>(std::min<std::uint64_t>(cfg.n_paths, 256))));
  auto work = [&](std::uint64_t lo, std::uint64_t hi) {
    std::vector<double> scratch;
    for (std::uint64_t p = lo; p < hi; ++p) out[p] = run_path(cfg, sampler, cap, p, watch, scratch);
  };
  if (threads == 1) {
    work(0, cfg.n_paths);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (cfg.n_paths + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      std::uint64_t lo = std::min<std::uint64_t>(cfg.n_paths, t * chunk);
      std::uint64_t hi = std::min<std::uint64_t>(cfg.n_paths, lo + chunk);
      pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  bool any = std::any_of(out.begin(), out.end(), [](const PathRecord& r) { return !r.outcome.truncated; });
  if (!any) {
    fail(ErrorKind::kInconclusiveSimulation,
         "all " + std::to_string(cfg.n_paths) + " paths reached the step cap " + std::to_string(cap));
  }
  return out;
}

}  // namespace

std::uint64_t effective_path_cap(const SimulationConfig& cfg) {
  if (cfg.path_cap > 0) return cfg.path_cap;
  const int d = cfg.start.dim();
  std::int64_t diag_sq = 0;
  for (int a = 0; a < d; ++a) {
    std::int64_t lo = cfg.stop_region[0][a], hi = lo;
    for (const auto& p : cfg.stop_region) {
      lo = std::min(lo, p[a]);
      hi = std::max(hi, p[a]);
    }
    diag_sq += (hi - lo) * (hi - lo);
  }
  return 100 * static_cast<std::uint64_t>(std::max<std::int64_t>(diag_sq, 1));
}

std::vector<PathOutcome> simulate_exit(const SimulationConfig& cfg) {
  auto recs = run_all(cfg, nullptr);
  std::vector<PathOutcome> out;
  out.reserve(recs.size());
  for (auto& r : recs) out.push_back(r.outcome);
  return out;
}

EstimatorResult estimate_exit_probability(const SimulationConfig& cfg, const PointSet& target) {
  for (const auto& t : target) {
    bool outside = !cfg.stop_region.contains(t);
    bool adjacent = false;
    for (const auto& e : cfg.kernel.steps()) adjacent = adjacent || cfg.stop_region.contains(t - e);
    if (!outside || !adjacent) {
      fail(ErrorKind::kInvalidTarget, "target point " + t.to_string() + " is not on the boundary of the stop region");
    }
  }
  auto recs = run_all(cfg, nullptr);
  EstimatorResult res;
  std::uint64_t hits = 0;
  for (const auto& r : recs) {
    if (r.outcome.truncated) {
      ++res.truncated_paths;
      continue;
    }
    ++res.n_effective;
    if (target.contains(r.outcome.exit)) ++hits;
  }
  const double n = static_cast<double>(res.n_effective);
  const double p = static_cast<double>(hits) / n;
  res.point_estimate = p;
  res.half_width_95 = 1.96 * std::sqrt(p * (1.0 - p) / n);
  return res;
}

EstimatorResult estimate_green(const SimulationConfig& cfg, const LatticePoint& y) {
  if (!cfg.stop_region.contains(y)) fail(ErrorKind::kInvalidSource, "point " + y.to_string() + " is not in the stop region");
  auto recs = run_all(cfg, &y);
  EstimatorResult res;
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& r : recs) {
    if (r.outcome.truncated) {
      ++res.truncated_paths;
      continue;
    }
    ++res.n_effective;
    const double v = static_cast<double>(r.visits);
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(res.n_effective);
  const double mean = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
  res.point_estimate = mean;
  res.half_width_95 = 1.96 * std::sqrt(var / n);
  return res;
}

}  // namespace lipwalk

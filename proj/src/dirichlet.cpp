#include "lipwalk/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lipwalk/error.hpp"
#include "lipwalk/parallel.hpp"

namespace lipwalk {

std::string to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::kAuto: return "auto";
    case SolveMethod::kIterative: return "iterative";
    case SolveMethod::kDense: return "dense";
    case SolveMethod::kSparseDirect: return "sparse-direct";
  }
  return "?";
}

DirichletOperator::DirichletOperator(PointSet interior, const TransitionKernel& kernel)
    : interior_(std::move(interior)) {
  if (interior_.empty()) fail(ErrorKind::kInvalidArgument, "Dirichlet problem needs a nonempty interior");
  if (interior_[0].dim() != kernel.dim()) fail(ErrorKind::kInvalidArgument, "interior and kernel dimensions differ");
  boundary_ = lipwalk::boundary(interior_, kernel.steps());

  const std::size_t n = interior_.size();
  const auto& steps = kernel.steps();
  std::vector<double> w(steps.size());
  std::vector<linalg::EllMatrix::Entry> entries;
  entries.reserve(n * steps.size());
  scale_.resize(n);
  lazy_.resize(n);
  cptr_.assign(n + 1, 0);

  for (std::size_t i = 0; i < n; ++i) {
    const LatticePoint& x = interior_[i];
    kernel.weights_at(x, w);
    double lazy = 0.0;
    for (std::size_t s = 0; s < steps.size(); ++s) {
      if (steps[s].is_zero()) lazy += w[s];
    }
    const double sc = 1.0 / (1.0 - lazy);
    lazy_[i] = lazy;
    scale_[i] = sc;
    for (std::size_t s = 0; s < steps.size(); ++s) {
      if (steps[s].is_zero() || w[s] == 0.0) continue;
      LatticePoint z = x + steps[s];
      if (auto j = interior_.find(z)) {
        entries.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(*j), w[s] * sc});
      } else {
        auto b = boundary_.find(z);
        coupling_.push_back({static_cast<std::int32_t>(*b), w[s] * sc});
      }
    }
    cptr_[i + 1] = coupling_.size();
  }
  q_ = linalg::EllMatrix(n, std::move(entries));
}

std::vector<double> DirichletOperator::rhs(std::span<const double> g) const {
  if (g.size() != boundary_.size()) fail(ErrorKind::kInvalidArgument, "boundary value count mismatch");
  std::vector<double> b(interior_.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    double s = 0.0;
    for (const Coupling& c : coupling(i)) s += c.weight * g[static_cast<std::size_t>(c.boundary)];
    b[i] = s;
  }
  return b;
}

const linalg::SparseDirect& DirichletOperator::factorization() const {
  std::lock_guard lock(cache_mutex_);
  if (!lu_) lu_ = std::make_shared<const linalg::SparseDirect>(q_);
  return *lu_;
}

const linalg::EllMatrix& DirichletOperator::q_transpose() const {
  std::lock_guard lock(cache_mutex_);
  if (!qt_) qt_ = std::make_shared<const linalg::EllMatrix>(q_.transpose());
  return *qt_;
}

namespace {

std::size_t default_budget(std::size_t n) {
  return 2000 + static_cast<std::size_t>(40.0 * std::sqrt(static_cast<double>(n)));
}

}  // namespace

double DirichletOperator::inverse_norm(bool transposed) const {
  {
    std::lock_guard lock(cache_mutex_);
    if (inv_norm_[transposed] >= 0.0) return inv_norm_[transposed];
  }
  const std::size_t n = interior_.size();
  const linalg::EllMatrix& q = transposed ? q_transpose() : q_;
  std::vector<double> ones(n, 1.0), t(n, 0.0);
  // A loose solve is enough: the bound only scales the stopping threshold.
  auto res = linalg::bicgstab(q, ones, t, 1e-6, default_budget(n));
  double norm = simd::norm_inf(t);
  if (!res.converged || !std::isfinite(norm)) {
    std::vector<double> block(ones);
    if (transposed) factorization().solve_transpose(block, 1); else factorization().solve(block, 1);
    norm = simd::norm_inf(block);
  }
  norm = std::max(1.0, norm * 1.01);
  std::lock_guard lock(cache_mutex_);
  inv_norm_[transposed] = norm;
  return norm;
}

std::vector<double> DirichletOperator::solve(std::span<const double> b, const SolveOptions& opts,
                                             SolveInfo* info) const {
  return solve_impl(b, false, opts, info);
}

std::vector<double> DirichletOperator::solve_transpose(std::span<const double> b, const SolveOptions& opts,
                                                       SolveInfo* info) const {
  return solve_impl(b, true, opts, info);
}

std::vector<double> DirichletOperator::solve_impl(std::span<const double> b, bool transposed,
                                                  const SolveOptions& opts, SolveInfo* info) const {
  const std::size_t n = interior_.size();
  if (b.size() != n) fail(ErrorKind::kInvalidArgument, "rhs size mismatch");
  if (!(opts.tol > 0.0)) fail(ErrorKind::kInvalidArgument, "solver tolerance must be positive");
  const linalg::EllMatrix& q = transposed ? q_transpose() : q_;
  const simd::KernelTable& kt = simd::active();
  SolveInfo local;
  std::vector<double> x(n, 0.0);

  auto finish = [&](SolveMethod m) {
    std::vector<double> r(n);
    kt.residual(q.view(), b.data(), x.data(), r.data());
    local.method = m;
    local.residual = kt.norm_inf(r.data(), n);
    if (info) *info = local;
    return x;
  };
  auto dense = [&] {
    linalg::DenseLU lu(linalg::dense_system(q), n);
    std::copy(b.begin(), b.end(), x.begin());
    lu.solve(x);
    return finish(SolveMethod::kDense);
  };
  auto sparse = [&] {
    std::copy(b.begin(), b.end(), x.begin());
    if (transposed) factorization().solve_transpose(x, 1); else factorization().solve(x, 1);
    return finish(SolveMethod::kSparseDirect);
  };

  switch (opts.method) {
    case SolveMethod::kDense: return dense();
    case SolveMethod::kSparseDirect: return sparse();
    case SolveMethod::kIterative:
    case SolveMethod::kAuto: break;
  }

  // Stop when the forward error bound |A^{-1}|·|r| is a tenth of tol, but
  // not below what double rounding of the residual itself allows.
  const double bnorm = kt.norm_inf(b.data(), n);
  const double inv = inverse_norm(transposed);
  const double wanted = 0.1 * opts.tol * (1.0 + bnorm) / inv;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  const double target = std::max(wanted, 4.0 * kEps * (1.0 + bnorm * inv));
  const std::size_t budget = opts.max_iterations ? opts.max_iterations : default_budget(n);
  auto res = linalg::bicgstab(q, b, x, target, budget, kt);
  local.iterations = res.iterations;
  if (res.converged) {
    // The first floor used the a priori bound |x| <= |b| |A^{-1}|; with the
    // actual |x| known, tighten towards the wanted threshold.
    const double refined = std::max(wanted, 8.0 * kEps * (1.0 + kt.norm_inf(x.data(), n)));
    if (refined < target) {
      std::vector<double> keep = x;
      auto more = linalg::bicgstab(q, b, x, refined, budget, kt);
      local.iterations += more.iterations;
      if (!more.converged && more.residual > res.residual) x = std::move(keep);
    }
    return finish(SolveMethod::kIterative);
  }
  if (opts.method == SolveMethod::kIterative) {
    std::ostringstream msg;
    msg << "BiCGSTAB stopped after " << res.iterations << " iterations with residual " << res.residual
        << " (target " << target << ")";
    fail(ErrorKind::kConvergenceFailure, msg.str());
  }
  return n <= kDenseLimit ? dense() : sparse();
}

double DirichletOperator::max_abs_L(std::span<const double> u, std::span<const double> g) const {
  const std::size_t n = interior_.size();
  if (u.size() != n || g.size() != boundary_.size()) fail(ErrorKind::kInvalidArgument, "field size mismatch");
  std::vector<double> r(n);
  auto b = rhs(g);
  simd::active().residual(q_.view(), b.data(), u.data(), r.data());
  // The scaled residual equals -Lu(x) / (1 - π(x, 0)).
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::fabs(r[i]) * (1.0 - lazy_[i]));
  return worst;
}

DirichletProblem::DirichletProblem(PointSet interior, TransitionKernel kernel, Field boundary_data)
    : interior_(std::move(interior)), kernel_(std::move(kernel)), data_(std::move(boundary_data)) {
  if (interior_.empty()) fail(ErrorKind::kInvalidArgument, "Dirichlet problem needs a nonempty interior");
  PointSet expected = boundary(interior_, kernel_.steps());
  if (!(expected == data_.support())) {
    for (const auto& p : expected) {
      if (!data_.contains(p)) fail(ErrorKind::kIncompleteField, "boundary data missing at " + p.to_string());
    }
    for (const auto& p : data_.support()) {
      if (!expected.contains(p)) {
        fail(ErrorKind::kInvalidArgument, "boundary data given at " + p.to_string() + ", which is not on the boundary");
      }
    }
  }
}

Field solve_dirichlet(const DirichletProblem& p, const SolveOptions& opts, SolveInfo* info) {
  DirichletOperator op(p.interior(), p.kernel());
  const auto& g = p.boundary_data().values();
  SolveInfo local;
  auto u = op.solve(op.rhs(g), opts, &local);
  if (info) *info = local;

  double unorm = 0.0;
  for (double v : u) unorm = std::max(unorm, std::fabs(v));
  for (double v : g) unorm = std::max(unorm, std::fabs(v));
  const double lres = op.max_abs_L(u, g);
  if (!(lres <= opts.tol * (1.0 + unorm))) {
    std::ostringstream msg;
    msg << "final residual max|Lu| = " << lres << " exceeds " << opts.tol << " * (1 + |u|)";
    fail(ErrorKind::kConvergenceFailure, msg.str());
  }

  PointSet all = op.interior().set_union(op.boundary());
  std::vector<double> values(all.size());
  for (std::size_t i = 0; i < op.interior().size(); ++i) values[*all.find(op.interior()[i])] = u[i];
  for (std::size_t i = 0; i < op.boundary().size(); ++i) values[*all.find(op.boundary()[i])] = g[i];
  return Field(std::move(all), std::move(values));
}

Field harmonic_measure(const PointSet& interior, const TransitionKernel& kernel, const PointSet& target,
                       const SolveOptions& opts) {
  DirichletOperator op(interior, kernel);
  std::vector<double> g(op.boundary().size(), 0.0);
  for (const auto& t : target) {
    auto idx = op.boundary().find(t);
    if (!idx) fail(ErrorKind::kInvalidTarget, "target point " + t.to_string() + " is not on the boundary");
    g[*idx] = 1.0;
  }
  return Field(op.interior(), op.solve(op.rhs(g), opts));
}

Field green_function(const PointSet& interior, const TransitionKernel& kernel, const LatticePoint& y,
                     const SolveOptions& opts) {
  auto iy = interior.find(y);
  if (!iy) fail(ErrorKind::kInvalidSource, "source " + y.to_string() + " is not in the interior");
  DirichletOperator op(interior, kernel);
  // (I - P) G = e_y; rows were divided by 1 - π(x, 0), so the rhs is too.
  std::vector<double> b(interior.size(), 0.0);
  b[*iy] = op.scale()[*iy];
  return Field(op.interior(), op.solve(b, opts));
}

Field green_from(const PointSet& interior, const TransitionKernel& kernel, const LatticePoint& y,
                 const SolveOptions& opts) {
  auto iy = interior.find(y);
  if (!iy) fail(ErrorKind::kInvalidSource, "source " + y.to_string() + " is not in the interior");
  DirichletOperator op(interior, kernel);
  // Row y of (I - P)^{-1} = e_y^T A^{-1} D with A the row-scaled system.
  std::vector<double> b(interior.size(), 0.0);
  b[*iy] = 1.0;
  auto w = op.solve_transpose(b, opts);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] *= op.scale()[i];
  return Field(op.interior(), std::move(w));
}

std::vector<double> harmonic_measure_matrix(const DirichletOperator& op, std::span<const std::size_t> rows,
                                            std::span<const std::size_t> cols) {
  const std::size_t n = op.interior().size();
  const std::size_t nr = rows.size(), nc = cols.size();
  std::vector<double> out(nr * nc, 0.0);
  if (nr == 0 || nc == 0) return out;

  // For each requested boundary column: the interior rows coupled to it.
  std::vector<std::vector<std::pair<std::size_t, double>>> feed(nc);
  {
    std::vector<std::int64_t> col_of(op.boundary().size(), -1);
    for (std::size_t c = 0; c < nc; ++c) {
      if (cols[c] >= op.boundary().size()) fail(ErrorKind::kInvalidTarget, "boundary column out of range");
      col_of[cols[c]] = static_cast<std::int64_t>(c);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& cp : op.coupling(i)) {
        std::int64_t c = col_of[static_cast<std::size_t>(cp.boundary)];
        if (c >= 0) feed[static_cast<std::size_t>(c)].emplace_back(i, cp.weight);
      }
    }
  }
  for (std::size_t r : rows) {
    if (r >= n) fail(ErrorKind::kInvalidArgument, "interior row out of range");
  }

  const auto& lu = op.factorization();
  // Block boundaries are fixed, so the output does not depend on how many
  // workers run the blocks.
  constexpr std::size_t kBlock = 64;
  if (nc <= nr) {
    parallel_for((nc + kBlock - 1) / kBlock, [&](std::size_t b) {
      const std::size_t c0 = b * kBlock;
      const std::size_t m = std::min(kBlock, nc - c0);
      std::vector<double> block(n * m, 0.0);
      for (std::size_t c = 0; c < m; ++c) {
        for (const auto& [i, w] : feed[c0 + c]) block[c * n + i] += w;
      }
      lu.solve(block, m);
      for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t r = 0; r < nr; ++r) out[r * nc + c0 + c] = block[c * n + rows[r]];
      }
    });
  } else {
    parallel_for((nr + kBlock - 1) / kBlock, [&](std::size_t b) {
      const std::size_t r0 = b * kBlock;
      const std::size_t m = std::min(kBlock, nr - r0);
      std::vector<double> block(n * m, 0.0);
      for (std::size_t r = 0; r < m; ++r) block[r * n + rows[r0 + r]] = 1.0;
      lu.solve_transpose(block, m);
      for (std::size_t r = 0; r < m; ++r) {
        const double* w = block.data() + r * n;
        for (std::size_t c = 0; c < nc; ++c) {
          double s = 0.0;
          for (const auto& [i, wt] : feed[c]) s += w[i] * wt;
          out[(r0 + r) * nc + c] = s;
        }
      }
    });
  }
  return out;
}

CollarGeometry collar_geometry(const LatticePoint& y, const Rational& K, const Rational& r,
                               const LipschitzDomain& domain) {
  if (K < Rational(2)) fail(ErrorKind::kInvalidRegion, "collar factor K must be at least 2");
  if (r < Rational(1)) fail(ErrorKind::kInvalidRegion, "collar inner radius r must be at least 1");
  if (!domain.on_boundary(y)) fail(ErrorKind::kInvalidGeometry, "collar center " + y.to_string() + " is not on ∂C");
  const Rational outer = K * r;
  const Region ball = Region::ball(y, outer);
  const Rational r2 = r * r;
  CollarGeometry g;
  g.collar = enumerate_region(Region::collar(y, outer, r), domain);
  if (g.collar.empty()) fail(ErrorKind::kInvalidGeometry, "collar is empty");
  std::vector<LatticePoint> top, side, bottom;
  for (const auto& z : boundary(g.collar, domain.steps())) {
    if (!domain.contains(z)) {
      bottom.push_back(z);
    } else if (ball.in_outer(z) && Rational(domain.boundary_distance_sq(z)) > r2) {
      top.push_back(z);
    } else {
      side.push_back(z);
    }
  }
  g.top = PointSet(std::move(top));
  g.side = PointSet(std::move(side));
  g.bottom = PointSet(std::move(bottom));
  return g;
}

SolveOptions collar_options(SolveOptions opts) {
  if (opts.method == SolveMethod::kAuto) opts.method = SolveMethod::kSparseDirect;
  return opts;
}

ExitSplit exit_split(const LatticePoint& y, const Rational& K, const Rational& r, const LipschitzDomain& domain,
                     const TransitionKernel& kernel, const SolveOptions& user_opts) {
  const SolveOptions opts = collar_options(user_opts);
  CollarGeometry geo = collar_geometry(y, K, r, domain);
  if (geo.top.empty()) fail(ErrorKind::kInvalidGeometry, "collar has no top exit set (K r too small)");

  DirichletOperator op(geo.collar, kernel);
  auto indicator = [&](const PointSet& part) {
    std::vector<double> g(op.boundary().size(), 0.0);
    for (const auto& z : part) g[*op.boundary().find(z)] = 1.0;
    return op.solve(op.rhs(g), opts);
  };
  auto top = indicator(geo.top);
  auto side = indicator(geo.side);
  auto bottom = indicator(geo.bottom);

  ExitSplit out;
  out.eval = enumerate_region(Region::ball(y, r), domain);
  out.collar_size = geo.collar.size();
  out.top_count = geo.top.size();
  out.side_count = geo.side.size();
  out.bottom_count = geo.bottom.size();
  const std::size_t m = out.eval.size();
  std::vector<double> vt(m), vs(m), vb(m), vr(m);
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t i = *op.interior().find(out.eval[k]);
    vt[k] = top[i];
    vs[k] = side[i];
    vb[k] = bottom[i];
    vr[k] = vs[k] > 0.0 ? vt[k] / vs[k] : std::numeric_limits<double>::infinity();
    if (vr[k] < out.min_ratio) {
      out.min_ratio = vr[k];
      out.argmin = out.eval[k];
    }
  }
  out.top = Field(out.eval, std::move(vt));
  out.side = Field(out.eval, std::move(vs));
  out.bottom = Field(out.eval, std::move(vb));
  out.ratio = Field(out.eval, std::move(vr));
  return out;
}

}  // namespace lipwalk

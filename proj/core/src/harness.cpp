#include <qotlab/harness.hpp>

#include <qotlab/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <future>
#include <map>
#include <sstream>

namespace qot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Fnv {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < n; ++k) {
      state_ ^= p[k];
      state_ *= 0x100000001b3ULL;
    }
  }
  void value(double v) { bytes(&v, sizeof v); }
  void value(long v) { bytes(&v, sizeof v); }
  template <typename Derived>
  void values(const Eigen::DenseBase<Derived>& m) {
    value(static_cast<long>(m.rows()));
    value(static_cast<long>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) value(static_cast<double>(m(i, j)));
    }
  }
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

bool same_instance(const Instance& a, const Instance& b) {
  return a.eps == b.eps && a.cost.kind() == b.cost.kind() && a.cost.scale() == b.cost.scale() &&
         a.p == b.p && a.q == b.q && a.cost.matrix() == b.cost.matrix();
}

using Coordinates = std::vector<double>;

Coordinates row_coords(const PointSet& pts, Eigen::Index k) {
  return Coordinates(pts.row(k).data(), pts.row(k).data() + pts.cols());
}

// Position of each atom of `m` inside the union point set.
std::vector<Eigen::Index> locate(const DiscreteMeasure& m, const PointSet& union_pts) {
  std::map<Coordinates, Eigen::Index> index;
  for (Eigen::Index k = 0; k < union_pts.rows(); ++k) index.emplace(row_coords(union_pts, k), k);
  std::vector<Eigen::Index> out(static_cast<size_t>(m.size()));
  for (int i = 0; i < m.size(); ++i) out[static_cast<size_t>(i)] = index.at(row_coords(m.points(), i));
  return out;
}

// Potentials of one solution on the union grid: stored values on the
// instance's own atoms, first-order-condition extensions elsewhere.
struct GridField {
  Vector f;
  Vector g;
  Matrix h;
  Matrix zeta;
};

GridField field_on_grid(const Instance& inst, const Potentials& pot, const PointSet& xs,
                        const PointSet& ys, const std::vector<Eigen::Index>& p_idx,
                        const std::vector<Eigen::Index>& q_idx, const Matrix& cost_on_grid) {
  GridField out;
  out.f = extend_potential(pot, Side::First, inst.p, inst.q, inst.cost, xs);
  out.g = extend_potential(pot, Side::Second, inst.p, inst.q, inst.cost, ys);
  for (size_t i = 0; i < p_idx.size(); ++i) out.f[p_idx[i]] = pot.f[static_cast<Eigen::Index>(i)];
  for (size_t j = 0; j < q_idx.size(); ++j) out.g[q_idx[j]] = pot.g[static_cast<Eigen::Index>(j)];
  out.h = out.f.replicate(1, ys.rows()) + out.g.transpose().replicate(xs.rows(), 1);
  out.zeta = ((out.h - cost_on_grid).array().max(0.0) / inst.eps).matrix();
  return out;
}

// sum_ij p_i q_j d(idx_p[i], idx_q[j])^2 for an instance's product measure.
double sq_norm_on(const Instance& inst, const Matrix& d, const std::vector<Eigen::Index>& p_idx,
                  const std::vector<Eigen::Index>& q_idx) {
  double s = 0.0;
  for (int i = 0; i < inst.p.size(); ++i) {
    for (int j = 0; j < inst.q.size(); ++j) {
      const double v = d(p_idx[static_cast<size_t>(i)], q_idx[static_cast<size_t>(j)]);
      s += inst.p.weight(i) * inst.q.weight(j) * v * v;
    }
  }
  return s;
}

CheckResult make_check(std::string id, bool hypothesis, double lhs, double rhs) {
  CheckResult c;
  c.id = std::move(id);
  c.hypothesis = hypothesis;
  c.lhs = lhs;
  c.rhs = rhs;
  if (rhs > 0.0) {
    c.ratio = lhs / rhs;
  } else {
    c.ratio = lhs > 0.0 ? kInf : 0.0;
  }
  c.pass = lhs <= rhs + kBoundFloor;
  return c;
}

}  // namespace

std::uint64_t content_hash(const Instance& inst, const SolveOptions& opts) {
  Fnv h;
  h.value(static_cast<long>(inst.cost.kind()));
  h.value(inst.cost.scale());
  h.value(inst.eps);
  h.values(inst.p.points());
  h.values(inst.p.weights());
  h.values(inst.q.points());
  h.values(inst.q.weights());
  h.values(inst.cost.matrix());
  h.value(opts.tol);
  h.value(opts.max_iter);
  h.value(static_cast<long>(opts.gauge));
  return h.digest();
}

std::shared_ptr<const Solved> SolveCache::find(const Instance& inst,
                                               const SolveOptions& opts) const {
  const auto key = content_hash(inst, opts);
  std::shared_lock lock(mutex_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  for (const auto& e : it->second) {
    if (same_instance(e.instance, inst)) return e.value;
  }
  return nullptr;
}

std::shared_ptr<const Solved> SolveCache::insert(const Instance& inst, const SolveOptions& opts,
                                                 std::shared_ptr<const Solved> value) {
  const auto key = content_hash(inst, opts);
  std::unique_lock lock(mutex_);
  auto& bucket = entries_[key];
  for (const auto& e : bucket) {
    if (same_instance(e.instance, inst)) return e.value;  // first writer wins
  }
  bucket.push_back({inst, value});
  return value;
}

std::size_t SolveCache::size() const {
  std::shared_lock lock(mutex_);
  std::size_t n = 0;
  for (const auto& [key, bucket] : entries_) n += bucket.size();
  return n;
}

std::shared_ptr<const Solved> solve_instance(const Instance& inst, const SolveOptions& opts,
                                             SolveCache* cache) {
  if (cache) {
    if (auto hit = cache->find(inst, opts)) return hit;
  }
  validate_instance(inst);
  Potentials pot = solve_dual(inst, opts);
  if (!pot.converged) {
    std::ostringstream msg;
    msg << "solver stopped after " << pot.sweeps << " sweeps with residual "
        << pot.foc_residual_inf;
    throw NotConverged(msg.str());
  }
  Coupling coup = extract_coupling(pot, inst.p, inst.q, inst.cost);
  auto solved = std::make_shared<const Solved>(Solved{std::move(pot), std::move(coup)});
  if (cache) return cache->insert(inst, opts, solved);
  return solved;
}

const CheckResult& StabilityReport::check(const std::string& id) const {
  for (const auto& c : checks) {
    if (c.id == id) return c;
  }
  throw InvalidInput("check", "no check named '" + id + "'");
}

bool StabilityReport::passed() const {
  return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.violated(); });
}

double estimate_nondegeneracy(const Potentials& pot, const Coupling& coup,
                              const DiscreteMeasure& p, const DiscreteMeasure& q,
                              const CostSpec& cost) {
  const int n = p.size();
  const int m = q.size();
  Matrix dx(n, n);
  Matrix dy(m, m);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) dx(i, k) = (p.points().row(i) - p.points().row(k)).squaredNorm();
  }
  for (int j = 0; j < m; ++j) {
    for (int l = 0; l < m; ++l) dy(j, l) = (q.points().row(j) - q.points().row(l)).squaredNorm();
  }
  const SupportSet support = extract_support(coup);
  double best = kInf;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (coup.zeta(i, j) > coup.support_tol) continue;
      double dist2 = kInf;
      for (const auto& [k, l] : support.cells) dist2 = std::min(dist2, dx(i, k) + dy(j, l));
      const double detach = std::max(0.0, -(pot.h(i, j) - cost.matrix()(i, j)));
      best = std::min(best, detach / std::sqrt(dist2));
    }
  }
  return best;
}

StabilityReport run_pair(const Instance& a, const Instance& b, const ClassParams& params,
                         const HarnessOptions& opts, SolveCache* cache) {
  validate_class_params(params);
  const auto sa = solve_instance(a, opts.solve, cache);
  const auto sb = solve_instance(b, opts.solve, cache);
  const double L = params.lipschitz;

  StabilityReport rep;
  rep.constants = opts.constants_override ? *opts.constants_override
                                          : stability_constants(params, a);
  const StabilityConstants& k = rep.constants;
  rep.deltas = delta_quantities(a, b, L, k, opts.declared_cost_diff_bound);
  const DeltaQuantities& dq = rep.deltas;
  rep.audit_first = audit_class_membership(a, params);
  rep.audit_second = audit_class_membership(b, params);
  const bool in_class = rep.audit_first.passed() && rep.audit_second.passed();
  if (!in_class) rep.notes.push_back("an instance fails the class audit; no check is applicable");

  // Union grid Gamma and both solutions on it.
  const PointSet xs = union_points(a.p.points(), b.p.points());
  const PointSet ys = union_points(a.q.points(), b.q.points());
  const DiscreteMeasure gp = DiscreteMeasure::uniform(xs);
  const DiscreteMeasure gq = DiscreteMeasure::uniform(ys);
  const auto ap = locate(a.p, xs);
  const auto aq = locate(a.q, ys);
  const auto bp = locate(b.p, xs);
  const auto bq = locate(b.q, ys);
  const Matrix ca = a.cost.rebind(gp, gq).matrix();
  const Matrix cb = b.cost.rebind(gp, gq).matrix();
  const GridField fa = field_on_grid(a, sa->potentials, xs, ys, ap, aq, ca);
  const GridField fb = field_on_grid(b, sb->potentials, xs, ys, bp, bq, cb);

  // Potentials.
  const Matrix dh = fa.h - fb.h;
  const double l2_mu_sq = sq_norm_on(a, dh, ap, aq);
  const double l2_mu_prime_sq = sq_norm_on(b, dh, bp, bq);
  const bool hyp_l2 = in_class && std::max(dq.delta, dq.delta_prime) < k.eta_bar;
  rep.checks.push_back(make_check("l2_unprimed", hyp_l2, std::sqrt(l2_mu_sq), k.gamma_bar * dq.delta));
  rep.checks.push_back(
      make_check("l2_primed", hyp_l2, std::sqrt(l2_mu_prime_sq), k.gamma_bar * dq.delta_prime));
  rep.checks.push_back(make_check("l2_mixture", hyp_l2,
                                  std::sqrt(0.5 * (l2_mu_sq + l2_mu_prime_sq)),
                                  k.gamma_bar * dq.delta_bar));

  const bool hyp_inf = in_class && dq.delta_star < k.eta_bar_star;
  rep.checks.push_back(make_check("linf_h", hyp_inf, dh.cwiseAbs().maxCoeff(), k.c_bar * dq.delta_star));

  double shift = 0.0;
  for (int j = 0; j < a.q.size(); ++j) {
    const auto g = aq[static_cast<size_t>(j)];
    shift += a.q.weight(j) * (fb.g[g] - fa.g[g]);
  }
  rep.gauge_shift = shift;
  const bool hyp_pointwise = in_class && dq.delta_star < k.etahat_eps;
  const double f_dev = (fa.f.array() - fb.f.array() - shift).abs().maxCoeff();
  const double g_dev = (fa.g.array() - fb.g.array() + shift).abs().maxCoeff();
  rep.checks.push_back(make_check("linf_f", hyp_pointwise, f_dev,
                                  (1.0 + k.gamma_eps) / k.qhat_eps * dq.delta_star));
  rep.checks.push_back(make_check("linf_g", hyp_pointwise, g_dev,
                                  (1.0 + k.gamma_eps) / k.kappahat_eps * dq.delta_star));

  // Densities and couplings.
  const Matrix dz = fa.zeta - fb.zeta;
  const double z_sq = 0.5 * (sq_norm_on(a, dz, ap, aq) + sq_norm_on(b, dz, bp, bq));
  rep.checks.push_back(make_check("density_l2", hyp_l2, std::sqrt(z_sq), dq.delta_hat));

  auto [pts_a, mass_a] = coupling_atoms(sa->coupling, a.p, a.q);
  auto [pts_b, mass_b] = coupling_atoms(sb->coupling, b.p, b.q);
  const double tv = total_variation(pts_a, mass_a, pts_b, mass_b);
  rep.checks.push_back(make_check("coupling_tv", hyp_l2, tv,
                                  dq.delta_hat / 2.0 + (dq.a_const + dq.a_prime) * dq.delta_tv / 2.0));
  mass_a /= mass_a.sum();
  mass_b /= mass_b.sum();
  const double w1 = wasserstein1(pts_a, mass_a, pts_b, mass_b);
  const double w1_rhs =
      dq.d_star * dq.delta_hat / 2.0 +
      std::sqrt(2.0) *
          ((dq.a_const + dq.a_prime) / 2.0 +
           (std::sqrt(2.0) + 1.0) * L * dq.d_star * (1.0 / a.eps + 1.0 / b.eps) / 4.0) *
          dq.delta_w;
  rep.checks.push_back(make_check("coupling_w1", hyp_l2, w1, w1_rhs));
  rep.checks.push_back(
      make_check("density_linf", hyp_inf, dz.cwiseAbs().maxCoeff(), dq.delta_hat_inf));

  // Supports.
  Nondegeneracy& nd = rep.nondegeneracy;
  nd.a_hat = estimate_nondegeneracy(sa->potentials, sa->coupling, a.p, a.q, a.cost);
  nd.a_hat_prime = estimate_nondegeneracy(sb->potentials, sb->coupling, b.p, b.q, b.cost);
  nd.a_used = std::min(nd.a_hat, nd.a_hat_prime);
  const double diam_p = a.p.diameter();
  nd.a_theory = diam_p > 0.0 ? a.eps / diam_p : kInf;
  nd.applicable = a.cost.is_quadratic() && b.cost.is_quadratic();
  if (nd.a_hat != nd.a_hat_prime) {
    rep.notes.push_back("nondegeneracy constants differ; the smaller one is used");
  }

  const PointSet sup_a = support_points(extract_support(sa->coupling), a.p, a.q);
  const PointSet sup_b = support_points(extract_support(sb->coupling), b.p, b.q);
  rep.support_hausdorff = hausdorff_distance(sup_a, sup_b);
  const double inv_a = nd.a_used > 0.0 ? 1.0 / nd.a_used : kInf;
  double support_rhs = kInf;
  if (nd.a_used > 0.0) {
    support_rhs = (1.0 + (std::sqrt(2.0) + 1.0) * L * inv_a) * dq.delta_omega +
                  dq.small_delta_star * inv_a;
  }
  rep.checks.push_back(make_check("support_hausdorff", hyp_inf && nd.a_used > 0.0,
                                  rep.support_hausdorff, support_rhs));
  if (!(nd.a_used > 0.0)) {
    rep.notes.push_back("nondegeneracy fails (a_hat = 0); support bound not applicable");
  }

  const double D = params.diam_bound;
  const bool quad_pair = nd.applicable && a.eps == b.eps;
  const bool hyp_quad = in_class && quad_pair && 2.0 * L * dq.delta_w < k.eta_bar_star;
  const double quad_rhs = (1.0 + (std::sqrt(2.0) + 1.0) * L * D / a.eps) * dq.delta_omega +
                          2.0 * L * D * k.c_bar / a.eps * dq.delta_w;
  rep.checks.push_back(make_check("support_quadratic", hyp_quad, rep.support_hausdorff, quad_rhs));
  return rep;
}

std::vector<StabilityReport> run_pairs(const std::vector<std::pair<Instance, Instance>>& pairs,
                                       const ClassParams& params, const HarnessOptions& opts,
                                       int jobs, SolveCache* cache) {
  if (jobs < 1) throw InvalidInput("jobs", "must be at least 1");
  std::vector<StabilityReport> out;
  out.reserve(pairs.size());
  if (jobs == 1) {
    for (const auto& [a, b] : pairs) out.push_back(run_pair(a, b, params, opts, cache));
    return out;
  }
  for (size_t start = 0; start < pairs.size(); start += static_cast<size_t>(jobs)) {
    const size_t stop = std::min(pairs.size(), start + static_cast<size_t>(jobs));
    std::vector<std::future<StabilityReport>> batch;
    for (size_t k = start; k < stop; ++k) {
      batch.push_back(std::async(std::launch::async, [&, k] {
        return run_pair(pairs[k].first, pairs[k].second, params, opts, cache);
      }));
    }
    for (auto& fut : batch) out.push_back(fut.get());
  }
  return out;
}

std::vector<CurveRow> lipschitz_ratio_curve(const Instance& base, const PerturbationSpec& spec,
                                            const ClassParams& params,
                                            const HarnessOptions& opts, SolveCache* cache) {
  validate_spec(spec);
  std::vector<CurveRow> rows;
  rows.reserve(spec.grid.size());
  for (double t : spec.grid) {
    const Instance other = perturb_at(base, spec, t);
    const StabilityReport rep = run_pair(base, other, params, opts, cache);
    const CheckResult& c = rep.check("linf_h");
    const double ds = rep.deltas.delta_star;
    rows.push_back({t, ds, c.lhs, ds > 0.0 ? c.lhs / ds : 0.0, ds < rep.constants.eta_bar_star});
  }
  return rows;
}

}  // namespace qot

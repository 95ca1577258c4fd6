#include <qotlab/dual.hpp>

#include <qotlab/error.hpp>

#include <algorithm>
#include <cmath>

namespace qot {

namespace {

inline double pos(double x) { return x > 0.0 ? x : 0.0; }

void update_first(const Matrix& c, const Vector& q, double eps, const Vector& g, Vector& f) {
  Vector offsets(g.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    offsets = g - c.row(i).transpose();
    f[i] = scalar_foc_solve(offsets, q, eps);
  }
}

void update_second(const Matrix& c, const Vector& p, double eps, const Vector& f, Vector& g) {
  Vector offsets(f.size());
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    offsets = f - c.col(j);
    g[j] = scalar_foc_solve(offsets, p, eps);
  }
}

void apply_gauge(Potentials& pot, const Vector& q) {
  if (pot.gauge != Gauge::MeanZeroSecond) return;
  const double a = q.dot(pot.g);
  pot.g.array() -= a;
  pot.f.array() += a;
  pot.shift += a;
}

FocResiduals residuals(const Vector& f, const Vector& g, double eps, const Vector& p,
                       const Vector& q, const Matrix& c) {
  FocResiduals r{Vector::Zero(f.size()), Vector::Zero(g.size())};
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      const double s = pos(f[i] + g[j] - c(i, j));
      row += q[j] * s;
      r.second[j] += p[i] * s;
    }
    r.first[i] = 1.0 - row / eps;
  }
  r.second = (1.0 - r.second.array() / eps).matrix();
  return r;
}

double objective(const Vector& f, const Vector& g, double eps, const Vector& p, const Vector& q,
                 const Matrix& c) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      const double h = f[i] + g[j];
      const double s = pos(h - c(i, j));
      row += q[j] * (h - s * s / (2.0 * eps));
    }
    total += p[i] * row;
  }
  return total;
}

}  // namespace

double FocResiduals::max_abs() const {
  double out = 0.0;
  if (first.size() > 0) out = std::max(out, first.cwiseAbs().maxCoeff());
  if (second.size() > 0) out = std::max(out, second.cwiseAbs().maxCoeff());
  return out;
}

Potentials solve_dual(const DiscreteMeasure& p, const DiscreteMeasure& q, const CostSpec& cost,
                      double eps, const SolveOptions& opts) {
  validate_instance({p, q, cost, eps});
  if (!(opts.tol > 0.0)) throw InvalidInput("tol", "must be positive");
  if (opts.max_iter < 1) throw InvalidInput("max_iter", "must be at least 1");

  const Matrix& c = cost.matrix();
  const Vector& pw = p.weights();
  const Vector& qw = q.weights();

  Potentials pot;
  pot.eps = eps;
  pot.gauge = opts.gauge;
  pot.f = Vector::Zero(p.size());
  pot.g = opts.initial_g ? *opts.initial_g : Vector::Zero(q.size());
  if (pot.g.size() != q.size()) throw InvalidInput("initial_g", "size does not match Q");

  for (long sweep = 1; sweep <= opts.max_iter; ++sweep) {
    update_first(c, qw, eps, pot.g, pot.f);
    update_second(c, pw, eps, pot.f, pot.g);
    pot.sweeps = sweep;
    pot.foc_residual_inf = residuals(pot.f, pot.g, eps, pw, qw, c).max_abs();
    if (opts.record_trace) {
      pot.objective_trace.push_back(objective(pot.f, pot.g, eps, pw, qw, c));
      pot.residual_trace.push_back(pot.foc_residual_inf);
    }
    if (pot.foc_residual_inf <= opts.tol) {
      pot.converged = true;
      break;
    }
  }
  apply_gauge(pot, qw);
  return pot;
}

Potentials make_potentials(Vector f, Vector g, double eps, const DiscreteMeasure& p,
                           const DiscreteMeasure& q, const CostSpec& cost, double tol) {
  validate_instance({p, q, cost, eps});
  if (f.size() != p.size() || g.size() != q.size()) {
    throw InvalidInput("potentials", "sizes do not match the marginals");
  }
  Potentials pot;
  pot.f = std::move(f);
  pot.g = std::move(g);
  pot.eps = eps;
  pot.foc_residual_inf =
      residuals(pot.f, pot.g, eps, p.weights(), q.weights(), cost.matrix()).max_abs();
  pot.converged = pot.foc_residual_inf <= tol;
  return pot;
}

double dual_objective(const Potentials& pot, const DiscreteMeasure& p, const DiscreteMeasure& q,
                      const CostSpec& cost) {
  return objective(pot.f, pot.g, pot.eps, p.weights(), q.weights(), cost.matrix());
}

FocResiduals foc_residuals(const Potentials& pot, const DiscreteMeasure& p,
                           const DiscreteMeasure& q, const CostSpec& cost) {
  return residuals(pot.f, pot.g, pot.eps, p.weights(), q.weights(), cost.matrix());
}

std::pair<Vector, Vector> project_sum_space(const Matrix& w, const Vector& p, const Vector& q) {
  // Normal equations of min sum_ij p_i q_j (w_ij - u_i - v_j)^2:
  //   u_i + <q, v> = (w q)_i,   <p, u> + v_j = (p^T w)_j.
  // With <q, v> = 0 they decouple.
  if (w.rows() != p.size() || w.cols() != q.size()) {
    throw InvalidInput("w", "shape does not match the marginals");
  }
  Vector u = w * q;
  Vector v = w.transpose() * p;
  v.array() -= p.dot(u);
  return {std::move(u), std::move(v)};
}

double gradient_norm_sumspace(const Potentials& pot, const DiscreteMeasure& p,
                              const DiscreteMeasure& q, const CostSpec& cost) {
  const Matrix& c = cost.matrix();
  Matrix r(p.size(), q.size());
  for (int i = 0; i < p.size(); ++i) {
    for (int j = 0; j < q.size(); ++j) r(i, j) = 1.0 - pos(pot.h(i, j) - c(i, j)) / pot.eps;
  }
  const auto [u, v] = project_sum_space(r, p.weights(), q.weights());
  const double sq = p.weights().dot(u.cwiseAbs2()) + q.weights().dot(v.cwiseAbs2());
  return std::sqrt(std::max(0.0, sq));
}

double extend_potential(const Potentials& pot, Side side, const DiscreteMeasure& other,
                        const CostSpec& cost, const Eigen::Ref<const Vector>& point) {
  if (side == Side::First) {
    if (other.size() != pot.g.size()) throw InvalidInput("q", "size does not match g");
    Vector offsets(other.size());
    for (int j = 0; j < other.size(); ++j) offsets[j] = pot.g[j] - cost(point, other.point(j));
    return scalar_foc_solve(offsets, other.weights(), pot.eps);
  }
  if (other.size() != pot.f.size()) throw InvalidInput("p", "size does not match f");
  Vector offsets(other.size());
  for (int i = 0; i < other.size(); ++i) offsets[i] = pot.f[i] - cost(other.point(i), point);
  return scalar_foc_solve(offsets, other.weights(), pot.eps);
}

Vector extend_potential(const Potentials& pot, Side side, const DiscreteMeasure& p,
                        const DiscreteMeasure& q, const CostSpec& cost,
                        const PointSet& points) {
  const DiscreteMeasure& other = side == Side::First ? q : p;
  Vector out(points.rows());
  for (Eigen::Index k = 0; k < points.rows(); ++k) {
    out[k] = extend_potential(pot, side, other, cost, points.row(k).transpose());
  }
  return out;
}

std::pair<Vector, Vector> balanced_decomposition(const Matrix& w, const Vector& p,
                                                 const Vector& q) {
  if (w.rows() != p.size() || w.cols() != q.size()) {
    throw InvalidInput("w", "shape does not match the marginals");
  }
  const double wbar = p.dot(w * q);
  Vector u = w * q;
  Vector v = w.transpose() * p;
  u.array() -= 0.5 * wbar;
  v.array() -= 0.5 * wbar;
  return {std::move(u), std::move(v)};
}

}  // namespace qot

#include <qotlab/constants.hpp>

#include <qotlab/error.hpp>

#include <algorithm>
#include <cmath>

namespace qot {

namespace {

double require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(field, "must be positive and finite");
  return v;
}

// Largest |x - x'| over x in a, x' in b.
double max_cross_distance(const PointSet& a, const PointSet& b) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index k = 0; k < b.rows(); ++k) {
      best = std::max(best, (a.row(i) - b.row(k)).norm());
    }
  }
  return best;
}

// sum_ij p_i q_j (c_ij - c'_ij)^2 with both costs tabulated on (p, q).
double cost_diff_sq(const Matrix& c, const Matrix& c_other, const Vector& p, const Vector& q) {
  const Matrix d = (c - c_other).array().square().matrix();
  return p.dot(d * q);
}

}  // namespace

InstanceGeometry geometry_from_class(const ClassParams& params, const DiscreteMeasure& q,
                                     double diam_p) {
  InstanceGeometry geo;
  geo.cone_const = params.cone_const;
  geo.density_lower = params.density_lower;
  geo.density_upper = params.density_upper;
  geo.diam_p = diam_p;
  geo.lipschitz = params.lipschitz;
  geo.dim = params.dim;
  geo.ball_mass = [q](double r) { return min_ball_mass(q, r); };
  return geo;
}

double gamma_eps(const InstanceGeometry& geo, double eps) {
  require_positive(eps, "eps");
  require_positive(geo.cone_const, "cone_const");
  require_positive(geo.density_lower, "density_lower");
  require_positive(geo.lipschitz, "lipschitz");
  const double L = geo.lipschitz;
  const double d = geo.dim;
  const double ball = geo.ball_mass(eps / (8.0 * L));
  if (!(ball > 0.0)) throw InvalidInput("ball_mass", "zero ball mass");
  const double ratio = geo.density_upper / geo.density_lower;
  const double cells = std::max(1.0, std::ceil(8.0 * L * geo.diam_p / eps));
  return 16.0 * (std::pow(std::max(8.0 * L / eps, 1.0), d) / geo.cone_const) * ratio * ratio *
         std::pow(cells, d + 2.0) / ball;
}

double vartheta(double delta, const InstanceGeometry& geo) {
  require_positive(delta, "delta");
  const double r = delta / (8.0 * geo.lipschitz);
  return geo.cone_const * std::min(std::pow(r, geo.dim), 1.0) * geo.ball_mass(r);
}

PointwiseConstants pointwise_constants(const InstanceGeometry& geo, double eps) {
  PointwiseConstants k;
  const double r = eps / (4.0 * geo.lipschitz);
  k.gamma_eps = gamma_eps(geo, eps);
  k.vartheta_eps = vartheta(eps, geo);
  k.qhat_eps = geo.ball_mass(r);
  k.kappahat_eps = geo.cone_const * std::min(std::pow(r, geo.dim), 1.0);
  const double g = k.gamma_eps;
  k.etahat_eps = std::min({eps * std::sqrt(k.vartheta_eps) / (2.0 * g),
                           eps * k.qhat_eps / (2.0 * (1.0 + g)),
                           eps * k.kappahat_eps / (2.0 * (1.0 + g))});
  return k;
}

StabilityConstants uniform_constants(const ClassParams& params) {
  validate_class_params(params);
  const double L = params.lipschitz;
  const double e = params.eps_lower;
  const double d = params.dim;
  const double ratio = params.density_upper / params.density_lower;
  StabilityConstants k;
  // A ceiling of 0 (D = 0) would zero the constant; one cell is the minimum.
  const double cells = std::max(1.0, std::ceil(8.0 * L * params.diam_bound / e));
  k.gamma_bar = 16.0 * (std::pow(std::max(8.0 * L / e, 1.0), d) / params.cone_const) * ratio *
                ratio * std::pow(cells, d + 2.0) / params.ball_mass_lower;
  k.vartheta_lower =
      params.cone_const * std::min(std::pow(e / (8.0 * L), d), 1.0) * params.ball_mass_lower;
  k.eta_bar = e * std::sqrt(k.vartheta_lower) / (2.0 * k.gamma_bar);
  k.kappahat_lower = params.cone_const * std::min(std::pow(e / (4.0 * L), d), 1.0);
  k.eta_bar_star = std::min({k.eta_bar, e * params.ball_mass_lower / (2.0 * (1.0 + k.gamma_bar)),
                             e * k.kappahat_lower / (2.0 * (1.0 + k.gamma_bar))});
  k.c_bar = (1.0 + k.gamma_bar) * (1.0 / params.ball_mass_lower + 1.0 / k.kappahat_lower);
  return k;
}

StabilityConstants stability_constants(const ClassParams& params, const Instance& reference,
                                       std::optional<double> delta) {
  StabilityConstants k = uniform_constants(params);
  const InstanceGeometry geo = geometry_from_class(params, reference.q, reference.p.diameter());
  const PointwiseConstants pc = pointwise_constants(geo, reference.eps);
  k.gamma_eps = pc.gamma_eps;
  k.vartheta_delta = vartheta(delta.value_or(reference.eps), geo);
  k.qhat_eps = pc.qhat_eps;
  k.kappahat_eps = pc.kappahat_eps;
  k.etahat_eps = pc.etahat_eps;
  return k;
}

std::vector<ConstantEntry> constant_table(const StabilityConstants& k) {
  return {
      {"gamma_eps", k.gamma_eps, "error-bound"},
      {"vartheta_delta", k.vartheta_delta, "vartheta"},
      {"qhat_eps", k.qhat_eps, "linf.qhat"},
      {"kappahat_eps", k.kappahat_eps, "linf.kappahat"},
      {"etahat_eps", k.etahat_eps, "linf.etahat"},
      {"gamma_bar", k.gamma_bar, "uniform-l2.gamma"},
      {"vartheta_lower", k.vartheta_lower, "uniform-l2.vartheta"},
      {"eta_bar", k.eta_bar, "uniform-l2.eta"},
      {"kappahat_lower", k.kappahat_lower, "uniform-linf.kappahat"},
      {"eta_bar_star", k.eta_bar_star, "uniform-linf.eta"},
      {"c_bar", k.c_bar, "uniform-linf.C"},
  };
}

DeltaQuantities delta_quantities(const Instance& a, const Instance& b, double lipschitz,
                                 const StabilityConstants& k,
                                 std::optional<double> declared_cost_diff_bound) {
  if (a.p.dim() != b.p.dim() || a.q.dim() != b.q.dim()) {
    throw InvalidInput("dim", "instances live in different dimensions");
  }
  const double L = lipschitz;
  DeltaQuantities out;
  out.w1_p = wasserstein1(a.p, b.p);
  out.w1_q = wasserstein1(a.q, b.q);
  out.delta_w = std::hypot(out.w1_p, out.w1_q);
  out.eps_diff = std::abs(a.eps - b.eps);

  // Cost differences on each product measure: rebind the other cost.
  const CostSpec b_on_a = b.cost.rebind(a.p, a.q);
  const CostSpec a_on_b = a.cost.rebind(b.p, b.q);
  const double sq_mu = cost_diff_sq(a.cost.matrix(), b_on_a.matrix(), a.p.weights(), a.q.weights());
  const double sq_mu_prime =
      cost_diff_sq(a_on_b.matrix(), b.cost.matrix(), b.p.weights(), b.q.weights());
  out.cost_diff_l2_mu = std::sqrt(sq_mu);
  out.cost_diff_l2_mu_prime = std::sqrt(sq_mu_prime);
  out.cost_diff_l2_mu_bar = std::sqrt(0.5 * (sq_mu + sq_mu_prime));

  // Sup norms over Gamma = (P atoms u P' atoms) x (Q atoms u Q' atoms).
  const DiscreteMeasure gp = DiscreteMeasure::uniform(union_points(a.p.points(), b.p.points()));
  const DiscreteMeasure gq = DiscreteMeasure::uniform(union_points(a.q.points(), b.q.points()));
  const Matrix ca = a.cost.rebind(gp, gq).matrix();
  const Matrix cb = b.cost.rebind(gp, gq).matrix();
  out.cost_diff_linf = (ca - cb).cwiseAbs().maxCoeff();
  if (declared_cost_diff_bound) {
    out.cost_diff_linf = std::max(out.cost_diff_linf, *declared_cost_diff_bound);
  }
  out.cost_linf_gamma = ca.cwiseAbs().maxCoeff();
  out.cost_prime_linf_gamma = cb.cwiseAbs().maxCoeff();

  const double base = 2.0 * L * out.delta_w + out.eps_diff;
  out.delta = base + out.cost_diff_l2_mu;
  out.delta_prime = base + out.cost_diff_l2_mu_prime;
  out.delta_bar = base + out.cost_diff_l2_mu_bar;
  out.delta_star = base + out.cost_diff_linf;

  out.delta_tv = total_variation(a.p, b.p) + total_variation(a.q, b.q);
  out.delta_omega = std::hypot(hausdorff_distance(a.p.points(), b.p.points()),
                               hausdorff_distance(a.q.points(), b.q.points()));
  out.small_delta_star = k.c_bar * out.delta_star + out.cost_diff_linf;

  out.a_const = 1.0 + 6.0 * out.cost_linf_gamma / a.eps;
  out.a_prime = 1.0 + 6.0 * out.cost_prime_linf_gamma / b.eps;

  const double dp = a.p.diameter();
  const double dq = a.q.diameter();
  const double dpp = b.p.diameter();
  const double dqp = b.q.diameter();
  const double xp = max_cross_distance(a.p.points(), b.p.points());
  const double xq = max_cross_distance(a.q.points(), b.q.points());
  out.d_star = std::sqrt(std::max({dp * dp + dq * dq, dpp * dpp + dqp * dqp, xp * xp + xq * xq}));

  const double l2_num = k.gamma_bar * out.delta_bar + out.cost_diff_l2_mu_bar;
  out.delta_hat_first = (l2_num + out.a_prime * out.eps_diff) / a.eps;
  out.delta_hat_second = (l2_num + out.a_const * out.eps_diff) / b.eps;
  out.delta_hat = std::min(out.delta_hat_first, out.delta_hat_second);

  const double inf_num = k.c_bar * out.delta_star + out.cost_diff_linf;
  out.delta_hat_inf_first = (inf_num + out.a_prime * out.eps_diff) / a.eps;
  out.delta_hat_inf_second = (inf_num + out.a_const * out.eps_diff) / b.eps;
  out.delta_hat_inf = std::min(out.delta_hat_inf_first, out.delta_hat_inf_second);
  return out;
}

}  // namespace qot

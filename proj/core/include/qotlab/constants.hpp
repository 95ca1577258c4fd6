#pragma once

#include <qotlab/class_audit.hpp>
#include <qotlab/cost.hpp>
#include <qotlab/dual.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qot {

/// r -> inf_{y in supp Q} Q(B_r(y)).
using BallMassFn = std::function<double(double)>;

/// Per-instance data entering the error-bound constant.
struct InstanceGeometry {
  double cone_const;     // delta_P
  double density_lower;  // lambda_P
  double density_upper;  // Lambda_P
  double diam_p;         // diam(supp P)
  double lipschitz;      // L
  int dim;
  BallMassFn ball_mass;  // of Q
};

/// Class-level values substituted for the per-instance ones; the ball mass
/// uses the actual Q.
InstanceGeometry geometry_from_class(const ClassParams& params, const DiscreteMeasure& q,
                                     double diam_p);

/// gamma_eps = 16 (delta_P^{-1} max(8L/eps, 1)^d) (Lambda_P / lambda_P)^2
///             * ceil(8 L diam / eps)^{d+2} / inf_y Q(B_{eps/8L}(y)).
double gamma_eps(const InstanceGeometry& geo, double eps);

/// theta_delta = delta_P min{(delta/8L)^d, 1} inf_y Q(B_{delta/8L}(y)).
double vartheta(double delta, const InstanceGeometry& geo);

struct PointwiseConstants {
  double qhat_eps;     // inf_y Q(B_{eps/4L}(y))
  double kappahat_eps; // delta_P min{(eps/4L)^d, 1}
  double etahat_eps;   // smallness threshold for the L-infinity bound
  double gamma_eps;
  double vartheta_eps;
};

PointwiseConstants pointwise_constants(const InstanceGeometry& geo, double eps);

struct StabilityConstants {
  double gamma_eps = 0.0;
  double vartheta_delta = 0.0;
  double qhat_eps = 0.0;
  double kappahat_eps = 0.0;
  double etahat_eps = 0.0;
  double gamma_bar = 0.0;
  double vartheta_lower = 0.0;
  double eta_bar = 0.0;
  double kappahat_lower = 0.0;
  double eta_bar_star = 0.0;
  double c_bar = 0.0;
};

/// Uniform constants of the class: gamma_bar, vartheta_lower, eta_bar,
/// kappahat_lower, eta_bar_star, c_bar. Per-instance fields stay zero.
StabilityConstants uniform_constants(const ClassParams& params);

/// Uniform constants plus the per-instance ones for `reference`, with
/// vartheta evaluated at `delta` (defaults to eps).
StabilityConstants stability_constants(const ClassParams& params, const Instance& reference,
                                       std::optional<double> delta = std::nullopt);

struct ConstantEntry {
  std::string name;
  double value;
  std::string formula_id;
};

/// Flat (name, value, formula-id) rows for CSV export.
std::vector<ConstantEntry> constant_table(const StabilityConstants& k);

/// Distances between two data quadruples and the derived perturbation sizes.
struct DeltaQuantities {
  double w1_p = 0.0;
  double w1_q = 0.0;
  double delta_w = 0.0;       // (W1(P,P')^2 + W1(Q,Q')^2)^{1/2}
  double delta = 0.0;         // 2L delta_w + |c-c'|_{L2(P x Q)} + |eps-eps'|
  double delta_prime = 0.0;   // same with L2(P' x Q')
  double delta_bar = 0.0;     // same with L2 of the mixture
  double delta_star = 0.0;    // same with |c-c'|_{L-infinity}
  double delta_tv = 0.0;      // TV(P,P') + TV(Q,Q')
  double delta_omega = 0.0;   // (dH(supp P, supp P')^2 + dH(supp Q, supp Q')^2)^{1/2}
  double small_delta_star = 0.0;  // c_bar delta_star + |c-c'|_{L-infinity}
  double a_const = 0.0;       // 1 + 6 |c|_{L-infinity(Gamma)} / eps
  double a_prime = 0.0;       // 1 + 6 |c'|_{L-infinity(Gamma)} / eps'
  double d_star = 0.0;        // diameter of Theta
  double delta_hat = 0.0;     // min of the two expressions below
  double delta_hat_first = 0.0;   // divided by eps
  double delta_hat_second = 0.0;  // divided by eps'
  double delta_hat_inf = 0.0;
  double delta_hat_inf_first = 0.0;
  double delta_hat_inf_second = 0.0;

  double cost_diff_l2_mu = 0.0;
  double cost_diff_l2_mu_prime = 0.0;
  double cost_diff_l2_mu_bar = 0.0;
  double cost_diff_linf = 0.0;
  double cost_linf_gamma = 0.0;
  double cost_prime_linf_gamma = 0.0;
  double eps_diff = 0.0;
};

/// Evaluates every perturbation size for the pair (a, b). Cost norms in
/// L-infinity are taken over the union atom grid Gamma, raised to
/// `declared_cost_diff_bound` when one is given. Both costs must be
/// evaluable on the union grid.
DeltaQuantities delta_quantities(const Instance& a, const Instance& b, double lipschitz,
                                 const StabilityConstants& k,
                                 std::optional<double> declared_cost_diff_bound = std::nullopt);

}  // namespace qot

#pragma once

#include <qotlab/cost.hpp>
#include <qotlab/measures.hpp>

#include <optional>
#include <utility>
#include <vector>

namespace qot {

/// Unique root t of F(t) = sum_j w_j (t + b_j)_+ = eps.
///
/// F is piecewise linear and nondecreasing with breakpoints -b_j, and
/// strictly increasing to the right of the smallest breakpoint, so the root
/// is found exactly by walking the breakpoints in increasing order and
/// solving the linear piece that reaches eps. Equal offsets are merged.
double scalar_foc_solve(const Eigen::Ref<const Vector>& offsets,
                        const Eigen::Ref<const Vector>& weights, double eps);

/// F(t) for the same data; used to audit roots.
double scalar_foc_value(const Eigen::Ref<const Vector>& offsets,
                        const Eigen::Ref<const Vector>& weights, double t);

enum class Gauge {
  MeanZeroSecond,  // sum_j q_j g_j = 0
  None,
};

/// Dual pair (f, g) on the atoms of P and Q. h = f (+) g is invariant under
/// (f + a, g - a); `shift` records the a applied by the gauge.
struct Potentials {
  Vector f;
  Vector g;
  double eps = 0.0;
  Gauge gauge = Gauge::None;
  double shift = 0.0;
  double foc_residual_inf = 0.0;  // max |r| over both residual vectors
  long sweeps = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // dual objective after each sweep
  std::vector<double> residual_trace;   // foc_residual_inf after each sweep

  double h(int i, int j) const { return f[i] + g[j]; }
};

struct SolveOptions {
  double tol = 1e-10;
  long max_iter = 100000;
  Gauge gauge = Gauge::MeanZeroSecond;
  bool record_trace = true;
  std::optional<Vector> initial_g;
};

/// Exact alternating coordinate maximization of the concave dual: every
/// sweep sets each f_i to the root of its first-order condition given g,
/// then each g_j given f, until max |residual| <= tol. The dual objective
/// never decreases across a sweep. Returns the last iterate flagged
/// `converged = false` when max_iter is exhausted.
Potentials solve_dual(const DiscreteMeasure& p, const DiscreteMeasure& q,
                      const CostSpec& cost, double eps, const SolveOptions& opts = {});

inline Potentials solve_dual(const Instance& inst, const SolveOptions& opts = {}) {
  return solve_dual(inst.p, inst.q, inst.cost, inst.eps, opts);
}

/// Wraps externally supplied potentials (closed forms, fixtures), filling in
/// the residual and marking them converged when max |residual| <= tol.
Potentials make_potentials(Vector f, Vector g, double eps, const DiscreteMeasure& p,
                           const DiscreteMeasure& q, const CostSpec& cost,
                           double tol = 1e-10);

/// Phi(f (+) g) = sum_ij p_i q_j [h_ij - (h_ij - c_ij)_+^2 / (2 eps)].
double dual_objective(const Potentials& pot, const DiscreteMeasure& p,
                      const DiscreteMeasure& q, const CostSpec& cost);

struct FocResiduals {
  Vector first;   // r_i = 1 - (1/eps) sum_j q_j (h_ij - c_ij)_+
  Vector second;  // r_j = 1 - (1/eps) sum_i p_i (h_ij - c_ij)_+

  double max_abs() const;
};

FocResiduals foc_residuals(const Potentials& pot, const DiscreteMeasure& p,
                           const DiscreteMeasure& q, const CostSpec& cost);

/// L^2(P x Q)-norm of the projection of R_h = 1 - (h - c)_+ / eps onto the
/// closed sum space {u (+) v}; this is the norm of the dual gradient.
double gradient_norm_sumspace(const Potentials& pot, const DiscreteMeasure& p,
                              const DiscreteMeasure& q, const CostSpec& cost);

/// Orthogonal projection of w onto the sum space in L^2(P x Q), gauge fixed
/// by sum_j q_j v_j = 0.
std::pair<Vector, Vector> project_sum_space(const Matrix& w, const Vector& p,
                                            const Vector& q);

enum class Side { First, Second };

/// Value of the potential at a point off the atoms, defined by the
/// first-order condition at that point. For Side::First, `other` is Q and
/// the root of sum_j q_j (t + g_j - c(x, y_j))_+ = eps is returned.
double extend_potential(const Potentials& pot, Side side, const DiscreteMeasure& other,
                        const CostSpec& cost, const Eigen::Ref<const Vector>& point);

/// extend_potential over every row of `points`.
Vector extend_potential(const Potentials& pot, Side side, const DiscreteMeasure& p,
                        const DiscreteMeasure& q, const CostSpec& cost,
                        const PointSet& points);

/// u_i = sum_j q_j w_ij - wbar/2, v_j = sum_i p_i w_ij - wbar/2 with
/// wbar = sum_ij p_i q_j w_ij.
std::pair<Vector, Vector> balanced_decomposition(const Matrix& w, const Vector& p,
                                                 const Vector& q);

}  // namespace qot

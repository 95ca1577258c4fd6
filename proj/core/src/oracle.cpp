#include <qotlab/oracle.hpp>

#include <qotlab/error.hpp>

#include <algorithm>
#include <cmath>

namespace qot::oracle {

namespace {

// Projection of z onto {x >= 0, sum_k w_k x_k = 1} in the norm
// sum_k w_k (.)^2, where sum_k w_k = 1. The minimizer is x = (z - tau)_+;
// tau is bracketed and bisected, then fixed exactly from the active set.
void project_weighted_simplex(const Eigen::Ref<const Vector>& z, const Vector& w,
                              Eigen::Ref<Vector> out) {
  auto mass = [&](double tau) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < z.size(); ++k) s += w[k] * std::max(0.0, z[k] - tau);
    return s;
  };
  double lo = z.minCoeff() - 1.0;  // mass(lo) >= 1
  double hi = z.maxCoeff();        // mass(hi) == 0
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) >= 1.0 ? lo : hi) = mid;
  }
  double active_w = 0.0;
  double active_z = 0.0;
  const double tau0 = 0.5 * (lo + hi);
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    if (z[k] > tau0) {
      active_w += w[k];
      active_z += w[k] * z[k];
    }
  }
  const double tau = active_w > 0.0 ? (active_z - 1.0) / active_w : tau0;
  for (Eigen::Index k = 0; k < z.size(); ++k) out[k] = std::max(0.0, z[k] - tau);
}

void project_rows(const Matrix& z, const Vector& q, Matrix& out) {
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    Vector row = z.row(i).transpose();
    Vector res(row.size());
    project_weighted_simplex(row, q, res);
    out.row(i) = res.transpose();
  }
}

void project_cols(const Matrix& z, const Vector& p, Matrix& out) {
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    project_weighted_simplex(z.col(j), p, out.col(j));
  }
}

double row_violation(const Matrix& zeta, const Vector& q) {
  return ((zeta * q).array() - 1.0).abs().maxCoeff();
}

// Dykstra's alternating projections onto rows-set and columns-set.
Matrix project_polytope(const Matrix& z, const Vector& p, const Vector& q,
                        const OracleOptions& opts, long& iterations) {
  Matrix x = z;
  Matrix inc_rows = Matrix::Zero(z.rows(), z.cols());
  Matrix inc_cols = Matrix::Zero(z.rows(), z.cols());
  Matrix y(z.rows(), z.cols());
  Matrix next(z.rows(), z.cols());
  for (long it = 1; it <= opts.max_projection_iter; ++it) {
    project_rows(x + inc_rows, q, y);
    inc_rows = x + inc_rows - y;
    project_cols(y + inc_cols, p, next);
    inc_cols = y + inc_cols - next;
    const double change = (next - x).cwiseAbs().maxCoeff();
    x.swap(next);
    iterations = it;
    if (change <= opts.tol && row_violation(x, q) <= opts.tol) return x;
  }
  throw NotConverged("oracle: Dykstra projection did not converge");
}

}  // namespace

double primal_objective(const Matrix& zeta, const DiscreteMeasure& p, const DiscreteMeasure& q,
                        const CostSpec& cost, double eps) {
  const Matrix w = p.weights() * q.weights().transpose();
  return (w.array() * (cost.matrix().array() * zeta.array() + 0.5 * eps * zeta.array().square()))
      .sum();
}

OracleResult qp_primal_solve(const DiscreteMeasure& p, const DiscreteMeasure& q,
                             const CostSpec& cost, double eps, const OracleOptions& opts) {
  validate_instance({p, q, cost, eps});
  if (static_cast<long>(p.size()) * q.size() > opts.size_limit) {
    throw InvalidInput("size", "oracle is limited to small dense instances");
  }
  // In the L^2(P x Q) inner product the objective's gradient is c + eps*zeta
  // with Lipschitz constant eps, so the step is 1/eps.
  const double step = 1.0 / eps;
  OracleResult out;
  Matrix zeta = Matrix::Ones(p.size(), q.size());  // product coupling
  for (long it = 1; it <= opts.max_gradient_iter; ++it) {
    const Matrix grad = cost.matrix() + eps * zeta;
    long proj_iters = 0;
    Matrix next = project_polytope(zeta - step * grad, p.weights(), q.weights(), opts, proj_iters);
    out.projection_iterations += proj_iters;
    const double change = (next - zeta).cwiseAbs().maxCoeff();
    zeta.swap(next);
    out.gradient_iterations = it;
    if (change <= opts.tol) {
      out.coupling = coupling_from_mass(
          zeta.cwiseProduct(p.weights() * q.weights().transpose()), p, q, 0.0);
      out.coupling.zeta = zeta;
      out.objective = primal_objective(zeta, p, q, cost, eps);
      return out;
    }
  }
  throw NotConverged("oracle: projected gradient did not reach stationarity");
}

double oracle_agreement(const DiscreteMeasure& p, const DiscreteMeasure& q, const CostSpec& cost,
                        double eps, const OracleOptions& opts) {
  const auto pot = solve_dual(p, q, cost, eps);
  const auto dual = extract_coupling(pot, p, q, cost);
  const auto primal = qp_primal_solve(p, q, cost, eps, opts);
  return (dual.zeta - primal.coupling.zeta).cwiseAbs().maxCoeff();
}

}  // namespace qot::oracle

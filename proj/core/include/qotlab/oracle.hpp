#pragma once

#include <qotlab/coupling.hpp>

namespace qot::oracle {

struct OracleOptions {
  double tol = 1e-12;            // stationarity / marginal tolerance
  long max_projection_iter = 1000000;
  long max_gradient_iter = 1000;
  int size_limit = 400;          // n * m
};

struct OracleResult {
  Coupling coupling;
  double objective = 0.0;
  long gradient_iterations = 0;
  long projection_iterations = 0;
};

/// Brute-force primal solve: projected gradient on the density zeta over the
/// transportation polytope {zeta >= 0, sum_j q_j zeta_ij = 1,
/// sum_i p_i zeta_ij = 1}, in the L^2(P x Q) geometry where the objective
/// has Hessian eps * I. Projections use Dykstra's algorithm over the row
/// and column constraint sets; each of those is a weighted simplex solved by
/// bisection. Independent of the dual solver.
OracleResult qp_primal_solve(const DiscreteMeasure& p, const DiscreteMeasure& q,
                             const CostSpec& cost, double eps,
                             const OracleOptions& opts = {});

/// Objective sum_ij p_i q_j (c_ij zeta_ij + eps/2 zeta_ij^2) of any density.
double primal_objective(const Matrix& zeta, const DiscreteMeasure& p, const DiscreteMeasure& q,
                        const CostSpec& cost, double eps);

/// L-infinity distance between the dual-solver density and the oracle density.
double oracle_agreement(const DiscreteMeasure& p, const DiscreteMeasure& q,
                        const CostSpec& cost, double eps, const OracleOptions& opts = {});

}  // namespace qot::oracle

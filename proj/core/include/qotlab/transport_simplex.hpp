#pragma once

#include <qotlab/measures.hpp>

#include <vector>

namespace qot {

struct TransportCell {
  int row;
  int col;
  double flow;
};

struct TransportSolution {
  double cost = 0.0;
  std::vector<TransportCell> plan;  // basic cells, zero flows included
  long pivots = 0;
};

/// Solves min <C, X> over X >= 0 with row sums `supply` and column sums
/// `demand` (equal totals) by the primal transportation simplex
/// (north-west corner start, Dantzig pricing on the u-v potentials).
/// The result is an exact vertex optimum up to floating-point rounding.
TransportSolution solve_transport(const Vector& supply, const Vector& demand,
                                  const Matrix& cost);

}  // namespace qot

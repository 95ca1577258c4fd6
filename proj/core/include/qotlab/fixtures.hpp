#pragma once

#include <qotlab/coupling.hpp>
#include <qotlab/dual.hpp>

#include <cstdint>
#include <vector>

namespace qot {

/// Horizontal segment {(x, y) : lo <= x <= hi} in the plane; lo == hi is a
/// single point.
struct Segment {
  double y;
  double lo;
  double hi;
};

using SegmentSet = std::vector<Segment>;

/// Exact Hausdorff distance between finite unions of horizontal segments.
/// The distance to a union is a minimum of convex piecewise functions along
/// each segment, so the supremum is attained at an endpoint, a piece
/// boundary, or a point where two pieces are equidistant; all of these are
/// enumerated in closed form.
double hausdorff_distance(const SegmentSet& a, const SegmentSet& b);

/// Points (x_i, y_j) as degenerate segments.
SegmentSet as_segments(const PointSet& points_2d);

/// The two-fiber counterexample on [0, 1] x {0, 1} with eps = 1.
struct Example62Instance {
  double eta = 0.0;
  int grid_n = 0;
  double delta_eta = 0.0;     // eta / 3
  Instance instance;          // discretized P^eta, Q = (delta_0 + delta_1)/2
  std::vector<double> edges;  // cell edges of the discretization, size grid_n + 1
  double max_cell_width = 0.0;

  /// Closed-form potentials on the atoms: f = 2, g = (-delta_eta, +delta_eta).
  Potentials closed_form_potentials() const;

  /// h^eta(x, y) for y in {0, 1}.
  double h(double x, int fiber) const;
  /// sigma^eta(x, y) = h^eta(x, y) - c(x, y).
  double sigma(double x, int fiber) const;

  /// Closure of {sigma > 0}: [0,1] x {0} u [1/4,1] x {1} at eta = 0, the
  /// whole of [0,1] x {0,1} otherwise.
  SegmentSet analytic_support() const;

  /// Density p_eta(x).
  double density(double x) const;
};

/// Builds the instance with grid_n midpoint atoms. Cells never straddle the
/// kinks 1/4 and 1/2: floor(n/4) cells on each of [0,1/4] and [1/4,1/2], the
/// rest on [1/2,1]. Each atom carries the exact p_eta-mass of its cell.
Example62Instance example62(double eta, int grid_n);

/// Closed-form support for a given eta without building a grid.
SegmentSet example62_support(double eta);

/// Largest deviation from eps of the two first-order conditions evaluated
/// on the continuum closed form by exact piecewise-linear integration. The
/// optional offset is added to h on fiber 1.
double analytic_foc_residual(const Example62Instance& inst, double fiber1_offset = 0.0);

/// Dual objective of the continuum closed form by exact piecewise-quadratic
/// integration.
double analytic_dual_objective(const Example62Instance& inst);

/// Instance with c == 0; the reference solution is zeta == 1, h == eps.
struct ZeroCostInstance {
  Instance instance;
  Potentials reference;  // f = eps, g = 0
  Coupling coupling;     // product coupling
};

ZeroCostInstance zero_cost_instance(const DiscreteMeasure& p, const DiscreteMeasure& q,
                                    double eps, double lipschitz = 1.0);

struct QuadraticConvexOptions {
  double eps = 1.0;
  double width = 1.0;           // grid covers [0, width]^d
  double density_spread = 0.25; // raw densities drawn from [1 - s, 1 + s]
  int q_points = 0;             // atoms per axis of Q; 0 means n
};

/// Quadratic-cost instance on uniform grids of a cube.
struct QuadraticConvexInstance {
  Instance instance;
  Box box;
  double diam_p = 0.0;        // diameter of the atom set of P
  double grid_spacing = 0.0;  // distance between neighbouring atoms of P
  double lipschitz = 0.0;     // sqrt(2) * box diameter
};

/// n atoms per axis at cell midpoints of [0, width]^d for P and Q, weights
/// drawn from a seeded generator and normalized. The normalized densities
/// lie within [(1-s)/(1+s), (1+s)/(1-s)] per unit cell volume.
QuadraticConvexInstance quadratic_convex_instance(int n, int d, std::uint64_t seed,
                                                  const QuadraticConvexOptions& opts = {});

}  // namespace qot

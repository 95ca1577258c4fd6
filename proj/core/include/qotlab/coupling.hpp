#pragma once

#include <qotlab/dual.hpp>

#include <optional>
#include <utility>
#include <vector>

namespace qot {

/// Optimal plan on the product of the atom sets: zeta is the density with
/// respect to P x Q and mass_ij = zeta_ij p_i q_j.
struct Coupling {
  Matrix zeta;
  Matrix mass;
  double support_tol = 0.0;
};

/// zeta_ij = (f_i + g_j - c_ij)_+ / eps. The default support floor is
/// 1e-10 * max zeta; pass 0 for exact-arithmetic inputs. Throws
/// NotConverged for unconverged potentials.
Coupling extract_coupling(const Potentials& pot, const DiscreteMeasure& p,
                          const DiscreteMeasure& q, const CostSpec& cost,
                          std::optional<double> support_tol = std::nullopt);

/// Builds a coupling from transport masses (rows P, columns Q).
Coupling coupling_from_mass(Matrix mass, const DiscreteMeasure& p, const DiscreteMeasure& q,
                            double support_tol = 0.0);

/// Index pairs (i, j) with zeta_ij > support_tol, row-major order.
struct SupportSet {
  std::vector<std::pair<int, int>> cells;

  bool contains(int i, int j) const;
  std::size_t size() const { return cells.size(); }
};

SupportSet extract_support(const Coupling& coup);

/// Support cells as points (x_i, y_j) in R^{2d}.
PointSet support_points(const SupportSet& support, const DiscreteMeasure& p,
                        const DiscreteMeasure& q);

/// Coupling atoms with positive mass, as a weighted cloud in R^{2d}.
std::pair<PointSet, Vector> coupling_atoms(const Coupling& coup, const DiscreteMeasure& p,
                                           const DiscreteMeasure& q);

/// sum_ij mass_ij c_ij + (eps/2) sum_ij p_i q_j zeta_ij^2.
double primal_value(const Coupling& coup, const CostSpec& cost, double eps);

/// Primal value minus dual objective.
double duality_gap(const Coupling& coup, const Potentials& pot, const DiscreteMeasure& p,
                   const DiscreteMeasure& q, const CostSpec& cost);

/// Largest |row sum - p_i| and |column sum - q_j| of the masses.
double marginal_violation(const Coupling& coup, const DiscreteMeasure& p,
                          const DiscreteMeasure& q);

}  // namespace qot

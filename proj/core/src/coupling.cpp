#include <qotlab/coupling.hpp>

#include <qotlab/error.hpp>

#include <algorithm>

namespace qot {

Coupling extract_coupling(const Potentials& pot, const DiscreteMeasure& p,
                          const DiscreteMeasure& q, const CostSpec& cost,
                          std::optional<double> support_tol) {
  if (!pot.converged) {
    throw NotConverged("potentials did not converge; refusing to extract a coupling");
  }
  const Matrix& c = cost.matrix();
  Coupling out;
  out.zeta.resize(p.size(), q.size());
  out.mass.resize(p.size(), q.size());
  for (int i = 0; i < p.size(); ++i) {
    for (int j = 0; j < q.size(); ++j) {
      const double z = std::max(0.0, pot.h(i, j) - c(i, j)) / pot.eps;
      out.zeta(i, j) = z;
      out.mass(i, j) = z * p.weight(i) * q.weight(j);
    }
  }
  out.support_tol = support_tol ? *support_tol : 1e-10 * out.zeta.maxCoeff();
  return out;
}

Coupling coupling_from_mass(Matrix mass, const DiscreteMeasure& p, const DiscreteMeasure& q,
                            double support_tol) {
  if (mass.rows() != p.size() || mass.cols() != q.size()) {
    throw InvalidInput("mass", "shape does not match the marginals");
  }
  Coupling out;
  out.zeta.resize(p.size(), q.size());
  for (int i = 0; i < p.size(); ++i) {
    for (int j = 0; j < q.size(); ++j) out.zeta(i, j) = mass(i, j) / (p.weight(i) * q.weight(j));
  }
  out.mass = std::move(mass);
  out.support_tol = support_tol;
  return out;
}

bool SupportSet::contains(int i, int j) const {
  return std::binary_search(cells.begin(), cells.end(), std::make_pair(i, j));
}

SupportSet extract_support(const Coupling& coup) {
  SupportSet s;
  for (Eigen::Index i = 0; i < coup.zeta.rows(); ++i) {
    for (Eigen::Index j = 0; j < coup.zeta.cols(); ++j) {
      if (coup.zeta(i, j) > coup.support_tol) {
        s.cells.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
  return s;
}

PointSet support_points(const SupportSet& support, const DiscreteMeasure& p,
                        const DiscreteMeasure& q) {
  PointSet out(static_cast<Eigen::Index>(support.size()), p.dim() + q.dim());
  for (size_t k = 0; k < support.cells.size(); ++k) {
    const auto [i, j] = support.cells[k];
    out.row(static_cast<Eigen::Index>(k)).head(p.dim()) = p.points().row(i);
    out.row(static_cast<Eigen::Index>(k)).tail(q.dim()) = q.points().row(j);
  }
  return out;
}

std::pair<PointSet, Vector> coupling_atoms(const Coupling& coup, const DiscreteMeasure& p,
                                           const DiscreteMeasure& q) {
  SupportSet positive;
  for (Eigen::Index i = 0; i < coup.mass.rows(); ++i) {
    for (Eigen::Index j = 0; j < coup.mass.cols(); ++j) {
      if (coup.mass(i, j) > 0.0) positive.cells.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  PointSet pts = support_points(positive, p, q);
  Vector w(static_cast<Eigen::Index>(positive.size()));
  for (size_t k = 0; k < positive.cells.size(); ++k) {
    w[static_cast<Eigen::Index>(k)] = coup.mass(positive.cells[k].first, positive.cells[k].second);
  }
  return {std::move(pts), std::move(w)};
}

double primal_value(const Coupling& coup, const CostSpec& cost, double eps) {
  // p_i q_j zeta_ij^2 = mass_ij zeta_ij.
  return coup.mass.cwiseProduct(cost.matrix()).sum() +
         0.5 * eps * coup.mass.cwiseProduct(coup.zeta).sum();
}

double duality_gap(const Coupling& coup, const Potentials& pot, const DiscreteMeasure& p,
                   const DiscreteMeasure& q, const CostSpec& cost) {
  return primal_value(coup, cost, pot.eps) - dual_objective(pot, p, q, cost);
}

double marginal_violation(const Coupling& coup, const DiscreteMeasure& p,
                          const DiscreteMeasure& q) {
  const Vector rows = coup.mass.rowwise().sum();
  const Vector cols = coup.mass.colwise().sum().transpose();
  return std::max((rows - p.weights()).cwiseAbs().maxCoeff(),
                  (cols - q.weights()).cwiseAbs().maxCoeff());
}

}  // namespace qot

#pragma once

#include <qotlab/measures.hpp>

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace qot {

enum class CostKind { SqEuclidean, ExplicitMatrix, Example62Analytic };

std::string to_string(CostKind kind);
CostKind cost_kind_from_string(const std::string& name);

using CostFunction = std::function<double(const Eigen::Ref<const Vector>& x,
                                          const Eigen::Ref<const Vector>& y)>;

/// The example cost profile u: 0 on [0, 1/4], slope 32/5 on (1/4, 1/2),
/// 8/5 on [1/2, 1]; constant extension outside [0, 1].
double example62_profile(double x);

/// Transport cost bound to a pair of atom sets. `matrix()` always holds
/// c(x_i, y_j) on the atoms; analytic kinds can also be evaluated anywhere.
/// Costs are stored as `scale * base` so that scaled costs keep their kind.
class CostSpec {
 public:
  /// c(x, y) = |x - y|^2 / 2.
  static CostSpec sq_euclidean(const DiscreteMeasure& p, const DiscreteMeasure& q,
                               double lipschitz, std::optional<double> bound = std::nullopt);

  /// Tabulated cost on the atoms of p and q; evaluation elsewhere throws.
  static CostSpec explicit_matrix(const DiscreteMeasure& p, const DiscreteMeasure& q,
                                  Matrix values, double lipschitz,
                                  std::optional<double> bound = std::nullopt);

  /// c(x, 0) = u(x), c(x, 1) = 2 - u(x) on [0, 1] x {0, 1}.
  static CostSpec example62(const DiscreteMeasure& p, const DiscreteMeasure& q);

  CostKind kind() const { return kind_; }
  const Matrix& matrix() const { return matrix_; }
  double lipschitz() const { return lipschitz_; }
  double scale() const { return scale_; }

  /// Declared sup-norm of c over the working region, or the max over atoms.
  double bound() const;
  const std::optional<double>& declared_bound() const { return bound_; }

  /// True for the unscaled quadratic cost.
  bool is_quadratic() const { return kind_ == CostKind::SqEuclidean && scale_ == 1.0; }

  double operator()(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) const;

  /// The same cost function tabulated on new atoms. Explicit matrices can
  /// only be rebound onto atoms they already know.
  CostSpec rebind(const DiscreteMeasure& p, const DiscreteMeasure& q) const;

  /// (factor * c); Lipschitz constant and bound scale along.
  CostSpec scaled(double factor) const;

 private:
  struct Table;

  CostSpec() = default;

  CostKind kind_ = CostKind::SqEuclidean;
  Matrix matrix_;
  double lipschitz_ = 0.0;
  double scale_ = 1.0;
  std::optional<double> bound_;
  std::shared_ptr<const Table> table_;  // only for ExplicitMatrix
};

/// Largest observed |c(z) - c(z')| / |z - z'| over atom pairs z, z' in
/// supp(p) x supp(q). All pairs are scanned when there are at most
/// `max_pairs` of them; otherwise a deterministic sample of that size.
double observed_lipschitz(const CostSpec& cost, const DiscreteMeasure& p,
                          const DiscreteMeasure& q, long max_pairs = 4000000);

/// A data quadruple (P, Q, c, eps).
struct Instance {
  DiscreteMeasure p;
  DiscreteMeasure q;
  CostSpec cost;
  double eps;
};

/// Throws InvalidInput when shapes disagree or eps <= 0.
void validate_instance(const Instance& inst);

}  // namespace qot

#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace qot {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// Row-major point cloud: one point per row.
using PointSet = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Axis-aligned ambient box (the sets 𝒳 or 𝒴 that localize a problem).
struct Box {
  Vector lower;
  Vector upper;

  bool contains(const Eigen::Ref<const Vector>& x) const;
  double diameter() const { return (upper - lower).norm(); }
};

inline constexpr double kWeightSumTolerance = 1e-12;

/// Finitely supported probability measure on R^d. Immutable after
/// construction; the constructor enforces every invariant.
class DiscreteMeasure {
 public:
  DiscreteMeasure(PointSet points, Vector weights,
                  std::optional<Box> ambient = std::nullopt);

  /// Uniform weights on the given points.
  static DiscreteMeasure uniform(PointSet points);

  /// Points on a line (d = 1).
  static DiscreteMeasure on_line(const std::vector<double>& xs,
                                 const std::vector<double>& ws);

  int size() const { return static_cast<int>(weights_.size()); }
  int dim() const { return static_cast<int>(points_.cols()); }
  const PointSet& points() const { return points_; }
  const Vector& weights() const { return weights_; }
  Vector point(int i) const { return points_.row(i).transpose(); }
  double weight(int i) const { return weights_[i]; }
  const std::optional<Box>& ambient() const { return ambient_; }

  /// Largest pairwise Euclidean distance between atoms.
  double diameter() const;

  friend bool operator==(const DiscreteMeasure& a, const DiscreteMeasure& b);

 private:
  PointSet points_;
  Vector weights_;
  std::optional<Box> ambient_;
};

/// Throws InvalidInput naming the first violated invariant: non-positive
/// weight, weight-sum drift beyond 1e-12, duplicate point, point outside
/// the ambient box.
void validate_measure(const PointSet& points, const Vector& weights,
                      const std::optional<Box>& ambient = std::nullopt);
void validate_measure(const DiscreteMeasure& m);

/// Exact 1-Wasserstein distance under the Euclidean ground metric. Uses the
/// CDF formula in one dimension and an exact transportation simplex
/// otherwise.
double wasserstein1(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Same, for weighted point clouds that need not be normalized to 1 but must
/// carry equal total mass (used for couplings viewed as measures on R^{2d}).
double wasserstein1(const PointSet& xs, const Vector& a, const PointSet& ys,
                    const Vector& b);

/// sup_A |mu(A) - nu(A)|, atoms matched by exact coordinate equality.
double total_variation(const DiscreteMeasure& mu, const DiscreteMeasure& nu);
double total_variation(const PointSet& xs, const Vector& a, const PointSet& ys,
                       const Vector& b);

/// Mass of the open ball B_r(center).
double ball_mass(const DiscreteMeasure& m, const Eigen::Ref<const Vector>& center,
                 double r);

/// min over support points y of m(B_r(y)); balls are open.
double min_ball_mass(const DiscreteMeasure& m, double r);

/// sup_{a in A} dist(a, B).
double directed_hausdorff(const PointSet& a, const PointSet& b);

/// Hausdorff distance between two nonempty finite point sets of equal
/// dimension.
double hausdorff_distance(const PointSet& a, const PointSet& b);

/// Cartesian product of two point sets, concatenating coordinates so that
/// the Euclidean norm on the result is (|x|^2 + |y|^2)^{1/2}.
PointSet product_points(const PointSet& xs, const PointSet& ys);

/// Concatenation of the atoms of both measures, duplicates removed
/// (exact comparison), first-seen order.
PointSet union_points(const PointSet& a, const PointSet& b);

}  // namespace qot

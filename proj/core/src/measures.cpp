#include <qotlab/measures.hpp>

#include <qotlab/error.hpp>
#include <qotlab/transport_simplex.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace qot {

namespace {

using Coordinates = std::vector<double>;

Coordinates row_coordinates(const PointSet& pts, int i) {
  return Coordinates(pts.row(i).data(), pts.row(i).data() + pts.cols());
}

std::vector<int> lexicographic_order(const PointSet& pts) {
  std::vector<int> order(static_cast<size_t>(pts.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    for (Eigen::Index k = 0; k < pts.cols(); ++k) {
      if (pts(a, k) != pts(b, k)) return pts(a, k) < pts(b, k);
    }
    return a < b;
  });
  return order;
}

// Integral of |F - G| over the line for two weighted atom lists.
double wasserstein1_line(const PointSet& xs, const Vector& a, const PointSet& ys,
                         const Vector& b) {
  struct Event {
    double x;
    double dm;
  };
  std::vector<Event> events;
  events.reserve(static_cast<size_t>(xs.rows() + ys.rows()));
  for (Eigen::Index i = 0; i < xs.rows(); ++i) events.push_back({xs(i, 0), a[i]});
  for (Eigen::Index j = 0; j < ys.rows(); ++j) events.push_back({ys(j, 0), -b[j]});
  std::sort(events.begin(), events.end(),
            [](const Event& l, const Event& r) { return l.x < r.x; });
  double diff = 0.0;
  double total = 0.0;
  for (size_t k = 0; k + 1 < events.size(); ++k) {
    diff += events[k].dm;
    total += std::abs(diff) * (events[k + 1].x - events[k].x);
  }
  return total;
}

}  // namespace

bool Box::contains(const Eigen::Ref<const Vector>& x) const {
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (x[k] < lower[k] || x[k] > upper[k]) return false;
  }
  return true;
}

void validate_measure(const PointSet& points, const Vector& weights,
                      const std::optional<Box>& ambient) {
  if (points.rows() == 0) throw InvalidInput("points", "measure has no atoms");
  if (points.cols() == 0) throw InvalidInput("dim", "dimension must be positive");
  if (points.rows() != weights.size()) {
    throw InvalidInput("weights", "expected one weight per point");
  }
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      std::ostringstream msg;
      msg << "weight " << i << " is not strictly positive (" << weights[i] << ")";
      throw InvalidInput("weights", msg.str());
    }
  }
  const double sum = weights.sum();
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "weights sum to " << sum << ", expected 1";
    throw InvalidInput("weights", msg.str());
  }
  if (!points.allFinite()) throw InvalidInput("points", "non-finite coordinate");
  const auto order = lexicographic_order(points);
  for (size_t k = 1; k < order.size(); ++k) {
    if (points.row(order[k]) == points.row(order[k - 1])) {
      std::ostringstream msg;
      msg << "duplicate point at indices " << order[k - 1] << " and " << order[k];
      throw InvalidInput("points", msg.str());
    }
  }
  if (ambient) {
    if (ambient->lower.size() != points.cols() || ambient->upper.size() != points.cols()) {
      throw InvalidInput("box", "ambient box dimension mismatch");
    }
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if (!ambient->contains(points.row(i).transpose())) {
        std::ostringstream msg;
        msg << "point " << i << " lies outside the ambient box";
        throw InvalidInput("points", msg.str());
      }
    }
  }
}

void validate_measure(const DiscreteMeasure& m) {
  validate_measure(m.points(), m.weights(), m.ambient());
}

DiscreteMeasure::DiscreteMeasure(PointSet points, Vector weights,
                                 std::optional<Box> ambient)
    : points_(std::move(points)), weights_(std::move(weights)), ambient_(std::move(ambient)) {
  validate_measure(points_, weights_, ambient_);
}

DiscreteMeasure DiscreteMeasure::uniform(PointSet points) {
  const auto n = points.rows();
  Vector w = Vector::Constant(n, 1.0 / static_cast<double>(n));
  // Push the rounding residue into the first weight so the sum is exact.
  w[0] += 1.0 - w.sum();
  return DiscreteMeasure(std::move(points), std::move(w));
}

DiscreteMeasure DiscreteMeasure::on_line(const std::vector<double>& xs,
                                         const std::vector<double>& ws) {
  if (xs.size() != ws.size()) throw InvalidInput("weights", "expected one weight per point");
  PointSet pts(static_cast<Eigen::Index>(xs.size()), 1);
  Vector w(static_cast<Eigen::Index>(ws.size()));
  for (size_t i = 0; i < xs.size(); ++i) {
    pts(static_cast<Eigen::Index>(i), 0) = xs[i];
    w[static_cast<Eigen::Index>(i)] = ws[i];
  }
  return DiscreteMeasure(std::move(pts), std::move(w));
}

double DiscreteMeasure::diameter() const {
  double best = 0.0;
  for (int i = 0; i < size(); ++i) {
    for (int k = i + 1; k < size(); ++k) {
      best = std::max(best, (points_.row(i) - points_.row(k)).norm());
    }
  }
  return best;
}

bool operator==(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return a.points_.rows() == b.points_.rows() && a.points_.cols() == b.points_.cols() &&
         a.points_ == b.points_ && a.weights_ == b.weights_;
}

double wasserstein1(const PointSet& xs, const Vector& a, const PointSet& ys,
                    const Vector& b) {
  if (xs.cols() != ys.cols()) throw InvalidInput("dim", "dimension mismatch in W1");
  if (xs.cols() == 1) return wasserstein1_line(xs, a, ys, b);
  Matrix cost(xs.rows(), ys.rows());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    for (Eigen::Index j = 0; j < ys.rows(); ++j) {
      cost(i, j) = (xs.row(i) - ys.row(j)).norm();
    }
  }
  return solve_transport(a, b, cost).cost;
}

double wasserstein1(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != nu.dim()) throw InvalidInput("dim", "dimension mismatch in W1");
  if (mu == nu) return 0.0;
  return wasserstein1(mu.points(), mu.weights(), nu.points(), nu.weights());
}

double total_variation(const PointSet& xs, const Vector& a, const PointSet& ys,
                       const Vector& b) {
  if (xs.cols() != ys.cols()) throw InvalidInput("dim", "dimension mismatch in TV");
  std::map<Coordinates, double> signed_mass;
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    signed_mass[row_coordinates(xs, static_cast<int>(i))] += a[i];
  }
  for (Eigen::Index j = 0; j < ys.rows(); ++j) {
    signed_mass[row_coordinates(ys, static_cast<int>(j))] -= b[j];
  }
  double l1 = 0.0;
  for (const auto& [coords, m] : signed_mass) l1 += std::abs(m);
  return 0.5 * l1;
}

double total_variation(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  return total_variation(mu.points(), mu.weights(), nu.points(), nu.weights());
}

double ball_mass(const DiscreteMeasure& m, const Eigen::Ref<const Vector>& center,
                 double r) {
  if (!(r > 0.0)) throw InvalidInput("radius", "ball radius must be positive");
  double mass = 0.0;
  for (int k = 0; k < m.size(); ++k) {
    if ((m.points().row(k).transpose() - center).norm() < r) mass += m.weight(k);
  }
  return mass;
}

double min_ball_mass(const DiscreteMeasure& m, double r) {
  if (!(r > 0.0)) throw InvalidInput("radius", "ball radius must be positive");
  double best = 1.0;
  for (int i = 0; i < m.size(); ++i) {
    best = std::min(best, ball_mass(m, m.point(i), r));
  }
  return best;
}

double directed_hausdorff(const PointSet& a, const PointSet& b) {
  if (a.rows() == 0 || b.rows() == 0) throw InvalidInput("points", "empty point set");
  if (a.cols() != b.cols()) throw InvalidInput("dim", "dimension mismatch in Hausdorff");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < b.rows() && nearest > worst; ++j) {
      nearest = std::min(nearest, (a.row(i) - b.row(j)).squaredNorm());
    }
    worst = std::max(worst, nearest);
  }
  return std::sqrt(worst);
}

double hausdorff_distance(const PointSet& a, const PointSet& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

PointSet product_points(const PointSet& xs, const PointSet& ys) {
  PointSet out(xs.rows() * ys.rows(), xs.cols() + ys.cols());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    for (Eigen::Index j = 0; j < ys.rows(); ++j) {
      const Eigen::Index r = i * ys.rows() + j;
      out.row(r).head(xs.cols()) = xs.row(i);
      out.row(r).tail(ys.cols()) = ys.row(j);
    }
  }
  return out;
}

PointSet union_points(const PointSet& a, const PointSet& b) {
  if (a.cols() != b.cols()) throw InvalidInput("dim", "dimension mismatch in union");
  std::map<Coordinates, int> seen;
  std::vector<Coordinates> rows;
  auto add = [&](const PointSet& s) {
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      auto c = row_coordinates(s, static_cast<int>(i));
      if (seen.emplace(c, static_cast<int>(rows.size())).second) rows.push_back(std::move(c));
    }
  };
  add(a);
  add(b);
  PointSet out(static_cast<Eigen::Index>(rows.size()), a.cols());
  for (size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index k = 0; k < a.cols(); ++k) out(static_cast<Eigen::Index>(r), k) = rows[r][k];
  }
  return out;
}

}  // namespace qot

#include <qotlab/fixtures.hpp>

#include <qotlab/error.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace qot {

namespace {

// The target set grouped by height: each level is a sorted list of
// disjoint intervals, so dist^2 from (x, y0) to the level is dy^2 plus the
// squared 1D distance from x to the intervals.
struct Level {
  double y;
  std::vector<std::pair<double, double>> iv;
};

// dist^2 to a level restricted to an x-range without interior breakpoints:
// either alpha or alpha + (x - center)^2.
struct Piece {
  double alpha;
  bool quadratic;
  double center;
};

std::vector<Level> make_levels(const SegmentSet& b) {
  std::vector<Segment> sorted(b.begin(), b.end());
  std::sort(sorted.begin(), sorted.end(), [](const Segment& s, const Segment& t) {
    return s.y != t.y ? s.y < t.y : s.lo < t.lo;
  });
  std::vector<Level> out;
  for (const auto& s : sorted) {
    if (out.empty() || out.back().y != s.y) out.push_back({s.y, {}});
    auto& iv = out.back().iv;
    if (!iv.empty() && s.lo <= iv.back().second) {
      iv.back().second = std::max(iv.back().second, s.hi);
    } else {
      iv.emplace_back(s.lo, s.hi);
    }
  }
  return out;
}

Piece level_piece(const Level& lv, double x, double y0) {
  const double a = (y0 - lv.y) * (y0 - lv.y);
  const auto& iv = lv.iv;
  auto it = std::upper_bound(iv.begin(), iv.end(), x,
                             [](double v, const auto& p) { return v < p.first; });
  // it: first interval starting right of x.
  if (it == iv.begin()) return {a, true, iv.front().first};
  const auto& left = *(it - 1);
  if (x <= left.second) return {a, false, 0.0};
  if (it == iv.end()) return {a, true, left.second};
  return x - left.second <= it->first - x ? Piece{a, true, left.second}
                                          : Piece{a, true, it->first};
}

double piece_value(const Piece& p, double x) {
  return p.quadratic ? p.alpha + (x - p.center) * (x - p.center) : p.alpha;
}

double dist_to_levels(double x, double y0, const std::vector<Level>& levels) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& lv : levels) best = std::min(best, piece_value(level_piece(lv, x, y0), x));
  return std::sqrt(best);
}

void equal_points(const Piece& p, const Piece& q, std::vector<double>& out) {
  if (p.quadratic && q.quadratic) {
    if (p.center != q.center) {
      out.push_back((q.alpha - p.alpha + q.center * q.center - p.center * p.center) /
                    (2.0 * (q.center - p.center)));
    }
  } else if (p.quadratic != q.quadratic) {
    const Piece& c = p.quadratic ? q : p;
    const Piece& r = p.quadratic ? p : q;
    const double gap = c.alpha - r.alpha;
    if (gap >= 0.0) {
      out.push_back(r.center - std::sqrt(gap));
      out.push_back(r.center + std::sqrt(gap));
    }
  }
}

double directed(const SegmentSet& a, const SegmentSet& b) {
  const auto levels = make_levels(b);
  // Breakpoints of every level: interval ends and gap midpoints.
  std::vector<double> breaks;
  for (const auto& lv : levels) {
    for (size_t k = 0; k < lv.iv.size(); ++k) {
      breaks.push_back(lv.iv[k].first);
      breaks.push_back(lv.iv[k].second);
      if (k + 1 < lv.iv.size()) breaks.push_back(0.5 * (lv.iv[k].second + lv.iv[k + 1].first));
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  double worst = 0.0;
  std::vector<double> xs;
  for (const auto& seg : a) {
    xs.assign({seg.lo});
    auto it = std::upper_bound(breaks.begin(), breaks.end(), seg.lo);
    for (; it != breaks.end() && *it < seg.hi; ++it) xs.push_back(*it);
    xs.push_back(seg.hi);
    // On each elementary interval every level is a single piece, and the
    // envelope can only turn where two of them meet.
    const size_t n_nodes = xs.size();
    for (size_t k = 0; k + 1 < n_nodes; ++k) {
      const double l = xs[k];
      const double r = xs[k + 1];
      if (r <= l) continue;
      const double m = 0.5 * (l + r);
      std::vector<Piece> ps;
      ps.reserve(levels.size());
      for (const auto& lv : levels) ps.push_back(level_piece(lv, m, seg.y));
      for (size_t u = 0; u < ps.size(); ++u) {
        for (size_t v = u + 1; v < ps.size(); ++v) {
          std::vector<double> cand;
          equal_points(ps[u], ps[v], cand);
          for (double x : cand) {
            if (x > l && x < r) xs.push_back(x);
          }
        }
      }
    }
    for (double x : xs) worst = std::max(worst, dist_to_levels(x, seg.y, levels));
  }
  return worst;
}

// Integral over [0, 1] of fn(x, rho) where rho is the density on the piece;
// fn must be polynomial of degree <= 2 between consecutive breaks, so
// Simpson's rule is exact.
template <typename Fn>
double integrate(const std::vector<double>& breaks, const Example62Instance& inst, Fn fn) {
  double total = 0.0;
  for (size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double l = breaks[k];
    const double r = breaks[k + 1];
    if (r <= l) continue;
    const double m = 0.5 * (l + r);
    const double rho = inst.density(m);
    total += (r - l) / 6.0 * (fn(l, rho) + 4.0 * fn(m, rho) + fn(r, rho));
  }
  return total;
}

// Kinks of u and p plus the zero crossings of a function linear on each
// kink-free piece.
template <typename Fn>
std::vector<double> breaks_with_zeros(Fn linear) {
  const std::vector<double> kinks{0.0, 0.25, 0.5, 1.0};
  std::vector<double> out{0.0};
  for (size_t k = 0; k + 1 < kinks.size(); ++k) {
    const double l = kinks[k];
    const double r = kinks[k + 1];
    const double fl = linear(l);
    const double fr = linear(r);
    if ((fl < 0.0 && fr > 0.0) || (fl > 0.0 && fr < 0.0)) {
      out.push_back(l + (r - l) * fl / (fl - fr));
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace

double hausdorff_distance(const SegmentSet& a, const SegmentSet& b) {
  if (a.empty() || b.empty()) throw InvalidInput("points", "Hausdorff distance of an empty set");
  return std::max(directed(a, b), directed(b, a));
}

SegmentSet as_segments(const PointSet& points_2d) {
  if (points_2d.cols() != 2) throw InvalidInput("dim", "segment sets live in the plane");
  SegmentSet out;
  out.reserve(static_cast<size_t>(points_2d.rows()));
  for (Eigen::Index k = 0; k < points_2d.rows(); ++k) {
    out.push_back({points_2d(k, 1), points_2d(k, 0), points_2d(k, 0)});
  }
  return out;
}

double Example62Instance::density(double x) const {
  return x <= 0.25 ? 1.0 + eta : 1.0 - eta / 3.0;
}

double Example62Instance::h(double, int fiber) const {
  return fiber == 0 ? 2.0 - delta_eta : 2.0 + delta_eta;
}

double Example62Instance::sigma(double x, int fiber) const {
  const double u = example62_profile(x);
  return fiber == 0 ? h(x, 0) - u : h(x, 1) - (2.0 - u);
}

Potentials Example62Instance::closed_form_potentials() const {
  const auto& p = instance.p;
  const auto& q = instance.q;
  Vector f = Vector::Constant(p.size(), 2.0);
  Vector g(2);
  g << -delta_eta, delta_eta;
  Potentials pot = make_potentials(std::move(f), std::move(g), 1.0, p, q, instance.cost);
  pot.gauge = Gauge::MeanZeroSecond;
  return pot;
}

SegmentSet example62_support(double eta) {
  if (eta == 0.0) return {{0.0, 0.0, 1.0}, {1.0, 0.25, 1.0}};
  return {{0.0, 0.0, 1.0}, {1.0, 0.0, 1.0}};
}

SegmentSet Example62Instance::analytic_support() const { return example62_support(eta); }

Example62Instance example62(double eta, int grid_n) {
  if (!(eta >= 0.0 && eta < 1.0)) throw InvalidInput("eta", "must lie in [0, 1)");
  if (grid_n < 9) throw InvalidInput("grid_n", "must be at least 9");
  const int n1 = grid_n / 4;
  const int n3 = grid_n - 2 * n1;
  std::vector<double> edges;
  edges.reserve(static_cast<size_t>(grid_n) + 1);
  auto add_cells = [&](double lo, double hi, int count) {
    for (int k = 0; k < count; ++k) edges.push_back(lo + (hi - lo) * k / count);
  };
  add_cells(0.0, 0.25, n1);
  add_cells(0.25, 0.5, n1);
  add_cells(0.5, 1.0, n3);
  edges.push_back(1.0);

  const auto density = [eta](double x) { return x <= 0.25 ? 1.0 + eta : 1.0 - eta / 3.0; };
  double max_width = 0.0;
  PointSet xs(grid_n, 1);
  Vector w(grid_n);
  for (int i = 0; i < grid_n; ++i) {
    const double l = edges[static_cast<size_t>(i)];
    const double r = edges[static_cast<size_t>(i) + 1];
    xs(i, 0) = 0.5 * (l + r);
    w[i] = (r - l) * density(xs(i, 0));
    max_width = std::max(max_width, r - l);
  }
  Box unit{Vector::Zero(1), Vector::Ones(1)};
  DiscreteMeasure p(std::move(xs), std::move(w), unit);
  DiscreteMeasure q = DiscreteMeasure::on_line({0.0, 1.0}, {0.5, 0.5});
  CostSpec cost = CostSpec::example62(p, q);
  Example62Instance out{eta,
                        grid_n,
                        eta / 3.0,
                        Instance{std::move(p), std::move(q), std::move(cost), 1.0},
                        std::move(edges),
                        max_width};
  return out;
}

double analytic_foc_residual(const Example62Instance& inst, double fiber1_offset) {
  const double d = inst.delta_eta;
  const double eps = inst.instance.eps;
  // First line at x depends on x only through u(x) in [0, 8/5], and is
  // piecewise linear in u with kinks where either slack changes sign.
  auto line1 = [&](double u) {
    return 0.5 * std::max(0.0, 2.0 - d - u) + 0.5 * std::max(0.0, u + d + fiber1_offset);
  };
  std::vector<double> us{0.0, 1.6, 2.0 - d, -d - fiber1_offset};
  double worst = 0.0;
  for (double u : us) {
    if (u < 0.0 || u > 1.6) continue;
    worst = std::max(worst, std::abs(line1(u) - eps));
  }
  // Second line per fiber: integral of the slack's positive part against p.
  for (int fiber = 0; fiber < 2; ++fiber) {
    const double off = fiber == 1 ? fiber1_offset : 0.0;
    auto slack = [&](double x) { return inst.sigma(x, fiber) + off; };
    const auto breaks = breaks_with_zeros(slack);
    const double integral =
        integrate(breaks, inst, [&](double x, double rho) { return std::max(0.0, slack(x)) * rho; });
    worst = std::max(worst, std::abs(integral - eps));
  }
  return worst;
}

double analytic_dual_objective(const Example62Instance& inst) {
  const double eps = inst.instance.eps;
  double total = 0.0;
  for (int fiber = 0; fiber < 2; ++fiber) {
    auto slack = [&](double x) { return inst.sigma(x, fiber); };
    const auto breaks = breaks_with_zeros(slack);
    const double part = integrate(breaks, inst, [&](double x, double rho) {
      const double s = std::max(0.0, slack(x));
      return (inst.h(x, fiber) - s * s / (2.0 * eps)) * rho;
    });
    total += 0.5 * part;
  }
  return total;
}

ZeroCostInstance zero_cost_instance(const DiscreteMeasure& p, const DiscreteMeasure& q,
                                    double eps, double lipschitz) {
  CostSpec cost = CostSpec::explicit_matrix(p, q, Matrix::Zero(p.size(), q.size()), lipschitz, 0.0);
  ZeroCostInstance out{Instance{p, q, cost, eps}, {}, {}};
  validate_instance(out.instance);
  out.reference = make_potentials(Vector::Constant(p.size(), eps), Vector::Zero(q.size()), eps, p,
                                  q, cost);
  out.reference.gauge = Gauge::MeanZeroSecond;
  out.coupling = coupling_from_mass(p.weights() * q.weights().transpose(), p, q, 0.0);
  return out;
}

namespace {

PointSet cube_grid(int n, int d, double width) {
  long total = 1;
  for (int k = 0; k < d; ++k) total *= n;
  PointSet pts(total, d);
  for (long idx = 0; idx < total; ++idx) {
    long rest = idx;
    for (int k = 0; k < d; ++k) {
      pts(idx, k) = width * ((rest % n) + 0.5) / n;
      rest /= n;
    }
  }
  return pts;
}

Vector seeded_weights(long count, double spread, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> draw(1.0 - spread, 1.0 + spread);
  Vector w(count);
  for (long k = 0; k < count; ++k) w[k] = draw(rng);
  return w / w.sum();
}

}  // namespace

QuadraticConvexInstance quadratic_convex_instance(int n, int d, std::uint64_t seed,
                                                  const QuadraticConvexOptions& opts) {
  if (n < 2) throw InvalidInput("n", "need at least two atoms per axis");
  if (d < 1) throw InvalidInput("dim", "dimension must be positive");
  if (!(opts.density_spread >= 0.0 && opts.density_spread < 1.0)) {
    throw InvalidInput("density_spread", "must lie in [0, 1)");
  }
  const int nq = opts.q_points > 0 ? opts.q_points : n;
  std::mt19937_64 rng(seed);
  const Box box{Vector::Zero(d), Vector::Constant(d, opts.width)};
  PointSet xp = cube_grid(n, d, opts.width);
  PointSet xq = cube_grid(nq, d, opts.width);
  Vector wp = seeded_weights(xp.rows(), opts.density_spread, rng);
  Vector wq = seeded_weights(xq.rows(), opts.density_spread, rng);
  DiscreteMeasure p(std::move(xp), std::move(wp), box);
  DiscreteMeasure q(std::move(xq), std::move(wq), box);
  const double lipschitz = std::sqrt(2.0) * box.diameter();
  const double bound = 0.5 * box.diameter() * box.diameter();
  CostSpec cost = CostSpec::sq_euclidean(p, q, lipschitz, bound);
  const double diam_p = p.diameter();
  QuadraticConvexInstance out{Instance{std::move(p), std::move(q), std::move(cost), opts.eps},
                              box, diam_p, opts.width / n, lipschitz};
  return out;
}

}  // namespace qot

#include <qotlab/error.hpp>
#include <qotlab/measures.hpp>
#include <qotlab/transport_simplex.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

namespace qot {
namespace {

using testing::random_measure;

TEST(DiscreteMeasure, RejectsBadWeights) {
  PointSet x(2, 1);
  x << 0.0, 1.0;
  Vector w(2);
  w << 0.5, 0.4;
  try {
    DiscreteMeasure m(x, w);
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_EQ(e.field(), "weights");
  }
  w << 1.0, 0.0;
  EXPECT_THROW(DiscreteMeasure(x, w), InvalidInput);
}

TEST(DiscreteMeasure, RejectsDuplicatesAndPointsOutsideBox) {
  PointSet x(2, 1);
  x << 0.3, 0.3;
  EXPECT_THROW(DiscreteMeasure::uniform(x), InvalidInput);
  x << 0.3, 1.5;
  Box box{Vector::Zero(1), Vector::Ones(1)};
  EXPECT_THROW(DiscreteMeasure(x, Vector::Constant(2, 0.5), box), InvalidInput);
}

TEST(DiscreteMeasure, Diameter) {
  const auto m = DiscreteMeasure::on_line({0.1, 0.7, 0.4}, {0.2, 0.3, 0.5});
  EXPECT_DOUBLE_EQ(m.diameter(), 0.6);
}

TEST(Wasserstein1, OneDimensionMatchesQuantileFormula) {
  std::mt19937_64 rng(11);
  for (int c = 0; c < 100; ++c) {
    const auto a = random_measure(rng, 1 + c % 9, 1);
    const auto b = random_measure(rng, 1 + (c * 7) % 11, 1);
    std::vector<std::pair<double, double>> qa, qb;
    for (int i = 0; i < a.size(); ++i) qa.emplace_back(a.points()(i, 0), a.weight(i));
    for (int i = 0; i < b.size(); ++i) qb.emplace_back(b.points()(i, 0), b.weight(i));
    EXPECT_NEAR(wasserstein1(a, b), testing::w1_quantile(qa, qb), 1e-10);
  }
}

TEST(Wasserstein1, HigherDimensionMatchesBasisEnumeration) {
  std::mt19937_64 rng(12);
  for (int c = 0; c < 20; ++c) {
    const int d = 2 + c % 2;
    const auto a = random_measure(rng, 4, d);
    const auto b = random_measure(rng, 4, d);
    const double oracle = testing::transport_lp_enumerate(
        a.weights(), b.weights(), testing::euclidean_cost(a.points(), b.points()));
    EXPECT_NEAR(wasserstein1(a, b), oracle, 1e-10);
  }
}

TEST(Wasserstein1, MetricProperties) {
  std::mt19937_64 rng(13);
  for (int c = 0; c < 20; ++c) {
    const auto a = random_measure(rng, 5, 2);
    const auto b = random_measure(rng, 6, 2);
    const auto e = random_measure(rng, 4, 2);
    EXPECT_NEAR(wasserstein1(a, a), 0.0, 1e-14);
    EXPECT_NEAR(wasserstein1(a, b), wasserstein1(b, a), 1e-12);
    EXPECT_LE(wasserstein1(a, b), wasserstein1(a, e) + wasserstein1(e, b) + 1e-12);
  }
}

TEST(Wasserstein1, TranslationMovesEveryAtom) {
  const auto a = DiscreteMeasure::on_line({0.0, 0.5, 2.0}, {0.2, 0.3, 0.5});
  const auto b = DiscreteMeasure::on_line({0.25, 0.75, 2.25}, {0.2, 0.3, 0.5});
  EXPECT_NEAR(wasserstein1(a, b), 0.25, 1e-15);
}

TEST(TransportSimplex, DegenerateSupplies) {
  Vector s(3), t(3);
  s << 0.5, 0.25, 0.25;
  t << 0.25, 0.25, 0.5;
  Matrix c(3, 3);
  c << 0, 1, 2, 1, 0, 1, 2, 1, 0;
  const auto sol = solve_transport(s, t, c);
  EXPECT_NEAR(sol.cost, testing::transport_lp_enumerate(s, t, c), 1e-14);
  double total = 0.0;
  for (const auto& cell : sol.plan) {
    EXPECT_GE(cell.flow, -1e-15);
    total += cell.flow;
  }
  EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(TotalVariation, Identities) {
  std::mt19937_64 rng(14);
  for (int c = 0; c < 30; ++c) {
    const auto a = random_measure(rng, 6, 1);
    const auto b = random_measure(rng, 5, 1);
    EXPECT_EQ(total_variation(a, a), 0.0);
    EXPECT_DOUBLE_EQ(total_variation(a, b), total_variation(b, a));
    // Generic random atoms are disjoint.
    EXPECT_NEAR(total_variation(a, b), 1.0, 1e-12);
    const DiscreteMeasure same_atoms(a.points(), testing::random_weights(rng, a.size()));
    EXPECT_NEAR(total_variation(a, same_atoms), 0.5 * (a.weights() - same_atoms.weights()).lpNorm<1>(),
                1e-14);
  }
}

TEST(Hausdorff, MatchesBruteForceAndIsSymmetric) {
  std::mt19937_64 rng(15);
  for (int c = 0; c < 30; ++c) {
    const PointSet a = testing::random_points(rng, 3 + c % 5, 2);
    const PointSet b = testing::random_points(rng, 2 + c % 7, 2);
    EXPECT_DOUBLE_EQ(hausdorff_distance(a, b), testing::hausdorff_brute(a, b));
    EXPECT_DOUBLE_EQ(hausdorff_distance(a, b), hausdorff_distance(b, a));
    EXPECT_EQ(hausdorff_distance(a, a), 0.0);
    EXPECT_LE(directed_hausdorff(a, b), hausdorff_distance(a, b));
  }
}

TEST(BallMass, OpenBalls) {
  const auto m = DiscreteMeasure::on_line({0.0, 0.5, 1.0}, {0.25, 0.25, 0.5});
  Vector c(1);
  c << 0.0;
  EXPECT_DOUBLE_EQ(ball_mass(m, c, 0.5), 0.25);
  EXPECT_DOUBLE_EQ(ball_mass(m, c, 0.50001), 0.5);
  EXPECT_DOUBLE_EQ(min_ball_mass(m, 0.1), 0.25);
  EXPECT_DOUBLE_EQ(min_ball_mass(m, 2.0), 1.0);
}

TEST(BallMass, MatchesBruteForce) {
  std::mt19937_64 rng(16);
  for (int c = 0; c < 20; ++c) {
    const auto m = random_measure(rng, 8, 2);
    const double r = 0.05 + 0.05 * c;
    double brute = 1.0;
    for (int i = 0; i < m.size(); ++i) {
      double s = 0.0;
      for (int k = 0; k < m.size(); ++k) {
        if ((m.points().row(i) - m.points().row(k)).norm() < r) s += m.weight(k);
      }
      brute = std::min(brute, s);
    }
    EXPECT_NEAR(min_ball_mass(m, r), brute, 1e-15);
  }
}

TEST(ProductPoints, Norm) {
  PointSet x(2, 1), y(1, 2);
  x << 1.0, 2.0;
  y << 3.0, 4.0;
  const PointSet z = product_points(x, y);
  ASSERT_EQ(z.rows(), 2);
  ASSERT_EQ(z.cols(), 3);
  EXPECT_DOUBLE_EQ(z.row(1).norm(), std::sqrt(4.0 + 25.0));
}

TEST(UnionPoints, DropsExactDuplicates) {
  PointSet a(2, 1), b(2, 1);
  a << 0.0, 1.0;
  b << 1.0, 2.0;
  EXPECT_EQ(union_points(a, b).rows(), 3);
}

}  // namespace
}  // namespace qot

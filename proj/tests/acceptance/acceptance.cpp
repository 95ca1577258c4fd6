// Runs acceptance criteria 1-9 and prints one PASS/FAIL line for each.
// Exit status is nonzero when any criterion fails.

#include <qotlab/coupling.hpp>
#include <qotlab/dual.hpp>
#include <qotlab/fixtures.hpp>
#include <qotlab/harness.hpp>
#include <qotlab/oracle.hpp>

#include "oracles.hpp"
#include "stability_pairs.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

namespace {

using namespace qot;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a failed condition; the first few are kept in the detail line.
  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (pass || failures < 3) detail << " [" << what << "]";
    pass = false;
    ++failures;
  }
  int failures = 0;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Checks every structural property of a converged solve; returns false and
// records what failed otherwise.
void dual_properties(const Instance& inst, Outcome& out, const std::string& tag) {
  const Potentials pot = solve_dual(inst);
  out.require(pot.converged, tag + " not converged");
  if (!pot.converged) return;
  const double res = foc_residuals(pot, inst.p, inst.q, inst.cost).max_abs();
  out.require(res <= 1e-10, tag + " residual " + fmt(res));

  const double L = inst.cost.lipschitz();
  for (int i = 0; i < inst.p.size(); ++i) {
    for (int k = 0; k < inst.p.size(); ++k) {
      const double d = (inst.p.points().row(i) - inst.p.points().row(k)).norm();
      out.require(std::abs(pot.f[i] - pot.f[k]) <= L * d + 1e-9, tag + " f not L-Lipschitz");
    }
  }
  for (int j = 0; j < inst.q.size(); ++j) {
    for (int l = 0; l < inst.q.size(); ++l) {
      const double d = (inst.q.points().row(j) - inst.q.points().row(l)).norm();
      out.require(std::abs(pot.g[j] - pot.g[l]) <= L * d + 1e-9, tag + " g not L-Lipschitz");
    }
  }

  const double cinf = inst.cost.matrix().cwiseAbs().maxCoeff();
  double hmin = std::numeric_limits<double>::infinity();
  double hmax = -hmin;
  for (int i = 0; i < inst.p.size(); ++i) {
    for (int j = 0; j < inst.q.size(); ++j) {
      hmin = std::min(hmin, pot.h(i, j));
      hmax = std::max(hmax, pot.h(i, j));
    }
  }
  out.require(hmax - hmin <= 2.0 * cinf + 1e-12, tag + " oscillation");
  out.require(hmin >= -5.0 * cinf + inst.eps - 1e-12 && hmax <= 5.0 * cinf + inst.eps + 1e-12,
              tag + " h range");

  const Coupling coup = extract_coupling(pot, inst.p, inst.q, inst.cost);
  const double mv = marginal_violation(coup, inst.p, inst.q);
  out.require(mv <= 1e-9, tag + " marginals " + fmt(mv));
  for (size_t k = 1; k < pot.objective_trace.size(); ++k) {
    out.require(pot.objective_trace[k] >= pot.objective_trace[k - 1] - 1e-13 * std::abs(pot.objective_trace[k]),
                tag + " dual objective decreased");
  }
}

Outcome ac1() {
  Outcome out;
  const SegmentSet sigma0 = example62_support(0.0);
  double worst_h = 0.0;
  double worst_res = 0.0;
  double worst_time = 0.0;
  for (double eta : {0.0, 0.1, 0.5}) {
    const auto t0 = Clock::now();
    const auto ex = example62(eta, 801);
    const double res = analytic_foc_residual(ex);
    worst_res = std::max(worst_res, res);
    out.require(res <= 1e-12, "residual " + fmt(res) + " at eta " + fmt(eta));
    const double dh = hausdorff_distance(ex.analytic_support(), sigma0);
    out.require(eta > 0.0 ? dh == 0.25 : dh == 0.0, "analytic dH " + fmt(dh) + " at eta " + fmt(eta));

    const Instance& inst = ex.instance;
    const Potentials pot = solve_dual(inst);
    out.require(pot.converged, "numeric solve did not converge");
    double herr = 0.0;
    for (int i = 0; i < inst.p.size(); ++i) {
      const double x = inst.p.point(i)[0];
      for (int y = 0; y < 2; ++y) herr = std::max(herr, std::abs(pot.h(i, y) - ex.h(x, y)));
    }
    worst_h = std::max(worst_h, herr);
    out.require(herr <= 5e-3, "h error " + fmt(herr) + " at eta " + fmt(eta));
    const Coupling coup = extract_coupling(pot, inst.p, inst.q, inst.cost);
    const PointSet sup = support_points(extract_support(coup), inst.p, inst.q);
    const double sup_err = hausdorff_distance(as_segments(sup), ex.analytic_support());
    out.require(sup_err <= ex.max_cell_width,
                "support off by " + fmt(sup_err) + " > cell " + fmt(ex.max_cell_width));
    const double secs = seconds_since(t0);
    worst_time = std::max(worst_time, secs);
    out.require(secs <= 5.0, "runtime " + fmt(secs) + " s at eta " + fmt(eta));
  }
  out.detail << " max residual " << fmt(worst_res) << ", max h error " << fmt(worst_h)
             << ", slowest eta " << fmt(worst_time) << " s";
  return out;
}

std::vector<Instance> ac2_instances() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(1, 8);
  std::uniform_int_distribution<int> dim(1, 3);
  std::uniform_real_distribution<double> eps(0.1, 5.0);
  std::vector<Instance> out;
  for (int k = 0; k < 50; ++k) {
    const int n = size(rng);
    const int m = size(rng);
    const int d = dim(rng);
    out.push_back(testing::random_instance(rng, n, m, d, eps(rng), k % 2 == 0));
  }
  return out;
}

Outcome ac2() {
  Outcome out;
  const auto t0 = Clock::now();
  double worst = 0.0;
  double worst_gap = 0.0;
  for (const auto& inst : ac2_instances()) {
    const auto res = oracle::qp_primal_solve(inst.p, inst.q, inst.cost, inst.eps);
    const Potentials pot = solve_dual(inst);
    const Coupling coup = extract_coupling(pot, inst.p, inst.q, inst.cost);
    const double diff = (res.coupling.zeta - coup.zeta).cwiseAbs().maxCoeff();
    const double gap = duality_gap(coup, pot, inst.p, inst.q, inst.cost);
    worst = std::max(worst, diff);
    worst_gap = std::max(worst_gap, std::abs(gap));
    out.require(diff <= 1e-6, "density differs by " + fmt(diff));
    out.require(std::abs(gap) <= 1e-8, "duality gap " + fmt(gap));
  }
  const double secs = seconds_since(t0);
  out.require(secs <= 60.0, "runtime " + fmt(secs) + " s");
  out.detail << " max |zeta - zeta_oracle| " << fmt(worst) << ", max |gap| " << fmt(worst_gap)
             << ", " << fmt(secs) << " s";
  return out;
}

Outcome ac3() {
  Outcome out;
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const auto fx = zero_cost_instance(testing::random_measure(rng, 2 + k, 1 + k % 3),
                                       testing::random_measure(rng, 3 + k % 4, 1 + k % 3),
                                       0.2 + 0.3 * k);
    const Instance& inst = fx.instance;
    const Potentials pot = solve_dual(inst);
    const Coupling coup = extract_coupling(pot, inst.p, inst.q, inst.cost);
    const double zerr = (coup.zeta.array() - 1.0).abs().maxCoeff();
    double herr = 0.0;
    for (int i = 0; i < inst.p.size(); ++i) {
      for (int j = 0; j < inst.q.size(); ++j) herr = std::max(herr, std::abs(pot.h(i, j) - inst.eps));
    }
    worst = std::max({worst, zerr, herr});
    out.require(zerr <= 1e-12 && herr <= 1e-12, "deviation " + fmt(std::max(zerr, herr)));
  }
  out.detail << " max deviation " << fmt(worst);
  return out;
}

Outcome ac4() {
  Outcome out;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> off(-3.0, 3.0);
  std::uniform_real_distribution<double> e(0.01, 5.0);
  std::uniform_int_distribution<int> size(1, 20);
  double worst_root = 0.0;
  double worst_f = 0.0;
  for (int c = 0; c < 1000; ++c) {
    const int m = size(rng);
    Vector b(m);
    for (int j = 0; j < m; ++j) b[j] = off(rng);
    const Vector w = testing::random_weights(rng, m);
    const double eps = e(rng);
    const double t = scalar_foc_solve(b, w, eps);
    const double err = std::abs(t - testing::bisection_root(b, w, eps));
    const double ferr = std::abs(scalar_foc_value(b, w, t) - eps);
    worst_root = std::max(worst_root, err);
    worst_f = std::max(worst_f, ferr);
    out.require(err <= 1e-12, "root error " + fmt(err));
    out.require(ferr <= 1e-12, "F(t*) - eps = " + fmt(ferr));
  }
  for (int c = 0; c < 50; ++c) {
    const int m = size(rng);
    Vector b(m);
    for (int j = 0; j < m; ++j) b[j] = off(rng);
    const Vector w = testing::random_weights(rng, m);
    double prev = -std::numeric_limits<double>::infinity();
    for (double eps = 1e-3; eps < 10.0; eps *= 1.25) {
      const double t = scalar_foc_solve(b, w, eps);
      out.require(t > prev, "root not increasing in eps");
      prev = t;
    }
  }
  out.detail << " max root error " << fmt(worst_root) << ", max |F(t*) - eps| " << fmt(worst_f);
  return out;
}

Outcome ac5() {
  Outcome out;
  int solves = 0;
  for (const auto& inst : ac2_instances()) {
    dual_properties(inst, out, "random#" + std::to_string(solves));
    ++solves;
  }
  std::mt19937_64 rng(5);
  for (int k = 0; k < 5; ++k) {
    const auto fx = zero_cost_instance(testing::random_measure(rng, 4, 2), testing::random_measure(rng, 5, 2), 0.5);
    dual_properties(fx.instance, out, "zero-cost");
    ++solves;
  }
  for (int k = 1; k <= 5; ++k) {
    QuadraticConvexOptions opts;
    opts.eps = 0.05 * k;
    dual_properties(quadratic_convex_instance(12, 1 + k % 2, static_cast<std::uint64_t>(k), opts).instance, out,
                    "grid");
    ++solves;
  }
  dual_properties(example62(0.2, 201).instance, out, "example");
  ++solves;
  out.detail << " " << solves << " solves";
  return out;
}

Outcome ac6() {
  Outcome out;
  std::vector<testing::PairFamily> families{testing::line_family(1), testing::line_family(2),
                                            testing::plane_family(1), testing::small_eps_family()};
  int satisfied = 0;
  int large_eps = 0;
  int unsatisfied = 0;
  std::map<std::string, double> max_ratio;
  std::map<std::string, int> applied;
  SolveCache cache;
  for (const auto& fam : families) {
    for (const auto& pair : fam.pairs) {
      const StabilityReport rep = run_pair(pair.a, pair.b, fam.params, {}, &cache);
      const bool in_class = rep.audit_first.passed() && rep.audit_second.passed();
      const bool hyp_l2 = std::max(rep.deltas.delta, rep.deltas.delta_prime) < rep.constants.eta_bar;
      const bool hyp_inf = rep.deltas.delta_star < rep.constants.eta_bar_star;
      if (in_class && (hyp_l2 || hyp_inf)) {
        ++satisfied;
        if (hyp_inf && pair.a.eps >= 8.0 * fam.params.lipschitz * fam.params.diam_bound) ++large_eps;
      } else {
        ++unsatisfied;
      }
      for (const auto& c : rep.checks) {
        if (!c.hypothesis) continue;
        ++applied[c.id];
        max_ratio[c.id] = std::max(max_ratio[c.id], c.ratio);
        out.require(c.pass, pair.name + " " + c.id + " ratio " + fmt(c.ratio));
      }
    }
  }
  out.require(satisfied >= 20, "only " + std::to_string(satisfied) + " pairs satisfy the hypotheses");
  out.require(large_eps >= 5, "only " + std::to_string(large_eps) + " large-eps pairs");
  out.detail << " " << satisfied << " pairs in hypothesis (" << large_eps << " large-eps), " << unsatisfied
             << " outside; max ratios:";
  for (const auto& [id, r] : max_ratio) out.detail << " " << id << "=" << fmt(r) << "(" << applied[id] << ")";
  return out;
}

Outcome ac7() {
  Outcome out;
  double min_margin = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 10; ++k) {
    QuadraticConvexOptions opts;
    opts.eps = 0.1 + 0.02 * (k - 1);
    const auto fx = quadratic_convex_instance(50, 1, static_cast<std::uint64_t>(k), opts);
    const Instance& inst = fx.instance;
    const auto s = solve_instance(inst, {});
    const double a_hat = estimate_nondegeneracy(s->potentials, s->coupling, inst.p, inst.q, inst.cost);
    const double need =
        inst.eps / fx.diam_p - (std::sqrt(2.0) + 1.0) * fx.lipschitz * fx.grid_spacing;
    min_margin = std::min(min_margin, a_hat - need);
    out.require(a_hat >= need, "seed " + std::to_string(k) + ": a_hat " + fmt(a_hat) + " < " + fmt(need));
  }
  const auto ex = example62(0.0, 801);
  const Potentials pot = ex.closed_form_potentials();
  const Coupling coup = extract_coupling(pot, ex.instance.p, ex.instance.q, ex.instance.cost, 0.0);
  const double a0 = estimate_nondegeneracy(pot, coup, ex.instance.p, ex.instance.q, ex.instance.cost);
  out.require(a0 == 0.0, "example a_hat " + fmt(a0) + " != 0");
  out.detail << " min(a_hat - bound) over grids " << fmt(min_margin) << ", example a_hat " << fmt(a0);
  return out;
}

Outcome ac8() {
  Outcome out;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01;
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const int n = 1 + c % 9;
    const int m = 1 + (c * 5) % 7;
    const Vector p = testing::random_weights(rng, n);
    const Vector q = testing::random_weights(rng, m);
    Vector a(n), b(m);
    for (int i = 0; i < n; ++i) a[i] = n01(rng);
    for (int j = 0; j < m; ++j) b[j] = n01(rng);
    const Matrix w = a * Eigen::RowVectorXd::Ones(m) + Vector::Ones(n) * b.transpose();
    const double wbar = p.dot(w * q);
    const auto [u, v] = balanced_decomposition(w, p, q);
    const double e = std::max(std::abs(p.dot(u) - wbar / 2.0), std::abs(q.dot(v) - wbar / 2.0));
    worst = std::max(worst, e);
    out.require(e <= 1e-12, "mean identity off by " + fmt(e));
    const double lhs = p.dot(u.cwiseProduct(u)) + q.dot(v.cwiseProduct(v));
    const double wn = p.dot(w.cwiseProduct(w) * q);
    out.require(lhs <= wn + 1e-12, "norm inequality");
  }
  out.detail << " max mean error " << fmt(worst);
  return out;
}

Outcome ac9() {
  Outcome out;
  std::mt19937_64 rng(9);
  double w1_1d = 0.0;
  for (int c = 0; c < 100; ++c) {
    const auto a = testing::random_measure(rng, 1 + c % 10, 1);
    const auto b = testing::random_measure(rng, 1 + (c * 3) % 13, 1);
    std::vector<std::pair<double, double>> qa, qb;
    for (int i = 0; i < a.size(); ++i) qa.emplace_back(a.points()(i, 0), a.weight(i));
    for (int i = 0; i < b.size(); ++i) qb.emplace_back(b.points()(i, 0), b.weight(i));
    const double e = std::abs(wasserstein1(a, b) - testing::w1_quantile(qa, qb));
    w1_1d = std::max(w1_1d, e);
    out.require(e <= 1e-10, "1D W1 off by " + fmt(e));
  }
  double w1_nd = 0.0;
  for (int c = 0; c < 30; ++c) {
    const int d = 2 + c % 2;
    const auto a = testing::random_measure(rng, 4, d);
    const auto b = testing::random_measure(rng, 4, d);
    const double oracle = testing::transport_lp_enumerate(a.weights(), b.weights(),
                                                          testing::euclidean_cost(a.points(), b.points()));
    const double e = std::abs(wasserstein1(a, b) - oracle);
    w1_nd = std::max(w1_nd, e);
    out.require(e <= 1e-10, "W1 off by " + fmt(e) + " in d = " + std::to_string(d));
  }
  for (int c = 0; c < 30; ++c) {
    const auto a = testing::random_measure(rng, 5, 2);
    const DiscreteMeasure a2(a.points(), testing::random_weights(rng, 5));
    const auto b = testing::random_measure(rng, 4, 2);
    out.require(total_variation(a, a) == 0.0, "TV(a, a) != 0");
    out.require(total_variation(a, b) == total_variation(b, a), "TV asymmetric");
    out.require(std::abs(total_variation(a, a2) - 0.5 * (a.weights() - a2.weights()).lpNorm<1>()) <= 1e-14,
                "TV on shared atoms");
    out.require(std::abs(total_variation(a, b) - 1.0) <= 1e-12, "TV of disjoint measures");
    out.require(hausdorff_distance(a.points(), a.points()) == 0.0, "dH(a, a) != 0");
    out.require(hausdorff_distance(a.points(), b.points()) == hausdorff_distance(b.points(), a.points()),
                "dH asymmetric");
    out.require(hausdorff_distance(a.points(), b.points()) == testing::hausdorff_brute(a.points(), b.points()),
                "dH differs from brute force");
  }
  out.detail << " 1D max error " << fmt(w1_1d) << ", LP max error " << fmt(w1_nd);
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 example closed form", ac1},      {"AC2 oracle equivalence", ac2},
      {"AC3 zero-cost identity", ac3},       {"AC4 scalar root", ac4},
      {"AC5 dual-solution properties", ac5}, {"AC6 stability bounds", ac6},
      {"AC7 nondegeneracy", ac7},            {"AC8 balanced decomposition", ac8},
      {"AC9 metrics", ac9}};
  int failed = 0;
  const auto t0 = Clock::now();
  for (const auto& [name, fn] : criteria) {
    const auto t = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << fmt(seconds_since(t)) << " s):"
              << o.detail.str() << std::endl;
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << failed << " of " << criteria.size()
            << " criteria failed, " << fmt(seconds_since(t0)) << " s total" << std::endl;
  return failed ? 1 : 0;
}

#pragma once

#include <qotlab/constants.hpp>
#include <qotlab/coupling.hpp>
#include <qotlab/perturbation.hpp>

#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace qot {

/// Absolute slack added to every right-hand side before comparing; it only
/// absorbs rounding when both sides are zero up to solver accuracy.
inline constexpr double kBoundFloor = 1e-8;

struct Solved {
  Potentials potentials;
  Coupling coupling;
};

/// Content hash over atoms, weights, cost table, cost kind and eps.
std::uint64_t content_hash(const Instance& inst, const SolveOptions& opts);

/// Solved instances keyed by content hash. Lookups take a shared lock;
/// inserts an exclusive one. Entries are immutable once published.
class SolveCache {
 public:
  std::shared_ptr<const Solved> find(const Instance& inst, const SolveOptions& opts) const;
  std::shared_ptr<const Solved> insert(const Instance& inst, const SolveOptions& opts,
                                       std::shared_ptr<const Solved> value);
  std::size_t size() const;

 private:
  struct Entry {
    Instance instance;
    std::shared_ptr<const Solved> value;
  };
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::uint64_t, std::vector<Entry>> entries_;
};

/// Solves (through the cache when given) and extracts the coupling; throws
/// NotConverged when the solver does not reach the tolerance.
std::shared_ptr<const Solved> solve_instance(const Instance& inst, const SolveOptions& opts,
                                             SolveCache* cache = nullptr);

struct CheckResult {
  std::string id;
  bool hypothesis = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs; 0 when both vanish, inf when only rhs does
  bool pass = false;   // lhs <= rhs + kBoundFloor

  /// A failing check whose hypothesis holds.
  bool violated() const { return hypothesis && !pass; }
};

struct Nondegeneracy {
  double a_hat = 0.0;        // first instance
  double a_hat_prime = 0.0;  // second instance
  double a_used = 0.0;       // min of the two
  double a_theory = 0.0;     // eps / diam(supp P) for the quadratic cost
  bool applicable = false;   // quadratic cost on both sides
};

struct StabilityReport {
  DeltaQuantities deltas;
  StabilityConstants constants;
  std::vector<CheckResult> checks;
  Nondegeneracy nondegeneracy;
  double gauge_shift = 0.0;       // a = sum_j q_j (g'_j - g_j)
  double support_hausdorff = 0.0; // d_H of the discrete supports
  AuditReport audit_first;
  AuditReport audit_second;
  std::vector<std::string> notes;

  const CheckResult& check(const std::string& id) const;
  /// True when no applicable check fails.
  bool passed() const;
};

struct HarnessOptions {
  SolveOptions solve;
  std::optional<double> declared_cost_diff_bound;
  /// Replaces the computed constants (used to exercise the failure path).
  std::optional<StabilityConstants> constants_override;
};

/// inf over exterior atoms z of the product grid of -sigma(z) / dist(z, Sigma),
/// Sigma the discrete support; +inf for an empty exterior.
double estimate_nondegeneracy(const Potentials& pot, const Coupling& coup,
                              const DiscreteMeasure& p, const DiscreteMeasure& q,
                              const CostSpec& cost);

/// Solves both instances, evaluates every perturbation size and constant,
/// and checks each stability bound. Potentials of both solutions are
/// extended to the union grid, where all sup norms are taken.
StabilityReport run_pair(const Instance& a, const Instance& b, const ClassParams& params,
                         const HarnessOptions& opts = {}, SolveCache* cache = nullptr);

/// run_pair over a list, `jobs` pairs at a time. Results keep input order.
std::vector<StabilityReport> run_pairs(const std::vector<std::pair<Instance, Instance>>& pairs,
                                       const ClassParams& params, const HarnessOptions& opts,
                                       int jobs = 1, SolveCache* cache = nullptr);

struct CurveRow {
  double t;
  double delta_star;
  double linf_diff;  // sup of |h_t - h_0| over the union grid
  double ratio;      // linf_diff / delta_star, 0 at t = 0
  bool hypothesis;   // delta_star < eta_bar_star
};

std::vector<CurveRow> lipschitz_ratio_curve(const Instance& base, const PerturbationSpec& spec,
                                            const ClassParams& params,
                                            const HarnessOptions& opts = {},
                                            SolveCache* cache = nullptr);

}  // namespace qot

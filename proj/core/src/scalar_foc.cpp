#include <qotlab/dual.hpp>

#include <qotlab/error.hpp>

#include <algorithm>
#include <numeric>

namespace qot {

double scalar_foc_solve(const Eigen::Ref<const Vector>& offsets,
                        const Eigen::Ref<const Vector>& weights, double eps) {
  const auto m = offsets.size();
  if (m == 0 || weights.size() != m) throw InvalidInput("weights", "size mismatch in scalar solve");
  if (!(eps > 0.0)) throw InvalidInput("eps", "must be positive");

  std::vector<Eigen::Index> order(static_cast<size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  // Largest offset activates first (smallest breakpoint -b).
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return offsets[a] > offsets[b]; });

  double active_weight = 0.0;
  double active_sum = 0.0;
  for (size_t k = 0; k < order.size(); ++k) {
    const double b = offsets[order[k]];
    active_weight += weights[order[k]];
    active_sum += weights[order[k]] * b;
    if (k + 1 < order.size() && offsets[order[k + 1]] == b) continue;
    const double t = (eps - active_sum) / active_weight;
    if (k + 1 == order.size() || t <= -offsets[order[k + 1]]) return t;
  }
  return 0.0;  // unreachable
}

double scalar_foc_value(const Eigen::Ref<const Vector>& offsets,
                        const Eigen::Ref<const Vector>& weights, double t) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < offsets.size(); ++j) {
    total += weights[j] * std::max(0.0, t + offsets[j]);
  }
  return total;
}

}  // namespace qot

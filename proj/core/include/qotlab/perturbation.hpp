#pragma once

#include <qotlab/class_audit.hpp>
#include <qotlab/cost.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qot {

enum class PerturbationKind { MarginalMixture, AtomTranslation, WeightTilt, CostScale, EpsRamp };
enum class PerturbationTarget { P, Q, Cost, Eps };

std::string to_string(PerturbationKind kind);
std::string to_string(PerturbationTarget target);
PerturbationKind perturbation_kind_from_string(const std::string& name);
PerturbationTarget perturbation_target_from_string(const std::string& name);

/// x -> multiplicative tilt factor is 1 + t * tilt(x).
using TiltFunction = std::function<double(const Eigen::Ref<const Vector>&)>;

/// Linear tilt <theta, x - center>.
TiltFunction linear_tilt(Vector theta, Vector center);

/// Step tilt of the two-fiber example: 1 on [0, 1/4], -1/3 beyond. With the
/// unperturbed uniform density it turns p_0 into p_t exactly.
TiltFunction example62_tilt();

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::EpsRamp;
  PerturbationTarget target = PerturbationTarget::Eps;
  std::vector<double> grid;              // t values in [0, 1]
  std::optional<DiscreteMeasure> partner;  // mixture partner
  Vector direction;                      // translation vector
  TiltFunction tilt;                     // weight tilt
};

/// Throws InvalidInput when the grid is empty or leaves [0, 1], the target
/// does not fit the kind, or kind-specific data is missing.
void validate_spec(const PerturbationSpec& spec);

struct PerturbedInstance {
  double t;
  Instance instance;
  std::optional<AuditReport> audit;  // present when class params were given
  bool in_class = true;              // false when the audit failed
};

/// The base instance perturbed at each grid value; t = 0 returns the base
/// unchanged. Costs are re-tabulated on moved atoms, so explicit-matrix
/// costs only support perturbations that keep the atoms. Leaving the class
/// is flagged, not fatal.
std::vector<PerturbedInstance> perturb(const Instance& base, const PerturbationSpec& spec,
                                       const std::optional<ClassParams>& params = std::nullopt);

/// Single grid value.
Instance perturb_at(const Instance& base, const PerturbationSpec& spec, double t);

}  // namespace qot

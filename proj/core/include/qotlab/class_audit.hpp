#pragma once

#include <qotlab/cost.hpp>
#include <qotlab/measures.hpp>

#include <string>
#include <vector>

namespace qot {

/// Structural constants of an admissible data class: every quadruple
/// (P, Q, c, eps) in the class shares these bounds.
struct ClassParams {
  double eps_lower = 0.0;        // lower bound on eps
  double diam_bound = 0.0;       // bound on diam(supp P)
  double lipschitz = 0.0;        // cost Lipschitz constant L
  double density_lower = 0.0;    // lower density bound of P
  double density_upper = 0.0;    // upper density bound of P
  double cone_const = 0.0;       // P(B_r(x)) >= cone_const * min(r^d, 1)
  double ball_mass_lower = 0.0;  // inf_y Q(B_{eps_lower / 8L}(y)) >= this
  int dim = 1;
};

/// Throws InvalidInput naming the offending field.
void validate_class_params(const ClassParams& params);

enum class AuditStatus { Pass, Fail, Declared };

std::string to_string(AuditStatus status);

struct AuditItem {
  std::string id;  // "a", "b", "c.diameter", "c.convexity", "d", "e", "f"
  AuditStatus status;
  double observed;   // measured quantity (NaN for declared items)
  double required;   // threshold it is compared against
  std::string detail;
};

struct AuditReport {
  std::vector<AuditItem> items;
  bool warning = false;  // set when any item is declared rather than tested

  bool passed() const;
  const AuditItem& item(const std::string& id) const;
};

/// Checks the class conditions that can be tested on atoms. Convexity of
/// supp P and the density bounds are conditions on the continuum measure
/// being discretized; they are reported as Declared.
AuditReport audit_class_membership(const DiscreteMeasure& p, const DiscreteMeasure& q,
                                   const CostSpec& cost, double eps,
                                   const ClassParams& params);

inline AuditReport audit_class_membership(const Instance& inst, const ClassParams& params) {
  return audit_class_membership(inst.p, inst.q, inst.cost, inst.eps, params);
}

}  // namespace qot

#include <qotlab/class_audit.hpp>

#include <qotlab/error.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace qot {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

AuditItem compare(std::string id, double observed, double required, bool ok,
                  std::string detail) {
  return {std::move(id), ok ? AuditStatus::Pass : AuditStatus::Fail, observed, required,
          std::move(detail)};
}

}  // namespace

void validate_class_params(const ClassParams& params) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(name, "must be positive and finite");
  };
  positive(params.eps_lower, "eps_lower");
  positive(params.diam_bound, "diam_bound");
  positive(params.lipschitz, "lipschitz");
  positive(params.density_lower, "density_lower");
  positive(params.density_upper, "density_upper");
  positive(params.cone_const, "cone_const");
  positive(params.ball_mass_lower, "ball_mass_lower");
  if (params.density_lower > params.density_upper) {
    throw InvalidInput("density_lower", "exceeds density_upper");
  }
  if (params.cone_const > 1.0) throw InvalidInput("cone_const", "must lie in (0, 1]");
  if (params.ball_mass_lower > 1.0) throw InvalidInput("ball_mass_lower", "must lie in (0, 1]");
  if (params.dim < 1) throw InvalidInput("dim", "must be at least 1");
}

std::string to_string(AuditStatus status) {
  switch (status) {
    case AuditStatus::Pass:
      return "pass";
    case AuditStatus::Fail:
      return "fail";
    case AuditStatus::Declared:
      return "declared";
  }
  return "unknown";
}

bool AuditReport::passed() const {
  for (const auto& it : items) {
    if (it.status == AuditStatus::Fail) return false;
  }
  return true;
}

const AuditItem& AuditReport::item(const std::string& id) const {
  for (const auto& it : items) {
    if (it.id == id) return it;
  }
  throw InvalidInput("audit", "no item '" + id + "'");
}

AuditReport audit_class_membership(const DiscreteMeasure& p, const DiscreteMeasure& q,
                                   const CostSpec& cost, double eps,
                                   const ClassParams& params) {
  validate_class_params(params);
  AuditReport report;
  auto& items = report.items;

  items.push_back(compare("a", eps, params.eps_lower, eps >= params.eps_lower,
                          "eps >= eps_lower"));

  {
    const double observed = observed_lipschitz(cost, p, q);
    const double L = params.lipschitz;
    const bool ok = cost.lipschitz() <= L && observed <= L * (1.0 + 1e-12);
    std::ostringstream msg;
    msg << "declared L_c = " << cost.lipschitz() << ", observed on atom pairs = " << observed;
    items.push_back(compare("b", std::max(observed, cost.lipschitz()), L, ok, msg.str()));
  }

  const double diam = p.diameter();
  items.push_back(compare("c.diameter", diam, params.diam_bound, diam <= params.diam_bound,
                          "diam(supp P) <= D"));
  items.push_back({"c.convexity", AuditStatus::Declared, kNaN, kNaN,
                   "convexity of supp P is a property of the continuum measure"});
  items.push_back({"d", AuditStatus::Declared, kNaN, kNaN,
                   "density bounds are a property of the continuum measure"});

  {
    // Logarithmic radius grid spanning the atom scale up to beyond the
    // saturation point r = 1 and the support diameter.
    const double top = 2.0 * std::max(1.0, diam);
    const double bottom = 1e-3 * std::max(1.0, diam);
    constexpr int kRadii = 40;
    double worst_ratio = std::numeric_limits<double>::infinity();
    std::vector<double> radii;
    for (int k = 0; k < kRadii; ++k) {
      radii.push_back(bottom * std::pow(top / bottom, static_cast<double>(k) / (kRadii - 1)));
    }
    radii.push_back(1.0);
    for (int i = 0; i < p.size(); ++i) {
      for (double r : radii) {
        const double lower = std::min(std::pow(r, p.dim()), 1.0);
        worst_ratio = std::min(worst_ratio, ball_mass(p, p.point(i), r) / lower);
      }
    }
    items.push_back(compare("e", worst_ratio, params.cone_const,
                            worst_ratio >= params.cone_const,
                            "min over (x, r) of P(B_r(x)) / min(r^d, 1)"));
  }

  {
    const double r = params.eps_lower / (8.0 * params.lipschitz);
    const double mass = min_ball_mass(q, r);
    items.push_back(compare("f", mass, params.ball_mass_lower, mass >= params.ball_mass_lower,
                            "inf_y Q(B_{eps_lower/(8L)}(y))"));
  }

  report.warning = true;
  return report;
}

}  // namespace qot

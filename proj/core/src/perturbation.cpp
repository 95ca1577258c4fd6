#include <qotlab/perturbation.hpp>

#include <qotlab/error.hpp>

#include <map>

namespace qot {

std::string to_string(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::MarginalMixture:
      return "marginal-mixture";
    case PerturbationKind::AtomTranslation:
      return "atom-translation";
    case PerturbationKind::WeightTilt:
      return "weight-tilt";
    case PerturbationKind::CostScale:
      return "cost-scale";
    case PerturbationKind::EpsRamp:
      return "eps-ramp";
  }
  return "unknown";
}

std::string to_string(PerturbationTarget target) {
  switch (target) {
    case PerturbationTarget::P:
      return "P";
    case PerturbationTarget::Q:
      return "Q";
    case PerturbationTarget::Cost:
      return "c";
    case PerturbationTarget::Eps:
      return "eps";
  }
  return "unknown";
}

PerturbationKind perturbation_kind_from_string(const std::string& name) {
  for (auto k : {PerturbationKind::MarginalMixture, PerturbationKind::AtomTranslation,
                 PerturbationKind::WeightTilt, PerturbationKind::CostScale,
                 PerturbationKind::EpsRamp}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidInput("perturbation.kind", "unknown kind '" + name + "'");
}

PerturbationTarget perturbation_target_from_string(const std::string& name) {
  for (auto t : {PerturbationTarget::P, PerturbationTarget::Q, PerturbationTarget::Cost,
                 PerturbationTarget::Eps}) {
    if (to_string(t) == name) return t;
  }
  throw InvalidInput("perturbation.target", "unknown target '" + name + "'");
}

TiltFunction linear_tilt(Vector theta, Vector center) {
  return [theta = std::move(theta), center = std::move(center)](const Eigen::Ref<const Vector>& x) {
    return theta.dot(x - center);
  };
}

TiltFunction example62_tilt() {
  return [](const Eigen::Ref<const Vector>& x) { return x[0] <= 0.25 ? 1.0 : -1.0 / 3.0; };
}

void validate_spec(const PerturbationSpec& spec) {
  if (spec.grid.empty()) throw InvalidInput("perturbation.grid", "grid is empty");
  for (double t : spec.grid) {
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("perturbation.grid", "t must lie in [0, 1]");
  }
  const bool marginal =
      spec.target == PerturbationTarget::P || spec.target == PerturbationTarget::Q;
  switch (spec.kind) {
    case PerturbationKind::MarginalMixture:
      if (!marginal) throw InvalidInput("perturbation.target", "mixtures act on P or Q");
      if (!spec.partner) throw InvalidInput("perturbation.partner", "mixture needs a partner");
      break;
    case PerturbationKind::AtomTranslation:
      if (!marginal) throw InvalidInput("perturbation.target", "translations act on P or Q");
      if (spec.direction.size() == 0) {
        throw InvalidInput("perturbation.direction", "translation needs a direction");
      }
      break;
    case PerturbationKind::WeightTilt:
      if (!marginal) throw InvalidInput("perturbation.target", "tilts act on P or Q");
      if (!spec.tilt) throw InvalidInput("perturbation.tilt", "tilt needs a function");
      break;
    case PerturbationKind::CostScale:
      if (spec.target != PerturbationTarget::Cost) {
        throw InvalidInput("perturbation.target", "cost-scale acts on c");
      }
      break;
    case PerturbationKind::EpsRamp:
      if (spec.target != PerturbationTarget::Eps) {
        throw InvalidInput("perturbation.target", "eps-ramp acts on eps");
      }
      break;
  }
}

namespace {

DiscreteMeasure mixture(const DiscreteMeasure& base, const DiscreteMeasure& partner, double t) {
  if (base.dim() != partner.dim()) {
    throw InvalidInput("perturbation.partner", "partner lives in another dimension");
  }
  const PointSet pts = union_points(base.points(), partner.points());
  std::map<std::vector<double>, Eigen::Index> index;
  for (Eigen::Index k = 0; k < pts.rows(); ++k) {
    index.emplace(std::vector<double>(pts.row(k).data(), pts.row(k).data() + pts.cols()), k);
  }
  Vector w = Vector::Zero(pts.rows());
  auto add = [&](const DiscreteMeasure& m, double factor) {
    for (int i = 0; i < m.size(); ++i) {
      const Vector x = m.point(i);
      w[index.at(std::vector<double>(x.data(), x.data() + x.size()))] += factor * m.weight(i);
    }
  };
  add(base, 1.0 - t);
  add(partner, t);
  // t = 1 may leave base atoms with zero weight; drop them.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (w[k] > 0.0) keep.push_back(k);
  }
  PointSet kept(static_cast<Eigen::Index>(keep.size()), pts.cols());
  Vector kw(static_cast<Eigen::Index>(keep.size()));
  for (size_t k = 0; k < keep.size(); ++k) {
    kept.row(static_cast<Eigen::Index>(k)) = pts.row(keep[k]);
    kw[static_cast<Eigen::Index>(k)] = w[keep[k]];
  }
  return DiscreteMeasure(std::move(kept), kw / kw.sum(), base.ambient());
}

DiscreteMeasure translate(const DiscreteMeasure& base, const Vector& v, double t) {
  if (v.size() != base.dim()) {
    throw InvalidInput("perturbation.direction", "direction has the wrong dimension");
  }
  PointSet pts = base.points();
  pts.rowwise() += (t * v).transpose();
  return DiscreteMeasure(std::move(pts), base.weights(), base.ambient());
}

DiscreteMeasure tilt(const DiscreteMeasure& base, const TiltFunction& fn, double t) {
  Vector w = base.weights();
  for (int i = 0; i < base.size(); ++i) {
    const double factor = 1.0 + t * fn(base.point(i));
    if (!(factor > 0.0)) throw InvalidInput("perturbation.tilt", "tilt makes a weight non-positive");
    w[i] *= factor;
  }
  return DiscreteMeasure(base.points(), w / w.sum(), base.ambient());
}

}  // namespace

Instance perturb_at(const Instance& base, const PerturbationSpec& spec, double t) {
  if (t == 0.0) return base;
  Instance out = base;
  auto apply = [&](const DiscreteMeasure& m) {
    switch (spec.kind) {
      case PerturbationKind::MarginalMixture:
        return mixture(m, *spec.partner, t);
      case PerturbationKind::AtomTranslation:
        return translate(m, spec.direction, t);
      case PerturbationKind::WeightTilt:
        return tilt(m, spec.tilt, t);
      default:
        return m;
    }
  };
  switch (spec.target) {
    case PerturbationTarget::P:
      out.p = apply(base.p);
      break;
    case PerturbationTarget::Q:
      out.q = apply(base.q);
      break;
    case PerturbationTarget::Cost:
      out.cost = base.cost.scaled(1.0 + t);
      return out;
    case PerturbationTarget::Eps:
      out.eps = base.eps * (1.0 + t);
      return out;
  }
  out.cost = base.cost.rebind(out.p, out.q);
  return out;
}

std::vector<PerturbedInstance> perturb(const Instance& base, const PerturbationSpec& spec,
                                       const std::optional<ClassParams>& params) {
  validate_spec(spec);
  std::vector<PerturbedInstance> out;
  out.reserve(spec.grid.size());
  for (double t : spec.grid) {
    PerturbedInstance item{t, perturb_at(base, spec, t), std::nullopt, true};
    if (params) {
      item.audit = audit_class_membership(item.instance, *params);
      item.in_class = item.audit->passed();
    }
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace qot

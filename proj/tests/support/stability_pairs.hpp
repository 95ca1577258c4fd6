#pragma once

// Instance pairs inside a shared class, sized so that the smallness
// hypotheses of the stability bounds hold, plus pairs where they cannot.

#include <qotlab/fixtures.hpp>
#include <qotlab/harness.hpp>
#include <qotlab/perturbation.hpp>

#include <string>
#include <utility>
#include <vector>

namespace qot::testing {

struct NamedPair {
  std::string name;
  Instance a;
  Instance b;
};

struct PairFamily {
  ClassParams params;
  std::vector<NamedPair> pairs;
};

// eps_lower = 8 L D collapses the cell count of the error-bound constant
// to one and makes every eps_lower / 8L ball cover supp Q.
inline ClassParams large_eps_class(int dim, double lipschitz) {
  ClassParams c;
  c.dim = dim;
  c.lipschitz = lipschitz;
  c.diam_bound = 1.0;
  c.eps_lower = 8.0 * lipschitz * c.diam_bound;
  c.density_lower = 0.5;
  c.density_upper = 2.0;
  c.cone_const = 0.2;
  c.ball_mass_lower = 1.0;
  return c;
}

inline void add_family(PairFamily& fam, const std::string& tag, const Instance& base,
                       const DiscreteMeasure& p_partner, const DiscreteMeasure& q_partner,
                       const std::vector<double>& shifts, const std::vector<double>& mixes,
                       const std::vector<double>& tilts, const std::vector<double>& scales,
                       const std::vector<double>& ramps) {
  const int d = base.p.dim();
  auto add = [&](const std::string& what, const PerturbationSpec& spec, double t) {
    fam.pairs.push_back({tag + "/" + what + "/t=" + std::to_string(t), base, perturb_at(base, spec, t)});
  };
  PerturbationSpec spec;
  spec.kind = PerturbationKind::AtomTranslation;
  spec.direction = Vector::Ones(d) / std::sqrt(static_cast<double>(d));
  for (auto target : {PerturbationTarget::P, PerturbationTarget::Q}) {
    spec.target = target;
    for (double t : shifts) add("translate-" + to_string(target), spec, t);
  }
  spec = {};
  spec.kind = PerturbationKind::MarginalMixture;
  spec.target = PerturbationTarget::P;
  spec.partner = p_partner;
  for (double t : mixes) add("mix-P", spec, t);
  spec.target = PerturbationTarget::Q;
  spec.partner = q_partner;
  for (double t : mixes) add("mix-Q", spec, t);
  spec = {};
  spec.kind = PerturbationKind::WeightTilt;
  spec.tilt = linear_tilt(Vector::Ones(d), Vector::Constant(d, 0.5));
  for (auto target : {PerturbationTarget::P, PerturbationTarget::Q}) {
    spec.target = target;
    for (double t : tilts) add("tilt-" + to_string(target), spec, t);
  }
  spec = {};
  spec.kind = PerturbationKind::CostScale;
  spec.target = PerturbationTarget::Cost;
  for (double t : scales) add("cost-scale", spec, t);
  spec.kind = PerturbationKind::EpsRamp;
  spec.target = PerturbationTarget::Eps;
  for (double t : ramps) add("eps-ramp", spec, t);
}

// Mixture partner on a subset of the base atoms, so the cone condition
// survives the mixture.
inline DiscreteMeasure subset_partner(const DiscreteMeasure& m) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < m.points().rows(); i += 2) keep.push_back(i);
  PointSet pts(static_cast<Eigen::Index>(keep.size()), m.dim());
  Vector w(static_cast<Eigen::Index>(keep.size()));
  for (size_t k = 0; k < keep.size(); ++k) {
    pts.row(static_cast<Eigen::Index>(k)) = m.points().row(keep[k]);
    w[static_cast<Eigen::Index>(k)] = 1.0 + static_cast<double>(k);
  }
  return DiscreteMeasure(std::move(pts), w / w.sum(), m.ambient());
}

/// One-dimensional family: 6-atom grids on [0, 1], quadratic cost.
inline PairFamily line_family(std::uint64_t seed) {
  PairFamily fam;
  fam.params = large_eps_class(1, 1.5);
  QuadraticConvexOptions opts;
  opts.eps = fam.params.eps_lower;
  const Instance base = quadratic_convex_instance(6, 1, seed, opts).instance;
  add_family(fam, "line-" + std::to_string(seed), base, subset_partner(base.p),
             subset_partner(base.q), {5e-5, 2e-4}, {1e-4, 5e-4}, {1e-3}, {1e-3}, {1e-5, 5e-5});
  return fam;
}

/// Two-dimensional family: 3 x 3 grids on [0, 1]^2, quadratic cost.
inline PairFamily plane_family(std::uint64_t seed) {
  PairFamily fam;
  fam.params = large_eps_class(2, 2.1);
  QuadraticConvexOptions opts;
  opts.eps = fam.params.eps_lower;
  const Instance base = quadratic_convex_instance(3, 2, seed, opts).instance;
  add_family(fam, "plane-" + std::to_string(seed), base, subset_partner(base.p),
             subset_partner(base.q), {1e-4}, {2e-4}, {1e-3}, {1e-3}, {2e-5});
  return fam;
}

/// Small eps: the constants are so large that no resolvable perturbation
/// satisfies the smallness hypotheses.
inline PairFamily small_eps_family() {
  PairFamily fam;
  fam.params.dim = 1;
  fam.params.lipschitz = 1.5;
  fam.params.diam_bound = 1.0;
  fam.params.eps_lower = 0.5;
  fam.params.density_lower = 0.5;
  fam.params.density_upper = 2.0;
  fam.params.cone_const = 0.2;
  fam.params.ball_mass_lower = 0.1;
  QuadraticConvexOptions opts;
  opts.eps = 0.5;
  const Instance base = quadratic_convex_instance(6, 1, 3, opts).instance;
  add_family(fam, "small-eps", base, subset_partner(base.p), subset_partner(base.q), {1e-3}, {1e-2},
             {}, {1e-2}, {1e-3});
  return fam;
}

}  // namespace qot::testing

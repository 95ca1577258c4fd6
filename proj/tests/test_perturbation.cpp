#include <qotlab/error.hpp>
#include <qotlab/fixtures.hpp>
#include <qotlab/perturbation.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

namespace qot {
namespace {

Instance line_instance() {
  const auto p = DiscreteMeasure::on_line({0.1, 0.4, 0.8}, {0.3, 0.3, 0.4});
  const auto q = DiscreteMeasure::on_line({0.2, 0.9}, {0.5, 0.5});
  return Instance{p, q, CostSpec::sq_euclidean(p, q, 2.0), 0.5};
}

TEST(Perturbation, KindAndTargetNamesRoundTrip) {
  for (auto k : {PerturbationKind::MarginalMixture, PerturbationKind::AtomTranslation,
                 PerturbationKind::WeightTilt, PerturbationKind::CostScale, PerturbationKind::EpsRamp}) {
    EXPECT_EQ(perturbation_kind_from_string(to_string(k)), k);
  }
  for (auto t : {PerturbationTarget::P, PerturbationTarget::Q, PerturbationTarget::Cost,
                 PerturbationTarget::Eps}) {
    EXPECT_EQ(perturbation_target_from_string(to_string(t)), t);
  }
  EXPECT_THROW(perturbation_kind_from_string("shear"), InvalidInput);
}

TEST(Perturbation, ValidationNamesTheField) {
  PerturbationSpec spec;
  spec.kind = PerturbationKind::MarginalMixture;
  spec.target = PerturbationTarget::P;
  spec.grid = {0.1};
  try {
    validate_spec(spec);
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_EQ(e.field(), "perturbation.partner");
  }
  spec.kind = PerturbationKind::EpsRamp;
  spec.grid = {1.5};
  EXPECT_THROW(validate_spec(spec), InvalidInput);
}

TEST(Perturbation, ZeroReturnsTheBase) {
  const Instance base = line_instance();
  PerturbationSpec spec;
  spec.kind = PerturbationKind::AtomTranslation;
  spec.target = PerturbationTarget::P;
  spec.direction = Vector::Constant(1, 0.1);
  spec.grid = {0.0, 0.5};
  const auto out = perturb(base, spec);
  EXPECT_EQ(out[0].instance.p, base.p);
  EXPECT_NEAR(wasserstein1(out[1].instance.p, base.p), 0.05, 1e-15);
  EXPECT_NEAR(out[1].instance.cost.matrix()(0, 0), 0.5 * 0.05 * 0.05, 1e-15);
}

TEST(Perturbation, MixtureIsLinearInW1) {
  const Instance base = line_instance();
  PerturbationSpec spec;
  spec.kind = PerturbationKind::MarginalMixture;
  spec.target = PerturbationTarget::Q;
  spec.partner = DiscreteMeasure::on_line({0.2, 0.5}, {0.25, 0.75});
  const double full = wasserstein1(base.q, *spec.partner);
  for (double t : {0.1, 0.5, 1.0}) {
    const Instance out = perturb_at(base, spec, t);
    EXPECT_NEAR(wasserstein1(out.q, base.q), t * full, 1e-14);
    EXPECT_NEAR(total_variation(out.q, base.q), t * total_variation(base.q, *spec.partner), 1e-14);
  }
  // t = 1 drops the atom at 0.9.
  EXPECT_EQ(perturb_at(base, spec, 1.0).q.size(), 2);
}

TEST(Perturbation, TiltRenormalizes) {
  const auto ex = example62(0.0, 81);
  PerturbationSpec spec;
  spec.kind = PerturbationKind::WeightTilt;
  spec.target = PerturbationTarget::P;
  spec.tilt = example62_tilt();
  // The step tilt carries the uniform density onto p_eta exactly.
  const Instance out = perturb_at(ex.instance, spec, 0.3);
  const auto ref = example62(0.3, 81);
  EXPECT_LE((out.p.weights() - ref.instance.p.weights()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Perturbation, CostAndEps) {
  const Instance base = line_instance();
  PerturbationSpec spec;
  spec.kind = PerturbationKind::CostScale;
  spec.target = PerturbationTarget::Cost;
  Instance out = perturb_at(base, spec, 0.2);
  EXPECT_NEAR(out.cost.matrix()(1, 1), 1.2 * base.cost.matrix()(1, 1), 1e-15);
  EXPECT_NEAR(out.cost.lipschitz(), 2.4, 1e-15);
  spec.kind = PerturbationKind::EpsRamp;
  spec.target = PerturbationTarget::Eps;
  out = perturb_at(base, spec, 0.2);
  EXPECT_DOUBLE_EQ(out.eps, 0.6);
}

TEST(Perturbation, FlagsLeavingTheClass) {
  const Instance base = line_instance();
  ClassParams params;
  params.eps_lower = 0.5;
  params.diam_bound = 0.75;
  params.lipschitz = 2.0;
  params.density_lower = 0.5;
  params.density_upper = 2.0;
  params.cone_const = 0.01;
  params.ball_mass_lower = 0.01;
  PerturbationSpec spec;
  spec.kind = PerturbationKind::AtomTranslation;
  spec.target = PerturbationTarget::P;
  spec.direction = Vector::Constant(1, 0.0);
  spec.direction[0] = 0.0;
  spec.grid = {0.0};
  EXPECT_TRUE(perturb(base, spec, params)[0].in_class);
  spec.kind = PerturbationKind::EpsRamp;
  spec.target = PerturbationTarget::Eps;
  spec.grid = {0.0, 0.5};
  params.eps_lower = 0.6;
  const auto out = perturb(base, spec, params);
  EXPECT_FALSE(out[0].in_class);
  EXPECT_TRUE(out[1].in_class);
}

}  // namespace
}  // namespace qot

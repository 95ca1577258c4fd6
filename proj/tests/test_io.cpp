#include <qotlab/error.hpp>
#include <qotlab/fixtures.hpp>
#include <qotlab/io.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>

namespace qot {
namespace {

using io::Json;

TEST(Dump, SortedKeysAndNumberFormat) {
  Json j{{"b", 0.1}, {"a", {1.0, 2.5}}, {"c", std::numeric_limits<double>::infinity()}, {"n", 3}};
  EXPECT_EQ(io::dump(j), "{\n  \"a\": [1.0, 2.5],\n  \"b\": 0.1,\n  \"c\": \"inf\",\n  \"n\": 3\n}\n");
}

TEST(Dump, NumbersRoundTrip) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int k = 0; k < 200; ++k) {
    const double v = u(rng) * std::pow(10.0, k % 20 - 10);
    EXPECT_EQ(std::stod(io::format_number(v)), v);
  }
  EXPECT_EQ(io::format_number(2.0), "2.0");
  EXPECT_EQ(io::number(Json("-inf"), "x"), -std::numeric_limits<double>::infinity());
  EXPECT_THROW(io::number(Json("abc"), "x"), InvalidInput);
}

TEST(MeasureJson, RoundTrip) {
  std::mt19937_64 rng(72);
  const auto m = testing::random_measure(rng, 5, 3);
  EXPECT_EQ(io::measure_from_json(Json::parse(io::dump(io::to_json(m)))), m);
  const auto fx = quadratic_convex_instance(3, 2, 1);
  EXPECT_EQ(io::measure_from_json(io::to_json(fx.instance.p)), fx.instance.p);
}

TEST(MeasureJson, ErrorsNameTheField) {
  Json j{{"dim", 1}, {"points", {{0.0}, {1.0}}}, {"weights", {0.5, 0.6}}};
  try {
    io::measure_from_json(j);
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_EQ(e.field(), "weights");
  }
  j["weights"] = {0.5};
  EXPECT_THROW(io::measure_from_json(j), InvalidInput);
  j.erase("dim");
  try {
    io::measure_from_json(j);
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_EQ(e.field(), "dim");
  }
}

TEST(InstanceJson, RoundTripKeepsCosts) {
  std::mt19937_64 rng(73);
  for (bool quadratic : {true, false}) {
    const Instance a = testing::random_instance(rng, 4, 3, 2, 0.3, quadratic);
    const Instance b = io::instance_from_json(Json::parse(io::dump(io::to_json(a))));
    EXPECT_EQ(b.cost.kind(), a.cost.kind());
    EXPECT_EQ(b.cost.matrix(), a.cost.matrix());
    EXPECT_EQ(b.cost.lipschitz(), a.cost.lipschitz());
    EXPECT_EQ(b.eps, a.eps);
  }
  const Instance a = testing::random_instance(rng, 4, 3, 1, 0.3, true);
  Instance scaled = a;
  scaled.cost = a.cost.scaled(1.5);
  const Instance back = io::instance_from_json(io::to_json(scaled));
  EXPECT_DOUBLE_EQ(back.cost.scale(), 1.5);
  EXPECT_LE((back.cost.matrix() - scaled.cost.matrix()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_DOUBLE_EQ(back.cost.lipschitz(), scaled.cost.lipschitz());
}

TEST(InstanceJson, ReadsMeasuresFromFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "qotlab_io_test";
  std::filesystem::create_directories(dir);
  const auto p = DiscreteMeasure::on_line({0.0, 1.0}, {0.5, 0.5});
  io::write_text_file(dir / "p.json", io::dump(io::to_json(p)));
  Json j{{"p", "p.json"}, {"q", io::to_json(p)}, {"cost", {{"kind", "sq_euclidean"}, {"lipschitz", 2.0}}},
         {"eps", 1.0}};
  const Instance inst = io::instance_from_json(j, dir);
  EXPECT_EQ(inst.p, p);
  j["eps"] = -1.0;
  EXPECT_THROW(io::instance_from_json(j, dir), InvalidInput);
  j["p"] = "missing.json";
  try {
    io::instance_from_json(j, dir);
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_EQ(e.field(), "config");
  }
}

TEST(ClassParamsJson, RoundTripAndValidation) {
  ClassParams c;
  c.eps_lower = 1.0;
  c.diam_bound = 1.0;
  c.lipschitz = 6.4;
  c.density_lower = 0.5;
  c.density_upper = 2.0;
  c.cone_const = 0.1;
  c.ball_mass_lower = 0.5;
  const ClassParams back = io::class_params_from_json(io::to_json(c));
  EXPECT_EQ(back.lipschitz, 6.4);
  Json bad = io::to_json(c);
  bad["density_lower"] = -1.0;
  try {
    io::class_params_from_json(bad);
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_EQ(e.field(), "density_lower");
  }
}

TEST(ConstantsJson, RoundTripAndCsv) {
  ClassParams c;
  c.eps_lower = 8.0;
  c.diam_bound = 1.0;
  c.lipschitz = 1.0;
  c.density_lower = c.density_upper = c.cone_const = c.ball_mass_lower = 1.0;
  const StabilityConstants k = uniform_constants(c);
  const StabilityConstants back = io::constants_from_json(io::to_json(k));
  EXPECT_EQ(back.c_bar, k.c_bar);
  const std::string csv = io::constants_csv(k);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "name,value,formula-id");
  EXPECT_NE(csv.find("c_bar,34.0,uniform-linf.C"), std::string::npos);
}

TEST(SolutionJson, IsDeterministic) {
  std::mt19937_64 rng(74);
  const Instance inst = testing::random_instance(rng, 4, 5, 1, 0.2, true);
  auto render = [&] {
    const Potentials pot = solve_dual(inst);
    return io::dump(io::solution_json(inst, pot, extract_coupling(pot, inst.p, inst.q, inst.cost)));
  };
  const std::string a = render();
  EXPECT_EQ(a, render());
  const Json j = Json::parse(a);
  for (const char* key : {"potentials", "density", "support", "dual_objective", "primal_value",
                          "duality_gap", "marginal_violation", "convergence"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(CurveCsv, Header) {
  const std::string csv = io::curve_csv({{0.0, 0.0, 0.0, 0.0, true}, {0.5, 0.1, 0.05, 0.5, false}});
  EXPECT_EQ(csv, "t,delta_star,linf_diff,ratio,hypothesis\n0.0,0.0,0.0,0.0,true\n0.5,0.1,0.05,0.5,false\n");
}

}  // namespace
}  // namespace qot

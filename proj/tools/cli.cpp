#include "cli.hpp"

#include <qotlab/error.hpp>
#include <qotlab/fixtures.hpp>
#include <qotlab/harness.hpp>
#include <qotlab/io.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

namespace qot::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

struct RunConfig {
  std::string command;
  fs::path config_path;
  fs::path out_dir = "qotlab-out";
  int jobs = 1;
  double tol = 0.0;  // 0: take from config or default
  std::set<std::string> formats{"json"};

  Json config;
  fs::path base_dir;

  bool wants(const std::string& f) const { return formats.count(f) > 0; }
};

// Raised when an applicable bound fails; carries the failing check ids.
struct BoundViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SolveOptions solver_options(const RunConfig& cfg) {
  SolveOptions opts;
  if (cfg.config.contains("solver")) {
    const Json& s = cfg.config.at("solver");
    if (s.contains("tol")) opts.tol = io::number(s.at("tol"), "solver.tol");
    if (s.contains("max_iter")) {
      if (!s.at("max_iter").is_number_integer()) {
        throw InvalidInput("solver.max_iter", "expected an integer");
      }
      opts.max_iter = s.at("max_iter").get<long>();
    }
  }
  if (cfg.tol > 0.0) opts.tol = cfg.tol;
  if (!(opts.tol > 0.0)) throw InvalidInput("tol", "must be positive");
  return opts;
}

const Json& require(const Json& j, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(key, "missing from config");
  return j.at(key);
}

ClassParams load_class_params(const RunConfig& cfg) {
  const Json& j = require(cfg.config, "class_params");
  if (j.is_string()) return io::class_params_from_json(io::read_json_file(cfg.base_dir / j.get<std::string>()));
  return io::class_params_from_json(j);
}

// Full instance objects, file references, or named fixtures.
Instance load_instance(const Json& j, const fs::path& base_dir) {
  if (j.is_string()) return load_instance(io::read_json_file(base_dir / j.get<std::string>()), base_dir);
  if (j.is_object() && j.contains("fixture")) {
    const std::string name = j.at("fixture").get<std::string>();
    if (name == "example62") {
      const double eta = j.contains("eta") ? io::number(j.at("eta"), "eta") : 0.0;
      const int n = j.contains("grid_n") ? j.at("grid_n").get<int>() : 81;
      return example62(eta, n).instance;
    }
    if (name == "quadratic_convex") {
      QuadraticConvexOptions opts;
      if (j.contains("eps")) opts.eps = io::number(j.at("eps"), "eps");
      if (j.contains("width")) opts.width = io::number(j.at("width"), "width");
      return quadratic_convex_instance(j.value("n", 10), j.value("d", 1),
                                       j.value("seed", std::uint64_t{1}), opts)
          .instance;
    }
    throw InvalidInput("fixture", "unknown fixture '" + name + "'");
  }
  return io::instance_from_json(j, base_dir);
}

void write_json(const RunConfig& cfg, const std::string& name, const Json& j) {
  io::write_text_file(cfg.out_dir / name, io::dump(j));
}

void write_csv(const RunConfig& cfg, const std::string& name, const std::string& text) {
  io::write_text_file(cfg.out_dir / name, text);
}

std::string violations(const StabilityReport& rep) {
  std::string out;
  for (const auto& c : rep.checks) {
    if (c.violated()) out += (out.empty() ? "" : ", ") + c.id;
  }
  return out;
}

std::string checks_csv_header() { return "pair,check,hypothesis,lhs,rhs,ratio,pass\n"; }

std::string checks_csv_rows(const std::string& pair, const StabilityReport& rep) {
  std::string out;
  for (const auto& c : rep.checks) {
    out += pair + "," + c.id + "," + (c.hypothesis ? "true" : "false") + "," +
           io::format_number(c.lhs) + "," + io::format_number(c.rhs) + "," +
           io::format_number(c.ratio) + "," + (c.pass ? "true" : "false") + "\n";
  }
  return out;
}

HarnessOptions harness_options(const RunConfig& cfg) {
  HarnessOptions opts;
  opts.solve = solver_options(cfg);
  if (cfg.config.contains("declared_cost_diff_bound")) {
    opts.declared_cost_diff_bound =
        io::number(cfg.config.at("declared_cost_diff_bound"), "declared_cost_diff_bound");
  }
  return opts;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const Instance inst = load_instance(require(cfg.config, "instance"), cfg.base_dir);
  const Potentials pot = solve_dual(inst, solver_options(cfg));
  if (!pot.converged) {
    throw NotConverged("solver stopped after " + std::to_string(pot.sweeps) +
                       " sweeps; residual " + io::format_number(pot.foc_residual_inf));
  }
  const Coupling coup = extract_coupling(pot, inst.p, inst.q, inst.cost);
  const Json sol = io::solution_json(inst, pot, coup);
  if (cfg.wants("json")) write_json(cfg, "solution.json", sol);
  if (cfg.wants("csv")) {
    std::string csv = "i,j,zeta\n";
    for (const auto& [i, j] : extract_support(coup).cells) {
      csv += std::to_string(i) + "," + std::to_string(j) + "," + io::format_number(coup.zeta(i, j)) + "\n";
    }
    write_csv(cfg, "support.csv", csv);
  }
  out << "converged in " << pot.sweeps << " sweeps, residual " << pot.foc_residual_inf
      << ", support " << extract_support(coup).size() << " cells, gap "
      << sol.at("duality_gap").get<double>() << "\n";
  return kOk;
}

PerturbationSpec perturbation_from_json(const Json& j, const Instance& base,
                                        const fs::path& base_dir) {
  PerturbationSpec spec;
  spec.kind = perturbation_kind_from_string(require(j, "kind").get<std::string>());
  if (j.contains("target")) {
    spec.target = perturbation_target_from_string(j.at("target").get<std::string>());
  } else if (spec.kind == PerturbationKind::CostScale) {
    spec.target = PerturbationTarget::Cost;
  } else if (spec.kind == PerturbationKind::EpsRamp) {
    spec.target = PerturbationTarget::Eps;
  } else {
    spec.target = PerturbationTarget::P;
  }
  const Json& grid = require(j, "grid");
  if (!grid.is_array()) throw InvalidInput("perturbation.grid", "expected an array");
  for (const auto& t : grid) spec.grid.push_back(io::number(t, "perturbation.grid"));
  if (j.contains("partner")) {
    const Json& m = j.at("partner");
    spec.partner = io::measure_from_json(
        m.is_string() ? io::read_json_file(base_dir / m.get<std::string>()) : m, "partner");
  }
  if (j.contains("direction")) {
    const Json& d = j.at("direction");
    spec.direction.resize(static_cast<Eigen::Index>(d.size()));
    for (size_t k = 0; k < d.size(); ++k) {
      spec.direction[static_cast<Eigen::Index>(k)] = io::number(d[k], "perturbation.direction");
    }
  }
  if (j.contains("tilt")) {
    const Json& t = j.at("tilt");
    const std::string type = require(t, "type").get<std::string>();
    if (type == "example62") {
      spec.tilt = example62_tilt();
    } else if (type == "linear") {
      const int dim = spec.target == PerturbationTarget::Q ? base.q.dim() : base.p.dim();
      Vector theta(dim);
      Vector center = Vector::Zero(dim);
      const Json& th = require(t, "theta");
      if (static_cast<int>(th.size()) != dim) throw InvalidInput("tilt.theta", "wrong dimension");
      for (int k = 0; k < dim; ++k) theta[k] = io::number(th[static_cast<size_t>(k)], "tilt.theta");
      if (t.contains("center")) {
        for (int k = 0; k < dim; ++k) {
          center[k] = io::number(t.at("center")[static_cast<size_t>(k)], "tilt.center");
        }
      }
      spec.tilt = linear_tilt(theta, center);
    } else {
      throw InvalidInput("tilt.type", "unknown tilt '" + type + "'");
    }
  }
  validate_spec(spec);
  return spec;
}

int cmd_perturb(const RunConfig& cfg, std::ostream& out) {
  const Instance base = load_instance(require(cfg.config, "instance"), cfg.base_dir);
  const ClassParams params = load_class_params(cfg);
  const PerturbationSpec spec =
      perturbation_from_json(require(cfg.config, "perturbation"), base, cfg.base_dir);
  const HarnessOptions opts = harness_options(cfg);
  SolveCache cache;
  std::vector<std::pair<Instance, Instance>> pairs;
  for (double t : spec.grid) pairs.emplace_back(base, perturb_at(base, spec, t));
  const auto reports = run_pairs(pairs, params, opts, cfg.jobs, &cache);

  std::vector<CurveRow> rows;
  Json all = Json::array();
  std::string failing;
  for (size_t k = 0; k < reports.size(); ++k) {
    const auto& rep = reports[k];
    const auto& c = rep.check("linf_h");
    const double ds = rep.deltas.delta_star;
    rows.push_back({spec.grid[k], ds, c.lhs, ds > 0.0 ? c.lhs / ds : 0.0,
                    ds < rep.constants.eta_bar_star});
    Json r = io::to_json(rep);
    r["t"] = spec.grid[k];
    all.push_back(std::move(r));
    const std::string v = violations(rep);
    if (!v.empty()) failing += "t=" + io::format_number(spec.grid[k]) + ": " + v + "; ";
  }
  if (cfg.wants("csv")) write_csv(cfg, "curve.csv", io::curve_csv(rows));
  if (cfg.wants("json")) {
    write_json(cfg, "perturb.json",
               {{"kind", to_string(spec.kind)}, {"target", to_string(spec.target)}, {"reports", all}});
  }
  out << io::curve_csv(rows);
  if (!failing.empty()) throw BoundViolation(failing);
  return kOk;
}

int cmd_constants(const RunConfig& cfg, std::ostream& out) {
  const ClassParams params = load_class_params(cfg);
  StabilityConstants k = uniform_constants(params);
  if (cfg.config.contains("instance")) {
    const Instance inst = load_instance(cfg.config.at("instance"), cfg.base_dir);
    std::optional<double> delta;
    if (cfg.config.contains("delta")) delta = io::number(cfg.config.at("delta"), "delta");
    k = stability_constants(params, inst, delta);
  }
  if (cfg.wants("json")) write_json(cfg, "constants.json", io::to_json(k));
  if (cfg.wants("csv")) write_csv(cfg, "constants.csv", io::constants_csv(k));
  for (const auto& row : constant_table(k)) {
    out << std::left << std::setw(16) << row.name << " " << std::setw(24)
        << io::format_number(row.value) << " " << row.formula_id << "\n";
  }
  return kOk;
}

int cmd_example62(const RunConfig& cfg, std::ostream& out) {
  std::vector<double> etas{0.0, 0.1, 0.5};
  if (cfg.config.contains("eta")) {
    etas.clear();
    for (const auto& e : cfg.config.at("eta")) etas.push_back(io::number(e, "eta"));
  }
  const int grid_n = cfg.config.value("grid_n", 801);
  const SolveOptions sopts = solver_options(cfg);
  const SegmentSet reference = example62_support(0.0);
  Json results = Json::array();
  for (double eta : etas) {
    const Example62Instance ex = example62(eta, grid_n);
    const Instance& inst = ex.instance;
    const Potentials pot = solve_dual(inst, sopts);
    if (!pot.converged) throw NotConverged("example solve did not converge at eta " + io::format_number(eta));
    const Coupling coup = extract_coupling(pot, inst.p, inst.q, inst.cost);
    double h_err = 0.0;
    for (int i = 0; i < inst.p.size(); ++i) {
      for (int j = 0; j < 2; ++j) {
        h_err = std::max(h_err, std::abs(pot.h(i, j) - ex.h(inst.p.point(i)[0], j)));
      }
    }
    const PointSet sup = support_points(extract_support(coup), inst.p, inst.q);
    const Potentials exact = ex.closed_form_potentials();
    const Coupling exact_coup = extract_coupling(exact, inst.p, inst.q, inst.cost, 0.0);
    Json r{{"eta", eta},
           {"grid_n", grid_n},
           {"delta_eta", ex.delta_eta},
           {"analytic_foc_residual", analytic_foc_residual(ex)},
           {"analytic_hausdorff_to_eta0", hausdorff_distance(ex.analytic_support(), reference)},
           {"numeric_h_error", h_err},
           {"numeric_support_vs_analytic", hausdorff_distance(as_segments(sup), ex.analytic_support())},
           {"max_cell_width", ex.max_cell_width},
           {"sweeps", pot.sweeps},
           {"a_hat_closed_form",
            estimate_nondegeneracy(exact, exact_coup, inst.p, inst.q, inst.cost)}};
    if (cfg.wants("json")) {
      std::ostringstream name;
      name << "example62_eta_" << io::format_number(eta) << ".json";
      write_json(cfg, name.str(), io::solution_json(inst, pot, coup));
    }
    out << "eta " << io::format_number(eta) << ": residual "
        << r.at("analytic_foc_residual").get<double>() << ", dH to eta=0 "
        << r.at("analytic_hausdorff_to_eta0").get<double>() << ", h error " << h_err << "\n";
    results.push_back(std::move(r));
  }
  if (cfg.wants("json")) write_json(cfg, "example62.json", {{"results", results}});
  if (cfg.wants("csv")) {
    std::string csv = "eta,analytic_foc_residual,analytic_hausdorff_to_eta0,numeric_h_error\n";
    for (const auto& r : results) {
      csv += io::format_number(r.at("eta").get<double>()) + "," +
             io::format_number(r.at("analytic_foc_residual").get<double>()) + "," +
             io::format_number(r.at("analytic_hausdorff_to_eta0").get<double>()) + "," +
             io::format_number(r.at("numeric_h_error").get<double>()) + "\n";
    }
    write_csv(cfg, "example62.csv", csv);
  }
  return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const ClassParams params = load_class_params(cfg);
  HarnessOptions opts = harness_options(cfg);
  if (cfg.config.contains("constants_override")) {
    const Json& over = cfg.config.at("constants_override");
    // Partial overrides start from the uniform constants.
    Json merged = io::to_json(uniform_constants(params));
    for (auto it = over.begin(); it != over.end(); ++it) {
      if (!merged.contains(it.key())) throw InvalidInput("constants_override", "unknown constant '" + it.key() + "'");
      merged[it.key()] = it.value();
    }
    opts.constants_override = io::constants_from_json(merged);
  }
  const Json& pairs_j = require(cfg.config, "pairs");
  if (!pairs_j.is_array() || pairs_j.empty()) throw InvalidInput("pairs", "expected a nonempty array");
  std::vector<std::string> names;
  std::vector<std::pair<Instance, Instance>> pairs;
  for (size_t k = 0; k < pairs_j.size(); ++k) {
    const Json& pj = pairs_j[k];
    names.push_back(pj.value("name", "pair" + std::to_string(k)));
    pairs.emplace_back(load_instance(require(pj, "a"), cfg.base_dir),
                       load_instance(require(pj, "b"), cfg.base_dir));
  }
  SolveCache cache;
  const auto reports = run_pairs(pairs, params, opts, cfg.jobs, &cache);
  std::string csv = checks_csv_header();
  std::string failing;
  for (size_t k = 0; k < reports.size(); ++k) {
    if (cfg.wants("json")) write_json(cfg, "reports/" + names[k] + ".json", io::to_json(reports[k]));
    csv += checks_csv_rows(names[k], reports[k]);
    const std::string v = violations(reports[k]);
    out << names[k] << ": " << (v.empty() ? "pass" : "FAIL (" + v + ")") << "\n";
    if (!v.empty()) failing += names[k] + ": " + v + "; ";
  }
  if (cfg.wants("csv")) write_csv(cfg, "summary.csv", csv);
  if (!failing.empty()) throw BoundViolation(failing);
  return kOk;
}

std::set<std::string> parse_formats(const std::string& text) {
  std::set<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item != "json" && item != "csv") throw InvalidInput("format", "unknown format '" + item + "'");
    out.insert(item);
  }
  if (out.empty()) throw InvalidInput("format", "no format selected");
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quadratically regularized optimal transport: solver and stability checks", "qotlab"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string formats = "json";
  for (const char* name : {"solve", "perturb", "constants", "example62", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", cfg.config_path, "JSON configuration file");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--jobs", cfg.jobs, "pairs solved concurrently");
    sub->add_option("--tol", cfg.tol, "first-order-condition tolerance");
    sub->add_option("--format", formats, "comma-separated subset of json,csv");
    sub->callback([&cfg, name] { cfg.command = name; });
  }
  std::vector<const char*> argv{"qotlab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    cfg.formats = parse_formats(formats);
    if (cfg.jobs < 1) throw InvalidInput("jobs", "must be at least 1");
    if (cfg.tol < 0.0) throw InvalidInput("tol", "must be positive");
    if (cfg.config_path.empty()) {
      if (cfg.command != "example62") throw InvalidInput("config", "--config is required");
      cfg.config = Json::object();
    } else {
      cfg.config = io::read_json_file(cfg.config_path);
      cfg.base_dir = cfg.config_path.parent_path();
    }
    if (cfg.command == "solve") return cmd_solve(cfg, out);
    if (cfg.command == "perturb") return cmd_perturb(cfg, out);
    if (cfg.command == "constants") return cmd_constants(cfg, out);
    if (cfg.command == "example62") return cmd_example62(cfg, out);
    return cmd_verify(cfg, out);
  } catch (const InvalidInput& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const Json::exception& e) {
    err << "input error: config: " << e.what() << "\n";
    return kInputError;
  } catch (const NotConverged& e) {
    err << "not converged: " << e.what() << "\n";
    return kNotConverged;
  } catch (const BoundViolation& e) {
    err << "bound violated: " << e.what() << "\n";
    return kBoundViolation;
  } catch (const fs::filesystem_error& e) {
    err << "input error: out: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace qot::cli

#include <qotlab/io.hpp>

#include <qotlab/error.hpp>

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>

namespace qot::io {

namespace {

void write(const Json& j, std::string& out, int depth) {
  const std::string pad(static_cast<size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<size_t>(2 * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        write(it.value(), out, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(),
                                     [](const Json& e) { return e.is_structured(); });
      if (flat) {
        out += "[";
        for (size_t k = 0; k < j.size(); ++k) {
          if (k) out += ", ";
          write(j[k], out, depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (size_t k = 0; k < j.size(); ++k) {
        if (k) out += ",\n";
        out += pad;
        write(j[k], out, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v)) {
        out += format_number(v);
      } else {
        out += std::isnan(v) ? "\"nan\"" : (v > 0 ? "\"inf\"" : "\"-inf\"");
      }
      return;
    }
    default:
      out += j.dump();
  }
}

const Json& member(const Json& j, const std::string& key, const std::string& field) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(field, "missing");
  return j.at(key);
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

Json vector_json(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

Vector vector_from(const Json& j, const std::string& field) {
  if (!j.is_array()) throw InvalidInput(field, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (size_t k = 0; k < j.size(); ++k) v[static_cast<Eigen::Index>(k)] = number(j[k], field);
  return v;
}

Matrix matrix_from(const Json& j, const std::string& field, Eigen::Index cols) {
  if (!j.is_array()) throw InvalidInput(field, "expected an array of rows");
  Matrix m(static_cast<Eigen::Index>(j.size()), cols);
  for (size_t i = 0; i < j.size(); ++i) {
    const Vector row = vector_from(j[i], field);
    if (row.size() != cols) throw InvalidInput(field, "rows have inconsistent length");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

Json check_json(const CheckResult& c) {
  return {{"id", c.id}, {"hypothesis", c.hypothesis}, {"lhs", c.lhs},
          {"rhs", c.rhs}, {"ratio", c.ratio},           {"pass", c.pass}};
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  // Keep floats recognizable as floats.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string dump(const Json& j) {
  std::string out;
  write(j, out, 0);
  out += "\n";
  return out;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("config", "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidInput("config", path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("out", "cannot write " + path.string());
  out << text;
}

double number(const Json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw InvalidInput(field, "expected a number");
}

Json to_json(const DiscreteMeasure& m) {
  Json j{{"dim", m.dim()}, {"points", matrix_json(m.points())}, {"weights", vector_json(m.weights())}};
  if (m.ambient()) {
    j["ambient"] = {{"lower", vector_json(m.ambient()->lower)},
                    {"upper", vector_json(m.ambient()->upper)}};
  }
  return j;
}

DiscreteMeasure measure_from_json(const Json& j, const std::string& field) {
  if (!j.is_object()) throw InvalidInput(field, "expected an object");
  const Json& dim_j = member(j, "dim", "dim");
  if (!dim_j.is_number_integer() || dim_j.get<long>() < 1) {
    throw InvalidInput("dim", "expected a positive integer");
  }
  const auto dim = static_cast<Eigen::Index>(dim_j.get<long>());
  const Matrix pts = matrix_from(member(j, "points", "points"), "points", dim);
  Vector w = vector_from(member(j, "weights", "weights"), "weights");
  if (w.size() != pts.rows()) throw InvalidInput("weights", "count differs from points");
  std::optional<Box> ambient;
  if (j.contains("ambient")) {
    const Json& a = j.at("ambient");
    ambient = Box{vector_from(member(a, "lower", "ambient.lower"), "ambient.lower"),
                  vector_from(member(a, "upper", "ambient.upper"), "ambient.upper")};
    if (ambient->lower.size() != dim || ambient->upper.size() != dim) {
      throw InvalidInput("ambient", "box has the wrong dimension");
    }
  }
  return DiscreteMeasure(PointSet(pts), std::move(w), ambient);
}

Json to_json(const CostSpec& c) {
  // Analytic kinds are stored as base function plus scale; tables hold the
  // final values.
  const bool table = c.kind() == CostKind::ExplicitMatrix;
  const double s = table ? 1.0 : c.scale();
  Json j{{"kind", to_string(c.kind())}, {"lipschitz", c.lipschitz() / s}};
  if (!table) j["scale"] = s;
  if (c.declared_bound()) j["bound"] = *c.declared_bound() / s;
  if (table) j["matrix"] = matrix_json(c.matrix());
  return j;
}

CostSpec cost_from_json(const Json& j, const DiscreteMeasure& p, const DiscreteMeasure& q) {
  if (!j.is_object()) throw InvalidInput("cost", "expected an object");
  const Json& kind_j = member(j, "kind", "cost.kind");
  if (!kind_j.is_string()) throw InvalidInput("cost.kind", "expected a string");
  const CostKind kind = cost_kind_from_string(kind_j.get<std::string>());
  std::optional<double> bound;
  if (j.contains("bound")) bound = number(j.at("bound"), "cost.bound");
  const double scale = j.contains("scale") ? number(j.at("scale"), "cost.scale") : 1.0;
  CostSpec out = [&] {
    switch (kind) {
      case CostKind::SqEuclidean:
        return CostSpec::sq_euclidean(p, q, number(member(j, "lipschitz", "cost.lipschitz"),
                                                   "cost.lipschitz"),
                                      bound);
      case CostKind::ExplicitMatrix:
        return CostSpec::explicit_matrix(
            p, q, matrix_from(member(j, "matrix", "cost.matrix"), "cost.matrix", q.size()),
            number(member(j, "lipschitz", "cost.lipschitz"), "cost.lipschitz"), bound);
      case CostKind::Example62Analytic:
        return CostSpec::example62(p, q);
    }
    throw InvalidInput("cost.kind", "unsupported");
  }();
  if (scale != 1.0) {
    // A stored scale applies to the base function; tabulated matrices are
    // already scaled and keep their values.
    if (kind == CostKind::ExplicitMatrix) throw InvalidInput("cost.scale", "matrix costs store final values");
    out = out.scaled(scale);
  }
  return out;
}

Json to_json(const Instance& inst) {
  return {{"p", to_json(inst.p)}, {"q", to_json(inst.q)}, {"cost", to_json(inst.cost)},
          {"eps", inst.eps}};
}

Instance instance_from_json(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw InvalidInput("instance", "expected an object");
  auto load = [&](const std::string& key) {
    const Json& m = member(j, key, key);
    if (m.is_string()) {
      return measure_from_json(read_json_file(base_dir / m.get<std::string>()), key);
    }
    return measure_from_json(m, key);
  };
  DiscreteMeasure p = load("p");
  DiscreteMeasure q = load("q");
  const Json& cost_j = member(j, "cost", "cost");
  CostSpec cost = cost_j.is_string()
                      ? cost_from_json(read_json_file(base_dir / cost_j.get<std::string>()), p, q)
                      : cost_from_json(cost_j, p, q);
  const double eps = number(member(j, "eps", "eps"), "eps");
  Instance inst{std::move(p), std::move(q), std::move(cost), eps};
  validate_instance(inst);
  return inst;
}

Json to_json(const ClassParams& params) {
  return {{"eps_lower", params.eps_lower},
          {"diam_bound", params.diam_bound},
          {"lipschitz", params.lipschitz},
          {"density_lower", params.density_lower},
          {"density_upper", params.density_upper},
          {"cone_const", params.cone_const},
          {"ball_mass_lower", params.ball_mass_lower},
          {"dim", params.dim}};
}

ClassParams class_params_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInput("class_params", "expected an object");
  auto get = [&](const char* key) { return number(member(j, key, key), key); };
  ClassParams params;
  params.eps_lower = get("eps_lower");
  params.diam_bound = get("diam_bound");
  params.lipschitz = get("lipschitz");
  params.density_lower = get("density_lower");
  params.density_upper = get("density_upper");
  params.cone_const = get("cone_const");
  params.ball_mass_lower = get("ball_mass_lower");
  const Json& dim = member(j, "dim", "dim");
  if (!dim.is_number_integer()) throw InvalidInput("dim", "expected an integer");
  params.dim = dim.get<int>();
  validate_class_params(params);
  return params;
}

Json to_json(const StabilityConstants& k) {
  Json j = Json::object();
  for (const auto& row : constant_table(k)) j[row.name] = row.value;
  return j;
}

StabilityConstants constants_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInput("constants", "expected an object");
  StabilityConstants k;
  const std::vector<std::pair<const char*, double*>> fields{
      {"gamma_eps", &k.gamma_eps},       {"vartheta_delta", &k.vartheta_delta},
      {"qhat_eps", &k.qhat_eps},         {"kappahat_eps", &k.kappahat_eps},
      {"etahat_eps", &k.etahat_eps},     {"gamma_bar", &k.gamma_bar},
      {"vartheta_lower", &k.vartheta_lower}, {"eta_bar", &k.eta_bar},
      {"kappahat_lower", &k.kappahat_lower}, {"eta_bar_star", &k.eta_bar_star},
      {"c_bar", &k.c_bar}};
  for (const auto& [name, slot] : fields) *slot = number(member(j, name, name), name);
  return k;
}

std::string constants_csv(const StabilityConstants& k) {
  std::string out = "name,value,formula-id\n";
  for (const auto& row : constant_table(k)) {
    out += row.name + "," + format_number(row.value) + "," + row.formula_id + "\n";
  }
  return out;
}

Json to_json(const DeltaQuantities& d) {
  return {{"w1_p", d.w1_p},
          {"w1_q", d.w1_q},
          {"delta_w", d.delta_w},
          {"delta", d.delta},
          {"delta_prime", d.delta_prime},
          {"delta_bar", d.delta_bar},
          {"delta_star", d.delta_star},
          {"delta_tv", d.delta_tv},
          {"delta_omega", d.delta_omega},
          {"small_delta_star", d.small_delta_star},
          {"a_const", d.a_const},
          {"a_prime", d.a_prime},
          {"d_star", d.d_star},
          {"delta_hat", d.delta_hat},
          {"delta_hat_first", d.delta_hat_first},
          {"delta_hat_second", d.delta_hat_second},
          {"delta_hat_inf", d.delta_hat_inf},
          {"delta_hat_inf_first", d.delta_hat_inf_first},
          {"delta_hat_inf_second", d.delta_hat_inf_second},
          {"cost_diff_l2_mu", d.cost_diff_l2_mu},
          {"cost_diff_l2_mu_prime", d.cost_diff_l2_mu_prime},
          {"cost_diff_l2_mu_bar", d.cost_diff_l2_mu_bar},
          {"cost_diff_linf", d.cost_diff_linf},
          {"cost_linf_gamma", d.cost_linf_gamma},
          {"cost_prime_linf_gamma", d.cost_prime_linf_gamma},
          {"eps_diff", d.eps_diff}};
}

Json to_json(const AuditReport& r) {
  Json items = Json::array();
  for (const auto& it : r.items) {
    items.push_back({{"id", it.id},
                     {"status", to_string(it.status)},
                     {"observed", it.observed},
                     {"required", it.required},
                     {"detail", it.detail}});
  }
  return {{"items", items}, {"warning", r.warning}, {"passed", r.passed()}};
}

Json to_json(const StabilityReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(check_json(c));
  const auto& nd = r.nondegeneracy;
  return {{"deltas", to_json(r.deltas)},
          {"constants", to_json(r.constants)},
          {"checks", checks},
          {"nondegeneracy",
           {{"a_hat", nd.a_hat},
            {"a_hat_prime", nd.a_hat_prime},
            {"a_used", nd.a_used},
            {"a_theory", nd.a_theory},
            {"applicable", nd.applicable}}},
          {"gauge_shift", r.gauge_shift},
          {"support_hausdorff", r.support_hausdorff},
          {"audit", {{"first", to_json(r.audit_first)}, {"second", to_json(r.audit_second)}}},
          {"notes", r.notes},
          {"passed", r.passed()}};
}

Json solution_json(const Instance& inst, const Potentials& pot, const Coupling& coup) {
  Json j;
  j["potentials"] = {{"f", vector_json(pot.f)},
                     {"g", vector_json(pot.g)},
                     {"eps", pot.eps},
                     {"gauge", pot.gauge == Gauge::MeanZeroSecond ? "mean_zero_second" : "none"},
                     {"shift", pot.shift}};
  const long cells = static_cast<long>(coup.zeta.rows()) * coup.zeta.cols();
  if (cells <= 1000000) {
    j["density"] = {{"format", "dense"}, {"zeta", matrix_json(coup.zeta)}};
  } else {
    Json is = Json::array();
    Json js = Json::array();
    Json zs = Json::array();
    for (Eigen::Index i = 0; i < coup.zeta.rows(); ++i) {
      for (Eigen::Index k = 0; k < coup.zeta.cols(); ++k) {
        if (coup.zeta(i, k) > 0.0) {
          is.push_back(i);
          js.push_back(k);
          zs.push_back(coup.zeta(i, k));
        }
      }
    }
    j["density"] = {{"format", "sparse"}, {"i", is}, {"j", js}, {"zeta", zs}};
  }
  Json support = Json::array();
  for (const auto& [i, k] : extract_support(coup).cells) support.push_back({i, k});
  j["support"] = support;
  j["support_tol"] = coup.support_tol;
  j["dual_objective"] = dual_objective(pot, inst.p, inst.q, inst.cost);
  j["primal_value"] = primal_value(coup, inst.cost, pot.eps);
  j["duality_gap"] = duality_gap(coup, pot, inst.p, inst.q, inst.cost);
  j["marginal_violation"] = marginal_violation(coup, inst.p, inst.q);
  j["convergence"] = {{"sweeps", pot.sweeps},
                      {"foc_residual", pot.foc_residual_inf},
                      {"converged", pot.converged},
                      {"objective_trace", vector_json(pot.objective_trace)},
                      {"residual_trace", vector_json(pot.residual_trace)}};
  return j;
}

std::string curve_csv(const std::vector<CurveRow>& rows) {
  std::string out = "t,delta_star,linf_diff,ratio,hypothesis\n";
  for (const auto& r : rows) {
    out += format_number(r.t) + "," + format_number(r.delta_star) + "," +
           format_number(r.linf_diff) + "," + format_number(r.ratio) + "," +
           (r.hypothesis ? "true" : "false") + "\n";
  }
  return out;
}

}  // namespace qot::io

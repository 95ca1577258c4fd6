#include <qotlab/cost.hpp>

#include <qotlab/error.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace qot {

namespace {

using Coordinates = std::vector<double>;

Coordinates coords(const Eigen::Ref<const Vector>& x) {
  return Coordinates(x.data(), x.data() + x.size());
}

std::map<Coordinates, int> index_atoms(const DiscreteMeasure& m) {
  std::map<Coordinates, int> out;
  for (int i = 0; i < m.size(); ++i) out.emplace(coords(m.point(i)), i);
  return out;
}

double sq_euclidean(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
  return 0.5 * (x - y).squaredNorm();
}

double example62_cost(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
  const double u = example62_profile(x[0]);
  const double t = y[0];
  return (1.0 - t) * u + t * (2.0 - u);
}

}  // namespace

struct CostSpec::Table {
  std::map<Coordinates, int> rows;
  std::map<Coordinates, int> cols;
  Matrix base;
};

std::string to_string(CostKind kind) {
  switch (kind) {
    case CostKind::SqEuclidean:
      return "sq_euclidean";
    case CostKind::ExplicitMatrix:
      return "matrix";
    case CostKind::Example62Analytic:
      return "example62";
  }
  return "unknown";
}

CostKind cost_kind_from_string(const std::string& name) {
  if (name == "sq_euclidean") return CostKind::SqEuclidean;
  if (name == "matrix") return CostKind::ExplicitMatrix;
  if (name == "example62") return CostKind::Example62Analytic;
  throw InvalidInput("cost.kind", "unknown cost kind '" + name + "'");
}

double example62_profile(double x) {
  if (x <= 0.25) return 0.0;
  if (x < 0.5) return 32.0 / 5.0 * (x - 0.25);
  return 8.0 / 5.0;
}

CostSpec CostSpec::sq_euclidean(const DiscreteMeasure& p, const DiscreteMeasure& q,
                                double lipschitz, std::optional<double> bound) {
  if (p.dim() != q.dim()) throw InvalidInput("dim", "marginals live in different dimensions");
  if (!(lipschitz > 0.0)) throw InvalidInput("cost.lipschitz", "must be positive");
  CostSpec c;
  c.kind_ = CostKind::SqEuclidean;
  c.lipschitz_ = lipschitz;
  c.bound_ = bound;
  c.matrix_.resize(p.size(), q.size());
  for (int i = 0; i < p.size(); ++i) {
    for (int j = 0; j < q.size(); ++j) c.matrix_(i, j) = qot::sq_euclidean(p.point(i), q.point(j));
  }
  return c;
}

CostSpec CostSpec::explicit_matrix(const DiscreteMeasure& p, const DiscreteMeasure& q,
                                   Matrix values, double lipschitz,
                                   std::optional<double> bound) {
  if (values.rows() != p.size() || values.cols() != q.size()) {
    throw InvalidInput("cost.matrix", "shape does not match the marginals");
  }
  if (!values.allFinite()) throw InvalidInput("cost.matrix", "non-finite entry");
  if (!(lipschitz > 0.0)) throw InvalidInput("cost.lipschitz", "must be positive");
  CostSpec c;
  c.kind_ = CostKind::ExplicitMatrix;
  c.lipschitz_ = lipschitz;
  c.bound_ = bound;
  auto table = std::make_shared<Table>();
  table->rows = index_atoms(p);
  table->cols = index_atoms(q);
  table->base = values;
  c.table_ = std::move(table);
  c.matrix_ = std::move(values);
  return c;
}

CostSpec CostSpec::example62(const DiscreteMeasure& p, const DiscreteMeasure& q) {
  if (p.dim() != 1 || q.dim() != 1) throw InvalidInput("dim", "example cost is one-dimensional");
  CostSpec c;
  c.kind_ = CostKind::Example62Analytic;
  c.lipschitz_ = 32.0 / 5.0;
  c.bound_ = 2.0;
  c.matrix_.resize(p.size(), q.size());
  for (int i = 0; i < p.size(); ++i) {
    for (int j = 0; j < q.size(); ++j) c.matrix_(i, j) = example62_cost(p.point(i), q.point(j));
  }
  return c;
}

double CostSpec::bound() const {
  if (bound_) return *bound_;
  return matrix_.size() == 0 ? 0.0 : matrix_.cwiseAbs().maxCoeff();
}

double CostSpec::operator()(const Eigen::Ref<const Vector>& x,
                            const Eigen::Ref<const Vector>& y) const {
  switch (kind_) {
    case CostKind::SqEuclidean:
      return scale_ * qot::sq_euclidean(x, y);
    case CostKind::Example62Analytic:
      return scale_ * example62_cost(x, y);
    case CostKind::ExplicitMatrix: {
      const auto r = table_->rows.find(coords(x));
      const auto s = table_->cols.find(coords(y));
      if (r == table_->rows.end() || s == table_->cols.end()) {
        throw InvalidInput("cost", "tabulated cost evaluated off its atom grid");
      }
      return scale_ * table_->base(r->second, s->second);
    }
  }
  return 0.0;
}

CostSpec CostSpec::rebind(const DiscreteMeasure& p, const DiscreteMeasure& q) const {
  CostSpec c = *this;
  c.matrix_.resize(p.size(), q.size());
  for (int i = 0; i < p.size(); ++i) {
    for (int j = 0; j < q.size(); ++j) c.matrix_(i, j) = (*this)(p.point(i), q.point(j));
  }
  return c;
}

CostSpec CostSpec::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidInput("cost.scale", "scale factor must be positive");
  CostSpec c = *this;
  c.scale_ *= factor;
  c.matrix_ *= factor;
  c.lipschitz_ *= factor;
  if (c.bound_) *c.bound_ *= factor;
  return c;
}

double observed_lipschitz(const CostSpec& cost, const DiscreteMeasure& p,
                          const DiscreteMeasure& q, long max_pairs) {
  const long cells = static_cast<long>(p.size()) * q.size();
  const Matrix& c = cost.matrix();
  auto ratio = [&](long a, long b) {
    const int i = static_cast<int>(a / q.size());
    const int j = static_cast<int>(a % q.size());
    const int k = static_cast<int>(b / q.size());
    const int l = static_cast<int>(b % q.size());
    const double dist = std::sqrt((p.points().row(i) - p.points().row(k)).squaredNorm() +
                                  (q.points().row(j) - q.points().row(l)).squaredNorm());
    return dist > 0.0 ? std::abs(c(i, j) - c(k, l)) / dist : 0.0;
  };
  double worst = 0.0;
  if (cells * (cells - 1) / 2 <= max_pairs) {
    for (long a = 0; a < cells; ++a) {
      for (long b = a + 1; b < cells; ++b) worst = std::max(worst, ratio(a, b));
    }
    return worst;
  }
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<long> pick(0, cells - 1);
  for (long s = 0; s < max_pairs; ++s) worst = std::max(worst, ratio(pick(rng), pick(rng)));
  return worst;
}

void validate_instance(const Instance& inst) {
  if (!(inst.eps > 0.0) || !std::isfinite(inst.eps)) {
    throw InvalidInput("eps", "regularization parameter must be positive");
  }
  if (inst.p.dim() != inst.q.dim()) throw InvalidInput("dim", "marginal dimensions differ");
  if (inst.cost.matrix().rows() != inst.p.size() || inst.cost.matrix().cols() != inst.q.size()) {
    throw InvalidInput("cost", "cost matrix shape does not match the marginals");
  }
}

}  // namespace qot

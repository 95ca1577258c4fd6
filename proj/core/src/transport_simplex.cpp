#include <qotlab/transport_simplex.hpp>

#include <qotlab/error.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace qot {

namespace {

// Spanning tree over n row nodes [0, n) and m column nodes [n, n + m); each
// basic cell is an edge.
class BasisTree {
 public:
  BasisTree(int rows, int cols) : rows_(rows), adj_(static_cast<size_t>(rows + cols)) {}

  void add(int slot, const TransportCell& c) {
    adj_[static_cast<size_t>(c.row)].push_back(slot);
    adj_[static_cast<size_t>(rows_ + c.col)].push_back(slot);
  }

  void remove(int slot, const TransportCell& c) {
    auto drop = [slot](std::vector<int>& v) { v.erase(std::find(v.begin(), v.end(), slot)); };
    drop(adj_[static_cast<size_t>(c.row)]);
    drop(adj_[static_cast<size_t>(rows_ + c.col)]);
  }

  int other(const TransportCell& c, int node) const {
    return node == c.row ? rows_ + c.col : c.row;
  }

  // Dual potentials with u[0] = 0 and u_i + v_j = c_ij on every basic cell.
  void potentials(const std::vector<TransportCell>& cells, const Matrix& cost, Vector& u,
                  Vector& v) const {
    std::vector<char> seen(adj_.size(), 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    u[0] = 0.0;
    while (!queue.empty()) {
      const int node = queue.front();
      queue.pop_front();
      for (int slot : adj_[static_cast<size_t>(node)]) {
        const auto& c = cells[static_cast<size_t>(slot)];
        const int next = other(c, node);
        if (seen[static_cast<size_t>(next)]) continue;
        seen[static_cast<size_t>(next)] = 1;
        if (next >= rows_) {
          v[c.col] = cost(c.row, c.col) - u[c.row];
        } else {
          u[c.row] = cost(c.row, c.col) - v[c.col];
        }
        queue.push_back(next);
      }
    }
  }

  // Basis slots on the tree path from `from` to `to`, ordered from `from`.
  std::vector<int> path(const std::vector<TransportCell>& cells, int from, int to) const {
    std::vector<int> parent_slot(adj_.size(), -1);
    std::vector<char> seen(adj_.size(), 0);
    std::deque<int> queue{from};
    seen[static_cast<size_t>(from)] = 1;
    while (!queue.empty()) {
      const int node = queue.front();
      queue.pop_front();
      if (node == to) break;
      for (int slot : adj_[static_cast<size_t>(node)]) {
        const int next = other(cells[static_cast<size_t>(slot)], node);
        if (seen[static_cast<size_t>(next)]) continue;
        seen[static_cast<size_t>(next)] = 1;
        parent_slot[static_cast<size_t>(next)] = slot;
        queue.push_back(next);
      }
    }
    std::vector<int> out;
    for (int node = to; node != from;) {
      const int slot = parent_slot[static_cast<size_t>(node)];
      out.push_back(slot);
      node = other(cells[static_cast<size_t>(slot)], node);
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  int rows_;
  std::vector<std::vector<int>> adj_;
};

}  // namespace

TransportSolution solve_transport(const Vector& supply, const Vector& demand,
                                  const Matrix& cost) {
  const int n = static_cast<int>(supply.size());
  const int m = static_cast<int>(demand.size());
  if (n == 0 || m == 0) throw InvalidInput("weights", "empty marginal in transport problem");
  if (cost.rows() != n || cost.cols() != m) {
    throw InvalidInput("cost", "cost matrix shape does not match marginals");
  }
  const double total = supply.sum();
  if (std::abs(total - demand.sum()) > 1e-9 * std::max(1.0, total)) {
    throw InvalidInput("weights", "supply and demand totals differ");
  }

  // North-west corner start: a staircase of exactly n + m - 1 cells.
  std::vector<TransportCell> cells;
  cells.reserve(static_cast<size_t>(n + m - 1));
  {
    Vector ra = supply;
    Vector rb = demand;
    int i = 0;
    int j = 0;
    for (;;) {
      const double x = std::max(0.0, std::min(ra[i], rb[j]));
      cells.push_back({i, j, x});
      ra[i] -= x;
      rb[j] -= x;
      if (i == n - 1 && j == m - 1) break;
      if (j == m - 1 || (i < n - 1 && ra[i] <= rb[j])) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  BasisTree tree(n, m);
  for (size_t s = 0; s < cells.size(); ++s) tree.add(static_cast<int>(s), cells[s]);

  const double scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
  const double tol = 1e-13 * scale;
  const long max_pivots = 1000000L + 100L * static_cast<long>(n) * m;

  Vector u(n);
  Vector v(m);
  TransportSolution out;
  for (;;) {
    tree.potentials(cells, cost, u, v);
    double best = -tol;
    int bi = -1;
    int bj = -1;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        const double rc = cost(i, j) - u[i] - v[j];
        if (rc < best) {
          best = rc;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi < 0) break;
    if (++out.pivots > max_pivots) throw NotConverged("transport simplex pivot limit reached");

    // Cycle: entering cell (+), then alternating (-, +, ...) along the tree
    // path from column bj back to row bi.
    const auto cyc = tree.path(cells, n + bj, bi);
    double theta = std::numeric_limits<double>::infinity();
    int leaving = -1;
    for (size_t k = 0; k < cyc.size(); k += 2) {
      const double f = cells[static_cast<size_t>(cyc[k])].flow;
      if (f < theta) {
        theta = f;
        leaving = cyc[k];
      }
    }
    for (size_t k = 0; k < cyc.size(); ++k) {
      auto& c = cells[static_cast<size_t>(cyc[k])];
      c.flow = (k % 2 == 0) ? std::max(0.0, c.flow - theta) : c.flow + theta;
    }
    tree.remove(leaving, cells[static_cast<size_t>(leaving)]);
    cells[static_cast<size_t>(leaving)] = {bi, bj, theta};
    tree.add(leaving, cells[static_cast<size_t>(leaving)]);
  }

  for (const auto& c : cells) out.cost += c.flow * cost(c.row, c.col);
  out.plan = std::move(cells);
  return out;
}

}  // namespace qot

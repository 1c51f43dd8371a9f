#include "krnorm/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>

#include "krnorm/dense_lp.hpp"
#include "krnorm/errors.hpp"
#include "krnorm/kernels.hpp"

namespace krnorm::transport {
namespace {

void validate(const Problem& p) {
  if (p.cost.size() != p.supply.size() * p.demand.size())
    throw ArgumentError("transport: cost matrix size mismatch");
  for (double s : p.supply) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ArgumentError("transport: bad supply");
  }
  for (double d : p.demand) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw ArgumentError("transport: bad demand");
  }
}

// Matrix-minimum rule with one line closed per allocation, so the result is
// a spanning tree of rows + cols - 1 cells.
std::vector<Cell> initial_basis(const Problem& p) {
  const std::size_t m = p.supply.size(), n = p.demand.size();
  std::vector<std::size_t> order(m * n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return p.cost[a] < p.cost[b];
  });
  std::vector<double> ra = p.supply, rb = p.demand;
  std::vector<bool> row_open(m, true), col_open(n, true);
  std::size_t open_rows = m, open_cols = n;
  std::vector<Cell> basis;
  basis.reserve(m + n - 1);
  for (std::size_t idx : order) {
    const std::size_t i = idx / n, j = idx % n;
    if (!row_open[i] || !col_open[j]) continue;
    const double x = std::min(ra[i], rb[j]);
    basis.push_back({i, j, x});
    ra[i] -= x;
    rb[j] -= x;
    if (open_rows == 1 && open_cols == 1) break;
    if (open_rows > 1 && (ra[i] <= rb[j] || open_cols == 1)) {
      row_open[i] = false;
      --open_rows;
    } else {
      col_open[j] = false;
      --open_cols;
    }
  }
  return basis;
}

struct Tree {
  std::vector<double> u, v;
  std::vector<std::size_t> parent;       // node
  std::vector<std::size_t> parent_cell;  // basis index
  std::vector<std::size_t> depth;
};

// Nodes 0..m-1 are rows, m..m+n-1 columns. Root is row 0 with u = 0.
void compute_tree(const Problem& p, const std::vector<Cell>& basis, Tree& t) {
  const std::size_t m = p.supply.size(), n = p.demand.size(), nodes = m + n;
  std::vector<std::vector<std::size_t>> adj(nodes);
  for (std::size_t e = 0; e < basis.size(); ++e) {
    adj[basis[e].row].push_back(e);
    adj[m + basis[e].col].push_back(e);
  }
  t.u.assign(m, 0.0);
  t.v.assign(n, 0.0);
  t.parent.assign(nodes, nodes);
  t.parent_cell.assign(nodes, basis.size());
  t.depth.assign(nodes, 0);
  std::vector<bool> seen(nodes, false);
  std::vector<std::size_t> queue{0};
  seen[0] = true;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t a = queue[head];
    for (std::size_t e : adj[a]) {
      const Cell& c = basis[e];
      const bool from_row = a < m;
      const std::size_t b = from_row ? m + c.col : c.row;
      if (seen[b]) continue;
      seen[b] = true;
      const double cij = p.cost[c.row * n + c.col];
      if (from_row) {
        t.v[c.col] = cij - t.u[c.row];
      } else {
        t.u[c.row] = cij - t.v[c.col];
      }
      t.parent[b] = a;
      t.parent_cell[b] = e;
      t.depth[b] = t.depth[a] + 1;
      queue.push_back(b);
    }
  }
  if (queue.size() != nodes) throw SolverError("transport: basis is not a spanning tree");
}

}  // namespace

Solution solve(const Problem& p, const Options& opt) {
  validate(p);
  const std::size_t m = p.supply.size(), n = p.demand.size();
  Solution sol;
  if (m == 0 || n == 0) return sol;

  sol.basis = initial_basis(p);
  double max_cost = 0.0;
  for (double c : p.cost) max_cost = std::max(max_cost, std::abs(c));
  const double eps = opt.pivot_tol * (1.0 + max_cost);
  const std::size_t cap =
      opt.max_iterations ? opt.max_iterations : 50 * (m + n) + 1000;

  Tree t;
  std::vector<std::size_t> up_i, up_j;
  while (true) {
    compute_tree(p, sol.basis, t);

    double best = -eps;
    std::size_t ei = m, ej = n;
    for (std::size_t i = 0; i < m; ++i) {
      const kernels::ArgMin r = kernels::min_reduced_cost(
          std::span<const double>(p.cost.data() + i * n, n), t.u[i], t.v);
      if (r.value < best) {
        best = r.value;
        ei = i;
        ej = r.index;
      }
    }
    if (ei == m) break;
    if (sol.iterations >= cap) {
      sol.converged = false;
      break;
    }
    ++sol.iterations;

    // Tree path from row ei to column ej, as basis indices in path order.
    up_i.clear();
    up_j.clear();
    std::size_t a = ei, b = m + ej;
    while (t.depth[a] > t.depth[b]) {
      up_i.push_back(t.parent_cell[a]);
      a = t.parent[a];
    }
    while (t.depth[b] > t.depth[a]) {
      up_j.push_back(t.parent_cell[b]);
      b = t.parent[b];
    }
    while (a != b) {
      up_i.push_back(t.parent_cell[a]);
      a = t.parent[a];
      up_j.push_back(t.parent_cell[b]);
      b = t.parent[b];
    }
    std::vector<std::size_t> path = up_i;
    path.insert(path.end(), up_j.rbegin(), up_j.rend());

    // Entering cell gains mass; path cells alternate -, +, -, ...
    double theta = INFINITY;
    std::size_t leave = path.size();
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const double mass = sol.basis[path[k]].mass;
      if (mass < theta) {
        theta = mass;
        leave = k;
      }
    }
    for (std::size_t k = 0; k < path.size(); ++k) {
      Cell& c = sol.basis[path[k]];
      c.mass = (k % 2 == 0) ? std::max(0.0, c.mass - theta) : c.mass + theta;
    }
    sol.basis[path[leave]] = Cell{ei, ej, theta};
  }

  sol.u = t.u;
  sol.v = t.v;
  double total = 0.0;
  for (const Cell& c : sol.basis) total += c.mass * p.cost[c.row * n + c.col];
  sol.cost = total;
  return sol;
}

Solution solve_dense_lp(const Problem& p) {
  validate(p);
  const std::size_t m = p.supply.size(), n = p.demand.size();
  Solution sol;
  if (m == 0 || n == 0) return sol;
  lp::Problem q;
  q.num_vars = m * n;
  q.sense = lp::Sense::Minimize;
  q.objective = p.cost;
  for (std::size_t i = 0; i < m; ++i) {
    lp::Constraint c{std::vector<double>(m * n, 0.0), lp::Relation::Equal, p.supply[i]};
    for (std::size_t j = 0; j < n; ++j) c.coeffs[i * n + j] = 1.0;
    q.constraints.push_back(std::move(c));
  }
  for (std::size_t j = 0; j < n; ++j) {
    lp::Constraint c{std::vector<double>(m * n, 0.0), lp::Relation::Equal, p.demand[j]};
    for (std::size_t i = 0; i < m; ++i) c.coeffs[i * n + j] = 1.0;
    q.constraints.push_back(std::move(c));
  }
  const lp::Solution s = lp::solve(q);
  if (s.status != lp::Status::Optimal) throw SolverError("transport: dense LP not optimal");
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (s.x[i * n + j] > 0.0) sol.basis.push_back({i, j, s.x[i * n + j]});
    }
  }
  sol.cost = s.objective;
  sol.iterations = s.iterations;
  return sol;
}

}  // namespace krnorm::transport

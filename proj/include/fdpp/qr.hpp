#pragma once

// Givens-rotation elimination schedules for orthonormal-row factors:
// minimal-count nearest-neighbour elimination, log-depth elimination,
// coupling-graph-constrained elimination with survivor routing, schedule
// replay/verification with a forced-zero monitor, and the tall-skinny QR
// pipeline that compresses a wide data matrix into a scheduled factor.

#include "fdpp/common.hpp"
#include "fdpp/kernels.hpp"
#include "fdpp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <utility>
#include <vector>

namespace fdpp {

template <typename Real = double>
struct RotationSchedule {
  Index n_modes = 0;
  Index rank = 0;
  // Rounds of column rotations; pairs within one round are disjoint.
  std::vector<std::vector<GivensRotation<Real>>> rounds;
  VectorC<Real> final_phases;  // unit-modulus survivors, one per row
};

template <typename Real>
Index schedule_rotation_count(const RotationSchedule<Real>& s) {
  Index c = 0;
  for (const auto& r : s.rounds) c += static_cast<Index>(r.size());
  return c;
}

struct CouplingGraph {
  int n_nodes = 0;
  std::vector<std::pair<int, int>> edges;  // 1-based, first < second
};

inline CouplingGraph make_coupling_graph(
    int n_nodes, std::vector<std::pair<int, int>> edges) {
  require(n_nodes >= 1, "make_coupling_graph: need at least one node");
  std::set<std::pair<int, int>> seen;
  CouplingGraph g;
  g.n_nodes = n_nodes;
  for (auto [a, b] : edges) {
    require(a >= 1 && b >= 1 && a <= n_nodes && b <= n_nodes && a != b,
            "make_coupling_graph: bad edge");
    auto e = std::minmax(a, b);
    if (seen.insert({e.first, e.second}).second)
      g.edges.push_back({e.first, e.second});
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

namespace detail {

// Greedy conflict-respecting round packing: each rotation lands in the first
// round after the last round touching either of its columns. Preserves the
// relative order of overlapping rotations, so replaying rounds in order is
// equivalent to the generation sequence. Rounds are sorted by (l1, l2).
template <typename Real>
std::vector<std::vector<GivensRotation<Real>>> pack_rounds(
    const std::vector<GivensRotation<Real>>& seq, Index n_cols) {
  std::vector<Index> avail(static_cast<size_t>(n_cols) + 1, 0);
  std::vector<std::vector<GivensRotation<Real>>> rounds;
  for (const auto& rot : seq) {
    const Index r = std::max(avail[static_cast<size_t>(rot.l1)],
                             avail[static_cast<size_t>(rot.l2)]) +
                    1;
    if (static_cast<Index>(rounds.size()) < r) rounds.resize(r);
    rounds[static_cast<size_t>(r - 1)].push_back(rot);
    avail[static_cast<size_t>(rot.l1)] = r;
    avail[static_cast<size_t>(rot.l2)] = r;
  }
  for (auto& round : rounds) {
    std::sort(round.begin(), round.end(),
              [](const GivensRotation<Real>& x, const GivensRotation<Real>& y) {
                return std::make_pair(x.l1, x.l2) <
                       std::make_pair(y.l1, y.l2);
              });
    // Disjointness within a round is structural; double-check in debug use.
    std::set<int> used;
    for (const auto& rot : round) {
      require(used.insert(rot.l1).second && used.insert(rot.l2).second,
              "pack_rounds: round is not column-disjoint");
    }
  }
  return rounds;
}

template <typename Real>
RotationSchedule<Real> finish_schedule(
    const MatrixC<Real>& final_state,
    const std::vector<GivensRotation<Real>>& seq, Index n_modes, Index rank) {
  RotationSchedule<Real> s;
  s.n_modes = n_modes;
  s.rank = rank;
  s.rounds = pack_rounds(seq, n_modes);
  s.final_phases = VectorC<Real>::Zero(rank);
  Real residual = 0;
  for (Index i = 0; i < rank; ++i) {
    for (Index j = 0; j < n_modes; ++j) {
      if (j == i) continue;
      residual = std::max(residual, std::abs(final_state(i, j)));
    }
    s.final_phases(i) = final_state(i, i);
    require(std::abs(std::abs(final_state(i, i)) - Real(1)) <= Real(1e-9),
            "schedule: survivor is not unit modulus");
  }
  require(residual <= Real(1e-9), "schedule: elimination left a residual");
  return s;
}

}  // namespace detail

template <typename Real = double>
struct PreprocessResult {
  MatrixC<Real> q;      // row-mixed factor with the trailing triangle zeroed
  Index rotation_count = 0;
};

// Left row rotations zeroing the trailing triangle: row i (1-based) ends with
// zeros in columns N-r+i+1 .. N, so nearest-neighbour elimination afterwards
// needs only r(N-r) column rotations. The row mixes leave Q^* Q unchanged.
template <typename Real>
PreprocessResult<Real> preprocess_triangle(const MatrixC<Real>& q_in) {
  const Index r = q_in.rows();
  const Index n = q_in.cols();
  require(r >= 1 && n >= r, "preprocess_triangle: need r x N with r <= N");
  PreprocessResult<Real> out;
  out.q = q_in;
  for (Index j = n - 1; j >= n - r + 1; --j) {
    const Index i_max = j - (n - r) - 1;  // rows 0 .. i_max get zeroed
    for (Index i = 0; i <= i_max; ++i) {
      if (std::abs(out.q(i, j)) < Real(1e-12)) continue;
      GivensRotation<Real> rot = detail::left_params_zero_first<Real>(
          out.q(i, j), out.q(i + 1, j));
      rot.l1 = static_cast<int>(i) + 1;
      rot.l2 = static_cast<int>(i) + 2;
      apply_givens_inplace(out.q, rot, Side::Left, false);
      ++out.rotation_count;
    }
  }
  return out;
}

// Nearest-neighbour elimination: entry (i, j) is zeroed against its left
// neighbour via the column pair (j-1, j), sweeping each row from its last
// support column down to the diagonal. With preprocessing the count is
// exactly r(N-r) on generic input.
template <typename Real>
RotationSchedule<Real> schedule_sameh_kuck(const MatrixC<Real>& q_in,
                                           bool preprocess = true) {
  const Index r = q_in.rows();
  const Index n = q_in.cols();
  require(r >= 1 && n >= r, "schedule_sameh_kuck: need r x N with r <= N");
  MatrixC<Real> w = q_in;
  if (preprocess) w = preprocess_triangle(q_in).q;

  std::vector<GivensRotation<Real>> seq;
  for (Index i = 0; i < r; ++i) {
    const Index j_max = preprocess ? (n - r + i) : (n - 1);
    for (Index j = j_max; j >= i + 1; --j) {
      if (std::abs(w(i, j)) < Real(1e-12)) continue;
      GivensRotation<Real> rot = detail::right_params_zero_second<Real>(
          w(i, j - 1), w(i, j));
      rot.l1 = static_cast<int>(j);      // 1-based j-1
      rot.l2 = static_cast<int>(j) + 1;  // 1-based j
      apply_givens_inplace(w, rot, Side::Right, true);
      seq.push_back(rot);
    }
  }
  return detail::finish_schedule(w, seq, n, r);
}

// Log-depth elimination: per row, the active columns are paired from the
// right (survivors halve each wave); the entry at the larger column of each
// pair is zeroed, so each row finishes in ceil(log2(active)) waves.
template <typename Real>
RotationSchedule<Real> schedule_log_depth(const MatrixC<Real>& q_in) {
  const Index r = q_in.rows();
  const Index n = q_in.cols();
  require(r >= 1 && n >= r, "schedule_log_depth: need r x N with r <= N");
  MatrixC<Real> w = q_in;
  std::vector<GivensRotation<Real>> seq;
  for (Index i = 0; i < r; ++i) {
    std::vector<Index> active;
    active.push_back(i);  // the survivor column is always kept active
    for (Index j = i + 1; j < n; ++j)
      if (std::abs(w(i, j)) >= Real(1e-12)) active.push_back(j);
    while (active.size() > 1) {
      std::vector<Index> next;
      // Pair from the right; with an odd count the leftmost stays unpaired.
      const size_t unpaired = active.size() % 2;
      if (unpaired) next.push_back(active[0]);
      for (size_t k = unpaired; k + 1 < active.size() + 1; k += 2) {
        const Index a = active[k];
        const Index b = active[k + 1];
        if (std::abs(w(i, b)) >= Real(1e-12)) {
          GivensRotation<Real> rot = detail::right_params_zero_second<Real>(
              w(i, a), w(i, b));
          rot.l1 = static_cast<int>(a) + 1;
          rot.l2 = static_cast<int>(b) + 1;
          apply_givens_inplace(w, rot, Side::Right, true);
          seq.push_back(rot);
        }
        next.push_back(a);
      }
      active = std::move(next);
    }
  }
  return detail::finish_schedule(w, seq, n, r);
}

namespace detail {

using AdjList = std::vector<std::vector<int>>;

inline AdjList adjacency(const CouplingGraph& g) {
  AdjList adj(static_cast<size_t>(g.n_nodes) + 1);
  for (auto [a, b] : g.edges) {
    adj[static_cast<size_t>(a)].push_back(b);
    adj[static_cast<size_t>(b)].push_back(a);
  }
  for (auto& v : adj) std::sort(v.begin(), v.end());
  return adj;
}

// Connectivity of the induced subgraph on `nodes` (1-based membership mask).
inline bool connected_on(const AdjList& adj, const std::vector<bool>& in) {
  int start = -1, count = 0;
  for (size_t v = 1; v < in.size(); ++v) {
    if (in[v]) {
      if (start < 0) start = static_cast<int>(v);
      ++count;
    }
  }
  if (count <= 1) return true;
  std::vector<bool> seen(in.size(), false);
  std::queue<int> bfs;
  bfs.push(start);
  seen[static_cast<size_t>(start)] = true;
  int reached = 1;
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    for (int w : adj[static_cast<size_t>(v)]) {
      if (in[static_cast<size_t>(w)] && !seen[static_cast<size_t>(w)]) {
        seen[static_cast<size_t>(w)] = true;
        ++reached;
        bfs.push(w);
      }
    }
  }
  return reached == count;
}

}  // namespace detail

// Graph-constrained elimination. Every rotation acts on an edge of g. Each
// row picks a pivot whose removal keeps the remaining subgraph connected
// (min degree, then min index), grows a BFS spanning tree from it, and
// eliminates tree leaves against their parents. Survivors are finally routed
// to columns 1..r by phased swaps along tree edges.
template <typename Real>
RotationSchedule<Real> schedule_graph_constrained(const MatrixC<Real>& q_in,
                                                  const CouplingGraph& g) {
  const Index r = q_in.rows();
  const Index n = q_in.cols();
  require(r >= 1 && n >= r, "schedule_graph_constrained: need r <= N");
  require(g.n_nodes == static_cast<int>(n),
          "schedule_graph_constrained: graph size mismatch");
  const detail::AdjList adj = detail::adjacency(g);

  MatrixC<Real> w = q_in;
  std::vector<GivensRotation<Real>> seq;
  std::vector<bool> available(static_cast<size_t>(n) + 1, true);
  available[0] = false;
  std::vector<int> pivots;

  for (Index i = 0; i < r; ++i) {
    require(detail::connected_on(adj, available),
            "schedule_graph_constrained: remaining coupling graph is "
            "disconnected");
    // Pivot: a non-cut vertex of the remaining subgraph, minimal degree then
    // minimal index.
    int pivot = -1;
    int best_deg = 0;
    for (int v = 1; v <= static_cast<int>(n); ++v) {
      if (!available[static_cast<size_t>(v)]) continue;
      std::vector<bool> without = available;
      without[static_cast<size_t>(v)] = false;
      if (!detail::connected_on(adj, without)) continue;
      int deg = 0;
      for (int u : adj[static_cast<size_t>(v)])
        if (available[static_cast<size_t>(u)]) ++deg;
      if (pivot < 0 || deg < best_deg) {
        pivot = v;
        best_deg = deg;
      }
    }
    require(pivot > 0, "schedule_graph_constrained: no valid pivot");
    pivots.push_back(pivot);

    // BFS spanning tree of the remaining subgraph rooted at the pivot.
    std::vector<int> parent(static_cast<size_t>(n) + 1, 0);
    std::vector<int> child_count(static_cast<size_t>(n) + 1, 0);
    std::vector<bool> in_tree(static_cast<size_t>(n) + 1, false);
    std::queue<int> bfs;
    bfs.push(pivot);
    in_tree[static_cast<size_t>(pivot)] = true;
    std::vector<int> order;
    while (!bfs.empty()) {
      int v = bfs.front();
      bfs.pop();
      order.push_back(v);
      for (int u : adj[static_cast<size_t>(v)]) {
        if (available[static_cast<size_t>(u)] &&
            !in_tree[static_cast<size_t>(u)]) {
          in_tree[static_cast<size_t>(u)] = true;
          parent[static_cast<size_t>(u)] = v;
          ++child_count[static_cast<size_t>(v)];
          bfs.push(u);
        }
      }
    }

    // Peel leaves in waves: all current leaves (ascending rotation pair)
    // are eliminated, then their parents become eligible.
    std::vector<int> remaining = order;
    std::vector<bool> alive(static_cast<size_t>(n) + 1, false);
    for (int v : remaining) alive[static_cast<size_t>(v)] = true;
    Index alive_count = static_cast<Index>(remaining.size());
    while (alive_count > 1) {
      std::vector<int> leaves;
      for (int v : order) {
        if (alive[static_cast<size_t>(v)] && v != pivot &&
            child_count[static_cast<size_t>(v)] == 0)
          leaves.push_back(v);
      }
      std::sort(leaves.begin(), leaves.end(), [&](int x, int y) {
        auto key = [&](int leaf) {
          int p = parent[static_cast<size_t>(leaf)];
          return std::make_pair(std::min(leaf, p), std::max(leaf, p));
        };
        return key(x) < key(y);
      });
      require(!leaves.empty(), "schedule_graph_constrained: stuck peel");
      for (int leaf : leaves) {
        const int par = parent[static_cast<size_t>(leaf)];
        const Index lc = leaf - 1;
        const Index pc = par - 1;
        if (std::abs(w(i, lc)) >= Real(1e-12)) {
          GivensRotation<Real> rot;
          if (lc > pc) {
            rot = detail::right_params_zero_second<Real>(w(i, pc), w(i, lc));
            rot.l1 = par;
            rot.l2 = leaf;
          } else {
            rot = detail::right_params_zero_first<Real>(w(i, lc), w(i, pc));
            rot.l1 = leaf;
            rot.l2 = par;
          }
          apply_givens_inplace(w, rot, Side::Right, true);
          seq.push_back(rot);
        }
        alive[static_cast<size_t>(leaf)] = false;
        --alive_count;
        --child_count[static_cast<size_t>(par)];
      }
    }
    available[static_cast<size_t>(pivot)] = false;
  }

  // Survivor routing: bring row i's surviving column (its pivot) to column
  // i+1 with phased swaps (theta = pi/2, phi = pi/2) along edges of a
  // spanning tree of the full graph. Leaves are retired one by one: a leaf
  // that is a destination first receives its survivor (displacements slide
  // backward along the path, staying on live columns); an occupied leaf that
  // is not a destination donates its survivor toward the nearest empty live
  // column before retiring.
  std::vector<int> row_at(static_cast<size_t>(n) + 1, -1);
  std::vector<int> pos_of_row(static_cast<size_t>(r), 0);
  for (Index i = 0; i < r; ++i) {
    pos_of_row[static_cast<size_t>(i)] = pivots[static_cast<size_t>(i)];
    row_at[static_cast<size_t>(pivots[static_cast<size_t>(i)])] =
        static_cast<int>(i);
  }

  {
    // Unrooted spanning tree of the full graph (BFS from node 1).
    std::vector<std::set<int>> tadj(static_cast<size_t>(n) + 1);
    {
      std::vector<bool> seen(static_cast<size_t>(n) + 1, false);
      std::queue<int> bfs;
      bfs.push(1);
      seen[1] = true;
      while (!bfs.empty()) {
        int v = bfs.front();
        bfs.pop();
        for (int u : adj[static_cast<size_t>(v)]) {
          if (!seen[static_cast<size_t>(u)]) {
            seen[static_cast<size_t>(u)] = true;
            tadj[static_cast<size_t>(v)].insert(u);
            tadj[static_cast<size_t>(u)].insert(v);
            bfs.push(u);
          }
        }
      }
      for (int v = 1; v <= static_cast<int>(n); ++v)
        require(seen[static_cast<size_t>(v)],
                "schedule_graph_constrained: coupling graph is disconnected");
    }
    std::vector<bool> live(static_cast<size_t>(n) + 1, true);
    live[0] = false;
    Index live_count = n;

    auto live_path = [&](int from, int to) {
      std::vector<int> prev(static_cast<size_t>(n) + 1, 0);
      std::queue<int> bfs;
      bfs.push(from);
      prev[static_cast<size_t>(from)] = from;
      while (!bfs.empty()) {
        int v = bfs.front();
        bfs.pop();
        if (v == to) break;
        for (int u : tadj[static_cast<size_t>(v)]) {
          if (live[static_cast<size_t>(u)] &&
              prev[static_cast<size_t>(u)] == 0) {
            prev[static_cast<size_t>(u)] = v;
            bfs.push(u);
          }
        }
      }
      require(prev[static_cast<size_t>(to)] != 0,
              "schedule_graph_constrained: routing path not found");
      std::vector<int> path;
      for (int v = to; v != from; v = prev[static_cast<size_t>(v)])
        path.push_back(v);
      path.push_back(from);
      std::reverse(path.begin(), path.end());
      return path;
    };

    auto emit_swap = [&](int a, int b) {
      GivensRotation<Real> rot;
      rot.l1 = std::min(a, b);
      rot.l2 = std::max(a, b);
      rot.theta = Real(kPi / 2);
      rot.phi = Real(kPi / 2);
      apply_givens_inplace(w, rot, Side::Right, true);
      seq.push_back(rot);
      std::swap(row_at[static_cast<size_t>(a)],
                row_at[static_cast<size_t>(b)]);
      if (row_at[static_cast<size_t>(a)] >= 0)
        pos_of_row[static_cast<size_t>(row_at[static_cast<size_t>(a)])] = a;
      if (row_at[static_cast<size_t>(b)] >= 0)
        pos_of_row[static_cast<size_t>(row_at[static_cast<size_t>(b)])] = b;
    };

    auto retire = [&](int v) {
      live[static_cast<size_t>(v)] = false;
      for (int u : tadj[static_cast<size_t>(v)])
        tadj[static_cast<size_t>(u)].erase(v);
      tadj[static_cast<size_t>(v)].clear();
      --live_count;
    };

    while (live_count > 1) {
      std::vector<int> leaves;
      for (int v = 1; v <= static_cast<int>(n); ++v)
        if (live[static_cast<size_t>(v)] &&
            tadj[static_cast<size_t>(v)].size() <= 1)
          leaves.push_back(v);
      require(!leaves.empty(),
              "schedule_graph_constrained: routing peel is stuck");
      int v_dest = -1, v_empty = -1;
      for (int v : leaves) {
        if (v_dest < 0 && v <= static_cast<int>(r)) v_dest = v;
        if (v_empty < 0 && row_at[static_cast<size_t>(v)] < 0) v_empty = v;
      }
      if (v_dest > 0) {
        const int row = v_dest - 1;
        if (pos_of_row[static_cast<size_t>(row)] != v_dest) {
          std::vector<int> path =
              live_path(pos_of_row[static_cast<size_t>(row)], v_dest);
          for (size_t k = 0; k + 1 < path.size(); ++k)
            emit_swap(path[k], path[k + 1]);
        }
        retire(v_dest);
      } else if (v_empty > 0) {
        retire(v_empty);
      } else {
        // Every leaf holds a survivor bound elsewhere; free the smallest by
        // shifting the chain toward the nearest empty live column.
        const int v = leaves.front();
        int empty_node = -1;
        {
          std::vector<bool> seen(static_cast<size_t>(n) + 1, false);
          std::queue<int> bfs;
          bfs.push(v);
          seen[static_cast<size_t>(v)] = true;
          while (!bfs.empty() && empty_node < 0) {
            int x = bfs.front();
            bfs.pop();
            if (row_at[static_cast<size_t>(x)] < 0) {
              empty_node = x;
              break;
            }
            for (int u : tadj[static_cast<size_t>(x)]) {
              if (live[static_cast<size_t>(u)] &&
                  !seen[static_cast<size_t>(u)]) {
                seen[static_cast<size_t>(u)] = true;
                bfs.push(u);
              }
            }
          }
        }
        require(empty_node > 0,
                "schedule_graph_constrained: no free column for routing");
        std::vector<int> path = live_path(v, empty_node);
        for (size_t k = path.size() - 1; k >= 1; --k)
          emit_swap(path[k - 1], path[k]);
        retire(v);
      }
    }
  }

  return detail::finish_schedule(w, seq, n, r);
}

// --- Replay and verification ---------------------------------------------

template <typename Real = double>
struct ReplayReport {
  Real residual = 0;           // max off-pattern magnitude after replay
  VectorC<Real> phases;        // diagonal survivors
  Real monitor_violation = 0;  // forced zeros that came back to life
  MatrixC<Real> final_state;
};

// Replay a schedule by right-multiplying with each rotation's adjoint. The
// monitor records entries that a rotation forced to zero and checks that no
// later rotation revives them; pure swaps (theta = pi/2) relocate the
// bookkeeping instead.
template <typename Real>
ReplayReport<Real> replay_schedule(const MatrixC<Real>& q,
                                   const RotationSchedule<Real>& s) {
  require(q.rows() == s.rank && q.cols() == s.n_modes,
          "replay_schedule: factor does not match schedule dimensions");
  MatrixC<Real> w = q;
  const Real scale = std::max(max_abs(q), Real(1));
  const Real ztol = Real(1e-10) * scale;
  std::set<std::pair<Index, Index>> forced;
  ReplayReport<Real> rep;
  for (const auto& round : s.rounds) {
    for (const auto& rot : round) {
      const Index a = rot.l1 - 1;
      const Index b = rot.l2 - 1;
      const bool is_swap = std::abs(rot.theta - Real(kPi / 2)) <= Real(1e-9);
      if (is_swap) {
        for (Index i = 0; i < w.rows(); ++i) {
          const bool fa = forced.count({i, a}) > 0;
          const bool fb = forced.count({i, b}) > 0;
          if (fa != fb) {
            if (fa) {
              forced.erase({i, a});
              forced.insert({i, b});
            } else {
              forced.erase({i, b});
              forced.insert({i, a});
            }
          }
        }
      }
      apply_givens_inplace(w, rot, Side::Right, true);
      for (Index i = 0; i < w.rows(); ++i) {
        for (Index c : {a, b}) {
          if (forced.count({i, c})) {
            rep.monitor_violation =
                std::max(rep.monitor_violation, std::abs(w(i, c)) - ztol);
          } else if (std::abs(w(i, c)) <= ztol) {
            forced.insert({i, c});
          }
        }
      }
    }
  }
  rep.monitor_violation = std::max(rep.monitor_violation, Real(0));
  rep.phases = VectorC<Real>::Zero(s.rank);
  for (Index i = 0; i < s.rank; ++i) {
    for (Index j = 0; j < s.n_modes; ++j) {
      if (j == i) continue;
      rep.residual = std::max(rep.residual, std::abs(w(i, j)));
    }
    rep.phases(i) = w(i, i);
  }
  rep.final_state = std::move(w);
  return rep;
}

// Residual and survivor phases of a replayed schedule.
template <typename Real>
std::pair<Real, VectorC<Real>> verify_schedule(const MatrixC<Real>& q,
                                               const RotationSchedule<Real>& s) {
  ReplayReport<Real> rep = replay_schedule(q, s);
  return {rep.residual, rep.phases};
}

// --- Tall-skinny QR -------------------------------------------------------

template <typename Real = double>
struct TsqrPlan {
  Index block_count = 0;  // padded to a power of two
  // stages[0]: in-block eliminations; stages[k]: k-th pairwise merge level.
  // Rotations carry global 1-based row indices of the tall matrix.
  std::vector<std::vector<GivensRotation<Real>>> stages;
  MatrixC<Real> r_factor;  // d x d upper-triangular factor
};

// Blocked Givens QR of a tall N x d matrix: per-block triangularization, then
// a binary merge tree. Rotations are left row rotations in application order.
template <typename Real>
TsqrPlan<Real> tsqr(const MatrixC<Real>& a, Index p) {
  const Index n = a.rows();
  const Index d = a.cols();
  require(n >= d && d >= 1, "tsqr: need a tall N x d matrix");
  require(p >= 1 && p <= n, "tsqr: bad block count");
  Index padded = 1;
  while (padded < p) padded *= 2;

  TsqrPlan<Real> plan;
  plan.block_count = padded;
  MatrixC<Real> w = a;

  std::vector<Index> start(static_cast<size_t>(padded) + 1, n);
  for (Index b = 0; b <= p; ++b)
    start[static_cast<size_t>(b)] = b * n / p;
  // Blocks beyond p are empty (start = end = n).

  auto zero_with_pivot = [&](Index pivot, Index row, Index col,
                             std::vector<GivensRotation<Real>>& stage) {
    if (std::abs(w(row, col)) < Real(1e-12)) return;
    GivensRotation<Real> rot =
        givens_params_to_zero<Real>(w(pivot, col), w(row, col));
    rot.l1 = static_cast<int>(pivot) + 1;
    rot.l2 = static_cast<int>(row) + 1;
    apply_givens_inplace(w, rot, Side::Left, false);
    stage.push_back(rot);
  };

  // Stage 0: triangularize each block against its own leading rows.
  plan.stages.emplace_back();
  for (Index b = 0; b < p; ++b) {
    const Index s0 = start[static_cast<size_t>(b)];
    const Index s1 = start[static_cast<size_t>(b) + 1];
    for (Index c = 0; c < d && s0 + c < s1; ++c)
      for (Index row = s0 + c + 1; row < s1; ++row)
        zero_with_pivot(s0 + c, row, c, plan.stages.back());
  }

  // Rows carrying each block's surviving triangle (short blocks carry fewer
  // than d rows, so merges track explicit row lists instead of offsets).
  std::vector<std::vector<Index>> tri(static_cast<size_t>(padded));
  for (Index b = 0; b < padded; ++b) {
    const Index s0 = start[static_cast<size_t>(b)];
    const Index s1 = start[static_cast<size_t>(b) + 1];
    for (Index c = 0; c < d && s0 + c < s1; ++c)
      tri[static_cast<size_t>(b)].push_back(s0 + c);
  }

  // Merge levels: fold the triangle of block group b+width into group b by
  // re-eliminating the stacked triangle rows column by column.
  for (Index width = 1; width < padded; width *= 2) {
    plan.stages.emplace_back();
    for (Index b = 0; b + width < padded; b += 2 * width) {
      auto& lo = tri[static_cast<size_t>(b)];
      auto& hi = tri[static_cast<size_t>(b + width)];
      std::vector<Index> rows = lo;
      rows.insert(rows.end(), hi.begin(), hi.end());
      hi.clear();
      for (Index c = 0; c < d && c < static_cast<Index>(rows.size()); ++c)
        for (size_t j = static_cast<size_t>(c) + 1; j < rows.size(); ++j)
          zero_with_pivot(rows[static_cast<size_t>(c)], rows[j], c,
                          plan.stages.back());
      if (static_cast<Index>(rows.size()) > d) rows.resize(static_cast<size_t>(d));
      lo = std::move(rows);
    }
  }

  require(max_abs(w.bottomRows(n - d).eval()) <=
              scaled_tol(max_abs(a), Real(1e-8)) ||
          n == d,
          "tsqr: elimination left sub-triangular mass");
  plan.r_factor = w.topRows(d);
  // Zero strictly-lower entries of the triangle (roundoff hygiene).
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < i; ++j) plan.r_factor(i, j) = 0;
  return plan;
}

// Flatten a plan's rotations in application order.
template <typename Real>
std::vector<GivensRotation<Real>> tsqr_rotations(const TsqrPlan<Real>& plan) {
  std::vector<GivensRotation<Real>> out;
  for (const auto& st : plan.stages)
    out.insert(out.end(), st.begin(), st.end());
  return out;
}

template <typename Real = double>
struct HybridPipelineResult {
  ProjectionFactor<Real> factor;   // r x N, orthonormal rows
  RotationSchedule<Real> schedule; // TSQR stages followed by block elimination
  DppKernel<Real> kernel;          // factor^* factor, the top-r projector
  TsqrPlan<Real> plan;
  VectorR<Real> singular_values;   // descending singular values of A
};

// Compress a wide d x N data matrix: TSQR of A^*, spectral truncation of the
// small R factor to the top-r right-singular subspace of A, and a schedule
// whose replay reduces the emitted factor to (Lambda | 0).
template <typename Real>
HybridPipelineResult<Real> hybrid_pipeline(const MatrixC<Real>& a, Index r,
                                           Index p) {
  const Index d = a.rows();
  const Index n = a.cols();
  require(d >= 1 && n >= d, "hybrid_pipeline: need a wide d x N matrix");
  require(r >= 1 && r <= d, "hybrid_pipeline: bad target rank");

  HybridPipelineResult<Real> out;
  MatrixC<Real> tall = a.adjoint();
  out.plan = tsqr<Real>(tall, p);
  const MatrixC<Real>& rf = out.plan.r_factor;

  HermitianEig<Real> gram = hermitian_eig(MatrixC<Real>(rf * rf.adjoint()));
  VectorR<Real> sigma(d);
  for (Index i = 0; i < d; ++i)
    sigma(i) = std::sqrt(std::max(gram.eigenvalues(d - 1 - i), Real(0)));
  out.singular_values = sigma;
  const Real gap_tol = Real(1e-10) * std::max(sigma(0), Real(1));
  const Real next = (r < d) ? sigma(r) : Real(0);
  require(sigma(r - 1) - next > gap_tol,
          "hybrid_pipeline: degenerate singular values at the cut");

  // Top-r left singular vectors of R (descending).
  MatrixC<Real> u_r(d, r);
  for (Index k = 0; k < r; ++k) u_r.col(k) = gram.eigenvectors.col(d - 1 - k);

  // F = [U_r^* | 0] * G_m ... G_1 over the mode axis. Replaying the stored
  // rotations' adjoints on F recovers [U_r^* | 0] exactly.
  MatrixC<Real> f = MatrixC<Real>::Zero(r, n);
  f.leftCols(d) = u_r.adjoint();
  std::vector<GivensRotation<Real>> rots = tsqr_rotations(out.plan);
  for (auto it = rots.rbegin(); it != rots.rend(); ++it)
    apply_givens_inplace(f, *it, Side::Right, false);

  // Row-mix preprocessing is determined by the d-column block the replay
  // reaches, but must be folded into the emitted factor, so it is applied to
  // both the block copy and the full factor (left mixes commute with the
  // column rotations of the replay).
  MatrixC<Real> block = u_r.adjoint();
  for (Index j = d - 1; j >= d - r + 1; --j) {
    const Index i_max = j - (d - r) - 1;
    for (Index i = 0; i <= i_max; ++i) {
      if (std::abs(block(i, j)) < Real(1e-12)) continue;
      GivensRotation<Real> rot = detail::left_params_zero_first<Real>(
          block(i, j), block(i + 1, j));
      rot.l1 = static_cast<int>(i) + 1;
      rot.l2 = static_cast<int>(i) + 2;
      apply_givens_inplace(block, rot, Side::Left, false);
      apply_givens_inplace(f, rot, Side::Left, false);
    }
  }

  // Column sweep on the d-block (same recurrence as schedule_sameh_kuck).
  std::vector<GivensRotation<Real>> seq = rots;
  for (Index i = 0; i < r; ++i) {
    const Index j_max = d - r + i;
    for (Index j = j_max; j >= i + 1; --j) {
      if (std::abs(block(i, j)) < Real(1e-12)) continue;
      GivensRotation<Real> rot = detail::right_params_zero_second<Real>(
          block(i, j - 1), block(i, j));
      rot.l1 = static_cast<int>(j);
      rot.l2 = static_cast<int>(j) + 1;
      apply_givens_inplace(block, rot, Side::Right, true);
      seq.push_back(rot);
    }
  }
  MatrixC<Real> w = MatrixC<Real>::Zero(r, n);
  w.leftCols(d) = block;

  out.factor = make_projection_factor<Real>(f);
  out.schedule = detail::finish_schedule(w, seq, n, r);
  out.kernel = validate_dpp_kernel<Real>(MatrixC<Real>(f.adjoint() * f));
  return out;
}

}  // namespace fdpp

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fdpp/kernels.hpp"
#include "fdpp/qr.hpp"
#include "fdpp/rng.hpp"

#include <cmath>
#include <utility>
#include <vector>

using namespace fdpp;
using C = std::complex<double>;

namespace {

MatrixC<double> random_complex(Index rows, Index cols, std::uint64_t seed) {
  CounterRng rng(RngSpec{seed, 33});
  MatrixC<double> m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = C(normal01(rng), normal01(rng));
  return m;
}

MatrixC<double> random_factor(Index r, Index n, std::uint64_t seed) {
  MatrixC<double> g = random_complex(n, n, seed);
  Eigen::HouseholderQR<MatrixC<double>> qr(g);
  MatrixC<double> q = qr.householderQ() * MatrixC<double>::Identity(n, n);
  return q.leftCols(r).adjoint();
}

// Deterministic factor whose entries are all comfortably nonzero, so the
// elimination structure is the generic one.
MatrixC<double> full_support_factor(Index r, Index n, std::uint64_t seed0) {
  for (std::uint64_t s = seed0; s < seed0 + 64; ++s) {
    MatrixC<double> q = random_factor(r, n, s);
    if (q.cwiseAbs().minCoeff() > 1e-3) return q;
  }
  fail("no full-support factor found");
}

std::vector<std::pair<int, int>> round_pairs(
    const std::vector<GivensRotation<double>>& round) {
  std::vector<std::pair<int, int>> out;
  for (const auto& rot : round) out.push_back({rot.l1, rot.l2});
  return out;
}

bool pairs_on_edges(const RotationSchedule<double>& s, const CouplingGraph& g) {
  std::set<std::pair<int, int>> edges(g.edges.begin(), g.edges.end());
  for (const auto& round : s.rounds)
    for (const auto& rot : round)
      if (!edges.count({rot.l1, rot.l2})) return false;
  return true;
}

}  // namespace

TEST_CASE("preprocess_triangle zeroes the trailing triangle") {
  MatrixC<double> q = full_support_factor(3, 6, 1);
  PreprocessResult<double> pre = preprocess_triangle(q);
  CHECK(pre.rotation_count <= 3);
  // Row i (0-based) ends with zeros from column n - r + i + 1 on.
  for (Index i = 0; i < 3; ++i)
    for (Index j = 6 - 3 + i + 1; j < 6; ++j)
      CHECK(std::abs(pre.q(i, j)) < 1e-12);
  // Left row mixes leave the kernel unchanged.
  CHECK(max_abs(pre.q.adjoint() * pre.q - q.adjoint() * q) < 1e-12);
}

TEST_CASE("nearest-neighbour schedule hits the exact rotation count") {
  for (auto [n, r] : std::vector<std::pair<Index, Index>>{
           {6, 3}, {5, 3}, {8, 2}, {4, 4}, {7, 1}}) {
    MatrixC<double> q = full_support_factor(r, n, 10 + n * 8 + r);
    RotationSchedule<double> s = schedule_sameh_kuck(q);
    CHECK(schedule_rotation_count(s) == r * (n - r));
    // The column rotations certify the row-mixed factor; the row mixes leave
    // the kernel (and hence the compiled distribution) unchanged.
    auto [residual, phases] = verify_schedule(preprocess_triangle(q).q, s);
    CHECK(residual < 1e-9);
    CHECK(static_cast<Index>(s.rounds.size()) <= 2 * n);
    for (Index i = 0; i < r; ++i)
      CHECK(std::abs(std::abs(phases(i)) - 1.0) < 1e-9);
  }
}

TEST_CASE("nearest-neighbour round structure on six modes") {
  MatrixC<double> q = full_support_factor(3, 6, 2);
  RotationSchedule<double> s = schedule_sameh_kuck(q);
  REQUIRE(s.rounds.size() == 5);
  using P = std::vector<std::pair<int, int>>;
  CHECK(round_pairs(s.rounds[0]) == P{{3, 4}});
  CHECK(round_pairs(s.rounds[1]) == P{{2, 3}, {4, 5}});
  CHECK(round_pairs(s.rounds[2]) == P{{1, 2}, {3, 4}, {5, 6}});
  CHECK(round_pairs(s.rounds[3]) == P{{2, 3}, {4, 5}});
  CHECK(round_pairs(s.rounds[4]) == P{{3, 4}});
}

TEST_CASE("unpreprocessed schedule still verifies within the loose budget") {
  MatrixC<double> q = full_support_factor(3, 6, 3);
  RotationSchedule<double> s = schedule_sameh_kuck(q, false);
  CHECK(schedule_rotation_count(s) <= 6 * 3);
  CHECK(schedule_rotation_count(s) > 3 * 3);
  CHECK(verify_schedule(q, s).first < 1e-9);
}

TEST_CASE("replay flags corrupted schedules and clean ones pass the monitor") {
  MatrixC<double> q = full_support_factor(3, 6, 4);
  MatrixC<double> qp = preprocess_triangle(q).q;
  RotationSchedule<double> s = schedule_sameh_kuck(q);
  ReplayReport<double> clean = replay_schedule(qp, s);
  CHECK(clean.residual < 1e-9);
  CHECK(clean.monitor_violation < 1e-12);

  RotationSchedule<double> bad = s;
  bad.rounds[1][0].theta += 0.1;
  CHECK(replay_schedule(qp, bad).residual > 1e-3);
}

TEST_CASE("rounds are column-disjoint for every scheduler") {
  MatrixC<double> q = full_support_factor(3, 7, 5);
  for (const RotationSchedule<double>& s :
       {schedule_sameh_kuck(q), schedule_log_depth(q)}) {
    for (const auto& round : s.rounds) {
      std::set<int> used;
      for (const auto& rot : round) {
        CHECK(used.insert(rot.l1).second);
        CHECK(used.insert(rot.l2).second);
      }
    }
  }
}

TEST_CASE("log-depth schedule meets its depth bound") {
  for (auto [n, r] : std::vector<std::pair<Index, Index>>{
           {8, 3}, {5, 2}, {9, 4}, {6, 1}}) {
    MatrixC<double> q = full_support_factor(r, n, 40 + n * 8 + r);
    RotationSchedule<double> s = schedule_log_depth(q);
    const Index log2n = static_cast<Index>(std::ceil(std::log2(n)));
    CHECK(static_cast<Index>(s.rounds.size()) <= r * (log2n + 1));
    CHECK(schedule_rotation_count(s) <= n * r);
    CHECK(verify_schedule(q, s).first < 1e-9);
  }
}

TEST_CASE("log-depth on one row takes exactly ceil(log2 N) rounds") {
  for (Index n : {4, 5, 8, 11}) {
    MatrixC<double> q = full_support_factor(1, n, 70 + n);
    RotationSchedule<double> s = schedule_log_depth(q);
    const Index log2n = static_cast<Index>(std::ceil(std::log2(n)));
    CHECK(static_cast<Index>(s.rounds.size()) == log2n);
    CHECK(schedule_rotation_count(s) == n - 1);
  }
}

TEST_CASE("log-depth packs one row's first wave into a single round") {
  MatrixC<double> q = full_support_factor(3, 8, 6);
  RotationSchedule<double> s = schedule_log_depth(q);
  // Second row: active columns 2..8 pair as (3,4), (5,6), (7,8).
  const std::set<std::pair<int, int>> wave{{3, 4}, {5, 6}, {7, 8}};
  bool found = false;
  for (const auto& round : s.rounds) {
    std::set<std::pair<int, int>> pairs;
    for (const auto& rot : round) pairs.insert({rot.l1, rot.l2});
    bool all = true;
    for (const auto& p : wave)
      if (!pairs.count(p)) all = false;
    if (all) found = true;
  }
  CHECK(found);
}

TEST_CASE("coupling graph normalizes and validates edges") {
  CouplingGraph g = make_coupling_graph(4, {{2, 1}, {1, 2}, {3, 4}});
  CHECK(g.edges.size() == 2);
  CHECK(g.edges[0] == std::make_pair(1, 2));
  CHECK_THROWS_AS(make_coupling_graph(3, {{1, 4}}), Error);
  CHECK_THROWS_AS(make_coupling_graph(3, {{2, 2}}), Error);
}

TEST_CASE("graph-constrained schedule on the tee graph") {
  CouplingGraph tee = make_coupling_graph(5, {{1, 2}, {2, 3}, {2, 4}, {4, 5}});
  MatrixC<double> q = full_support_factor(3, 5, 7);
  RotationSchedule<double> s = schedule_graph_constrained(q, tee);
  CHECK(pairs_on_edges(s, tee));
  CHECK(schedule_rotation_count(s) == 10);  // nine eliminations plus one swap
  REQUIRE(s.rounds.size() == 7);
  using P = std::vector<std::pair<int, int>>;
  CHECK(round_pairs(s.rounds[0]) == P{{2, 3}, {4, 5}});
  CHECK(round_pairs(s.rounds[1]) == P{{2, 4}});
  CHECK(round_pairs(s.rounds[2]) == P{{1, 2}, {4, 5}});
  CHECK(round_pairs(s.rounds[3]) == P{{2, 4}});
  CHECK(round_pairs(s.rounds[4]) == P{{2, 3}, {4, 5}});
  CHECK(round_pairs(s.rounds[5]) == P{{2, 4}});
  CHECK(round_pairs(s.rounds[6]) == P{{2, 3}});
  // The final round is the survivor-routing phased swap.
  CHECK(s.rounds[6][0].theta == doctest::Approx(kPi / 2));
  ReplayReport<double> rep = replay_schedule(q, s);
  CHECK(rep.residual < 1e-9);
  CHECK(rep.monitor_violation < 1e-12);
}

TEST_CASE("path graph reproduces the unpreprocessed nearest-neighbour sweep") {
  CouplingGraph path = make_coupling_graph(5, {{1, 2}, {2, 3}, {3, 4}, {4, 5}});
  MatrixC<double> q = full_support_factor(3, 5, 8);
  RotationSchedule<double> a = schedule_graph_constrained(q, path);
  RotationSchedule<double> b = schedule_sameh_kuck(q, false);
  REQUIRE(a.rounds.size() == b.rounds.size());
  for (size_t k = 0; k < a.rounds.size(); ++k) {
    REQUIRE(a.rounds[k].size() == b.rounds[k].size());
    for (size_t i = 0; i < a.rounds[k].size(); ++i) {
      CHECK(a.rounds[k][i].l1 == b.rounds[k][i].l1);
      CHECK(a.rounds[k][i].l2 == b.rounds[k][i].l2);
      CHECK(a.rounds[k][i].theta ==
            doctest::Approx(b.rounds[k][i].theta).epsilon(1e-12));
      CHECK(a.rounds[k][i].phi ==
            doctest::Approx(b.rounds[k][i].phi).epsilon(1e-12));
    }
  }
}

TEST_CASE("star graph needs survivor routing") {
  CouplingGraph star = make_coupling_graph(5, {{1, 2}, {1, 3}, {1, 4}, {1, 5}});
  MatrixC<double> q = full_support_factor(3, 5, 9);
  RotationSchedule<double> s = schedule_graph_constrained(q, star);
  CHECK(pairs_on_edges(s, star));
  CHECK(schedule_rotation_count(s) == 14);  // nine eliminations, five swaps
  ReplayReport<double> rep = replay_schedule(q, s);
  CHECK(rep.residual < 1e-9);
  CHECK(rep.monitor_violation < 1e-12);
}

TEST_CASE("graph-constrained scheduling over random connected graphs") {
  CounterRng rng(RngSpec{77, 0});
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 4 + static_cast<Index>(uniform01(rng) * 4);  // 4..7
    const Index r = 1 + static_cast<Index>(uniform01(rng) * 3);  // 1..3
    // Random spanning tree plus a few extra edges.
    std::vector<std::pair<int, int>> edges;
    for (int v = 2; v <= static_cast<int>(n); ++v) {
      const int parent = 1 + static_cast<int>(uniform01(rng) * (v - 1));
      edges.push_back({parent, v});
    }
    for (int extra = 0; extra < 2; ++extra) {
      const int a = 1 + static_cast<int>(uniform01(rng) * n);
      const int b = 1 + static_cast<int>(uniform01(rng) * n);
      if (a != b) edges.push_back({std::min(a, b), std::max(a, b)});
    }
    CouplingGraph g = make_coupling_graph(static_cast<int>(n), edges);
    MatrixC<double> q = random_factor(r, n, 1000 + trial);
    RotationSchedule<double> s = schedule_graph_constrained(q, g);
    CHECK(pairs_on_edges(s, g));
    CHECK(replay_schedule(q, s).residual < 1e-9);
  }
}

TEST_CASE("disconnected coupling graphs are rejected") {
  CouplingGraph g = make_coupling_graph(4, {{1, 2}, {3, 4}});
  MatrixC<double> q = random_factor(2, 4, 10);
  CHECK_THROWS_AS(schedule_graph_constrained(q, g), Error);
  CouplingGraph wrong = make_coupling_graph(5, {{1, 2}});
  CHECK_THROWS_AS(schedule_graph_constrained(q, wrong), Error);
}

TEST_CASE("tsqr triangularizes block by block") {
  MatrixC<double> a = random_complex(16, 3, 11);
  for (Index p : {1, 2, 3, 5, 16}) {
    TsqrPlan<double> plan = tsqr(a, p);
    // Upper-triangular small factor.
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < i; ++j)
        CHECK(std::abs(plan.r_factor(i, j)) == 0.0);
    // Rotations applied in order reduce the input to [R; 0].
    MatrixC<double> w = a;
    for (const auto& rot : tsqr_rotations(plan))
      apply_givens_inplace(w, rot, Side::Left, false);
    CHECK(max_abs(w.topRows(3) - plan.r_factor) < 1e-10);
    CHECK(max_abs(w.bottomRows(13)) < 1e-10);
    // The Gram matrix survives the orthogonal reduction.
    CHECK(max_abs(plan.r_factor.adjoint() * plan.r_factor - a.adjoint() * a) <
          1e-9 * max_abs(a.adjoint() * a));
  }
}

TEST_CASE("tsqr edge cases") {
  MatrixC<double> sq = random_complex(3, 3, 12);
  TsqrPlan<double> plan = tsqr(sq, 2);
  CHECK(max_abs(plan.r_factor.adjoint() * plan.r_factor -
                sq.adjoint() * sq) < 1e-9 * max_abs(sq.adjoint() * sq));
  CHECK_THROWS_AS(tsqr(random_complex(3, 5, 13), 1), Error);
  CHECK_THROWS_AS(tsqr(sq, 0), Error);
  CHECK_THROWS_AS(tsqr(sq, 4), Error);
}

TEST_CASE("hybrid pipeline recovers the top-r projector") {
  MatrixC<double> a = random_complex(4, 10, 14);
  Eigen::JacobiSVD<MatrixC<double>> svd(a, Eigen::ComputeFullV);
  MatrixC<double> v2 = svd.matrixV().leftCols(2);
  MatrixC<double> projector = v2 * v2.adjoint();
  for (Index p : {1, 2, 4}) {
    HybridPipelineResult<double> res = hybrid_pipeline(a, 2, p);
    CHECK(max_abs(res.kernel.matrix - projector) < 1e-8);
    CHECK(max_abs(res.singular_values -
                  svd.singularValues().head(4)) < 1e-8);
    ReplayReport<double> rep = replay_schedule(res.factor.q, res.schedule);
    CHECK(rep.residual < 1e-9);
  }
}

TEST_CASE("single-block hybrid pipeline matches the subset-selection kernel") {
  MatrixC<double> a = random_complex(3, 7, 15);
  HybridPipelineResult<double> res = hybrid_pipeline(a, 2, 1);
  DppKernel<double> css = css_kernel(a, 2);
  CHECK(max_abs(res.kernel.matrix - css.matrix) < 1e-8);
}

TEST_CASE("hybrid pipeline rejects a degenerate spectral cut") {
  MatrixC<double> a = MatrixC<double>::Zero(2, 4);
  a(0, 0) = 1;
  a(1, 1) = 1;
  CHECK_THROWS_AS(hybrid_pipeline(a, 1, 1), Error);
}

TEST_CASE("full-rank hybrid pipeline keeps every mode") {
  MatrixC<double> a = random_complex(3, 6, 16);
  HybridPipelineResult<double> res = hybrid_pipeline(a, 3, 2);
  CHECK(res.factor.q.rows() == 3);
  CHECK(std::abs(res.kernel.matrix.trace().real() - 3.0) < 1e-8);
  CHECK(replay_schedule(res.factor.q, res.schedule).residual < 1e-9);
}

#pragma once

// Fermionic circuit representation: mode flips, number-conserving Givens
// gates, the particle-hole flip on the last mode, and terminal measurement.
// Compilers turn rotation schedules and particle-hole factorizations into
// preparation circuits, and Givens gates decompose into a five-element
// two-qubit standard-gate sequence with exactly two CNOTs.

#include "fdpp/bdg.hpp"
#include "fdpp/common.hpp"
#include "fdpp/numerics.hpp"
#include "fdpp/qr.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace fdpp {

enum class GateKind { ModeFlip, FermionicGivens, ParticleHoleFlip, MeasureAll };

template <typename Real = double>
struct Gate {
  GateKind kind = GateKind::MeasureAll;
  int mode = 0;                    // ModeFlip target (1-based)
  GivensRotation<Real> rotation;   // FermionicGivens payload
};

template <typename Real>
Gate<Real> make_mode_flip(int mode) {
  Gate<Real> g;
  g.kind = GateKind::ModeFlip;
  g.mode = mode;
  return g;
}

template <typename Real>
Gate<Real> make_givens_gate(const GivensRotation<Real>& rot) {
  Gate<Real> g;
  g.kind = GateKind::FermionicGivens;
  g.rotation = rot;
  return g;
}

template <typename Real>
Gate<Real> make_ph_flip() {
  Gate<Real> g;
  g.kind = GateKind::ParticleHoleFlip;
  return g;
}

template <typename Real>
Gate<Real> make_measure_all() {
  Gate<Real> g;
  g.kind = GateKind::MeasureAll;
  return g;
}

template <typename Real = double>
struct Circuit {
  Index n_modes = 0;
  std::vector<Gate<Real>> gates;  // time order
};

template <typename Real>
Index count_gates(const Circuit<Real>& c, GateKind kind) {
  Index n = 0;
  for (const auto& g : c.gates)
    if (g.kind == kind) ++n;
  return n;
}

// Slater preparation: flip modes 1..r, then play the schedule's rotations
// latest-round first, so the prepared amplitudes match the minors of the
// scheduled factor up to one global phase.
template <typename Real>
Circuit<Real> compile_projection_circuit(const RotationSchedule<Real>& s) {
  Circuit<Real> c;
  c.n_modes = s.n_modes;
  for (Index i = 1; i <= s.rank; ++i)
    c.gates.push_back(make_mode_flip<Real>(static_cast<int>(i)));
  std::vector<GivensRotation<Real>> flat;
  for (const auto& round : s.rounds)
    flat.insert(flat.end(), round.begin(), round.end());
  for (auto it = flat.rbegin(); it != flat.rend(); ++it)
    c.gates.push_back(make_givens_gate(*it));
  c.gates.push_back(make_measure_all<Real>());
  return c;
}

// Quasiparticle-vacuum preparation for a pairing state: flip modes
// 1..|occupied|, rotate them into the occupied quasimode rows of the
// number-conserving factor, then play the particle-hole steps latest first.
template <typename Real>
Circuit<Real> compile_pfpp_circuit(const PhFactorization<Real>& ph,
                                   const std::vector<int>& occupied) {
  const Index n = ph.n;
  std::vector<int> occ = occupied;
  std::sort(occ.begin(), occ.end());
  require(std::unique(occ.begin(), occ.end()) == occ.end(),
          "compile_pfpp_circuit: repeated quasimode");
  for (int m : occ)
    require(m >= 1 && m <= static_cast<int>(n),
            "compile_pfpp_circuit: quasimode out of range");

  Circuit<Real> c;
  c.n_modes = n;
  const Index k = static_cast<Index>(occ.size());
  for (Index i = 1; i <= k; ++i)
    c.gates.push_back(make_mode_flip<Real>(static_cast<int>(i)));

  if (k > 0) {
    // Rows of V^T conj(D) indexed by the occupied quasimodes form an
    // orthonormal factor; its schedule prepares the quasiparticle content.
    MatrixC<Real> vt_dbar =
        ph.v.transpose() * ph.d_phases.conjugate().asDiagonal();
    MatrixC<Real> q_tilde(k, n);
    for (Index i = 0; i < k; ++i)
      q_tilde.row(i) = vt_dbar.row(occ[static_cast<size_t>(i)] - 1);
    RotationSchedule<Real> s = schedule_sameh_kuck(q_tilde);
    std::vector<GivensRotation<Real>> flat;
    for (const auto& round : s.rounds)
      flat.insert(flat.end(), round.begin(), round.end());
    for (auto it = flat.rbegin(); it != flat.rend(); ++it)
      c.gates.push_back(make_givens_gate(*it));
  }

  for (auto it = ph.steps.rbegin(); it != ph.steps.rend(); ++it) {
    if (it->kind == PhStep<Real>::Kind::DoubleGivens)
      c.gates.push_back(make_givens_gate(it->rotation));
    else
      c.gates.push_back(make_ph_flip<Real>());
  }
  c.gates.push_back(make_measure_all<Real>());
  return c;
}

// --- Standard-gate decomposition ------------------------------------------

enum class ElementKind { ZPhase, YRot, ControlledYRot, Cnot };

template <typename Real = double>
struct CircuitElement {
  ElementKind kind = ElementKind::Cnot;
  int q1 = 0;       // ZPhase/YRot target; CNOT and controlled-rotation control
  int q2 = 0;       // CNOT target; controlled-rotation target
  Real angle = 0;
};

template <typename Real = double>
struct ElementaryGateList {
  Index n_qubits = 0;
  std::vector<CircuitElement<Real>> elements;  // time order
};

// Number-conserving Givens gate on adjacent modes, restricted to its
// two-qubit subspace with basis index n1 + 2 n2.
template <typename Real>
Eigen::Matrix<std::complex<Real>, 4, 4> fermionic_givens_two_mode_matrix(
    Real theta, Real phi) {
  using C = std::complex<Real>;
  const Real c = std::cos(theta);
  const Real s = std::sin(theta);
  const C e_plus = std::exp(C(0, phi));
  Eigen::Matrix<C, 4, 4> t = Eigen::Matrix<C, 4, 4>::Identity();
  t(1, 1) = c;
  t(1, 2) = -e_plus * s;
  t(2, 1) = std::conj(e_plus) * s;
  t(2, 2) = c;
  return t;
}

// Five standard elements realizing the two-mode Givens gate with exactly two
// CNOTs: a z-phase sandwich around a CNOT-conjugated controlled y-rotation.
template <typename Real>
ElementaryGateList<Real> decompose_givens_gate(const GivensRotation<Real>& rot) {
  require(rot.l2 == rot.l1 + 1,
          "decompose_givens_gate: expects an adjacent mode pair");
  ElementaryGateList<Real> out;
  out.n_qubits = rot.l2;
  const int q1 = rot.l1;
  const int q2 = rot.l2;
  CircuitElement<Real> e;
  e.kind = ElementKind::ZPhase;
  e.q1 = q2;
  e.angle = -rot.phi;
  out.elements.push_back(e);
  e = CircuitElement<Real>();
  e.kind = ElementKind::Cnot;
  e.q1 = q2;
  e.q2 = q1;
  out.elements.push_back(e);
  e = CircuitElement<Real>();
  e.kind = ElementKind::ControlledYRot;
  e.q1 = q1;
  e.q2 = q2;
  e.angle = -rot.theta;
  out.elements.push_back(e);
  e = CircuitElement<Real>();
  e.kind = ElementKind::Cnot;
  e.q1 = q2;
  e.q2 = q1;
  out.elements.push_back(e);
  e = CircuitElement<Real>();
  e.kind = ElementKind::ZPhase;
  e.q1 = q2;
  e.angle = rot.phi;
  out.elements.push_back(e);
  return out;
}

// Dense 4x4 action of one element on the (q1, q2) pair, basis n_a + 2 n_b for
// element qubits mapped to (a, b) = (lower, higher).
template <typename Real>
Eigen::Matrix<std::complex<Real>, 4, 4> element_two_qubit_matrix(
    const CircuitElement<Real>& e, int qa, int qb) {
  using C = std::complex<Real>;
  using M4 = Eigen::Matrix<C, 4, 4>;
  auto bit = [&](int q, int idx) { return (q == qa) ? (idx & 1) : ((idx >> 1) & 1); };
  M4 m = M4::Zero();
  switch (e.kind) {
    case ElementKind::ZPhase: {
      for (int i = 0; i < 4; ++i) {
        const Real sign = bit(e.q1, i) ? Real(-1) : Real(1);
        m(i, i) = std::exp(C(0, sign * e.angle / 2));
      }
      break;
    }
    case ElementKind::YRot: {
      const Real c = std::cos(e.angle);
      const Real s = std::sin(e.angle);
      for (int i = 0; i < 4; ++i) {
        const int flipped = (e.q1 == qa) ? (i ^ 1) : (i ^ 2);
        if (bit(e.q1, i) == 0) {
          m(i, i) = c;
          m(flipped, i) = -s;
        } else {
          m(i, i) = c;
          m(flipped, i) = s;
        }
      }
      break;
    }
    case ElementKind::ControlledYRot: {
      const Real c = std::cos(e.angle);
      const Real s = std::sin(e.angle);
      for (int i = 0; i < 4; ++i) {
        if (bit(e.q1, i) == 0) {
          m(i, i) = 1;
          continue;
        }
        const int flipped = (e.q2 == qa) ? (i ^ 1) : (i ^ 2);
        if (bit(e.q2, i) == 0) {
          m(i, i) = c;
          m(flipped, i) = -s;
        } else {
          m(i, i) = c;
          m(flipped, i) = s;
        }
      }
      break;
    }
    case ElementKind::Cnot: {
      for (int i = 0; i < 4; ++i) {
        if (bit(e.q1, i) == 0) {
          m(i, i) = 1;
        } else {
          const int flipped = (e.q2 == qa) ? (i ^ 1) : (i ^ 2);
          m(flipped, i) = 1;
        }
      }
      break;
    }
  }
  return m;
}

// Product of a two-qubit element list (time order), basis n_qa + 2 n_qb.
template <typename Real>
Eigen::Matrix<std::complex<Real>, 4, 4> gate_list_two_qubit_unitary(
    const ElementaryGateList<Real>& list, int qa, int qb) {
  Eigen::Matrix<std::complex<Real>, 4, 4> u =
      Eigen::Matrix<std::complex<Real>, 4, 4>::Identity();
  for (const auto& e : list.elements)
    u = (element_two_qubit_matrix(e, qa, qb) * u).eval();
  return u;
}

// --- Cost metrics ----------------------------------------------------------

struct CnotMetrics {
  Index cnot_count = 0;   // two per Givens gate
  Index depth = 0;        // layered depth of the decomposed element stream
  std::vector<std::pair<int, int>> off_graph;  // Givens pairs not on an edge
};

template <typename Real>
CnotMetrics cnot_metrics(const Circuit<Real>& c,
                         const CouplingGraph* graph = nullptr) {
  CnotMetrics m;
  std::set<std::pair<int, int>> edges;
  if (graph)
    for (auto e : graph->edges) edges.insert(e);
  std::vector<Index> avail(static_cast<size_t>(c.n_modes) + 1, 0);
  auto place = [&](std::vector<int> qubits) {
    Index r = 0;
    for (int q : qubits) r = std::max(r, avail[static_cast<size_t>(q)]);
    ++r;
    for (int q : qubits) avail[static_cast<size_t>(q)] = r;
    m.depth = std::max(m.depth, r);
  };
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::ModeFlip:
        place({g.mode});
        break;
      case GateKind::ParticleHoleFlip:
        place({static_cast<int>(c.n_modes)});
        break;
      case GateKind::FermionicGivens: {
        m.cnot_count += 2;
        const auto pair = std::make_pair(g.rotation.l1, g.rotation.l2);
        if (graph && !edges.count(pair)) m.off_graph.push_back(pair);
        // Five elements: phase, cnot, controlled rotation, cnot, phase.
        place({g.rotation.l2});
        place({g.rotation.l1, g.rotation.l2});
        place({g.rotation.l1, g.rotation.l2});
        place({g.rotation.l1, g.rotation.l2});
        place({g.rotation.l2});
        break;
      }
      case GateKind::MeasureAll:
        break;
    }
  }
  return m;
}

}  // namespace fdpp

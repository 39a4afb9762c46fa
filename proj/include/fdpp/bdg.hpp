#pragma once

// Quadratic fermion Hamiltonians with pairing: the 2N x 2N single-particle
// form, its diagonalization through the real skew canonical form, one-body
// matrices of thermal and excited quasi-free states, the Majorana form, and
// the two-step particle-hole factorization of the Bogoliubov transform into
// doubled Givens rotations plus mode flips.

#include "fdpp/common.hpp"
#include "fdpp/kernels.hpp"
#include "fdpp/numerics.hpp"

#include <cmath>
#include <cstdint>
#include <variant>
#include <vector>

namespace fdpp {

template <typename Real = double>
struct BdGHamiltonian {
  MatrixC<Real> m;      // Hermitian hopping block
  MatrixC<Real> delta;  // antisymmetric pairing block
};

template <typename Real>
BdGHamiltonian<Real> make_bdg(const MatrixC<Real>& m,
                              const MatrixC<Real>& delta) {
  const Index n = m.rows();
  require(m.cols() == n && delta.rows() == n && delta.cols() == n,
          "make_bdg: blocks must be square and same size");
  const Real scale = std::max({max_abs(m), max_abs(delta), Real(1)});
  require(max_abs(m - m.adjoint()) <= scaled_tol(scale, Real(1e-8)),
          "make_bdg: hopping block must be Hermitian");
  require(max_abs(delta + delta.transpose()) <= scaled_tol(scale, Real(1e-8)),
          "make_bdg: pairing block must be antisymmetric");
  return BdGHamiltonian<Real>{m, delta};
}

// Single-particle matrix [[-conj(M), -conj(Delta)], [Delta, M]]; satisfies
// the particle-hole symmetry C conj(H) C = -H with C = [[0,I],[I,0]].
template <typename Real>
MatrixC<Real> build_bdg_matrix(const BdGHamiltonian<Real>& h) {
  const Index n = h.m.rows();
  MatrixC<Real> out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = -h.m.conjugate();
  out.topRightCorner(n, n) = -h.delta.conjugate();
  out.bottomLeftCorner(n, n) = h.delta;
  out.bottomRightCorner(n, n) = h.m;
  return out;
}

template <typename Real = double>
struct BogoliubovTransform {
  MatrixC<Real> w;        // unitary and orthogonal-complex, blocks [[U,V],[conj(V),conj(U)]]
  VectorR<Real> epsilons; // quasiparticle energies, ascending >= 0
  MatrixC<Real> r_orth;   // real orthogonal factor of the canonical form
  MatrixC<Real> a_skew;   // real skew generator in the self-adjoint basis
  Real det_w = 1;         // determinant of r_orth, +1 or -1
};

namespace detail {

// Omega maps ladder operators to self-adjoint combinations:
// (1/sqrt2) [[I, I], [iI, -iI]].
template <typename Real>
MatrixC<Real> omega_matrix(Index n) {
  using C = std::complex<Real>;
  const Real s = Real(1) / std::sqrt(Real(2));
  MatrixC<Real> om = MatrixC<Real>::Zero(2 * n, 2 * n);
  om.topLeftCorner(n, n) = s * MatrixC<Real>::Identity(n, n);
  om.topRightCorner(n, n) = s * MatrixC<Real>::Identity(n, n);
  om.bottomLeftCorner(n, n) = C(0, s) * MatrixC<Real>::Identity(n, n);
  om.bottomRightCorner(n, n) = C(0, -s) * MatrixC<Real>::Identity(n, n);
  return om;
}

}  // namespace detail

// Diagonalize the single-particle matrix: H = W^* diag(-eps, eps) W with
// W = Omega^* R Omega built from the real skew canonical form of the
// self-adjoint-basis generator.
template <typename Real>
BogoliubovTransform<Real> diagonalize_bdg(const BdGHamiltonian<Real>& h) {
  using C = std::complex<Real>;
  const Index n = h.m.rows();
  MatrixC<Real> hmat = build_bdg_matrix(h);
  MatrixC<Real> om = detail::omega_matrix<Real>(n);

  // Row-swapped single-particle matrix C * H; in the self-adjoint basis the
  // generator -i Omega (C H) Omega^* is real and skew-symmetric.
  MatrixC<Real> ch(2 * n, 2 * n);
  ch.topRows(n) = hmat.bottomRows(n);
  ch.bottomRows(n) = hmat.topRows(n);
  MatrixC<Real> a = C(0, -1) * (om.conjugate() * ch * om.adjoint());
  const Real scale = std::max(max_abs(a), Real(1));
  require(max_abs(a.imag()) <= scaled_tol(scale, Real(1e-8)),
          "diagonalize_bdg: generator is not real");
  require(max_abs(a + a.transpose()) <= scaled_tol(scale, Real(1e-8)),
          "diagonalize_bdg: generator is not skew");

  SkewCanonicalForm<Real> canon = skew_real_canonical<Real>(a);
  BogoliubovTransform<Real> out;
  out.a_skew = Real(0.5) * (a - a.transpose()).real().template cast<C>();
  out.r_orth = canon.rotation;
  out.epsilons = canon.epsilons;
  out.w = om.adjoint() * canon.rotation * om;
  const std::complex<Real> det = canon.rotation.determinant();
  out.det_w = det.real() >= Real(0) ? Real(1) : Real(-1);
  require(std::abs(std::abs(det.real()) - Real(1)) <= Real(1e-8) &&
              std::abs(det.imag()) <= Real(1e-8),
          "diagonalize_bdg: orthogonal factor has bad determinant");
  return out;
}

// One-body matrix of the thermal state: S = conj(W)^* diag(sigma(beta eps),
// sigma(-beta eps)) conj(W).
template <typename Real>
SMatrix<Real> s_matrix_thermal(const BogoliubovTransform<Real>& t, Real beta) {
  require(beta > Real(0), "s_matrix_thermal: beta must be positive");
  const Index n = t.epsilons.size();
  VectorR<Real> diag(2 * n);
  for (Index k = 0; k < n; ++k) {
    const Real e = t.epsilons(k);
    diag(k) = Real(1) / (Real(1) + std::exp(-beta * e));      // sigma(beta e)
    diag(n + k) = Real(1) / (Real(1) + std::exp(beta * e));   // sigma(-beta e)
  }
  MatrixC<Real> wbar = t.w.conjugate();
  MatrixC<Real> s = wbar.adjoint() *
                    diag.template cast<std::complex<Real>>().asDiagonal() *
                    wbar;
  return make_s_matrix<Real>(s);
}

// One-body matrix of the excited quasi-free state with quasiparticle
// occupation set c (1-based): S = conj(W)^* diag(1_{c^c}, 1_c) conj(W).
template <typename Real>
SMatrix<Real> s_matrix_projective(const BogoliubovTransform<Real>& t,
                                  const std::vector<int>& c) {
  const Index n = t.epsilons.size();
  VectorR<Real> diag = VectorR<Real>::Zero(2 * n);
  std::uint64_t mask = mask_of(c);
  for (Index k = 0; k < n; ++k) {
    const bool occ = (mask >> k) & 1;
    diag(k) = occ ? Real(0) : Real(1);
    diag(n + k) = occ ? Real(1) : Real(0);
  }
  MatrixC<Real> wbar = t.w.conjugate();
  MatrixC<Real> s = wbar.adjoint() *
                    diag.template cast<std::complex<Real>>().asDiagonal() *
                    wbar;
  return make_s_matrix<Real>(s);
}

// Expected parity of the particle number. Thermal: det_w * prod tanh(beta
// eps_k / 2) (zero modes rejected). Projective: (-1)^{|c|} det_w.
template <typename Real>
Real parity_prediction_thermal(const BogoliubovTransform<Real>& t, Real beta) {
  require(beta > Real(0), "parity_prediction_thermal: beta must be positive");
  Real p = t.det_w;
  for (Index k = 0; k < t.epsilons.size(); ++k) {
    require(t.epsilons(k) > Real(1e-12),
            "parity_prediction_thermal: zero quasiparticle energy");
    p *= std::tanh(beta * t.epsilons(k) / Real(2));
  }
  return p;
}

template <typename Real>
Real parity_prediction_projective(const BogoliubovTransform<Real>& t,
                                  const std::vector<int>& c) {
  return (c.size() % 2 == 0) ? t.det_w : -t.det_w;
}

// Majorana (interleaved) ordering of the skew generator: index 2k-1 -> k,
// index 2k -> N+k. Pf of this form equals det_w * prod eps.
template <typename Real>
MatrixC<Real> majorana_form(const BogoliubovTransform<Real>& t) {
  const Index n = t.epsilons.size();
  MatrixC<Real> out(2 * n, 2 * n);
  auto perm = [n](Index i) { return (i % 2 == 0) ? i / 2 : n + i / 2; };
  for (Index i = 0; i < 2 * n; ++i)
    for (Index j = 0; j < 2 * n; ++j)
      out(i, j) = t.a_skew(perm(i), perm(j));
  return out;
}

// --- Particle-hole factorization ----------------------------------------

// One step of the factorization: either a doubled Givens rotation acting on
// columns (l1, l2) of the particle half and conjugately on the hole half, or
// a particle-hole swap on the last mode.
template <typename Real = double>
struct PhStep {
  enum class Kind { DoubleGivens, ParticleHole };
  Kind kind = Kind::DoubleGivens;
  GivensRotation<Real> rotation;  // valid for DoubleGivens
};

template <typename Real = double>
struct PhFactorization {
  Index n = 0;
  MatrixC<Real> v;                 // left unitary (staircase of row rotations)
  std::vector<PhStep<Real>> steps; // right factors, in application order
  VectorC<Real> d_phases;          // unit-modulus diagonal of the residue
  Index ph_count = 0;
  Index double_count = 0;
};

namespace detail {

// Right-multiply the N x 2N working matrix by the adjoint of the doubled
// rotation: columns (l1, l2) get gamma(theta, phi)^*, columns (N+l1, N+l2)
// get the conjugate rotation's adjoint.
template <typename Real>
void apply_double_givens_right(MatrixC<Real>& x, Index n,
                               const GivensRotation<Real>& rot) {
  using C = std::complex<Real>;
  const Real c = std::cos(rot.theta);
  const Real s = std::sin(rot.theta);
  const C ep = std::polar(Real(1), rot.phi);
  const C em = std::polar(Real(1), -rot.phi);
  const Index a = rot.l1 - 1;
  const Index b = rot.l2 - 1;
  VectorC<Real> ca = x.col(a);
  x.col(a) = c * ca + ep * s * x.col(b);
  x.col(b) = -em * s * ca + c * x.col(b).eval();
  VectorC<Real> cna = x.col(n + a);
  x.col(n + a) = c * cna + em * s * x.col(n + b);
  x.col(n + b) = -ep * s * cna + c * x.col(n + b).eval();
}

// Right-multiply by B^* = B: swap columns N (particle) and 2N (hole).
template <typename Real>
void apply_ph_swap_right(MatrixC<Real>& x, Index n) {
  x.col(n - 1).swap(x.col(2 * n - 1));
}

// Dense 2N x 2N matrix of one step (for reconstruction checks).
template <typename Real>
MatrixC<Real> ph_step_matrix(const PhStep<Real>& st, Index n) {
  MatrixC<Real> m = MatrixC<Real>::Identity(2 * n, 2 * n);
  if (st.kind == PhStep<Real>::Kind::ParticleHole) {
    m(n - 1, n - 1) = 0;
    m(2 * n - 1, 2 * n - 1) = 0;
    m(n - 1, 2 * n - 1) = 1;
    m(2 * n - 1, n - 1) = 1;
    return m;
  }
  const auto g = givens_matrix(st.rotation.theta, st.rotation.phi);
  const Index a = st.rotation.l1 - 1;
  const Index b = st.rotation.l2 - 1;
  m(a, a) = g(0, 0);
  m(a, b) = g(0, 1);
  m(b, a) = g(1, 0);
  m(b, b) = g(1, 1);
  m(n + a, n + a) = std::conj(g(0, 0));
  m(n + a, n + b) = std::conj(g(0, 1));
  m(n + b, n + a) = std::conj(g(1, 0));
  m(n + b, n + b) = std::conj(g(1, 1));
  return m;
}

}  // namespace detail

// Factor the lower half (W2 | W1) of the Bogoliubov transform as
// V (W2 | W1) O^* = (0 | D): a left staircase of row rotations V, a sequence
// of doubled Givens / particle-hole steps O = s_K ... s_1, and a unit-modulus
// diagonal D.
template <typename Real>
PhFactorization<Real> factorize_particle_hole(
    const BogoliubovTransform<Real>& t) {
  using C = std::complex<Real>;
  const Index n = t.epsilons.size();
  PhFactorization<Real> out;
  out.n = n;
  // Lower half of W = [[U, V], [conj(V), conj(U)]].
  MatrixC<Real> x = t.w.bottomRows(n);
  MatrixC<Real> v = MatrixC<Real>::Identity(n, n);

  // Left staircase: zero the particle block below the anti-diagonal so row i
  // keeps support only on its trailing columns.
  for (Index j = 0; j + 1 < n; ++j) {
    for (Index i = 0; i < n - 1 - j; ++i) {
      const C xx = x(i, j);
      const C yy = x(i + 1, j);
      if (std::abs(xx) < Real(1e-12)) continue;
      GivensRotation<Real> rot =
          detail::left_params_zero_first<Real>(xx, yy);
      rot.l1 = static_cast<int>(i) + 1;
      rot.l2 = static_cast<int>(i) + 2;
      apply_givens_inplace(x, rot, Side::Left, false);
      apply_givens_inplace(v, rot, Side::Left, false);
    }
  }

  // Row sweep: drive each particle-block row into its last column by doubled
  // rotations (survivor drifts right), then flip it into the hole block when
  // it remains above threshold.
  for (Index i = 0; i < n; ++i) {
    for (Index j = n - 1 - i; j + 1 < n; ++j) {
      const C xx = x(i, j);
      if (std::abs(xx) < Real(1e-12)) continue;
      const C yy = x(i, j + 1);
      GivensRotation<Real> rot =
          detail::right_params_zero_first<Real>(xx, yy);
      rot.l1 = static_cast<int>(j) + 1;
      rot.l2 = static_cast<int>(j) + 2;
      detail::apply_double_givens_right(x, n, rot);
      PhStep<Real> st;
      st.kind = PhStep<Real>::Kind::DoubleGivens;
      st.rotation = rot;
      out.steps.push_back(st);
      ++out.double_count;
    }
    if (std::abs(x(i, n - 1)) > Real(1e-10)) {
      detail::apply_ph_swap_right(x, n);
      PhStep<Real> st;
      st.kind = PhStep<Real>::Kind::ParticleHole;
      out.steps.push_back(st);
      ++out.ph_count;
    }
  }

  require(out.double_count <= n * (n - 1) / 2,
          "factorize_particle_hole: rotation budget exceeded");
  require(out.ph_count <= n,
          "factorize_particle_hole: flip budget exceeded");
  // Residue must be (0 | D) with D unit-modulus diagonal.
  const Real res_left = max_abs(x.leftCols(n));
  require(res_left <= Real(1e-8),
          "factorize_particle_hole: particle block not annihilated");
  out.d_phases = VectorC<Real>::Zero(n);
  MatrixC<Real> hole = x.rightCols(n);
  for (Index i = 0; i < n; ++i) {
    out.d_phases(i) = hole(i, i);
    require(std::abs(std::abs(hole(i, i)) - Real(1)) <= Real(1e-8),
            "factorize_particle_hole: residue diagonal is not unit modulus");
  }
  MatrixC<Real> offdiag = hole;
  offdiag.diagonal().setZero();
  require(max_abs(offdiag) <= Real(1e-8),
          "factorize_particle_hole: residue is not diagonal");
  out.v = v;
  return out;
}

// Dense product O = s_K ... s_1 of the recorded steps.
template <typename Real>
MatrixC<Real> ph_steps_matrix(const PhFactorization<Real>& f) {
  MatrixC<Real> o = MatrixC<Real>::Identity(2 * f.n, 2 * f.n);
  for (const auto& st : f.steps) o = detail::ph_step_matrix(st, f.n) * o;
  return o;
}

// Reconstruction of the full transform from its lower half:
// W = [[V^T conj(D), 0], [0, V^* D]] O.
template <typename Real>
MatrixC<Real> reconstruct_w(const PhFactorization<Real>& f) {
  const Index n = f.n;
  MatrixC<Real> block = MatrixC<Real>::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) =
      f.v.transpose() * f.d_phases.conjugate().asDiagonal();
  block.bottomRightCorner(n, n) =
      f.v.adjoint() * f.d_phases.asDiagonal();
  return block * ph_steps_matrix(f);
}

}  // namespace fdpp

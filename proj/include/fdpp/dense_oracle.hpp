#pragma once

// Dense Fock-space oracle built directly from Jordan-Wigner ladder matrices.
// Deliberately brute-force: everything is an explicit 2^N x 2^N matrix, so
// the fast simulator, the compiled circuits, and the closed-form kernel
// formulas can be validated against literal operator algebra on small N.

#include "fdpp/bdg.hpp"
#include "fdpp/common.hpp"
#include "fdpp/numerics.hpp"

#include <vector>

namespace fdpp {

// Annihilation operator with the usual string: a_k removes a particle from
// mode k and picks up the parity of modes 1..k-1.
template <typename Real>
MatrixC<Real> jw_annihilation(Index n_modes, int k) {
  require(k >= 1 && k <= static_cast<int>(n_modes), "jw_annihilation: bad mode");
  const Index dim = Index(1) << n_modes;
  MatrixC<Real> a = MatrixC<Real>::Zero(dim, dim);
  const std::uint64_t bit = std::uint64_t(1) << (k - 1);
  const std::uint64_t lower = bit - 1;
  for (std::uint64_t m = 0; m < static_cast<std::uint64_t>(dim); ++m) {
    if (!(m & bit)) continue;
    const Real sign = (popcount64(m & lower) & 1) ? Real(-1) : Real(1);
    a(static_cast<Index>(m ^ bit), static_cast<Index>(m)) = sign;
  }
  return a;
}

template <typename Real>
MatrixC<Real> jw_creation(Index n_modes, int k) {
  return jw_annihilation<Real>(n_modes, k).adjoint();
}

template <typename Real>
MatrixC<Real> jw_number(Index n_modes, int k) {
  MatrixC<Real> a = jw_annihilation<Real>(n_modes, k);
  return a.adjoint() * a;
}

// Qubit-level X on one mode (no string), matching the circuit's mode flip.
template <typename Real>
MatrixC<Real> dense_mode_flip(Index n_modes, int k) {
  const Index dim = Index(1) << n_modes;
  MatrixC<Real> x = MatrixC<Real>::Zero(dim, dim);
  const std::uint64_t bit = std::uint64_t(1) << (k - 1);
  for (std::uint64_t m = 0; m < static_cast<std::uint64_t>(dim); ++m)
    x(static_cast<Index>(m ^ bit), static_cast<Index>(m)) = 1;
  return x;
}

// exp(A) for anti-Hermitian A through the spectrum of iA.
template <typename Real>
MatrixC<Real> unitary_exp_antihermitian(const MatrixC<Real>& a) {
  using C = std::complex<Real>;
  HermitianEig<Real> eig = hermitian_eig(MatrixC<Real>(C(0, 1) * a));
  VectorC<Real> ph(eig.eigenvalues.size());
  for (Index i = 0; i < ph.size(); ++i)
    ph(i) = std::exp(C(0, -eig.eigenvalues(i)));
  return eig.eigenvectors * ph.asDiagonal() * eig.eigenvectors.adjoint();
}

// Dense Givens gate from its defining operator product:
// exp(-i phi n_l2) exp(theta (a_l2^+ a_l1 - a_l1^+ a_l2)) exp(i phi n_l2).
template <typename Real>
MatrixC<Real> dense_fermionic_givens(Index n_modes,
                                     const GivensRotation<Real>& rot) {
  using C = std::complex<Real>;
  MatrixC<Real> a1 = jw_annihilation<Real>(n_modes, rot.l1);
  MatrixC<Real> a2 = jw_annihilation<Real>(n_modes, rot.l2);
  MatrixC<Real> gen =
      rot.theta * (a2.adjoint() * a1 - a1.adjoint() * a2).eval();
  MatrixC<Real> n2 = a2.adjoint() * a2;
  MatrixC<Real> rotu = unitary_exp_antihermitian(gen);
  MatrixC<Real> phase_minus = unitary_exp_antihermitian(
      MatrixC<Real>(C(0, -rot.phi) * n2));
  MatrixC<Real> phase_plus = unitary_exp_antihermitian(
      MatrixC<Real>(C(0, rot.phi) * n2));
  return phase_minus * rotu * phase_plus;
}

// All size-r subsets of {0, .., n-1} in lexicographic order.
inline std::vector<std::vector<Index>> combinations(Index n, Index r) {
  std::vector<std::vector<Index>> out;
  if (r < 0 || r > n) return out;
  std::vector<Index> c(static_cast<size_t>(r));
  for (Index i = 0; i < r; ++i) c[static_cast<size_t>(i)] = i;
  while (true) {
    out.push_back(c);
    Index i = r - 1;
    while (i >= 0 && c[static_cast<size_t>(i)] == n - r + i) --i;
    if (i < 0) break;
    ++c[static_cast<size_t>(i)];
    for (Index j = i + 1; j < r; ++j)
      c[static_cast<size_t>(j)] = c[static_cast<size_t>(j - 1)] + 1;
  }
  return out;
}

// Slater determinant statevector of an orthonormal r x N factor: amplitude
// on the configuration occupying columns C (ascending) is det Q_{:,C}.
template <typename Real>
VectorC<Real> slater_statevector(const MatrixC<Real>& q) {
  const Index r = q.rows();
  const Index n = q.cols();
  VectorC<Real> psi = VectorC<Real>::Zero(Index(1) << n);
  if (r == 0) {
    psi(0) = 1;
    return psi;
  }
  for (const auto& c : combinations(n, r)) {
    MatrixC<Real> minor(r, r);
    std::uint64_t mask = 0;
    for (Index j = 0; j < r; ++j) {
      minor.col(j) = q.col(c[static_cast<size_t>(j)]);
      mask |= std::uint64_t(1) << c[static_cast<size_t>(j)];
    }
    psi(static_cast<Index>(mask)) = minor.determinant();
  }
  return psi;
}

// Number-conserving dense Hamiltonian sum_ij M_ij a_i^+ a_j.
template <typename Real>
MatrixC<Real> dense_number_hamiltonian(const MatrixC<Real>& m) {
  const Index n = m.rows();
  require(n == m.cols(), "dense_number_hamiltonian: square matrix expected");
  const Index dim = Index(1) << n;
  MatrixC<Real> h = MatrixC<Real>::Zero(dim, dim);
  for (Index i = 0; i < n; ++i) {
    MatrixC<Real> ci = jw_creation<Real>(n, static_cast<int>(i) + 1);
    for (Index j = 0; j < n; ++j) {
      MatrixC<Real> aj = jw_annihilation<Real>(n, static_cast<int>(j) + 1);
      h += m(i, j) * (ci * aj).eval();
    }
  }
  return h;
}

// Dense quasiparticle Hamiltonian sum_k eps_k b_k^+ b_k with
// b_k = sum_j (U_kj a_j + V_kj a_j^+) read off the Bogoliubov transform.
template <typename Real>
MatrixC<Real> dense_quasiparticle_hamiltonian(const BogoliubovTransform<Real>& t) {
  const Index n = t.epsilons.size();
  const Index dim = Index(1) << n;
  std::vector<MatrixC<Real>> ann;
  for (Index j = 0; j < n; ++j)
    ann.push_back(jw_annihilation<Real>(n, static_cast<int>(j) + 1));
  MatrixC<Real> h = MatrixC<Real>::Zero(dim, dim);
  for (Index k = 0; k < n; ++k) {
    MatrixC<Real> b = MatrixC<Real>::Zero(dim, dim);
    for (Index j = 0; j < n; ++j) {
      b += t.w(k, j) * ann[static_cast<size_t>(j)];
      b += t.w(k, n + j) * ann[static_cast<size_t>(j)].adjoint().eval();
    }
    h += t.epsilons(k) * (b.adjoint() * b).eval();
  }
  return h;
}

// exp(-beta H)/Z for Hermitian H.
template <typename Real>
MatrixC<Real> dense_thermal_density(const MatrixC<Real>& h, Real beta) {
  HermitianEig<Real> eig = hermitian_eig(h);
  // Shift by the ground energy for numerical safety; Z absorbs the shift.
  const Real e0 = eig.eigenvalues(0);
  VectorR<Real> boltz(eig.eigenvalues.size());
  for (Index i = 0; i < boltz.size(); ++i)
    boltz(i) = std::exp(-beta * (eig.eigenvalues(i) - e0));
  MatrixC<Real> rho = eig.eigenvectors *
                      boltz.template cast<std::complex<Real>>().asDiagonal() *
                      eig.eigenvectors.adjoint();
  return rho / rho.trace();
}

template <typename Real>
std::complex<Real> dense_expectation(const MatrixC<Real>& rho,
                                     const MatrixC<Real>& op) {
  return (rho * op).trace();
}

template <typename Real>
std::complex<Real> dense_expectation(const VectorC<Real>& psi,
                                     const MatrixC<Real>& op) {
  return psi.dot(op * psi);
}

// Probability that a thermal or pure state shows exactly the bitstring mask.
template <typename Real>
Real dense_occupation_probability(const MatrixC<Real>& rho,
                                  std::uint64_t mask) {
  return std::real(rho(static_cast<Index>(mask), static_cast<Index>(mask)));
}

}  // namespace fdpp

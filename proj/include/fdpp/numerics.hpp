#pragma once

// Dense numerical kernels: canonical Givens rotations, Pfaffians via
// Parlett-Reid tridiagonalization, Hermitian eigendecomposition, the real
// canonical form of real skew-symmetric matrices, and Hermitian matrix
// functions. Everything is templated on the real scalar and takes Eigen
// expressions.

#include "fdpp/common.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace fdpp {

// One plane rotation acting on (1-based) axes l1 < l2 with angles
// theta in [0, pi/2] and phi in (-pi, pi].
template <typename Real = double>
struct GivensRotation {
  int l1 = 1;
  int l2 = 2;
  Real theta = 0;
  Real phi = 0;
};

// The 2x2 core gamma(theta, phi) = [[c, e^{-i phi} s], [-e^{i phi} s, c]].
template <typename Real>
Eigen::Matrix<std::complex<Real>, 2, 2> givens_matrix(Real theta, Real phi) {
  using C = std::complex<Real>;
  const Real c = std::cos(theta);
  const Real s = std::sin(theta);
  const C e_plus = std::polar(Real(1), phi);
  const C e_minus = std::polar(Real(1), -phi);
  Eigen::Matrix<C, 2, 2> g;
  g << C(c, 0), e_minus * s, -e_plus * s, C(c, 0);
  return g;
}

// Parameters (theta, phi) such that gamma(theta, phi) (x, y)^T = (r, 0)^T
// with r = sqrt(|x|^2 + |y|^2) * (phase of x). Degenerate inputs (x or y
// below 1e-14 in magnitude relative to the pair) take phi = 0; both zero is
// an error.
template <typename Real>
GivensRotation<Real> givens_params_to_zero(std::complex<Real> x,
                                           std::complex<Real> y) {
  const Real ax = std::abs(x);
  const Real ay = std::abs(y);
  const Real h = std::hypot(ax, ay);
  require(h > Real(0), "givens_params_to_zero: both inputs are zero");
  GivensRotation<Real> rot;
  rot.theta = std::atan2(ay, ax);  // in [0, pi/2] since ax, ay >= 0
  if (ax <= Real(1e-14) * h || ay <= Real(1e-14) * h) {
    rot.phi = 0;
  } else {
    // e^{i phi} = conj(x) y / |x y|.
    rot.phi = wrap_angle(std::arg(std::conj(x) * y));
  }
  return rot;
}

namespace detail {

// Right-action variants used by schedulers: parameters such that
// M G(theta,phi)^* zeroes one slot of the row (x, y) = (M(i,l1), M(i,l2)).
//
// Columns transform as
//   new col l1 =  c col_l1 + e^{i phi} s col_l2
//   new col l2 = -e^{-i phi} s col_l1 + c col_l2.

// Zero the second slot (survivor drifts to l1).
template <typename Real>
GivensRotation<Real> right_params_zero_second(std::complex<Real> x,
                                              std::complex<Real> y) {
  GivensRotation<Real> rot = givens_params_to_zero(x, y);
  rot.phi = wrap_angle(-rot.phi);  // conjugate phase for the adjoint action
  return rot;
}

// Zero the first slot (survivor drifts to l2): c x + e^{i phi} s y = 0 with
// c = |y|/h, s = |x|/h.
template <typename Real>
GivensRotation<Real> right_params_zero_first(std::complex<Real> x,
                                             std::complex<Real> y) {
  const Real ax = std::abs(x);
  const Real ay = std::abs(y);
  const Real h = std::hypot(ax, ay);
  require(h > Real(0), "right_params_zero_first: both inputs are zero");
  GivensRotation<Real> rot;
  rot.theta = std::atan2(ax, ay);  // cos = |y|/h, sin = |x|/h
  if (ax <= Real(1e-14) * h || ay <= Real(1e-14) * h) {
    rot.phi = 0;
  } else {
    rot.phi = wrap_angle(std::arg(-(x * std::conj(y))) );
  }
  return rot;
}

// Left-action variant zeroing the first slot: c x + e^{-i phi} s y = 0 with
// c = |y|/h, s = |x|/h (used by row-eliminating preprocessing sweeps).
template <typename Real>
GivensRotation<Real> left_params_zero_first(std::complex<Real> x,
                                            std::complex<Real> y) {
  GivensRotation<Real> rot = right_params_zero_first(x, y);
  rot.phi = wrap_angle(-rot.phi);
  return rot;
}

}  // namespace detail

enum class Side { Left, Right };

// Apply the embedded rotation to a matrix: G M, M G, or the adjoint variants
// G^* M, M G^*. Rows/columns l1, l2 are 1-based.
template <typename Real>
void apply_givens_inplace(MatrixC<Real>& m, const GivensRotation<Real>& rot,
                          Side side, bool conjugate) {
  using C = std::complex<Real>;
  const Real c = std::cos(rot.theta);
  const Real s = std::sin(rot.theta);
  const C ep = std::polar(Real(1), rot.phi);
  const C em = std::polar(Real(1), -rot.phi);
  const Index a = rot.l1 - 1;
  const Index b = rot.l2 - 1;
  if (side == Side::Left) {
    require(a >= 0 && b < m.rows() && a < b, "apply_givens: bad row indices");
    // G:   row a <-  c row_a + e^{-i phi} s row_b
    //      row b <- -e^{i phi} s row_a + c row_b
    // G^*: row a <-  c row_a - e^{-i phi} s row_b
    //      row b <-  e^{i phi} s row_a + c row_b
    const C t01 = conjugate ? C(-em * s) : C(em * s);
    const C t10 = conjugate ? C(ep * s) : C(-ep * s);
    Eigen::Matrix<C, 1, Eigen::Dynamic> ra = m.row(a);
    m.row(a) = c * ra + t01 * m.row(b);
    m.row(b) = t10 * ra + c * m.row(b).eval();
  } else {
    require(a >= 0 && b < m.cols() && a < b, "apply_givens: bad col indices");
    // M G:   col a <- c col_a - e^{i phi} s col_b
    //        col b <- e^{-i phi} s col_a + c col_b
    // M G^*: col a <- c col_a + e^{i phi} s col_b
    //        col b <- -e^{-i phi} s col_a + c col_b
    const C t10 = conjugate ? C(ep * s) : C(-ep * s);
    const C t01 = conjugate ? C(-em * s) : C(em * s);
    Eigen::Matrix<C, Eigen::Dynamic, 1> ca = m.col(a);
    m.col(a) = c * ca + t10 * m.col(b);
    m.col(b) = t01 * ca + c * m.col(b).eval();
  }
}

template <typename Real>
MatrixC<Real> apply_givens(const MatrixC<Real>& m,
                           const GivensRotation<Real>& rot, Side side,
                           bool conjugate) {
  MatrixC<Real> out = m;
  apply_givens_inplace(out, rot, side, conjugate);
  return out;
}

// Pfaffian of an (anti-symmetrized) even-dimensional matrix via Parlett-Reid
// tridiagonalization with partial pivoting. Odd dimension gives 0. The input
// must be skew-symmetric within 1e-8 of its largest entry; the computation
// runs on the exact antisymmetric part (A - A^T)/2.
template <typename Real>
std::complex<Real> pfaffian(const MatrixC<Real>& a_in) {
  using C = std::complex<Real>;
  const Index n = a_in.rows();
  require(a_in.cols() == n, "pfaffian: matrix must be square");
  if (n == 0) return C(1, 0);
  if (n % 2 == 1) return C(0, 0);
  const Real scale = max_abs(a_in);
  require(max_abs(a_in + a_in.transpose()) <= scaled_tol(scale, Real(1e-8)),
          "pfaffian: input is not skew-symmetric");
  MatrixC<Real> a = Real(0.5) * (a_in - a_in.transpose());

  C pf(1, 0);
  for (Index k = 0; k + 1 < n; k += 2) {
    // Partial pivoting: move the largest |A(i,k)|, i > k, into row k+1.
    Index kp = k + 1;
    Real best = std::abs(a(k + 1, k));
    for (Index i = k + 2; i < n; ++i) {
      const Real v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        kp = i;
      }
    }
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      pf = -pf;
    }
    const C pivot = a(k, k + 1);
    if (pivot == C(0, 0)) return C(0, 0);
    pf *= pivot;
    if (k + 2 < n) {
      const Index m = n - (k + 2);
      VectorC<Real> tau = a.col(k).segment(k + 2, m) / pivot;
      VectorC<Real> col1 = a.col(k + 1).segment(k + 2, m);
      a.block(k + 2, k + 2, m, m) +=
          col1 * tau.transpose() - tau * col1.transpose();
    }
  }
  return pf;
}

template <typename Real>
struct HermitianEig {
  VectorR<Real> eigenvalues;  // ascending
  MatrixC<Real> eigenvectors;  // unitary, columns aligned with eigenvalues
};

// Eigendecomposition of a Hermitian matrix (validated on entry). Ascending
// eigenvalues, unitary eigenvector matrix, H = U diag(w) U^*.
template <typename Real>
HermitianEig<Real> hermitian_eig(const MatrixC<Real>& h) {
  const Index n = h.rows();
  require(h.cols() == n, "hermitian_eig: matrix must be square");
  const Real scale = max_abs(h);
  require(max_abs(h - h.adjoint()) <= scaled_tol(scale, Real(1e-8)),
          "hermitian_eig: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<MatrixC<Real>> solver(
      Real(0.5) * (h + h.adjoint()));
  require(solver.info() == Eigen::Success, "hermitian_eig: no convergence");
  HermitianEig<Real> out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();
  return out;
}

template <typename Real>
struct SkewCanonicalForm {
  MatrixC<Real> rotation;   // real orthogonal (zero imaginary parts)
  VectorR<Real> epsilons;   // ascending, >= 0
};

namespace detail {

// Gram-Schmidt completion: extend `rows` (orthonormal, possibly empty) by
// vectors drawn from `candidates` until `count` new rows were added.
template <typename Real>
std::vector<VectorR<Real>> orthonormal_completion(
    const std::vector<VectorR<Real>>& rows,
    const std::vector<VectorR<Real>>& candidates, Index count) {
  std::vector<VectorR<Real>> base = rows;
  std::vector<VectorR<Real>> added;
  for (const auto& cand : candidates) {
    if (static_cast<Index>(added.size()) == count) break;
    VectorR<Real> v = cand;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : base) v -= b.dot(v) * b;
    const Real nrm = v.norm();
    if (nrm > Real(1e-8)) {
      v /= nrm;
      base.push_back(v);
      added.push_back(v);
    }
  }
  require(static_cast<Index>(added.size()) == count,
          "skew_real_canonical: completion failed");
  return added;
}

}  // namespace detail

// Real canonical form of a real skew-symmetric matrix A (passed with zero
// imaginary parts): returns real orthogonal R and epsilons >= 0 ascending
// with R A R^T = [[0, diag(eps)], [-diag(eps), 0]]. Eigenvector pairs of iA
// at +/-eps supply the two-planes; zero modes are completed to a real
// orthonormal basis.
template <typename Real>
SkewCanonicalForm<Real> skew_real_canonical(const MatrixC<Real>& a_in) {
  using C = std::complex<Real>;
  const Index n2 = a_in.rows();
  require(a_in.cols() == n2 && n2 % 2 == 0,
          "skew_real_canonical: matrix must be square with even dimension");
  const Real scale = max_abs(a_in);
  require(max_abs(a_in.imag()) <= scaled_tol(scale, Real(1e-8)),
          "skew_real_canonical: input must be real");
  require(max_abs(a_in + a_in.transpose()) <= scaled_tol(scale, Real(1e-8)),
          "skew_real_canonical: input must be skew-symmetric");
  const Index n = n2 / 2;
  MatrixR<Real> a = Real(0.5) * (a_in.real() - a_in.real().transpose());

  MatrixC<Real> ia = C(0, 1) * a.template cast<C>();
  HermitianEig<Real> eig = hermitian_eig(ia);

  const Real zero_tol = std::max(Real(1e-10) * scale, Real(1e-14));
  struct Mode {
    Real eps;
    VectorR<Real> p, q;
  };
  std::vector<Mode> modes;
  for (Index j = 0; j < n2; ++j) {
    const Real lam = eig.eigenvalues(j);
    VectorC<Real> u = eig.eigenvectors.col(j);
    if (lam > zero_tol) {
      // Fix the eigenvector phase deterministically: largest-|entry| pivot
      // made real positive (so canonical inputs give R = I).
      Index piv = 0;
      Real best = 0;
      for (Index i = 0; i < n2; ++i) {
        const Real v = std::abs(u(i));
        if (v > best + Real(1e-12)) {
          best = v;
          piv = i;
        }
      }
      const C ph = u(piv) / std::abs(u(piv));
      u /= ph;
      Mode m;
      m.eps = lam;
      m.p = Real(std::sqrt(Real(2))) * u.real();
      m.q = Real(std::sqrt(Real(2))) * u.imag();
      modes.push_back(std::move(m));
    }
  }
  require(static_cast<Index>(modes.size()) <= n,
          "skew_real_canonical: unexpected spectrum");
  std::sort(modes.begin(), modes.end(),
            [](const Mode& x, const Mode& y) { return x.eps < y.eps; });

  const Index n_zero = n - static_cast<Index>(modes.size());
  std::vector<VectorR<Real>> fixed;
  for (const auto& m : modes) {
    fixed.push_back(m.p);
    fixed.push_back(m.q);
  }
  // Null-space rows: complete with standard basis vectors (projected onto the
  // orthogonal complement of the nonzero two-planes, i.e. the null space).
  // Deterministic, and canonical inputs such as the zero matrix give R = I.
  std::vector<VectorR<Real>> null_candidates;
  for (Index i = 0; i < n2; ++i) {
    VectorR<Real> e = VectorR<Real>::Zero(n2);
    e(i) = 1;
    null_candidates.push_back(std::move(e));
  }
  std::vector<VectorR<Real>> zero_rows =
      detail::orthonormal_completion<Real>(fixed, null_candidates, 2 * n_zero);

  SkewCanonicalForm<Real> out;
  out.epsilons = VectorR<Real>::Zero(n);
  MatrixR<Real> r = MatrixR<Real>::Zero(n2, n2);
  for (Index k = 0; k < n_zero; ++k) {
    r.row(k) = zero_rows[static_cast<size_t>(k)].transpose();
    r.row(n + k) = zero_rows[static_cast<size_t>(n_zero + k)].transpose();
  }
  for (Index k = 0; k < static_cast<Index>(modes.size()); ++k) {
    const Mode& m = modes[static_cast<size_t>(k)];
    out.epsilons(n_zero + k) = m.eps;
    // Rows (p, -q) satisfy p^T A (-q) = +eps.
    r.row(n_zero + k) = m.p.transpose();
    r.row(n + n_zero + k) = -m.q.transpose();
  }
  require(max_abs(r * r.transpose() - MatrixR<Real>::Identity(n2, n2)) <=
              Real(1e-10),
          "skew_real_canonical: rotation is not orthogonal");
  out.rotation = r.template cast<C>();
  return out;
}

// U f(diag) U^* for Hermitian input.
template <typename Real>
MatrixC<Real> matrix_function_hermitian(const MatrixC<Real>& h,
                                        const std::function<Real(Real)>& f) {
  HermitianEig<Real> eig = hermitian_eig(h);
  VectorR<Real> fw = eig.eigenvalues.unaryExpr(
      [&](Real w) { return f(w); });
  return eig.eigenvectors * fw.template cast<std::complex<Real>>().asDiagonal() *
         eig.eigenvectors.adjoint();
}

}  // namespace fdpp

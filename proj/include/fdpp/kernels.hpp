#pragma once

// Point-process kernels: determinantal kernels (projection and general
// Hermitian), sigmoid/logit links to one-body Hamiltonians, kernel dilation,
// and the skew block kernels whose Pfaffian minors give inclusion
// probabilities for pairing-correlated processes.

#include "fdpp/common.hpp"
#include "fdpp/numerics.hpp"

#include <cmath>
#include <vector>

namespace fdpp {

template <typename Real = double>
struct DppKernel {
  MatrixC<Real> matrix;
  HermitianEig<Real> eigen;  // cached spectrum of `matrix`
  bool is_projection = false;
};

template <typename Real = double>
struct ProjectionFactor {
  MatrixC<Real> q;  // r x N, orthonormal rows
  Index rank = 0;
};

// Validate a Hermitian kernel with spectrum inside [0,1] (slack 1e-8); flags
// projections (all eigenvalues within 1e-8 of {0,1}).
template <typename Real>
DppKernel<Real> validate_dpp_kernel(const MatrixC<Real>& k) {
  DppKernel<Real> out;
  out.eigen = hermitian_eig(k);  // rejects non-Hermitian input
  const Real lo = out.eigen.eigenvalues.minCoeff();
  const Real hi = out.eigen.eigenvalues.maxCoeff();
  require(lo >= Real(-1e-8) && hi <= Real(1) + Real(1e-8),
          "validate_dpp_kernel: spectrum outside [0, 1]");
  out.matrix = Real(0.5) * (k + k.adjoint());
  out.is_projection = true;
  for (Index i = 0; i < out.eigen.eigenvalues.size(); ++i) {
    const Real v = out.eigen.eigenvalues(i);
    if (std::min(std::abs(v), std::abs(v - Real(1))) > Real(1e-8)) {
      out.is_projection = false;
      break;
    }
  }
  return out;
}

// Orthonormalize the rows of an r x N matrix (must already be orthonormal
// within 1e-9; this validates and wraps).
template <typename Real>
ProjectionFactor<Real> make_projection_factor(const MatrixC<Real>& q) {
  ProjectionFactor<Real> f;
  f.q = q;
  f.rank = q.rows();
  require(q.rows() >= 1 && q.cols() >= q.rows(),
          "make_projection_factor: need r x N with r <= N");
  require(max_abs(q * q.adjoint() -
                  MatrixC<Real>::Identity(q.rows(), q.rows())) <= Real(1e-9),
          "make_projection_factor: rows are not orthonormal");
  return f;
}

// Projection onto the column space of A: K = A (A^* A)^+ A^*. Numerical rank
// counts singular values above 1e-10 of the largest; a zero matrix is an
// error.
template <typename Real>
DppKernel<Real> projection_kernel_from_factor(const MatrixC<Real>& a) {
  require(a.size() > 0, "projection_kernel_from_factor: empty factor");
  HermitianEig<Real> gram = hermitian_eig(MatrixC<Real>(a.adjoint() * a));
  const Real top = gram.eigenvalues.maxCoeff();
  require(top > Real(0), "projection_kernel_from_factor: zero factor");
  const Real cut = Real(1e-10) * top;
  // K = sum over significant eigenpairs of (A v)(A v)^* / lambda.
  MatrixC<Real> k = MatrixC<Real>::Zero(a.rows(), a.rows());
  for (Index i = 0; i < gram.eigenvalues.size(); ++i) {
    const Real lam = gram.eigenvalues(i);
    if (lam > cut) {
      VectorC<Real> col = a * gram.eigenvectors.col(i);
      k += col * col.adjoint() / lam;
    }
  }
  return validate_dpp_kernel<Real>(k);
}

// Column-subset-selection style kernel: projection onto the span of the top-k
// right singular vectors of X.
template <typename Real>
DppKernel<Real> css_kernel(const MatrixC<Real>& x, Index k) {
  require(k >= 1 && k <= x.cols(), "css_kernel: bad target rank");
  HermitianEig<Real> gram = hermitian_eig(MatrixC<Real>(x.adjoint() * x));
  const Index n = x.cols();
  const Real top = gram.eigenvalues.maxCoeff();
  require(top > Real(0) && gram.eigenvalues(n - k) > Real(1e-10) * top,
          "css_kernel: rank of X is below k");
  MatrixC<Real> v = gram.eigenvectors.rightCols(k);
  return validate_dpp_kernel<Real>(MatrixC<Real>(v * v.adjoint()));
}

// det K_S (empty S gives 1).
template <typename Real>
Real dpp_inclusion_probability(const DppKernel<Real>& k,
                               const std::vector<int>& subset) {
  const Index m = static_cast<Index>(subset.size());
  if (m == 0) return Real(1);
  MatrixC<Real> sub(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      sub(i, j) = k.matrix(subset[static_cast<size_t>(i)] - 1,
                           subset[static_cast<size_t>(j)] - 1);
  const std::complex<Real> d = sub.determinant();
  return d.real();
}

template <typename Real = double>
struct ThermalSpec {
  Real beta = 1;
  Real mu = 0;
};

// K = U sigma(-beta (lambda - mu)) U^* for Hermitian H = U diag(lambda) U^*.
template <typename Real>
DppKernel<Real> sigmoid_kernel(const MatrixC<Real>& h,
                               const ThermalSpec<Real>& t) {
  require(t.beta > Real(0), "sigmoid_kernel: beta must be positive");
  MatrixC<Real> k = matrix_function_hermitian<Real>(h, [&](Real lam) {
    return Real(1) / (Real(1) + std::exp(t.beta * (lam - t.mu)));
  });
  return validate_dpp_kernel<Real>(k);
}

template <typename Real = double>
struct LogitSpectrum {
  VectorR<Real> lambda;        // beta (lambda_i - mu) = log((1 - d_i) / d_i)
  MatrixC<Real> eigenvectors;  // the kernel's eigenvectors, same order
};

// Invert the sigmoid link: recover eigenvalues of the one-body Hamiltonian
// from a non-projection kernel. Eigenvalues of K outside
// [1e-12, 1 - 1e-12] are rejected (projections have no finite logit).
template <typename Real>
LogitSpectrum<Real> logit_hamiltonian(const DppKernel<Real>& k,
                                      const ThermalSpec<Real>& t) {
  require(t.beta > Real(0), "logit_hamiltonian: beta must be positive");
  LogitSpectrum<Real> out;
  const Index n = k.eigen.eigenvalues.size();
  out.lambda = VectorR<Real>::Zero(n);
  for (Index i = 0; i < n; ++i) {
    const Real d = k.eigen.eigenvalues(i);
    require(d >= Real(1e-12) && d <= Real(1) - Real(1e-12),
            "logit_hamiltonian: kernel eigenvalue outside the open unit "
            "interval");
    out.lambda(i) = std::log((Real(1) - d) / d) / t.beta + t.mu;
  }
  out.eigenvectors = k.eigen.eigenvectors;
  return out;
}

// Dilation of a general kernel to a rank-N projection on 2N points:
// [[K, B], [B, I - K]] with B = (K(I-K))^{1/2} sharing K's eigenvectors.
template <typename Real>
DppKernel<Real> dilate_kernel(const DppKernel<Real>& k) {
  const Index n = k.matrix.rows();
  VectorR<Real> nu = k.eigen.eigenvalues;
  VectorR<Real> b = nu.unaryExpr([](Real v) {
    const Real w = std::max(v * (Real(1) - v), Real(0));
    return std::sqrt(w);
  });
  const MatrixC<Real>& u = k.eigen.eigenvectors;
  MatrixC<Real> bmat =
      u * b.template cast<std::complex<Real>>().asDiagonal() * u.adjoint();
  MatrixC<Real> dil(2 * n, 2 * n);
  dil.topLeftCorner(n, n) = k.matrix;
  dil.topRightCorner(n, n) = bmat;
  dil.bottomLeftCorner(n, n) = bmat;
  dil.bottomRightCorner(n, n) =
      MatrixC<Real>::Identity(n, n) - k.matrix;
  return validate_dpp_kernel<Real>(dil);
}

// Orthonormal-row factor of the dilated kernel, used for exact-cardinality
// sampling of general kernels: rows q_k = [sqrt(nu) U^* | sqrt(1-nu) U^*].
template <typename Real>
ProjectionFactor<Real> dilation_factor(const DppKernel<Real>& k) {
  const Index n = k.matrix.rows();
  VectorR<Real> nu = k.eigen.eigenvalues.cwiseMax(Real(0)).cwiseMin(Real(1));
  MatrixC<Real> q(n, 2 * n);
  MatrixC<Real> uadj = k.eigen.eigenvectors.adjoint();
  for (Index i = 0; i < n; ++i) {
    q.row(i).head(n) = std::sqrt(nu(i)) * uadj.row(i);
    q.row(i).tail(n) = std::sqrt(Real(1) - nu(i)) * uadj.row(i);
  }
  return make_projection_factor<Real>(q);
}

// --- Pairing-correlated (Pfaffian) kernels ------------------------------

// 2N x 2N one-body matrix S = [[I - conj(K), P^*], [P, K]] of a
// quasi-free state: Hermitian, spectrum in [0,1], particle-hole constraint
// C conj(S) C = I - S with C = [[0, I], [I, 0]]; S21 skew, S22 Hermitian.
template <typename Real = double>
struct SMatrix {
  MatrixC<Real> matrix;  // 2N x 2N
  Index n = 0;

  auto s11() const { return matrix.topLeftCorner(n, n); }
  auto s12() const { return matrix.topRightCorner(n, n); }
  auto s21() const { return matrix.bottomLeftCorner(n, n); }
  auto s22() const { return matrix.bottomRightCorner(n, n); }
};

template <typename Real>
SMatrix<Real> make_s_matrix(const MatrixC<Real>& s) {
  const Index n2 = s.rows();
  require(s.cols() == n2 && n2 % 2 == 0,
          "make_s_matrix: need a square matrix of even dimension");
  SMatrix<Real> out;
  out.matrix = s;
  out.n = n2 / 2;
  const Real scale = std::max(max_abs(s), Real(1));
  HermitianEig<Real> eig = hermitian_eig(s);
  require(eig.eigenvalues.minCoeff() >= Real(-1e-8) &&
              eig.eigenvalues.maxCoeff() <= Real(1) + Real(1e-8),
          "make_s_matrix: spectrum outside [0, 1]");
  MatrixC<Real> c = MatrixC<Real>::Zero(n2, n2);
  c.topRightCorner(out.n, out.n) =
      MatrixC<Real>::Identity(out.n, out.n);
  c.bottomLeftCorner(out.n, out.n) =
      MatrixC<Real>::Identity(out.n, out.n);
  require(max_abs(c * s.conjugate() * c -
                  (MatrixC<Real>::Identity(n2, n2) - s)) <=
              scaled_tol(scale, Real(1e-8)),
          "make_s_matrix: particle-hole constraint violated");
  require(max_abs(out.s21() + out.s21().transpose()) <=
              scaled_tol(scale, Real(1e-8)),
          "make_s_matrix: pairing block is not skew-symmetric");
  require(max_abs(out.s22() - out.s22().adjoint()) <=
              scaled_tol(scale, Real(1e-8)),
          "make_s_matrix: density block is not Hermitian");
  return out;
}

// Interleaved skew kernel: block (i, j) is the 2x2
//   [[ S21(i,j),        S22(i,j)      ],
//    [-S22(j,i),  conj(S21(j,i))      ]]
// stored at rows/cols (2i-1, 2i) x (2j-1, 2j).
template <typename Real = double>
struct PfaffianKernel {
  Index n = 0;
  MatrixC<Real> matrix;  // 2N x 2N interleaved, antisymmetric
};

template <typename Real>
PfaffianKernel<Real> pfaffian_kernel_from_s(const SMatrix<Real>& s) {
  PfaffianKernel<Real> out;
  out.n = s.n;
  out.matrix = MatrixC<Real>::Zero(2 * s.n, 2 * s.n);
  auto p = s.s21();
  auto k = s.s22();
  for (Index i = 0; i < s.n; ++i) {
    for (Index j = 0; j < s.n; ++j) {
      out.matrix(2 * i, 2 * j) = p(i, j);
      out.matrix(2 * i, 2 * j + 1) = k(i, j);
      out.matrix(2 * i + 1, 2 * j) = -k(j, i);
      out.matrix(2 * i + 1, 2 * j + 1) = std::conj(p(j, i));
    }
  }
  const Real scale = std::max(max_abs(out.matrix), Real(1));
  require(max_abs(out.matrix + out.matrix.transpose()) <=
              scaled_tol(scale, Real(1e-10)),
          "pfaffian_kernel_from_s: kernel is not antisymmetric");
  return out;
}

namespace detail {

// Extract the interleaved principal sub-kernel on a 1-based subset.
template <typename Real>
MatrixC<Real> pf_kernel_minor(const PfaffianKernel<Real>& k,
                              const std::vector<int>& subset) {
  const Index m = static_cast<Index>(subset.size());
  MatrixC<Real> sub(2 * m, 2 * m);
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b < m; ++b) {
      const Index i = subset[static_cast<size_t>(a)] - 1;
      const Index j = subset[static_cast<size_t>(b)] - 1;
      sub.block(2 * a, 2 * b, 2, 2) = k.matrix.block(2 * i, 2 * j, 2, 2);
    }
  }
  return sub;
}

}  // namespace detail

// P(S subset of Y) = Pf of the interleaved minor on S; empty S gives 1.
template <typename Real>
Real pfpp_inclusion_probability(const PfaffianKernel<Real>& k,
                                const std::vector<int>& subset) {
  if (subset.empty()) return Real(1);
  const std::complex<Real> pf =
      pfaffian(detail::pf_kernel_minor(k, subset));
  require(std::abs(pf.imag()) <= Real(1e-8) * std::max(std::abs(pf.real()),
                                                       Real(1)),
          "pfpp_inclusion_probability: non-real Pfaffian");
  return pf.real();
}

// Point probability P(Y = S) = (-1)^{|S^c|} Pf(Kernel - J_{S^c}), where the
// mask J places [[0,1],[-1,0]] on the diagonal blocks of the complement.
template <typename Real>
Real pfpp_pmf(const PfaffianKernel<Real>& k, std::uint64_t mask) {
  MatrixC<Real> m = k.matrix;
  int comp = 0;
  for (Index i = 0; i < k.n; ++i) {
    if (!(mask >> i & 1)) {
      ++comp;
      m(2 * i, 2 * i + 1) -= Real(1);
      m(2 * i + 1, 2 * i) += Real(1);
    }
  }
  const std::complex<Real> pf = pfaffian(m);
  require(std::abs(pf.imag()) <=
              Real(1e-8) * std::max(std::abs(pf.real()), Real(1)),
          "pfpp_pmf: non-real Pfaffian");
  const Real sign = (comp % 2 == 0) ? Real(1) : Real(-1);
  return sign * pf.real();
}

// E[(-1)^{|Y|}] = Pf(J - 2 Kernel) with J the block-diagonal symplectic mask.
template <typename Real>
Real expected_parity(const PfaffianKernel<Real>& k) {
  MatrixC<Real> m = Real(-2) * k.matrix;
  for (Index i = 0; i < k.n; ++i) {
    m(2 * i, 2 * i + 1) += Real(1);
    m(2 * i + 1, 2 * i) -= Real(1);
  }
  const std::complex<Real> pf = pfaffian(m);
  require(std::abs(pf.imag()) <=
              Real(1e-8) * std::max(std::abs(pf.real()), Real(1)),
          "expected_parity: non-real Pfaffian");
  return pf.real();
}

// E|Y| = tr S22 (real part; the trace of a Hermitian block).
template <typename Real>
Real expected_cardinality(const SMatrix<Real>& s) {
  return s.s22().trace().real();
}

}  // namespace fdpp

#pragma once

// Classical reference samplers: projection-factor sampling by row deflation,
// the spectral Bernoulli mixture for general Hermitian kernels, sampling
// through the projective dilation, and pairing-state sampling through the
// compiled circuit. Brute-force probability vectors and the total-variation
// metric cross-validate all of them.

#include "fdpp/bdg.hpp"
#include "fdpp/circuit.hpp"
#include "fdpp/common.hpp"
#include "fdpp/kernels.hpp"
#include "fdpp/rng.hpp"
#include "fdpp/sim.hpp"

#include <algorithm>
#include <map>
#include <vector>

namespace fdpp {

// Sample a projection ensemble from its orthonormal factor. Each step picks
// a column with probability norm^2 / remaining-rank, eliminates it from the
// other rows via the largest-magnitude pivot row, and re-orthonormalizes the
// remaining rows.
template <typename Real>
std::uint64_t hkpv_sample(const MatrixC<Real>& factor, RngSpec spec) {
  const Index n = factor.cols();
  MatrixC<Real> w = factor;
  CounterRng rng(substream(spec, 1, 0));
  std::uint64_t mask = 0;
  while (w.rows() > 0) {
    const Index k = w.rows();
    VectorR<Real> col_norms(n);
    Real total = 0;
    for (Index j = 0; j < n; ++j) {
      col_norms(j) = w.col(j).squaredNorm();
      total += col_norms(j);
    }
    require(std::abs(total - static_cast<Real>(k)) <= Real(1e-6) * k,
            "hkpv_sample: factor rows lost orthonormality");
    VectorR<Real> cdf(n);
    Real acc = 0;
    for (Index j = 0; j < n; ++j) {
      acc += col_norms(j) / total;
      cdf(j) = acc;
    }
    const Index j = discrete_from_cdf(cdf, uniform01(rng));
    mask |= std::uint64_t(1) << j;

    Index pivot = 0;
    for (Index i = 1; i < k; ++i)
      if (std::abs(w(i, j)) > std::abs(w(pivot, j))) pivot = i;
    require(std::abs(w(pivot, j)) > Real(1e-12),
            "hkpv_sample: degenerate pivot");
    for (Index i = 0; i < k; ++i) {
      if (i == pivot) continue;
      w.row(i) -= (w(i, j) / w(pivot, j)) * w.row(pivot).eval();
    }
    MatrixC<Real> reduced(k - 1, n);
    Index out_row = 0;
    for (Index i = 0; i < k; ++i)
      if (i != pivot) reduced.row(out_row++) = w.row(i);
    // Re-orthonormalize for stability (modified Gram-Schmidt, two passes).
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < reduced.rows(); ++i) {
        for (Index p = 0; p < i; ++p) {
          const std::complex<Real> coef = reduced.row(p).dot(reduced.row(i));
          reduced.row(i) -= coef * reduced.row(p);
        }
        const Real nrm = reduced.row(i).norm();
        require(nrm > Real(1e-12), "hkpv_sample: deflated row collapsed");
        reduced.row(i) /= nrm;
      }
    }
    w = std::move(reduced);
  }
  return mask;
}

template <typename Real>
std::uint64_t hkpv_sample(const ProjectionFactor<Real>& factor, RngSpec spec) {
  return hkpv_sample(factor.q, spec);
}

// Mixture sampler for a general Hermitian kernel: Bernoulli thinning of the
// spectrum picks a projection component, then the factor sampler runs on the
// selected eigenvectors.
template <typename Real>
std::uint64_t sample_general_dpp(const DppKernel<Real>& kernel, RngSpec spec) {
  const Index n = kernel.matrix.rows();
  CounterRng coin(substream(spec, 0, 0));
  std::vector<Index> chosen;
  for (Index k = 0; k < n; ++k) {
    const Real lam = std::min(std::max(kernel.eigen.eigenvalues(k), Real(0)), Real(1));
    if (bernoulli(coin, lam)) chosen.push_back(k);
  }
  if (chosen.empty()) return 0;
  MatrixC<Real> sub(static_cast<Index>(chosen.size()), n);
  for (Index i = 0; i < sub.rows(); ++i)
    sub.row(i) = kernel.eigen.eigenvectors.col(chosen[static_cast<size_t>(i)]).adjoint();
  return hkpv_sample(sub, spec);
}

// Dilation sampler: run the factor sampler on the projective dilation and
// keep only the first N modes of the outcome.
template <typename Real>
std::uint64_t sample_dpp_via_dilation(const DppKernel<Real>& kernel,
                                      RngSpec spec) {
  const Index n = kernel.matrix.rows();
  ProjectionFactor<Real> dil = dilation_factor(kernel);
  std::uint64_t mask = hkpv_sample(dil, spec);
  return mask & ((std::uint64_t(1) << n) - 1);
}

// Pairing-state sampler: Bernoulli quasimode occupations (phase 0), then one
// measurement of the compiled circuit per shot (phase 1). Circuits are
// compiled once per distinct occupation pattern.
template <typename Real>
std::vector<std::uint64_t> sample_pfpp(const BogoliubovTransform<Real>& t,
                                       Real beta, Index shots, RngSpec spec,
                                       Real noise = 0) {
  const Index n = t.epsilons.size();
  require(shots >= 0, "sample_pfpp: bad shot count");
  PhFactorization<Real> ph = factorize_particle_hole(t);

  std::vector<std::uint64_t> occ_mask(static_cast<size_t>(shots), 0);
  for (Index i = 0; i < shots; ++i) {
    CounterRng coin(substream(spec, 0, static_cast<std::uint64_t>(i)));
    std::uint64_t m = 0;
    for (Index k = 0; k < n; ++k) {
      const Real p = Real(1) / (Real(1) + std::exp(beta * t.epsilons(k)));
      if (bernoulli(coin, p)) m |= std::uint64_t(1) << k;
    }
    occ_mask[static_cast<size_t>(i)] = m;
  }

  std::map<std::uint64_t, FockState<Real>> cache;
  std::vector<std::uint64_t> out(static_cast<size_t>(shots));
  for (Index i = 0; i < shots; ++i) {
    const std::uint64_t m = occ_mask[static_cast<size_t>(i)];
    auto it = cache.find(m);
    if (it == cache.end()) {
      std::vector<int> occupied;
      for (Index k = 0; k < n; ++k)
        if (m & (std::uint64_t(1) << k)) occupied.push_back(static_cast<int>(k) + 1);
      Circuit<Real> c = compile_pfpp_circuit(ph, occupied);
      it = cache.emplace(m, run_circuit(c)).first;
    }
    VectorR<Real> probs = exact_distribution(it->second);
    VectorR<Real> cdf(probs.size());
    Real acc = 0;
    for (Index j = 0; j < probs.size(); ++j) {
      acc += std::max(probs(j), Real(0));
      cdf(j) = acc;
    }
    CounterRng rng(substream(spec, 1, static_cast<std::uint64_t>(i)));
    out[static_cast<size_t>(i)] =
        detail::draw_one_shot(cdf, n, noise, rng);
  }
  return out;
}

// --- Brute-force distributions --------------------------------------------

// Exact probability vector of a determinantal ensemble over all 2^N subsets.
// Projections use the fixed-cardinality minors; general kernels use the
// inclusion probabilities of all supersets with alternating signs.
template <typename Real>
VectorR<Real> brute_force_distribution(const DppKernel<Real>& kernel) {
  const Index n = kernel.matrix.rows();
  require(n <= 14, "brute_force_distribution: kernel too large");
  const Index dim = Index(1) << n;
  VectorR<Real> pmf = VectorR<Real>::Zero(dim);
  if (kernel.is_projection) {
    Index r = 0;
    for (Index k = 0; k < n; ++k)
      if (kernel.eigen.eigenvalues(k) > Real(0.5)) ++r;
    for (std::uint64_t m = 0; m < static_cast<std::uint64_t>(dim); ++m) {
      if (static_cast<Index>(popcount64(m)) != r) continue;
      pmf(static_cast<Index>(m)) = std::max(
          dpp_inclusion_probability(kernel, modes_of(m, static_cast<int>(n))),
          Real(0));
    }
  } else {
    VectorR<Real> d(dim);
    for (std::uint64_t m = 0; m < static_cast<std::uint64_t>(dim); ++m)
      d(static_cast<Index>(m)) =
          dpp_inclusion_probability(kernel, modes_of(m, static_cast<int>(n)));
    // Signed superset transform: after processing every bit, d(S) holds
    // sum over J containing S of (-1)^{|J \ S|} det K_J.
    for (Index bit = 0; bit < n; ++bit) {
      const std::uint64_t b = std::uint64_t(1) << bit;
      for (std::uint64_t m = 0; m < static_cast<std::uint64_t>(dim); ++m)
        if (!(m & b))
          d(static_cast<Index>(m)) -= d(static_cast<Index>(m | b));
    }
    pmf = d;
  }
  Real total = 0;
  for (Index i = 0; i < dim; ++i) {
    require(pmf(i) >= Real(-1e-9), "brute_force_distribution: negative mass");
    pmf(i) = std::max(pmf(i), Real(0));
    total += pmf(i);
  }
  require(std::abs(total - Real(1)) <= Real(1e-7),
          "brute_force_distribution: mass does not sum to one");
  return pmf;
}

// Exact probability vector of a Pfaffian ensemble over all 2^N subsets.
template <typename Real>
VectorR<Real> brute_force_distribution(const PfaffianKernel<Real>& kernel) {
  const Index n = kernel.n;
  require(n <= 10, "brute_force_distribution: kernel too large");
  const Index dim = Index(1) << n;
  VectorR<Real> pmf(dim);
  Real total = 0;
  for (std::uint64_t m = 0; m < static_cast<std::uint64_t>(dim); ++m) {
    Real p = pfpp_pmf(kernel, m);
    require(p >= Real(-1e-9), "brute_force_distribution: negative mass");
    p = std::max(p, Real(0));
    pmf(static_cast<Index>(m)) = p;
    total += p;
  }
  require(std::abs(total - Real(1)) <= Real(1e-7),
          "brute_force_distribution: mass does not sum to one");
  return pmf;
}

// Half L1 distance between two probability vectors of equal size.
template <typename Real>
Real tv_distance(const VectorR<Real>& p, const VectorR<Real>& q) {
  require(p.size() == q.size(), "tv_distance: size mismatch");
  require(std::abs(p.sum() - Real(1)) <= Real(1e-6) &&
              std::abs(q.sum() - Real(1)) <= Real(1e-6),
          "tv_distance: inputs must be probability vectors");
  return Real(0.5) * (p - q).cwiseAbs().sum();
}

}  // namespace fdpp

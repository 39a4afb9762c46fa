#pragma once

// Exact statevector simulation of fermionic circuits on the 2^N Fock space.
// Basis index packs occupations with mode 1 in the least significant bit.
// Givens gates carry the parity of the modes strictly between their pair.

#include "fdpp/circuit.hpp"
#include "fdpp/common.hpp"
#include "fdpp/rng.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace fdpp {

template <typename Real = double>
struct FockState {
  Index n_modes = 0;
  VectorC<Real> amps;  // 2^n_modes amplitudes
};

template <typename Real>
FockState<Real> vacuum_state(Index n_modes) {
  require(n_modes >= 1 && n_modes <= 24, "vacuum_state: mode count out of range");
  FockState<Real> s;
  s.n_modes = n_modes;
  s.amps = VectorC<Real>::Zero(Index(1) << n_modes);
  s.amps(0) = 1;
  return s;
}

template <typename Real>
Real state_norm(const FockState<Real>& s) {
  return s.amps.norm();
}

template <typename Real>
void apply_mode_flip(FockState<Real>& s, int mode) {
  require(mode >= 1 && mode <= static_cast<int>(s.n_modes),
          "apply_mode_flip: mode out of range");
  const std::uint64_t bit = std::uint64_t(1) << (mode - 1);
  const std::uint64_t dim = std::uint64_t(1) << s.n_modes;
  for (std::uint64_t m = 0; m < dim; ++m)
    if (!(m & bit)) std::swap(s.amps(static_cast<Index>(m)),
                              s.amps(static_cast<Index>(m | bit)));
}

// Particle-hole flip: a plain X on the last mode, whose string is trivial.
template <typename Real>
void apply_ph_flip(FockState<Real>& s) {
  apply_mode_flip(s, static_cast<int>(s.n_modes));
}

// Number-conserving Givens gate: within each pair of configurations that
// differ by moving one particle between the modes, mix amplitudes with the
// rotation entries and the parity of the occupied modes strictly between.
template <typename Real>
void apply_fermionic_givens(FockState<Real>& s, const GivensRotation<Real>& rot) {
  using C = std::complex<Real>;
  require(rot.l1 >= 1 && rot.l2 <= static_cast<int>(s.n_modes) &&
              rot.l1 < rot.l2,
          "apply_fermionic_givens: bad mode pair");
  const std::uint64_t b1 = std::uint64_t(1) << (rot.l1 - 1);
  const std::uint64_t b2 = std::uint64_t(1) << (rot.l2 - 1);
  std::uint64_t between = 0;
  for (int k = rot.l1 + 1; k < rot.l2; ++k)
    between |= std::uint64_t(1) << (k - 1);
  const Real c = std::cos(rot.theta);
  const Real sn = std::sin(rot.theta);
  const C e_plus = std::exp(C(0, rot.phi));
  const std::uint64_t dim = std::uint64_t(1) << s.n_modes;
  for (std::uint64_t m = 0; m < dim; ++m) {
    if (!(m & b1) || (m & b2)) continue;
    const std::uint64_t u = m;            // particle at l1
    const std::uint64_t v = (m ^ b1) | b2;  // particle at l2
    const Real sign = (popcount64(m & between) & 1) ? Real(-1) : Real(1);
    const C au = s.amps(static_cast<Index>(u));
    const C av = s.amps(static_cast<Index>(v));
    s.amps(static_cast<Index>(u)) = c * au - sign * e_plus * sn * av;
    s.amps(static_cast<Index>(v)) = sign * std::conj(e_plus) * sn * au + c * av;
  }
}

// Run from the vacuum through all gates up to (not including) MeasureAll.
template <typename Real>
FockState<Real> run_circuit(const Circuit<Real>& c) {
  FockState<Real> s = vacuum_state<Real>(c.n_modes);
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::ModeFlip:
        apply_mode_flip(s, g.mode);
        break;
      case GateKind::FermionicGivens:
        apply_fermionic_givens(s, g.rotation);
        break;
      case GateKind::ParticleHoleFlip:
        apply_ph_flip(s);
        break;
      case GateKind::MeasureAll:
        require(std::abs(state_norm(s) - Real(1)) <= Real(1e-10),
                "run_circuit: state norm drifted");
        return s;
    }
  }
  require(std::abs(state_norm(s) - Real(1)) <= Real(1e-10),
          "run_circuit: state norm drifted");
  return s;
}

template <typename Real>
VectorR<Real> exact_distribution(const FockState<Real>& s) {
  return s.amps.array().abs2();
}

namespace detail {

template <typename Real>
std::uint64_t draw_one_shot(const VectorR<Real>& cdf, Index n_modes,
                            Real noise, CounterRng& rng) {
  std::uint64_t m =
      static_cast<std::uint64_t>(discrete_from_cdf(cdf, uniform01(rng)));
  if (noise > 0) {
    for (Index k = 0; k < n_modes; ++k)
      if (uniform01(rng) < noise) m ^= std::uint64_t(1) << k;
  }
  return m;
}

}  // namespace detail

// Draw independent occupation bitstrings. Each shot gets its own counter
// substream, so results do not depend on the worker count. Optional readout
// noise flips every bit independently after the ideal draw.
template <typename Real>
std::vector<std::uint64_t> sample_occupations(const FockState<Real>& s,
                                              Index shots, RngSpec spec,
                                              Real noise = 0,
                                              int threads = 1) {
  require(shots >= 0, "sample_occupations: bad shot count");
  require(noise >= 0 && noise < 1, "sample_occupations: bad noise rate");
  VectorR<Real> probs = exact_distribution(s);
  VectorR<Real> cdf(probs.size());
  Real acc = 0;
  for (Index i = 0; i < probs.size(); ++i) {
    acc += std::max(probs(i), Real(0));
    cdf(i) = acc;
  }
  require(std::abs(acc - Real(1)) <= Real(1e-8),
          "sample_occupations: probabilities do not sum to one");
  std::vector<std::uint64_t> out(static_cast<size_t>(shots));
  auto work = [&](Index lo, Index hi) {
    for (Index i = lo; i < hi; ++i) {
      CounterRng rng(substream(spec, 1, static_cast<std::uint64_t>(i)));
      out[static_cast<size_t>(i)] =
          detail::draw_one_shot(cdf, s.n_modes, noise, rng);
    }
  };
  if (threads <= 1 || shots < 2) {
    work(0, shots);
  } else {
    const int t = std::min<int>(threads, 16);
    std::vector<std::thread> pool;
    for (int w = 0; w < t; ++w) {
      const Index lo = shots * w / t;
      const Index hi = shots * (w + 1) / t;
      pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

// Frequency vector over all 2^n bitstrings.
template <typename Real>
VectorR<Real> empirical_distribution(const std::vector<std::uint64_t>& samples,
                                     Index n_modes) {
  VectorR<Real> f = VectorR<Real>::Zero(Index(1) << n_modes);
  for (std::uint64_t m : samples) f(static_cast<Index>(m)) += 1;
  if (!samples.empty()) f /= static_cast<Real>(samples.size());
  return f;
}

}  // namespace fdpp

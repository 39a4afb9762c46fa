#pragma once

// Shared aliases, error type, and small helpers used across the library.

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdpp {

using Index = Eigen::Index;

template <typename Real>
using MatrixC = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using MatrixR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using VectorC = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using VectorR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& what) { throw Error(what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(what);
}

// Largest entry magnitude; 0 for empty matrices.
template <typename Derived>
auto max_abs(const Eigen::MatrixBase<Derived>& m) ->
    typename Eigen::NumTraits<typename Derived::Scalar>::Real {
  if (m.size() == 0) return 0;
  return m.cwiseAbs().maxCoeff();
}

// Tolerances are relative to the max-magnitude entry with an absolute floor.
template <typename Real>
Real scaled_tol(Real scale, Real rel) {
  Real t = rel * scale;
  const Real floor = Real(1e-14);
  return t < floor ? floor : t;
}

inline int popcount64(std::uint64_t x) { return std::popcount(x); }

// Occupation bitmask helpers: mode k (1-based) <-> bit (k-1); the basis index
// of |n_1 ... n_N> is sum n_k 2^(k-1).
inline std::uint64_t mask_of(const std::vector<int>& modes) {
  std::uint64_t m = 0;
  for (int k : modes) m |= (std::uint64_t{1} << (k - 1));
  return m;
}

inline std::vector<int> modes_of(std::uint64_t mask, int n_modes) {
  std::vector<int> out;
  for (int k = 1; k <= n_modes; ++k)
    if (mask >> (k - 1) & 1) out.push_back(k);
  return out;
}

// "101" style string, mode 1 first.
inline std::string bitstring_of(std::uint64_t mask, int n_modes) {
  std::string s(static_cast<size_t>(n_modes), '0');
  for (int k = 1; k <= n_modes; ++k)
    if (mask >> (k - 1) & 1) s[static_cast<size_t>(k - 1)] = '1';
  return s;
}

// "{1,3}" style subset string.
inline std::string subset_string(std::uint64_t mask, int n_modes) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (int k = 1; k <= n_modes; ++k) {
    if (mask >> (k - 1) & 1) {
      if (!first) os << ',';
      os << k;
      first = false;
    }
  }
  os << '}';
  return os.str();
}

constexpr double kPi = 3.141592653589793238462643383279502884;

// Wrap an angle into (-pi, pi].
template <typename Real>
Real wrap_angle(Real phi) {
  const Real two_pi = Real(2) * Real(kPi);
  Real w = std::fmod(phi + Real(kPi), two_pi);
  if (w < 0) w += two_pi;
  w -= Real(kPi);
  // Map the lower branch point to the upper one so the branch is (-pi, pi].
  if (w == -Real(kPi)) w = Real(kPi);
  return w;
}

}  // namespace fdpp

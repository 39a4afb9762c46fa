#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fdpp/numerics.hpp"
#include "fdpp/rng.hpp"

#include <complex>
#include <vector>

using namespace fdpp;
using C = std::complex<double>;

namespace {

MatrixC<double> random_complex(Index rows, Index cols, std::uint64_t seed) {
  CounterRng rng(RngSpec{seed, 7});
  MatrixC<double> m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = C(normal01(rng), normal01(rng));
  return m;
}

MatrixC<double> random_antisymmetric(Index n, std::uint64_t seed) {
  MatrixC<double> g = random_complex(n, n, seed);
  return 0.5 * (g - g.transpose());
}

// Recursive Pfaffian by expansion along the first row; independent of the
// tridiagonalization route.
C pf_recursive(const MatrixC<double>& a) {
  const Index n = a.rows();
  if (n == 0) return C(1, 0);
  if (n % 2 == 1) return C(0, 0);
  if (n == 2) return a(0, 1);
  C total(0, 0);
  double sign = 1;
  for (Index j = 1; j < n; ++j) {
    MatrixC<double> sub(n - 2, n - 2);
    Index ri = 0;
    for (Index i = 1; i < n; ++i) {
      if (i == j) continue;
      Index rj = 0;
      for (Index k = 1; k < n; ++k) {
        if (k == j) continue;
        sub(ri, rj++) = a(i, k);
      }
      ++ri;
    }
    total += sign * a(0, j) * pf_recursive(sub);
    sign = -sign;
  }
  return total;
}

// Dense n x n embedding of a plane rotation.
MatrixC<double> embedded_givens(Index n, const GivensRotation<double>& rot) {
  MatrixC<double> g = MatrixC<double>::Identity(n, n);
  auto core = givens_matrix(rot.theta, rot.phi);
  const Index a = rot.l1 - 1;
  const Index b = rot.l2 - 1;
  g(a, a) = core(0, 0);
  g(a, b) = core(0, 1);
  g(b, a) = core(1, 0);
  g(b, b) = core(1, 1);
  return g;
}

}  // namespace

TEST_CASE("wrap_angle maps into the half-open interval") {
  CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  CHECK(wrap_angle(-3 * kPi / 2) == doctest::Approx(kPi / 2));
  for (int k = -7; k <= 7; ++k) {
    const double x = 0.37 + 2 * kPi * k;
    CHECK(wrap_angle(x) == doctest::Approx(0.37).epsilon(1e-12));
  }
}

TEST_CASE("givens core matrix is special unitary") {
  for (auto [theta, phi] : std::vector<std::pair<double, double>>{
           {0.3, 1.1}, {0.0, 0.0}, {kPi / 2, -2.0}, {1.2, kPi}}) {
    auto g = givens_matrix(theta, phi);
    Eigen::Matrix2cd id = g * g.adjoint();
    CHECK(std::abs(id(0, 0) - C(1, 0)) < 1e-14);
    CHECK(std::abs(id(0, 1)) < 1e-14);
    CHECK(std::abs(g.determinant() - C(1, 0)) < 1e-14);
    CHECK(g(0, 0).real() == doctest::Approx(std::cos(theta)));
    CHECK(std::abs(g(0, 1) - std::polar(std::sin(theta), -phi)) < 1e-14);
  }
}

TEST_CASE("givens_params_to_zero annihilates the second slot") {
  CounterRng rng(RngSpec{11, 0});
  for (int trial = 0; trial < 50; ++trial) {
    const C x(normal01(rng), normal01(rng));
    const C y(normal01(rng), normal01(rng));
    GivensRotation<double> rot = givens_params_to_zero(x, y);
    CHECK(rot.theta >= 0.0);
    CHECK(rot.theta <= kPi / 2 + 1e-12);
    CHECK(rot.phi > -kPi - 1e-12);
    CHECK(rot.phi <= kPi + 1e-12);
    auto g = givens_matrix(rot.theta, rot.phi);
    const C top = g(0, 0) * x + g(0, 1) * y;
    const C bottom = g(1, 0) * x + g(1, 1) * y;
    CHECK(std::abs(bottom) < 1e-12);
    const double h = std::hypot(std::abs(x), std::abs(y));
    CHECK(std::abs(top) == doctest::Approx(h).epsilon(1e-12));
    // The survivor keeps the phase of x.
    CHECK(std::abs(top - h * x / std::abs(x)) < 1e-12);
  }
}

TEST_CASE("givens_params_to_zero degenerate slots take phi = 0") {
  GivensRotation<double> a = givens_params_to_zero(C(2, 0), C(0, 0));
  CHECK(a.theta == doctest::Approx(0.0));
  CHECK(a.phi == doctest::Approx(0.0));
  GivensRotation<double> b = givens_params_to_zero(C(0, 0), C(0, 3));
  CHECK(b.theta == doctest::Approx(kPi / 2));
  CHECK(b.phi == doctest::Approx(0.0));
  CHECK_THROWS_AS(givens_params_to_zero(C(0, 0), C(0, 0)), Error);
}

TEST_CASE("right-action parameter helpers zero the requested slot") {
  CounterRng rng(RngSpec{12, 0});
  for (int trial = 0; trial < 30; ++trial) {
    MatrixC<double> m = random_complex(3, 4, 100 + trial);
    const C x = m(1, 1);
    const C y = m(1, 3);

    GivensRotation<double> rs = detail::right_params_zero_second(x, y);
    rs.l1 = 2;
    rs.l2 = 4;
    MatrixC<double> a = apply_givens(m, rs, Side::Right, true);
    CHECK(std::abs(a(1, 3)) < 1e-12);
    CHECK(std::abs(a(1, 1)) ==
          doctest::Approx(std::hypot(std::abs(x), std::abs(y))).epsilon(1e-12));

    GivensRotation<double> rf = detail::right_params_zero_first(x, y);
    rf.l1 = 2;
    rf.l2 = 4;
    MatrixC<double> b = apply_givens(m, rf, Side::Right, true);
    CHECK(std::abs(b(1, 1)) < 1e-12);
    CHECK(std::abs(b(1, 3)) ==
          doctest::Approx(std::hypot(std::abs(x), std::abs(y))).epsilon(1e-12));
    (void)rng;
  }
}

TEST_CASE("left-action parameter helper zeroes the first slot") {
  for (int trial = 0; trial < 30; ++trial) {
    MatrixC<double> m = random_complex(4, 3, 200 + trial);
    GivensRotation<double> rot =
        detail::left_params_zero_first(m(1, 2), m(2, 2));
    rot.l1 = 2;
    rot.l2 = 3;
    MatrixC<double> a = apply_givens(m, rot, Side::Left, false);
    CHECK(std::abs(a(1, 2)) < 1e-12);
  }
}

TEST_CASE("apply_givens matches dense embedded multiplication") {
  MatrixC<double> m = random_complex(5, 5, 42);
  GivensRotation<double> rot;
  rot.l1 = 2;
  rot.l2 = 5;
  rot.theta = 0.83;
  rot.phi = -1.9;
  MatrixC<double> g = embedded_givens(5, rot);
  CHECK(max_abs(apply_givens(m, rot, Side::Left, false) - g * m) < 1e-13);
  CHECK(max_abs(apply_givens(m, rot, Side::Left, true) - g.adjoint() * m) <
        1e-13);
  CHECK(max_abs(apply_givens(m, rot, Side::Right, false) - m * g) < 1e-13);
  CHECK(max_abs(apply_givens(m, rot, Side::Right, true) - m * g.adjoint()) <
        1e-13);
}

TEST_CASE("pfaffian base cases") {
  MatrixC<double> empty(0, 0);
  CHECK(std::abs(pfaffian(empty) - C(1, 0)) < 1e-15);

  MatrixC<double> odd = MatrixC<double>::Zero(3, 3);
  odd(0, 1) = 1;
  odd(1, 0) = -1;
  CHECK(std::abs(pfaffian(odd)) < 1e-15);

  const C a(0.7, -1.3);
  MatrixC<double> two(2, 2);
  two << C(0, 0), a, -a, C(0, 0);
  CHECK(std::abs(pfaffian(two) - a) < 1e-14);
}

TEST_CASE("pfaffian rejects non-skew input") {
  MatrixC<double> m = MatrixC<double>::Identity(4, 4);
  CHECK_THROWS_AS(pfaffian(m), Error);
}

TEST_CASE("pfaffian matches recursive expansion") {
  for (Index n : {4, 6, 8}) {
    for (int trial = 0; trial < 5; ++trial) {
      MatrixC<double> a =
          random_antisymmetric(n, 300 + 10 * static_cast<int>(n) + trial);
      const C pf = pfaffian(a);
      const C ref = pf_recursive(a);
      CHECK(std::abs(pf - ref) <
            1e-10 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("pfaffian squared equals the determinant") {
  for (int trial = 0; trial < 8; ++trial) {
    MatrixC<double> a = random_antisymmetric(6, 400 + trial);
    const C pf = pfaffian(a);
    const C det = a.determinant();
    CHECK(std::abs(pf * pf - det) < 1e-9 * std::max(1.0, std::abs(det)));
  }
}

TEST_CASE("pfaffian congruence identity") {
  for (int trial = 0; trial < 6; ++trial) {
    MatrixC<double> a = random_antisymmetric(6, 500 + trial);
    MatrixC<double> b = random_complex(6, 6, 600 + trial);
    MatrixC<double> c = b.transpose() * a * b;
    const C lhs = pfaffian(c);
    const C rhs = pfaffian(a) * b.determinant();
    CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("pfaffian of the block form gives a signed determinant") {
  for (Index n : {2, 3, 4}) {
    MatrixC<double> m = random_complex(n, n, 700 + n);
    MatrixC<double> block = MatrixC<double>::Zero(2 * n, 2 * n);
    block.topRightCorner(n, n) = m;
    block.bottomLeftCorner(n, n) = -m.transpose();
    const double sign = ((n * (n - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
    const C expected = sign * m.determinant();
    CHECK(std::abs(pfaffian(block) - expected) <
          1e-10 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("hermitian_eig reconstructs and orders") {
  MatrixC<double> g = random_complex(6, 6, 800);
  MatrixC<double> h = g + g.adjoint();
  HermitianEig<double> eig = hermitian_eig(h);
  for (Index i = 0; i + 1 < eig.eigenvalues.size(); ++i)
    CHECK(eig.eigenvalues(i) <= eig.eigenvalues(i + 1) + 1e-12);
  MatrixC<double> re =
      eig.eigenvectors *
      eig.eigenvalues.cast<C>().asDiagonal() *
      eig.eigenvectors.adjoint();
  CHECK(max_abs(re - h) < 1e-10 * max_abs(h));
  CHECK(max_abs(eig.eigenvectors * eig.eigenvectors.adjoint() -
                MatrixC<double>::Identity(6, 6)) < 1e-12);
  CHECK_THROWS_AS(hermitian_eig(g), Error);
}

TEST_CASE("skew_real_canonical block-diagonalizes a random generator") {
  for (Index n : {2, 3, 4}) {
    MatrixC<double> g = random_complex(2 * n, 2 * n, 900 + n);
    MatrixC<double> a = 0.5 * (g.real() - g.real().transpose())
                            .cast<C>();
    SkewCanonicalForm<double> canon = skew_real_canonical(a);
    CHECK(max_abs(canon.rotation.imag()) < 1e-12);
    CHECK(max_abs(canon.rotation * canon.rotation.adjoint() -
                  MatrixC<double>::Identity(2 * n, 2 * n)) < 1e-10);
    for (Index i = 0; i + 1 < n; ++i)
      CHECK(canon.epsilons(i) <= canon.epsilons(i + 1) + 1e-12);
    CHECK(canon.epsilons.minCoeff() >= -1e-14);
    MatrixC<double> d =
        canon.rotation * a * canon.rotation.transpose();
    MatrixC<double> expect = MatrixC<double>::Zero(2 * n, 2 * n);
    for (Index k = 0; k < n; ++k) {
      expect(k, n + k) = canon.epsilons(k);
      expect(n + k, k) = -canon.epsilons(k);
    }
    CHECK(max_abs(d - expect) < 1e-9 * std::max(1.0, max_abs(a)));
  }
}

TEST_CASE("skew_real_canonical keeps canonical inputs fixed") {
  MatrixC<double> a(2, 2);
  a << C(0, 0), C(2, 0), C(-2, 0), C(0, 0);
  SkewCanonicalForm<double> canon = skew_real_canonical(a);
  CHECK(canon.epsilons(0) == doctest::Approx(2.0));
  CHECK(max_abs(canon.rotation - MatrixC<double>::Identity(2, 2)) < 1e-10);

  MatrixC<double> zero = MatrixC<double>::Zero(4, 4);
  SkewCanonicalForm<double> zc = skew_real_canonical(zero);
  CHECK(zc.epsilons.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(max_abs(zc.rotation - MatrixC<double>::Identity(4, 4)) < 1e-12);
}

TEST_CASE("skew_real_canonical handles zero modes") {
  // One zero plane and one nonzero plane.
  MatrixC<double> a = MatrixC<double>::Zero(4, 4);
  a(0, 1) = C(1.5, 0);
  a(1, 0) = C(-1.5, 0);
  SkewCanonicalForm<double> canon = skew_real_canonical(a);
  CHECK(canon.epsilons(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(canon.epsilons(1) == doctest::Approx(1.5));
  MatrixC<double> d = canon.rotation * a * canon.rotation.transpose();
  CHECK(std::abs(d(1, 3) - C(1.5, 0)) < 1e-10);
}

TEST_CASE("matrix_function_hermitian applies spectral functions") {
  MatrixC<double> g = random_complex(4, 4, 1000);
  MatrixC<double> h = g + g.adjoint();
  MatrixC<double> ident =
      matrix_function_hermitian<double>(h, [](double x) { return x; });
  CHECK(max_abs(ident - h) < 1e-10 * max_abs(h));
  MatrixC<double> sq =
      matrix_function_hermitian<double>(h, [](double x) { return x * x; });
  CHECK(max_abs(sq - h * h) < 1e-9 * max_abs(h * h));
}

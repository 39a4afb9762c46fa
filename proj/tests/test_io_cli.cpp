#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fdpp/circuit.hpp"
#include "fdpp/io.hpp"
#include "fdpp/qr.hpp"
#include "fdpp/rng.hpp"
#include "fdpp/sim.hpp"

#include <cstdio>
#include <string>
#include <vector>

using namespace fdpp;
using C = std::complex<double>;
using nlohmann::json;

namespace {

MatrixC<double> random_complex(Index rows, Index cols, std::uint64_t seed) {
  CounterRng rng(RngSpec{seed, 13});
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

}  // namespace

TEST_CASE("matrix json roundtrip is exact") {
  MatrixC<double> m = random_complex(3, 2, 1);
  MatrixC<double> back = matrix_from_json(matrix_to_json(m));
  REQUIRE(back.rows() == 3);
  REQUIRE(back.cols() == 2);
  CHECK(max_abs(back - m) == 0.0);

  json j = matrix_to_json(m);
  j.erase("cols");
  CHECK_THROWS_AS(matrix_from_json(j), Error);
  json j2 = matrix_to_json(m);
  j2["data"].erase(0);
  CHECK_THROWS_AS(matrix_from_json(j2), Error);
}

TEST_CASE("kernel specs of every type roundtrip") {
  KernelSpec a;
  a.type = "projection_factor";
  a.factor = random_factor(2, 4, 2);
  KernelSpec a2 = kernel_spec_from_json(kernel_spec_to_json(a));
  CHECK(a2.type == "projection_factor");
  CHECK(max_abs(a2.factor - a.factor) == 0.0);

  KernelSpec b;
  b.type = "hermitian";
  MatrixC<double> h = random_complex(3, 3, 3);
  b.kernel = 0.5 * (h + h.adjoint());
  KernelSpec b2 = kernel_spec_from_json(kernel_spec_to_json(b));
  CHECK(max_abs(b2.kernel - b.kernel) == 0.0);

  KernelSpec c;
  c.type = "s_matrix";
  c.s = random_complex(4, 4, 4);
  KernelSpec c2 = kernel_spec_from_json(kernel_spec_to_json(c));
  CHECK(max_abs(c2.s - c.s) == 0.0);

  KernelSpec d;
  d.type = "bdg";
  MatrixC<double> hm = random_complex(3, 3, 5);
  d.m = 0.5 * (hm + hm.adjoint());
  MatrixC<double> dl = random_complex(3, 3, 6);
  d.delta = 0.5 * (dl - dl.transpose());
  d.beta = 2.5;
  d.occupied = {1, 3};
  KernelSpec d2 = kernel_spec_from_json(kernel_spec_to_json(d));
  CHECK(max_abs(d2.m - d.m) == 0.0);
  CHECK(max_abs(d2.delta - d.delta) == 0.0);
  CHECK(d2.beta == 2.5);
  CHECK(d2.occupied == std::vector<int>{1, 3});

  KernelSpec bad;
  bad.type = "mystery";
  CHECK_THROWS_AS(kernel_spec_to_json(bad), Error);
  json junk;
  junk["type"] = "mystery";
  CHECK_THROWS_AS(kernel_spec_from_json(junk), Error);
}

TEST_CASE("schedule json roundtrip preserves the verification residual") {
  MatrixC<double> q = random_factor(3, 6, 7);
  MatrixC<double> qp = preprocess_triangle(q).q;
  RotationSchedule<double> s = schedule_sameh_kuck(q);
  RotationSchedule<double> back = schedule_from_json(schedule_to_json(s));
  REQUIRE(back.rounds.size() == s.rounds.size());
  CHECK(back.n_modes == s.n_modes);
  CHECK(back.rank == s.rank);
  for (size_t r = 0; r < s.rounds.size(); ++r) {
    REQUIRE(back.rounds[r].size() == s.rounds[r].size());
    for (size_t i = 0; i < s.rounds[r].size(); ++i) {
      CHECK(back.rounds[r][i].l1 == s.rounds[r][i].l1);
      CHECK(back.rounds[r][i].l2 == s.rounds[r][i].l2);
      CHECK(back.rounds[r][i].theta == s.rounds[r][i].theta);
      CHECK(back.rounds[r][i].phi == s.rounds[r][i].phi);
    }
  }
  CHECK(max_abs(back.final_phases - s.final_phases) == 0.0);
  CHECK(verify_schedule(qp, back).first < 1e-9);
}

TEST_CASE("circuit json roundtrip keeps every gate kind") {
  Circuit<double> c;
  c.n_modes = 3;
  c.gates.push_back(make_mode_flip<double>(2));
  GivensRotation<double> rot;
  rot.l1 = 1;
  rot.l2 = 2;
  rot.theta = 0.4;
  rot.phi = -2.0;
  c.gates.push_back(make_givens_gate(rot));
  c.gates.push_back(make_ph_flip<double>());
  c.gates.push_back(make_measure_all<double>());

  Circuit<double> back = circuit_from_json(circuit_to_json(c));
  REQUIRE(back.gates.size() == 4);
  CHECK(back.n_modes == 3);
  CHECK(back.gates[0].kind == GateKind::ModeFlip);
  CHECK(back.gates[0].mode == 2);
  CHECK(back.gates[1].kind == GateKind::FermionicGivens);
  CHECK(back.gates[1].rotation.l1 == 1);
  CHECK(back.gates[1].rotation.l2 == 2);
  CHECK(back.gates[1].rotation.theta == 0.4);
  CHECK(back.gates[1].rotation.phi == -2.0);
  CHECK(back.gates[2].kind == GateKind::ParticleHoleFlip);
  CHECK(back.gates[3].kind == GateKind::MeasureAll);

  json junk = circuit_to_json(c);
  junk["gates"][0]["kind"] = "mystery";
  CHECK_THROWS_AS(circuit_from_json(junk), Error);
}

TEST_CASE("format_double writes the shortest exact decimal") {
  CHECK(format_double(0.25) == "0.25");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.0) == "0");
  for (double x : {1.0 / 3.0, 2.0 / 3.0, 1e-17, 123456.789, -0.7071067811865476}) {
    const std::string s = format_double(x);
    CHECK(std::stod(s) == x);
  }
}

TEST_CASE("histogram csv matches its golden layout") {
  std::vector<std::uint64_t> samples{5, 5, 2};
  const std::string text = histogram_csv(samples, 3);
  const std::string expected =
      "bitstring,subset,count,frequency\n"
      "010,\"{2}\",1,0.3333333333333333\n"
      "101,\"{1,3}\",2,0.6666666666666666\n";
  CHECK(text == expected);
}

TEST_CASE("histogram csv parses back to the empirical distribution") {
  std::vector<std::uint64_t> samples{0, 1, 1, 6, 6, 6, 3};
  const std::string text = histogram_csv(samples, 3);
  VectorR<double> freq = histogram_from_csv(text, 3);
  VectorR<double> emp = empirical_distribution<double>(samples, 3);
  CHECK(max_abs(freq - emp) == 0.0);

  CHECK_THROWS_AS(histogram_from_csv("bitstring,subset,count,frequency\n"
                                     "01,\"{2}\",1,1\n",
                                     3),
                  Error);
  CHECK_THROWS_AS(histogram_from_csv("bitstring,subset,count,frequency\n"
                                     "0a0,\"{2}\",1,1\n",
                                     3),
                  Error);
}

TEST_CASE("pmf csv drops zero-probability rows") {
  VectorR<double> pmf(4);
  pmf << 0.5, 0.0, 0.25, 0.25;
  const std::string text = pmf_csv(pmf, 2);
  const std::string expected =
      "bitstring,subset,probability\n"
      "00,\"{}\",0.5\n"
      "01,\"{2}\",0.25\n"
      "11,\"{1,2}\",0.25\n";
  CHECK(text == expected);
  VectorR<double> tiny(2);
  tiny << 0.5, 0.5;
  CHECK_THROWS_AS(pmf_csv(tiny, 2), Error);
}

TEST_CASE("text files roundtrip through disk") {
  const std::string path = "/tmp/fdpp_io_roundtrip.txt";
  const std::string body = "alpha,beta\n1,2\n";
  write_text_file(path, body);
  CHECK(read_text_file(path) == body);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_text_file("/tmp/fdpp_missing_file_404.txt"), Error);
}

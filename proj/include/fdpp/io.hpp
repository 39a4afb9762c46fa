#pragma once

// JSON serialization for matrices, kernel specifications, schedules, and
// circuits, plus deterministic CSV rendering of measurement histograms.
// Concrete double precision; implemented in src/io.cpp.

#include "fdpp/circuit.hpp"
#include "fdpp/common.hpp"
#include "fdpp/qr.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fdpp {

nlohmann::json matrix_to_json(const MatrixC<double>& m);
MatrixC<double> matrix_from_json(const nlohmann::json& j);

// Kernel input file: one of four source types.
struct KernelSpec {
  std::string type;          // projection_factor | hermitian | s_matrix | bdg
  MatrixC<double> factor;    // projection_factor: r x N orthonormal rows
  MatrixC<double> kernel;    // hermitian: N x N
  MatrixC<double> s;         // s_matrix: 2N x 2N block matrix
  MatrixC<double> m;         // bdg: N x N Hermitian
  MatrixC<double> delta;     // bdg: N x N antisymmetric
  double beta = 1.0;         // bdg thermal weight
  std::vector<int> occupied; // bdg: projective quasimode list (may be empty)
};

nlohmann::json kernel_spec_to_json(const KernelSpec& spec);
KernelSpec kernel_spec_from_json(const nlohmann::json& j);

nlohmann::json schedule_to_json(const RotationSchedule<double>& s);
RotationSchedule<double> schedule_from_json(const nlohmann::json& j);

nlohmann::json circuit_to_json(const Circuit<double>& c);
Circuit<double> circuit_from_json(const nlohmann::json& j);

// Shortest round-trip decimal rendering (printf %.17g trimmed via %g).
std::string format_double(double x);

// CSV with header "bitstring,subset,count,frequency", one row per observed
// bitstring sorted by packed mask, empty-count rows omitted. The subset
// column is quoted ("{1,3}") so the braces survive CSV commas.
std::string histogram_csv(const std::vector<std::uint64_t>& samples,
                          Index n_modes);

// CSV with header "bitstring,subset,probability" over all bitstrings with
// nonzero probability, sorted by packed mask.
std::string pmf_csv(const VectorR<double>& pmf, Index n_modes);

// Parse the frequency column of histogram_csv back into a probability
// vector over all 2^n bitstrings.
VectorR<double> histogram_from_csv(const std::string& text, Index n_modes);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace fdpp

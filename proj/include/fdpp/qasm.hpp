#pragma once

// OPENQASM 2.0 export of fermionic circuits over a standard gate set
// (x, rz, ry, cx), including nearest-neighbour routing of distant Givens
// gates by phased-swap chains, plus a parser and a dense unitary builder
// used to validate exported text against the simulator.

#include "fdpp/circuit.hpp"
#include "fdpp/common.hpp"

#include <string>
#include <vector>

namespace fdpp {

struct QasmInstruction {
  std::string name;        // x | rz | ry | cx | measure | barrier
  std::vector<int> qubits; // 0-based register indices
  double angle = 0;
  bool has_angle = false;
};

struct QasmProgram {
  Index n_qubits = 0;
  std::vector<QasmInstruction> instructions;
};

// Render a circuit as OPENQASM 2.0. Mode k acts on qubit q[k-1]. Givens
// gates on non-adjacent modes are routed with phased swaps so that every
// emitted two-qubit gate touches a nearest-neighbour pair.
std::string export_qasm(const Circuit<double>& c);

QasmProgram parse_qasm(const std::string& text);

// Dense 2^n unitary of the unitary prefix (measure instructions ignored),
// qubit k mapped to bit k of the basis index.
MatrixC<double> qasm_unitary(const QasmProgram& p);

}  // namespace fdpp

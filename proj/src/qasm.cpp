#include "fdpp/qasm.hpp"

#include "fdpp/io.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace fdpp {

namespace {

// Emit the five-element standard-gate expansion of an adjacent Givens gate:
// a z-phase sandwich around a CNOT-conjugated controlled y-rotation. The
// controlled rotation itself costs two more cx, so the text holds four cx
// per Givens gate even though the abstract two-qubit count is two.
void emit_adjacent_givens(std::ostringstream& out, int l1, int l2,
                          double theta, double phi) {
  const int a = l1 - 1;
  const int b = l2 - 1;
  out << "rz(" << format_double(phi) << ") q[" << b << "];\n";
  out << "cx q[" << b << "],q[" << a << "];\n";
  out << "ry(" << format_double(theta) << ") q[" << b << "];\n";
  out << "cx q[" << a << "],q[" << b << "];\n";
  out << "ry(" << format_double(-theta) << ") q[" << b << "];\n";
  out << "cx q[" << a << "],q[" << b << "];\n";
  out << "cx q[" << b << "],q[" << a << "];\n";
  out << "rz(" << format_double(-phi) << ") q[" << b << "];\n";
}

void emit_givens(std::ostringstream& out, const GivensRotation<double>& rot) {
  if (rot.l2 == rot.l1 + 1) {
    emit_adjacent_givens(out, rot.l1, rot.l2, rot.theta, rot.phi);
    return;
  }
  // Route the far mode down with phased swaps, rotate on the adjacent pair
  // with the phase advanced by pi/2 per swap, then undo the swaps.
  const int n_swaps = rot.l2 - rot.l1 - 1;
  for (int k = rot.l2 - 1; k >= rot.l1 + 1; --k)
    emit_adjacent_givens(out, k, k + 1, kPi / 2, kPi / 2);
  const double phi2 = wrap_angle(rot.phi + n_swaps * (kPi / 2));
  emit_adjacent_givens(out, rot.l1, rot.l1 + 1, rot.theta, phi2);
  for (int k = rot.l1 + 1; k <= rot.l2 - 1; ++k)
    emit_adjacent_givens(out, k, k + 1, kPi / 2, -kPi / 2);
}

}  // namespace

std::string export_qasm(const Circuit<double>& c) {
  std::ostringstream out;
  out << "OPENQASM 2.0;\n";
  out << "include \"qelib1.inc\";\n";
  out << "qreg q[" << c.n_modes << "];\n";
  out << "creg c[" << c.n_modes << "];\n";
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::ModeFlip:
        out << "x q[" << (g.mode - 1) << "];\n";
        break;
      case GateKind::ParticleHoleFlip:
        out << "x q[" << (c.n_modes - 1) << "];\n";
        break;
      case GateKind::FermionicGivens:
        emit_givens(out, g.rotation);
        break;
      case GateKind::MeasureAll:
        out << "measure q -> c;\n";
        break;
    }
  }
  return out.str();
}

namespace {

std::string strip(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Parse every "q[<int>]" occurrence in order.
std::vector<int> parse_qubits(const std::string& s) {
  std::vector<int> out;
  size_t pos = 0;
  while ((pos = s.find("q[", pos)) != std::string::npos) {
    size_t end = s.find(']', pos);
    require(end != std::string::npos, "parse_qasm: unterminated index");
    out.push_back(std::stoi(s.substr(pos + 2, end - pos - 2)));
    pos = end + 1;
  }
  return out;
}

}  // namespace

QasmProgram parse_qasm(const std::string& text) {
  QasmProgram p;
  std::istringstream in(text);
  std::string raw;
  std::string pending;
  std::vector<std::string> statements;
  while (std::getline(in, raw)) {
    const auto comment = raw.find("//");
    if (comment != std::string::npos) raw = raw.substr(0, comment);
    pending += raw + "\n";
  }
  size_t start = 0;
  while (true) {
    const auto semi = pending.find(';', start);
    if (semi == std::string::npos) break;
    statements.push_back(strip(pending.substr(start, semi - start)));
    start = semi + 1;
  }
  require(strip(pending.substr(start)).empty(),
          "parse_qasm: trailing content without terminator");

  for (const std::string& st : statements) {
    if (st.empty()) continue;
    if (st.rfind("OPENQASM", 0) == 0 || st.rfind("include", 0) == 0 ||
        st.rfind("creg", 0) == 0 || st.rfind("barrier", 0) == 0)
      continue;
    if (st.rfind("qreg", 0) == 0) {
      const auto lb = st.find('[');
      const auto rb = st.find(']');
      require(lb != std::string::npos && rb != std::string::npos && rb > lb,
              "parse_qasm: bad qreg");
      p.n_qubits = std::stoll(st.substr(lb + 1, rb - lb - 1));
      continue;
    }
    QasmInstruction ins;
    if (st.rfind("measure", 0) == 0) {
      ins.name = "measure";
      p.instructions.push_back(ins);
      continue;
    }
    size_t name_end = 0;
    while (name_end < st.size() &&
           (std::isalnum(static_cast<unsigned char>(st[name_end])) ||
            st[name_end] == '_'))
      ++name_end;
    ins.name = st.substr(0, name_end);
    size_t rest_begin = name_end;
    if (rest_begin < st.size() && st[rest_begin] == '(') {
      const auto close = st.find(')', rest_begin);
      require(close != std::string::npos, "parse_qasm: unterminated angle");
      ins.angle = std::stod(st.substr(rest_begin + 1, close - rest_begin - 1));
      ins.has_angle = true;
      rest_begin = close + 1;
    }
    ins.qubits = parse_qubits(st.substr(rest_begin));
    require(ins.name == "x" || ins.name == "rz" || ins.name == "ry" ||
                ins.name == "cx",
            "parse_qasm: unsupported gate " + ins.name);
    require(!ins.qubits.empty(), "parse_qasm: gate without targets");
    p.instructions.push_back(ins);
  }
  require(p.n_qubits >= 1, "parse_qasm: missing qreg");
  return p;
}

MatrixC<double> qasm_unitary(const QasmProgram& p) {
  require(p.n_qubits <= 12, "qasm_unitary: register too large");
  const Index dim = Index(1) << p.n_qubits;
  MatrixC<double> u = MatrixC<double>::Identity(dim, dim);
  using C = std::complex<double>;
  auto for_each_col = [&](auto&& update) {
    for (Index col = 0; col < dim; ++col) update(col);
  };
  for (const auto& ins : p.instructions) {
    if (ins.name == "measure") continue;
    if (ins.name == "x") {
      const std::uint64_t bit = std::uint64_t(1) << ins.qubits[0];
      MatrixC<double> next(dim, dim);
      for (Index row = 0; row < dim; ++row)
        next.row(static_cast<Index>(static_cast<std::uint64_t>(row) ^ bit)) =
            u.row(row);
      u = std::move(next);
    } else if (ins.name == "rz") {
      const std::uint64_t bit = std::uint64_t(1) << ins.qubits[0];
      const C e0 = std::exp(C(0, -ins.angle / 2));
      const C e1 = std::exp(C(0, ins.angle / 2));
      for (Index row = 0; row < dim; ++row)
        u.row(row) *= (static_cast<std::uint64_t>(row) & bit) ? e1 : e0;
    } else if (ins.name == "ry") {
      const std::uint64_t bit = std::uint64_t(1) << ins.qubits[0];
      const double ch = std::cos(ins.angle / 2);
      const double sh = std::sin(ins.angle / 2);
      for_each_col([&](Index col) {
        for (Index row = 0; row < dim; ++row) {
          if (static_cast<std::uint64_t>(row) & bit) continue;
          const Index r1 = static_cast<Index>(
              static_cast<std::uint64_t>(row) | bit);
          const C a0 = u(row, col);
          const C a1 = u(r1, col);
          u(row, col) = ch * a0 - sh * a1;
          u(r1, col) = sh * a0 + ch * a1;
        }
      });
    } else if (ins.name == "cx") {
      require(ins.qubits.size() == 2, "qasm_unitary: cx needs two qubits");
      const std::uint64_t cbit = std::uint64_t(1) << ins.qubits[0];
      const std::uint64_t tbit = std::uint64_t(1) << ins.qubits[1];
      for_each_col([&](Index col) {
        for (Index row = 0; row < dim; ++row) {
          const std::uint64_t r = static_cast<std::uint64_t>(row);
          if ((r & cbit) && !(r & tbit)) {
            const Index r1 = static_cast<Index>(r | tbit);
            std::swap(u(row, col), u(r1, col));
          }
        }
      });
    } else {
      fail("qasm_unitary: unsupported gate " + ins.name);
    }
  }
  return u;
}

}  // namespace fdpp

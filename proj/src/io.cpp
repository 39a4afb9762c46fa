#include "fdpp/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace fdpp {

using nlohmann::json;

json matrix_to_json(const MatrixC<double>& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  json data = json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index c = 0; c < m.cols(); ++c)
      data.push_back({m(i, c).real(), m(i, c).imag()});
  j["data"] = std::move(data);
  return j;
}

MatrixC<double> matrix_from_json(const json& j) {
  require(j.contains("rows") && j.contains("cols") && j.contains("data"),
          "matrix_from_json: missing fields");
  const Index rows = j.at("rows").get<Index>();
  const Index cols = j.at("cols").get<Index>();
  const auto& data = j.at("data");
  require(rows >= 0 && cols >= 0 &&
              data.size() == static_cast<size_t>(rows * cols),
          "matrix_from_json: data length mismatch");
  MatrixC<double> m(rows, cols);
  size_t k = 0;
  for (Index i = 0; i < rows; ++i) {
    for (Index c = 0; c < cols; ++c) {
      const auto& e = data[k++];
      require(e.is_array() && e.size() == 2,
              "matrix_from_json: entries must be [re, im] pairs");
      m(i, c) = {e[0].get<double>(), e[1].get<double>()};
    }
  }
  return m;
}

json kernel_spec_to_json(const KernelSpec& spec) {
  json j;
  j["type"] = spec.type;
  if (spec.type == "projection_factor") {
    j["factor"] = matrix_to_json(spec.factor);
  } else if (spec.type == "hermitian") {
    j["kernel"] = matrix_to_json(spec.kernel);
  } else if (spec.type == "s_matrix") {
    j["s"] = matrix_to_json(spec.s);
  } else if (spec.type == "bdg") {
    j["m"] = matrix_to_json(spec.m);
    j["delta"] = matrix_to_json(spec.delta);
    j["beta"] = spec.beta;
    j["occupied"] = spec.occupied;
  } else {
    fail("kernel_spec_to_json: unknown type " + spec.type);
  }
  return j;
}

KernelSpec kernel_spec_from_json(const json& j) {
  KernelSpec spec;
  require(j.contains("type"), "kernel_spec_from_json: missing type");
  spec.type = j.at("type").get<std::string>();
  if (spec.type == "projection_factor") {
    spec.factor = matrix_from_json(j.at("factor"));
  } else if (spec.type == "hermitian") {
    spec.kernel = matrix_from_json(j.at("kernel"));
  } else if (spec.type == "s_matrix") {
    spec.s = matrix_from_json(j.at("s"));
  } else if (spec.type == "bdg") {
    spec.m = matrix_from_json(j.at("m"));
    spec.delta = matrix_from_json(j.at("delta"));
    if (j.contains("beta")) spec.beta = j.at("beta").get<double>();
    if (j.contains("occupied"))
      spec.occupied = j.at("occupied").get<std::vector<int>>();
  } else {
    fail("kernel_spec_from_json: unknown type " + spec.type);
  }
  return spec;
}

json schedule_to_json(const RotationSchedule<double>& s) {
  json j;
  j["n_modes"] = s.n_modes;
  j["rank"] = s.rank;
  json rounds = json::array();
  for (const auto& round : s.rounds) {
    json jr = json::array();
    for (const auto& rot : round)
      jr.push_back({{"l1", rot.l1},
                    {"l2", rot.l2},
                    {"theta", rot.theta},
                    {"phi", rot.phi}});
    rounds.push_back(std::move(jr));
  }
  j["rounds"] = std::move(rounds);
  json phases = json::array();
  for (Index i = 0; i < s.final_phases.size(); ++i)
    phases.push_back({s.final_phases(i).real(), s.final_phases(i).imag()});
  j["phases"] = std::move(phases);
  return j;
}

RotationSchedule<double> schedule_from_json(const json& j) {
  RotationSchedule<double> s;
  s.n_modes = j.at("n_modes").get<Index>();
  s.rank = j.at("rank").get<Index>();
  for (const auto& jr : j.at("rounds")) {
    std::vector<GivensRotation<double>> round;
    for (const auto& e : jr) {
      GivensRotation<double> rot;
      rot.l1 = e.at("l1").get<int>();
      rot.l2 = e.at("l2").get<int>();
      rot.theta = e.at("theta").get<double>();
      rot.phi = e.at("phi").get<double>();
      round.push_back(rot);
    }
    s.rounds.push_back(std::move(round));
  }
  const auto& phases = j.at("phases");
  s.final_phases = VectorC<double>::Zero(static_cast<Index>(phases.size()));
  for (Index i = 0; i < s.final_phases.size(); ++i)
    s.final_phases(i) = {phases[static_cast<size_t>(i)][0].get<double>(),
                         phases[static_cast<size_t>(i)][1].get<double>()};
  return s;
}

json circuit_to_json(const Circuit<double>& c) {
  json j;
  j["n_modes"] = c.n_modes;
  json gates = json::array();
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::ModeFlip:
        gates.push_back({{"kind", "x"}, {"mode", g.mode}});
        break;
      case GateKind::FermionicGivens:
        gates.push_back({{"kind", "givens"},
                         {"l1", g.rotation.l1},
                         {"l2", g.rotation.l2},
                         {"theta", g.rotation.theta},
                         {"phi", g.rotation.phi}});
        break;
      case GateKind::ParticleHoleFlip:
        gates.push_back({{"kind", "ph_x"}});
        break;
      case GateKind::MeasureAll:
        gates.push_back({{"kind", "measure"}});
        break;
    }
  }
  j["gates"] = std::move(gates);
  return j;
}

Circuit<double> circuit_from_json(const json& j) {
  Circuit<double> c;
  c.n_modes = j.at("n_modes").get<Index>();
  for (const auto& e : j.at("gates")) {
    const std::string kind = e.at("kind").get<std::string>();
    if (kind == "x") {
      c.gates.push_back(make_mode_flip<double>(e.at("mode").get<int>()));
    } else if (kind == "givens") {
      GivensRotation<double> rot;
      rot.l1 = e.at("l1").get<int>();
      rot.l2 = e.at("l2").get<int>();
      rot.theta = e.at("theta").get<double>();
      rot.phi = e.at("phi").get<double>();
      c.gates.push_back(make_givens_gate(rot));
    } else if (kind == "ph_x") {
      c.gates.push_back(make_ph_flip<double>());
    } else if (kind == "measure") {
      c.gates.push_back(make_measure_all<double>());
    } else {
      fail("circuit_from_json: unknown gate kind " + kind);
    }
  }
  return c;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[64];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, x);
    double back = 0;
    std::sscanf(shorter, "%lf", &back);
    if (back == x) return shorter;
  }
  return buf;
}

std::string histogram_csv(const std::vector<std::uint64_t>& samples,
                          Index n_modes) {
  std::map<std::uint64_t, Index> counts;
  for (std::uint64_t m : samples) ++counts[m];
  const double shots = static_cast<double>(samples.size());
  std::ostringstream out;
  out << "bitstring,subset,count,frequency\n";
  for (const auto& [mask, count] : counts) {
    out << bitstring_of(mask, n_modes) << ",\"" << subset_string(mask, n_modes)
        << "\"," << count << "," << format_double(count / shots) << "\n";
  }
  return out.str();
}

std::string pmf_csv(const VectorR<double>& pmf, Index n_modes) {
  require(pmf.size() == (Index(1) << n_modes), "pmf_csv: size mismatch");
  std::ostringstream out;
  out << "bitstring,subset,probability\n";
  for (Index i = 0; i < pmf.size(); ++i) {
    if (pmf(i) == 0) continue;
    const std::uint64_t mask = static_cast<std::uint64_t>(i);
    out << bitstring_of(mask, n_modes) << ",\"" << subset_string(mask, n_modes)
        << "\"," << format_double(pmf(i)) << "\n";
  }
  return out.str();
}

VectorR<double> histogram_from_csv(const std::string& text, Index n_modes) {
  VectorR<double> freq = VectorR<double>::Zero(Index(1) << n_modes);
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto comma = line.find(',');
    require(comma != std::string::npos, "histogram_from_csv: bad row");
    const std::string bits = line.substr(0, comma);
    require(static_cast<Index>(bits.size()) == n_modes,
            "histogram_from_csv: bitstring width mismatch");
    std::uint64_t mask = 0;
    for (Index k = 0; k < n_modes; ++k) {
      require(bits[static_cast<size_t>(k)] == '0' ||
                  bits[static_cast<size_t>(k)] == '1',
              "histogram_from_csv: bad bitstring");
      if (bits[static_cast<size_t>(k)] == '1') mask |= std::uint64_t(1) << k;
    }
    const auto last_comma = line.rfind(',');
    require(last_comma != std::string::npos && last_comma > comma,
            "histogram_from_csv: bad row");
    freq(static_cast<Index>(mask)) = std::stod(line.substr(last_comma + 1));
  }
  return freq;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "read_text_file: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "write_text_file: cannot open " + path);
  out << content;
  require(out.good(), "write_text_file: write failed for " + path);
}

}  // namespace fdpp

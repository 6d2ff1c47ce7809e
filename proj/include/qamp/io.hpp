#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qamp/amplify.hpp"
#include "qamp/circuit.hpp"
#include "qamp/expander.hpp"
#include "qamp/hamiltonian.hpp"
#include "qamp/types.hpp"

namespace qamp {

using json = nlohmann::json;

inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t x) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, x >>= 4) s[i] = digits[x & 0xF];
  return s;
}

/// Hash of a state vector's raw amplitudes.
inline std::string state_hash(const Vector& v) {
  std::string bytes(reinterpret_cast<const char*>(v.data()), sizeof(cplx) * static_cast<std::size_t>(v.size()));
  return hex64(fnv1a64(bytes));
}

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw StructuralError("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Matrix m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) throw StructuralError("matrix must be square");
    for (Eigen::Index c = 0; c < rows; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      if (e.is_number()) {
        m(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(r, c) = cplx{e[0].get<double>(), e[1].get<double>()};
      } else {
        throw StructuralError("matrix entries must be [re, im] pairs");
      }
    }
  }
  return m;
}

namespace detail {
template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw StructuralError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw StructuralError(std::string("field '") + key + "' has the wrong type");
  }
}
}  // namespace detail

inline json hamiltonian_to_json(const LayeredHamiltonian& h) {
  json j;
  j["n_qubits"] = h.n_qubits();
  const auto layer_of = h.term_layers();
  json terms = json::array();
  for (std::size_t i = 0; i < h.num_terms(); ++i) {
    json t;
    t["support"] = h.terms()[i].support();
    t["matrix"] = matrix_to_json(h.terms()[i].matrix());
    t["layer"] = layer_of[i];
    terms.push_back(std::move(t));
  }
  j["terms"] = std::move(terms);
  j["weights"] = h.weights();
  return j;
}

/// Layers come from per-term "layer" fields when every term has one,
/// otherwise from an equitable colouring.
inline LayeredHamiltonian hamiltonian_from_json(const json& j) {
  if (!j.is_object()) throw StructuralError("Hamiltonian must be a JSON object");
  const int n = detail::field<int>(j, "n_qubits");
  if (!j.contains("terms") || !j["terms"].is_array()) throw StructuralError("missing 'terms' array");
  std::vector<LocalProjector> terms;
  std::vector<int> layer_of;
  int with_layer = 0;
  for (const auto& t : j["terms"]) {
    auto support = detail::field<std::vector<int>>(t, "support");
    if (!t.contains("matrix")) throw StructuralError("term without 'matrix'");
    terms.emplace_back(std::move(support), matrix_from_json(t["matrix"]));
    if (t.contains("layer")) {
      layer_of.push_back(detail::field<int>(t, "layer"));
      ++with_layer;
    } else {
      layer_of.push_back(-1);
    }
  }
  std::optional<std::vector<std::vector<int>>> layers;
  if (with_layer > 0) {
    if (with_layer != static_cast<int>(terms.size())) throw StructuralError("either every term or no term has a 'layer'");
    int g = 0;
    for (int l : layer_of) {
      if (l < 0) throw StructuralError("layer index must be non-negative");
      g = std::max(g, l + 1);
    }
    layers.emplace(static_cast<std::size_t>(g));
    for (std::size_t i = 0; i < terms.size(); ++i) (*layers)[layer_of[i]].push_back(static_cast<int>(i));
  }
  std::optional<std::vector<double>> weights;
  if (j.contains("weights") && !j["weights"].is_null()) weights = detail::field<std::vector<double>>(j, "weights");
  return build_layered(n, std::move(terms), std::move(layers), std::move(weights));
}

inline json graph_to_json(const ExpanderGraph& g) {
  json j;
  j["m"] = g.m;
  j["d"] = g.d;
  j["family"] = family_name(g.family);
  json rot = json::array();
  for (int v = 0; v < g.m; ++v)
    for (int p = 0; p < g.d; ++p) rot.push_back({v, p, g.rot(v, p).vertex, g.rot(v, p).port});
  j["rotation"] = std::move(rot);
  j["mu"] = g.mu;
  j["lambda2"] = g.lambda2;
  return j;
}

/// Rotation entries are [v, p, v', p']; mu is always recomputed.
inline ExpanderGraph graph_from_json(const json& j) {
  const int m = detail::field<int>(j, "m");
  const int d = detail::field<int>(j, "d");
  if (m < 1 || d < 1) throw StructuralError("graph needs m >= 1 and d >= 1");
  if (!j.contains("rotation") || !j["rotation"].is_array()) throw StructuralError("missing 'rotation' array");
  std::vector<Port> rot(static_cast<std::size_t>(m) * d, Port{-1, -1});
  for (const auto& e : j["rotation"]) {
    if (!e.is_array() || e.size() != 4) throw StructuralError("rotation entries must be [v, p, v', p']");
    const int v = e[0].get<int>(), p = e[1].get<int>();
    if (v < 0 || v >= m || p < 0 || p >= d) throw StructuralError("rotation entry out of range");
    rot[static_cast<std::size_t>(v) * d + p] = {e[2].get<int>(), e[3].get<int>()};
  }
  ExpanderGraph g = make_custom_graph(m, d, std::move(rot));
  if (j.contains("family") && j["family"].is_string()) {
    const auto name = j["family"].get<std::string>();
    if (name != "custom") g.family = parse_family(name);
  }
  return g;
}

inline constexpr int kAmplifiedVersion = 1;

/// Stores the base, t, mode and per-layer graphs; path terms are implicit.
inline json amplified_to_json(const AmplifiedOperator& amp) {
  json j;
  j["format"] = "qamp-amplified";
  j["version"] = kAmplifiedVersion;
  j["mode"] = mode_name(amp.mode());
  j["t"] = amp.t();
  j["base"] = hamiltonian_to_json(amp.base());
  if (amp.mode() == AmpMode::Walks) {
    json layers = json::array();
    for (const auto& w : amp.walks()) {
      json g = graph_to_json(w.graph);
      g["replication"] = w.replication;
      layers.push_back(std::move(g));
    }
    j["graphs"] = std::move(layers);
    j["path_counts"] = amp.path_counts();
  }
  j["n_qubits"] = amp.n_qubits();
  return j;
}

inline bool is_amplified_json(const json& j) { return j.is_object() && j.value("format", "") == "qamp-amplified"; }

inline AmplifiedOperator amplified_from_json(const json& j) {
  if (!is_amplified_json(j)) throw StructuralError("not an amplified-operator document");
  if (detail::field<int>(j, "version") != kAmplifiedVersion) throw StructuralError("unsupported amplified-operator version");
  const AmpMode mode = parse_mode(detail::field<std::string>(j, "mode"));
  const int t = detail::field<int>(j, "t");
  if (!j.contains("base")) throw StructuralError("missing 'base'");
  auto base = std::make_shared<const LayeredHamiltonian>(hamiltonian_from_json(j["base"]));
  std::vector<LayerWalk> walks;
  if (mode == AmpMode::Walks) {
    if (!j.contains("graphs") || !j["graphs"].is_array()) throw StructuralError("walk mode needs 'graphs'");
    if (j["graphs"].size() != static_cast<std::size_t>(base->num_layers())) throw StructuralError("need one graph per layer");
    for (std::size_t c = 0; c < j["graphs"].size(); ++c) {
      LayerWalk w;
      w.graph = graph_from_json(j["graphs"][c]);
      w.clauses = static_cast<int>(base->layers()[c].size());
      w.replication = j["graphs"][c].value("replication", w.graph.m / std::max(1, w.clauses));
      walks.push_back(std::move(w));
    }
  }
  return AmplifiedOperator(std::move(base), mode, t, std::move(walks));
}

inline json circuit_to_json(const GateCircuit& c) {
  json j;
  j["qubits"] = c.system_qubits;
  j["ancillas"] = c.ancillas;
  j["tree_depth"] = c.tree_depth;
  json gates = json::array();
  for (const auto& g : c.gates) gates.push_back({{"name", g.name}, {"targets", g.targets}, {"matrix", matrix_to_json(g.matrix)}});
  j["gates"] = std::move(gates);
  return j;
}

inline GateCircuit circuit_from_json(const json& j) {
  GateCircuit c;
  c.system_qubits = detail::field<int>(j, "qubits");
  c.ancillas = detail::field<int>(j, "ancillas");
  c.tree_depth = j.value("tree_depth", 0);
  if (!j.contains("gates") || !j["gates"].is_array()) throw StructuralError("missing 'gates' array");
  for (const auto& g : j["gates"])
    c.gates.push_back({detail::field<std::string>(g, "name"), detail::field<std::vector<int>>(g, "targets"),
                       matrix_from_json(g.at("matrix"))});
  validate_circuit(c);
  return c;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StructuralError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw StructuralError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace qamp

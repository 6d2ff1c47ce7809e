#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qamp/qamp.hpp"

using namespace qamp;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

struct Output {
  std::string format = "json";
  std::string out;
};

void emit(const Output& o, const json& j, const std::string& table) {
  const std::string text = o.format == "table" ? table : j.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw StructuralError("cannot write " + o.out);
    f << text;
  }
}

std::string ledger_table(const VerificationLedger& l) {
  std::ostringstream ss;
  ss << std::left << std::setw(56) << "check" << std::right << std::setw(14) << "lhs" << std::setw(14) << "rhs"
     << std::setw(14) << "slack" << "  pass\n";
  for (const auto& r : l.records())
    ss << std::left << std::setw(56) << r.id << std::right << std::setprecision(6) << std::setw(14) << r.lhs
       << std::setw(14) << r.rhs << std::setw(14) << r.slack() << "  " << (r.pass ? "yes" : "NO") << "\n";
  return ss.str();
}

std::string kv_table(const json& j) {
  std::ostringstream ss;
  for (auto it = j.begin(); it != j.end(); ++it) ss << std::left << std::setw(20) << it.key() << it.value().dump() << "\n";
  return ss.str();
}

int finish_ledger(const VerificationLedger& l) {
  const auto fails = l.failures();
  std::cerr << l.records().size() << " checks, " << fails << " failed, worst slack " << l.worst_slack() << "\n";
  if (fails == 0) return 0;
  for (const auto& r : l.records())
    if (!r.pass) std::cerr << "FAILED " << r.id << ": " << r.lhs << " > " << r.rhs << " + " << r.tolerance << "\n";
  return kExitFail;
}

LayeredHamiltonian load_hamiltonian(const std::string& path) { return hamiltonian_from_json(parse_json(read_text(path))); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qamp: derandomised gap amplification of layered Hamiltonians"};
  app.require_subcommand(1);
  Output out;
  app.add_option("--format", out.format, "Output format")->check(CLI::IsMember({"json", "table"}));

  std::string in;
  int t = 1;
  std::string mode = "walks";
  std::string graph = "complete-loops";
  std::optional<int> replication;

  auto* amplify = app.add_subcommand("amplify", "Build an amplified Hamiltonian");
  amplify->add_option("--in", in, "Hamiltonian JSON")->required();
  amplify->add_option("--t", t, "Amplification parameter")->required();
  amplify->add_option("--mode", mode)->check(CLI::IsMember({"walks", "tensor", "dl"}));
  amplify->add_option("--graph", graph, "Walk graph family");
  amplify->add_option("--replication", replication, "Clause replication factor");
  amplify->add_option("--out", out.out, "Output file");

  std::string method = "auto";
  double tol = 1e-8;
  std::uint64_t seed = 7;
  auto* spectrum = app.add_subcommand("spectrum", "Smallest eigenvalue of a Hamiltonian or amplified operator");
  spectrum->add_option("--in", in)->required();
  spectrum->add_option("--method", method)->check(CLI::IsMember({"auto", "dense", "iter"}));
  spectrum->add_option("--tol", tol);
  spectrum->add_option("--seed", seed);
  spectrum->add_option("--out", out.out);

  int r = 1;
  double alpha = 0.5;
  bool grid = false;
  int seeds = 10;
  auto* verify = app.add_subcommand("verify", "Check completeness, soundness and the supporting lemmas");
  verify->add_option("--in", in)->required();
  verify->add_option("--t", t)->required();
  verify->add_option("--r", r);
  verify->add_option("--alpha", alpha);
  verify->add_flag("--grid", grid, "Use every r in 1..t and the default alpha grid");
  verify->add_option("--graph", graph);
  verify->add_option("--replication", replication);
  verify->add_option("--seeds", seeds, "Number of ground-state seeds");
  verify->add_option("--seed", seed, "First seed");
  verify->add_option("--out", out.out);

  int rounds = 1;
  std::string emit_path;
  auto* iterate = app.add_subcommand("iterate", "Repeat the amplification and check each round");
  iterate->add_option("--in", in)->required();
  iterate->add_option("--t", t);
  iterate->add_option("--rounds", rounds)->required();
  iterate->add_option("--graph", graph);
  iterate->add_option("--seeds", seeds);
  iterate->add_option("--emit", emit_path, "Write the final Hamiltonian here");
  iterate->add_option("--out", out.out);

  std::uint64_t term = 0;
  double T = 1.0;
  auto* circuit = app.add_subcommand("circuit", "Emit the simulation circuit of one term");
  circuit->add_option("--in", in)->required();
  circuit->add_option("--term", term, "Path term id, or base term id for a plain Hamiltonian");
  circuit->add_option("--T", T, "Evolution time");
  circuit->add_option("--out", out.out);

  std::string dir;
  std::uint64_t corpus_seed = 1;
  auto* corpus = app.add_subcommand("corpus", "Generate the test corpus");
  corpus->add_option("--seed", corpus_seed);
  corpus->add_option("--out", dir, "Directory for one JSON file per item");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (amplify->parsed()) {
      const auto h = load_hamiltonian(in);
      const AmpMode m = parse_mode(mode);
      AmplifiedOperator amp = m == AmpMode::Walks ? amplify_derandomised(h, t, parse_family(graph), replication)
                              : m == AmpMode::Tensor ? amplify_full_tensor(h, t)
                                                     : amplify_dl(h, t);
      const json j = amplified_to_json(amp);
      emit(out, j, kv_table({{"mode", mode}, {"t", t}, {"n_qubits", amp.n_qubits()}, {"mu", amp.mu()}}));
      std::cerr << "amplified " << h.n_qubits() << " qubits to " << amp.n_qubits() << " (" << mode << ", t=" << t << ")\n";
      return 0;
    }

    if (spectrum->parsed()) {
      const json doc = parse_json(read_text(in));
      const EigMethod em = method == "dense" ? EigMethod::Dense : method == "iter" ? EigMethod::Iterative : EigMethod::Auto;
      IterativeOptions opt;
      opt.tol = tol;
      opt.seed = seed;
      SpectralResult res;
      int nq = 0;
      if (is_amplified_json(doc)) {
        const auto amp = amplified_from_json(doc);
        nq = amp.n_qubits();
        res = min_eig(amp, em, opt);
      } else {
        const auto h = hamiltonian_from_json(doc);
        nq = h.n_qubits();
        res = min_eig(h, em, opt);
      }
      const json j = {{"n_qubits", nq},           {"lambda_min", res.lambda_min}, {"residual", res.residual},
                      {"iterations", res.iterations}, {"method", res.method},      {"seed", seed}};
      emit(out, j, kv_table(j));
      std::cerr << "lambda_min = " << res.lambda_min << " (" << res.method << ")\n";
      return 0;
    }

    if (verify->parsed()) {
      const auto h = load_hamiltonian(in);
      VerifyOptions opt;
      opt.t = t;
      opt.family = parse_family(graph);
      opt.replication = replication;
      opt.seeds = seeds;
      opt.first_seed = seed;
      if (!grid) {
        opt.rs = {r};
        opt.alphas = {alpha};
      }
      auto res = verify_amplification(h, opt);
      res.ledger.meta["grid"] = grid;
      for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
      emit(out, res.ledger.to_json(), ledger_table(res.ledger));
      return finish_ledger(res.ledger);
    }

    if (iterate->parsed()) {
      const auto h = load_hamiltonian(in);
      auto res = verify_iteration(h, t, rounds, parse_family(graph), seeds);
      if (!emit_path.empty()) {
        std::ofstream f(emit_path, std::ios::binary);
        if (!f) throw StructuralError("cannot write " + emit_path);
        f << hamiltonian_to_json(res.rounds.back()).dump(2) << "\n";
      }
      emit(out, res.ledger.to_json(), ledger_table(res.ledger));
      return finish_ledger(res.ledger);
    }

    if (circuit->parsed()) {
      const json doc = parse_json(read_text(in));
      std::vector<LocalProjector> projectors;
      int system = 0;
      if (is_amplified_json(doc)) {
        const auto amp = amplified_from_json(doc);
        projectors = path_term_projectors(amp, term);
        system = amp.n_qubits();
      } else {
        const auto h = hamiltonian_from_json(doc);
        if (term >= h.num_terms()) throw DomainError("term id out of range");
        projectors = {h.terms()[term]};
        system = h.n_qubits();
      }
      const auto c = emit_simulation_circuit(projectors, T, system);
      json j = circuit_to_json(c);
      VerificationLedger ledger;
      const int m = static_cast<int>(projectors.size());
      ledger.add("gate-count", "gate count is at most 4m + 2", static_cast<double>(c.gates.size()), 4.0 * m + 2, 0.0);
      ledger.add("tree-depth", "OR-tree depth is at most ceil(log2 m) + 1", c.tree_depth,
                 std::ceil(std::log2(static_cast<double>(m))) + 1, 0.0);
      if (c.total_qubits() <= 20 && system <= 12) {
        const auto act = restricted_action(c);
        const double err = operator_norm(act.block - target_exponential(projectors, T, system));
        ledger.add("exponential", "circuit equals exp(i T Pi) on ancillas in |0>", err, 0.0, 1e-9);
        ledger.add("leakage", "no weight leaves the ancilla-zero subspace", act.leakage, 0.0, 1e-9);
      }
      j["checks"] = ledger.to_json()["records"];
      emit(out, j, ledger_table(ledger));
      std::cerr << c.gates.size() << " gates, " << c.ancillas << " ancillas\n";
      return finish_ledger(ledger);
    }

    if (corpus->parsed()) {
      const auto items = make_corpus(corpus_seed);
      json all = json::array();
      std::ostringstream table;
      for (const auto& it : items) {
        json j = hamiltonian_to_json(it.h);
        table << std::left << std::setw(18) << it.name << std::setw(14) << kind_name(it.kind) << "n=" << it.h.n_qubits()
              << " g=" << it.h.num_layers() << " m=" << it.h.num_terms() << "\n";
        if (!dir.empty()) {
          std::filesystem::create_directories(dir);
          std::ofstream f(std::filesystem::path(dir) / (it.name + ".json"), std::ios::binary);
          if (!f) throw StructuralError("cannot write into " + dir);
          f << j.dump(2) << "\n";
        }
        all.push_back({{"name", it.name}, {"kind", kind_name(it.kind)}, {"hamiltonian", std::move(j)}});
      }
      if (dir.empty()) emit(out, {{"seed", corpus_seed}, {"items", all}}, table.str());
      std::cerr << items.size() << " corpus items\n";
      return 0;
    }
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qamp/amplify.hpp"
#include "qamp/io.hpp"
#include "qamp/ledger.hpp"
#include "qamp/measure.hpp"
#include "qamp/parallel.hpp"
#include "qamp/spectra.hpp"

namespace qamp {

struct VerifyOptions {
  int t = 1;
  GraphFamily family = GraphFamily::CompleteWithLoops;
  std::optional<int> replication;
  std::vector<ExpanderGraph> custom;
  std::vector<int> rs;         ///< empty: every r in [1, t]
  std::vector<double> alphas;  ///< empty: the default grid
  int seeds = 10;
  std::uint64_t first_seed = 1;
  EigMethod method = EigMethod::Auto;
  double iterative_tol = 1e-10;
  bool layer_identity = true;
};

inline std::vector<double> default_alpha_grid() { return {0.1, 0.25, 0.5, 0.75, 1.0}; }

/// Ground-state representatives of an operator, one per seed, and lambda_min.
struct GroundStates {
  double lambda_min = 0;
  std::vector<Vector> states;
  std::vector<std::uint64_t> seeds;
  std::string method;
  double worst_residual = 0;
};

template <HermitianOperator Op>
GroundStates ground_states(const Op& op, int count, std::uint64_t first_seed, EigMethod method, double tol) {
  GroundStates g;
  const bool dense = method == EigMethod::Dense || (method == EigMethod::Auto && op.n_qubits() <= 10);
  if (dense) {
    const auto r = min_eig_dense(op);
    g.lambda_min = r.lambda_min;
    g.method = "dense";
    g.worst_residual = r.residual;
    for (int s = 0; s < count; ++s) {
      g.seeds.push_back(first_seed + s);
      g.states.push_back(ground_state_representative(r.ground_space, first_seed + s));
    }
    return g;
  }
  g.method = "iterative";
  g.lambda_min = 1e300;
  for (int s = 0; s < count; ++s) {
    IterativeOptions opt;
    opt.tol = tol;
    opt.seed = first_seed + s;
    const auto r = min_eig_iterative(op, opt);
    g.lambda_min = std::min(g.lambda_min, r.lambda_min);
    g.worst_residual = std::max(g.worst_residual, r.residual);
    g.seeds.push_back(opt.seed);
    g.states.push_back(r.ground_state);
  }
  return g;
}

inline std::string fmt(double x) {
  std::ostringstream ss;
  ss << x;
  return ss.str();
}

/// Records every soundness-side inequality for one ground state.
inline void record_soundness(VerificationLedger& ledger, const AmplifiedOperator& amp, const SpectralSplit& split,
                             const std::vector<int>& rs, const Vector& rho, double lambda_amp, const std::string& where) {
  const auto analyses = analyse_soundness(amp, split, rs, rho);
  const RegisterSplit reg_split(split, amp.base().n_qubits(), amp.registers());
  for (const auto& a : analyses) {
    const std::string k = where + ",r=" + std::to_string(a.r) + ",alpha=" + fmt(a.alpha) + "]";
    const auto b = soundness_bounds(a);
    ledger.add("soundness[" + k, "lambda_min(H^(2t)) is at least the larger of the high- and low-energy bounds",
               b.bound(), lambda_amp, tol::bound_slack);
    ledger.add("high-energy[" + k, "high-outcome contribution is at least (2 alpha r / t)(Delta - exp(-2 r^2 / t))",
               b.high_branch, a.high_term, 1e-9);
    const auto dec = check_decoupling(a);
    const double denom = 1.0 + a.c_mu + a.omega * (1.0 + decoupling_factor(a.r, a.alpha, a.t));
    if (dec.hypothesis) {
      ledger.add("low-energy[" + k, "Pr[X > 0] is at least t lambda(H) Pr[low outcome] / (1 + C_mu + omega(1 + ...))",
                 a.t * a.lambda_base * a.low_mass / denom, a.positive_x, 1e-9);
      ledger.add("decoupling[" + k, "cross terms on low outcomes are at most (8r + alpha t + 2t exp(-8 r^2 / t)) E[X]",
                 dec.lhs, dec.rhs, 1e-8);
    } else {
      ledger.add("low-energy[" + k, "unbalanced registers: Tr[H^(2t) rho] is at least t lambda(H) Pr[low outcome]",
                 dec.lhs, dec.rhs, 1e-8);
    }
    ledger.add("second-moment[" + k, "E[X_S^2] is at most (1 + C_mu) sum Tr[H_j] + omega sum_{i != j} Tr[H_i H_j]",
               -a.second_moment_worst_slack, 0.0, 1e-9);
    ledger.add("first-moment[" + k, "walk average of Tr[N_{f,S}] equals sum_{j in S} Tr[H_j] on every branch",
               a.first_moment_residual, 0.0, 1e-9);
    ledger.add("second-moment-method[" + k, "E[X]^2 is at most Pr[X > 0] E[X^2]", a.mean_x * a.mean_x,
               a.positive_x * a.second_x, 1e-9);
    const auto df = check_definetti(rho, reg_split, a.r, a.t);
    ledger.add("de-finetti[" + k, "E_S Pr[sum_S C < 2r and sum_{not S} C >= 4r] is at most exp(-2 r^2 / t)", df.lhs,
               df.rhs, 1e-9);
  }
}

struct VerifyResult {
  VerificationLedger ledger;
  double lambda_base = 0;
  double lambda_amp = 0;
  std::vector<std::string> warnings;
};

/// Completeness, soundness and the supporting lemmas for one amplification.
inline VerifyResult verify_amplification(const LayeredHamiltonian& h, const VerifyOptions& opt) {
  VerifyResult out;
  auto base = std::make_shared<const LayeredHamiltonian>(h);
  const auto amp = amplify_derandomised(base, opt.t, opt.family, opt.replication, opt.custom);
  const auto split0 = spectral_split(h, 1.0);
  out.lambda_base = split0.lambda_min;
  const auto gs = ground_states(amp, opt.seeds, opt.first_seed, opt.method, opt.iterative_tol);
  out.lambda_amp = gs.lambda_min;

  auto& L = out.ledger;
  L.meta["t"] = opt.t;
  L.meta["family"] = family_name(opt.family);
  L.meta["mu"] = amp.mu();
  L.meta["c_mu"] = c_mu(amp.mu(), amp.registers());
  L.meta["omega_min"] = h.omega_min();
  L.meta["min_weight"] = h.min_weight();
  L.meta["lambda_base"] = out.lambda_base;
  L.meta["lambda_amplified"] = out.lambda_amp;
  L.meta["eigensolver"] = gs.method;
  L.meta["eigensolver_residual"] = gs.worst_residual;
  L.meta["input_hash"] = hex64(fnv1a64(hamiltonian_to_json(h).dump()));
  L.meta["path_counts"] = amp.path_counts();
  json states = json::array();
  for (std::size_t s = 0; s < gs.states.size(); ++s)
    states.push_back({{"seed", gs.seeds[s]}, {"hash", state_hash(gs.states[s])}});
  L.meta["ground_states"] = std::move(states);

  L.add("completeness", "lambda_min(H^(2t)) is at most 2t lambda_min(H)", out.lambda_amp, 2.0 * opt.t * out.lambda_base,
        tol::bound_slack);
  if (amp.mu() < 1.0)
    L.add("c-mu", "C_mu is at most 2 / (1 - mu)", c_mu(amp.mu(), amp.registers()), 2.0 / (1.0 - amp.mu()), 1e-12);

  std::vector<int> rs = opt.rs;
  if (rs.empty())
    for (int r = 1; r <= opt.t; ++r) rs.push_back(r);
  const auto alphas = opt.alphas.empty() ? default_alpha_grid() : opt.alphas;
  std::vector<SpectralSplit> splits;
  for (double a : alphas) {
    splits.push_back(spectral_split(h, a));
    for (const auto& w : splits.back().warnings) out.warnings.push_back("alpha=" + fmt(a) + ": " + w);
  }

  // One ledger per seed, appended in seed order so the output does not depend on scheduling.
  std::vector<VerificationLedger> per_seed(gs.states.size());
  parallel_for(gs.states.size(), [&](std::size_t s) {
    const Vector& rho = gs.states[s];
    const std::string seed = std::to_string(gs.seeds[s]);
    auto& P = per_seed[s];
    if (opt.layer_identity) {
      const auto li = check_layer_energy_identity(amp, rho);
      for (std::size_t c = 0; c < li.size(); ++c)
        P.add("layer-identity[seed=" + seed + ",layer=" + std::to_string(c) + "]",
              "layer energy equals the walk average of Pr[N_f > 0]", li[c].residual, 0.0, 1e-9);
    }
    for (const auto& split : splits) record_soundness(P, amp, split, rs, rho, out.lambda_amp, "seed=" + seed);
  });
  for (const auto& P : per_seed) L.append(P);
  return out;
}

/// Per-round records of repeated amplification.
struct IterationResult {
  std::vector<LayeredHamiltonian> rounds;
  std::vector<double> lambdas;
  VerificationLedger ledger;
};

inline IterationResult verify_iteration(const LayeredHamiltonian& h, int t, int rounds, GraphFamily family, int seeds = 3,
                                        const std::vector<double>& alphas = {}) {
  IterationResult out;
  out.rounds = iterate_hamiltonian(h, t, rounds, family);
  for (const auto& m : out.rounds) out.lambdas.push_back(min_eig(m).lambda_min);
  auto& L = out.ledger;
  L.meta["t"] = t;
  L.meta["rounds"] = rounds;
  L.meta["family"] = family_name(family);
  L.meta["lambdas"] = out.lambdas;
  for (int i = 1; i <= rounds; ++i) {
    const auto& prev = out.rounds[i - 1];
    const auto& cur = out.rounds[i];
    const std::string k = "[round=" + std::to_string(i) + "]";
    L.add("qubits" + k, "qubit count multiplies by 2t", std::abs(cur.n_qubits() - 2.0 * t * prev.n_qubits()), 0.0, 0.0);
    L.add("layers" + k, "layer count is preserved", std::abs(cur.num_layers() - prev.num_layers()), 0.0, 0.0);
    double wdiff = 0.0;
    for (int c = 0; c < cur.num_layers(); ++c) wdiff = std::max(wdiff, std::abs(cur.weights()[c] - prev.weights()[c]));
    L.add("weights" + k, "layer weights are preserved", wdiff, 0.0, 1e-15);
    L.add("round-completeness" + k, "lambda(M_i) is at most 2t lambda(M_{i-1})", out.lambdas[i],
          2.0 * t * out.lambdas[i - 1], tol::bound_slack);
    L.add("completeness" + k, "lambda(M_i) is at most (2t)^i lambda(M_0)", out.lambdas[i],
          std::pow(2.0 * t, i) * out.lambdas[0], tol::bound_slack);
    const auto amp = amplify_derandomised(prev, t, family);
    const double lam_free = min_eig(amp).lambda_min;
    L.add("expansion" + k, "expanded path terms and the matrix-free operator share lambda_min",
          std::abs(lam_free - out.lambdas[i]), 0.0, 1e-9);
    if (prev.n_qubits() <= 6) {
      VerifyOptions opt;
      opt.t = t;
      opt.family = family;
      opt.seeds = seeds;
      opt.alphas = alphas;
      opt.layer_identity = false;
      auto vr = verify_amplification(prev, opt);
      for (const auto& rec : vr.ledger.records()) L.add(rec.id + k, rec.statement, rec.lhs, rec.rhs, rec.tolerance);
    }
  }
  return out;
}

}  // namespace qamp

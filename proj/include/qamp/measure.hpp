#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qamp/amplify.hpp"
#include "qamp/expander.hpp"
#include "qamp/hamiltonian.hpp"
#include "qamp/local_ops.hpp"
#include "qamp/types.hpp"

// Registers of an L-register state are indexed 0..L-1. Outcome strings and
// subset masks use bit j for register j.

namespace qamp {

/// Masks with exactly k of the low n bits set, ascending.
inline std::vector<std::uint64_t> subsets_of_size(int n, int k) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m)
    if (std::popcount(m) == k) out.push_back(m);
  return out;
}

/// max_i sum_{j != i} mu^|i - j| over positions 0..L-1.
inline double c_mu(double mu, int length) {
  double best = 0.0;
  for (int i = 0; i < length; ++i) {
    double s = 0.0;
    for (int j = 0; j < length; ++j)
      if (j != i) s += std::pow(mu, std::abs(i - j));
    best = std::max(best, s);
  }
  return best;
}

/// Violation-count pmf of commuting projectors measured one after another.
/// Branches with the same running count are merged: they are orthogonal and
/// stay orthogonal under the remaining projectors.
inline std::vector<double> violation_distribution(const Vector& state, const std::vector<const LocalOp*>& projectors) {
  std::vector<Vector> branch{state};
  for (const LocalOp* p : projectors) {
    std::vector<Vector> next(branch.size() + 1, Vector::Zero(state.size()));
    for (std::size_t c = 0; c < branch.size(); ++c) {
      Vector hit = branch[c];
      p->apply(hit);
      next[c] += branch[c] - hit;
      next[c + 1] += hit;
    }
    branch = std::move(next);
  }
  std::vector<double> pmf(branch.size());
  for (std::size_t c = 0; c < branch.size(); ++c) pmf[c] = branch[c].squaredNorm();
  return pmf;
}

/// Distribution of N_{f,S} for the walk `walk` (graph vertices) of layer chi.
inline std::vector<double> violation_distribution(const AmplifiedOperator& amp, const Vector& state, int chi,
                                                  const std::vector<int>& walk, std::uint64_t s_mask) {
  if (static_cast<int>(walk.size()) != amp.registers()) throw StructuralError("walk length must equal the register count");
  std::vector<const LocalOp*> ops;
  for (int j = 0; j < amp.registers(); ++j)
    if ((s_mask >> j) & 1U) ops.push_back(&amp.projector_op(j, amp.term_at(chi, walk[j])));
  return violation_distribution(state, ops);
}

inline double pmf_mean(const std::vector<double>& pmf) {
  double m = 0.0;
  for (std::size_t c = 0; c < pmf.size(); ++c) m += static_cast<double>(c) * pmf[c];
  return m;
}

inline double pmf_positive(const std::vector<double>& pmf) {
  double p = 0.0;
  for (std::size_t c = 1; c < pmf.size(); ++c) p += pmf[c];
  return p;
}

struct MonotoneCheck {
  double mean_full = 0, mean_subset = 0;
  double positive_full = 0, positive_subset = 0;
  bool ok = false;
};

/// Counting on all registers dominates counting on S, in mean and in Pr[> 0].
inline MonotoneCheck check_monotone(const AmplifiedOperator& amp, const Vector& state, int chi, const std::vector<int>& walk,
                                    std::uint64_t s_mask) {
  const auto full = violation_distribution(amp, state, chi, walk, amp.full_mask());
  const auto sub = violation_distribution(amp, state, chi, walk, s_mask);
  MonotoneCheck c;
  c.mean_full = pmf_mean(full);
  c.mean_subset = pmf_mean(sub);
  c.positive_full = pmf_positive(full);
  c.positive_subset = pmf_positive(sub);
  c.ok = c.mean_full >= c.mean_subset - 1e-12 && c.positive_full >= c.positive_subset - 1e-12;
  return c;
}

struct LayerIdentity {
  double lhs = 0;  ///< <psi| H_chi^(2t) |psi>
  double rhs = 0;  ///< E_f Pr[N_f > 0]
  double residual = 0;
};

/// Layer energy against the walk average of violation probabilities.
inline std::vector<LayerIdentity> check_layer_energy_identity(const AmplifiedOperator& amp, const Vector& state) {
  std::vector<LayerIdentity> out;
  for (int c = 0; c < amp.base().num_layers(); ++c) {
    LayerIdentity li;
    Vector hv;
    amp.apply_layer(c, state, hv);
    li.lhs = state.dot(hv).real();
    WalkFamily walks(amp.walks()[c].graph, amp.registers());
    double acc = 0.0;
    walks.for_each([&](std::uint64_t, const std::vector<int>& f) {
      acc += pmf_positive(violation_distribution(amp, state, c, f, amp.full_mask()));
    });
    li.rhs = acc / static_cast<double>(walks.size());
    li.residual = std::abs(li.lhs - li.rhs);
    out.push_back(li);
  }
  return out;
}

/// Eigendecomposition of the base Hamiltonian split at a threshold alpha.
/// Eigenvalues >= alpha - 1e-12 count as high.
struct SpectralSplit {
  double alpha = 0;
  RealVector eigenvalues;
  Matrix eigenvectors;
  Matrix high;
  Matrix low;
  double lambda_min = 0;
  std::vector<std::string> warnings;
};

inline SpectralSplit spectral_split(const LayeredHamiltonian& h, double alpha) {
  if (h.n_qubits() > 6) throw BudgetError("the auxiliary measurement needs a dense base of at most 6 qubits");
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  SpectralSplit s;
  s.alpha = alpha;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.dense());
  s.eigenvalues = es.eigenvalues();
  s.eigenvectors = es.eigenvectors();
  s.lambda_min = s.eigenvalues[0];
  const Eigen::Index d = s.eigenvalues.size();
  s.high = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const double e = s.eigenvalues[k];
    if (std::abs(e - alpha) <= tol::split_warn)
      s.warnings.push_back("eigenvalue " + std::to_string(e) + " lies within 1e-9 of alpha");
    if (e >= alpha - tol::split_edge) s.high += s.eigenvectors.col(k) * s.eigenvectors.col(k).adjoint();
  }
  s.high = (s.high + s.high.adjoint()) / 2.0;
  s.low = Matrix::Identity(d, d) - s.high;
  return s;
}

/// The split projectors placed on each register of an L-register system.
class RegisterSplit {
 public:
  RegisterSplit(const SpectralSplit& s, int n, int registers) : registers_(registers) {
    std::vector<int> qubits(static_cast<std::size_t>(n));
    for (int j = 0; j < registers; ++j) {
      for (int q = 0; q < n; ++q) qubits[q] = j * n + q;
      high_.emplace_back(s.high, qubits, n * registers);
      low_.emplace_back(s.low, qubits, n * registers);
    }
  }
  int registers() const { return registers_; }
  const LocalOp& high(int j) const { return high_[j]; }
  const LocalOp& low(int j) const { return low_[j]; }

 private:
  int registers_;
  std::vector<LocalOp> high_, low_;
};

struct AuxBranch {
  std::uint64_t outcome = 0;  ///< bit j set when register j measured high
  int weight = 0;             ///< number of high registers
  double probability = 0;
  Vector state;               ///< normalised post-measurement state
};

struct AuxMeasurement {
  std::vector<AuxBranch> branches;
  std::vector<std::uint64_t> pruned;  ///< outcomes dropped below 1e-14
  double pruned_mass = 0;
};

/// Measures {low, high} on every register outside S, exhaustively.
inline AuxMeasurement aux_measure(const Vector& state, const RegisterSplit& split, std::uint64_t s_mask) {
  AuxMeasurement out;
  std::vector<int> outside;
  for (int j = 0; j < split.registers(); ++j)
    if (!((s_mask >> j) & 1U)) outside.push_back(j);
  struct Node {
    std::uint64_t outcome;
    Vector v;
  };
  std::vector<Node> level{{0, state}};
  for (int j : outside) {
    std::vector<Node> next;
    for (auto& node : level) {
      Vector hi = node.v;
      split.high(j).apply(hi);
      Vector lo = node.v - hi;
      for (int bit = 0; bit < 2; ++bit) {
        Vector& v = bit ? hi : lo;
        const std::uint64_t oc = node.outcome | (bit ? (std::uint64_t{1} << j) : 0);
        const double p = v.squaredNorm();
        if (p < tol::prune) {
          out.pruned.push_back(oc);
          out.pruned_mass += p;
          continue;
        }
        next.push_back({oc, std::move(v)});
      }
    }
    level = std::move(next);
  }
  for (auto& node : level) {
    AuxBranch b;
    b.outcome = node.outcome;
    b.weight = std::popcount(node.outcome);
    b.probability = node.v.squaredNorm();
    b.state = node.v / std::sqrt(b.probability);
    out.branches.push_back(std::move(b));
  }
  return out;
}

/// Joint law of the high/low outcomes on every register.
inline std::vector<double> joint_high_law(const Vector& state, const RegisterSplit& split) {
  std::vector<Vector> level{state};
  for (int j = 0; j < split.registers(); ++j) {
    std::vector<Vector> next(level.size() * 2);
    for (std::size_t x = 0; x < level.size(); ++x) {
      Vector hi = level[x];
      split.high(j).apply(hi);
      next[x] = level[x] - hi;
      next[x | (std::size_t{1} << j)] = std::move(hi);
    }
    level = std::move(next);
  }
  std::vector<double> law(level.size());
  for (std::size_t x = 0; x < level.size(); ++x) law[x] = level[x].squaredNorm();
  return law;
}

struct BoundCheck {
  double lhs = 0;
  double rhs = 0;
  bool ok = false;
};

/// E_S Pr[sum_S Z <= k delta and sum_{not S} Z >= n (delta + nu)] for a law
/// over n + k bits, against exp(-2 nu^2 n k^2 / ((n + k)(k + 1))).
inline BoundCheck check_tomamichel(const std::vector<double>& law, int n, int k, double delta, double nu) {
  const int total = n + k;
  if (total > 16 || law.size() != (std::size_t{1} << total)) throw StructuralError("law must cover 2^(n + k) outcomes");
  const auto subsets = subsets_of_size(total, k);
  double acc = 0.0;
  for (std::uint64_t s : subsets) {
    for (std::uint64_t x = 0; x < law.size(); ++x) {
      const int in_s = std::popcount(x & s);
      const int out_s = std::popcount(x & ~s);
      if (in_s <= k * delta + 1e-12 && out_s >= n * (delta + nu) - 1e-12) acc += law[x];
    }
  }
  BoundCheck c;
  c.lhs = acc / static_cast<double>(subsets.size());
  c.rhs = std::exp(-2.0 * nu * nu * n * k * k / (static_cast<double>(total) * (k + 1)));
  c.ok = c.lhs <= c.rhs + 1e-12;
  return c;
}

/// E_{|S|=t} Pr[sum_S C < 2r and sum_{not S} C >= 4r] against exp(-2 r^2 / t).
inline BoundCheck check_definetti(const Vector& state, const RegisterSplit& split, int r, int t) {
  if (split.registers() != 2 * t) throw StructuralError("de Finetti check needs 2t registers");
  if (t > 6) throw BudgetError("de Finetti check is limited to t <= 6");
  const auto law = joint_high_law(state, split);
  const auto subsets = subsets_of_size(2 * t, t);
  double acc = 0.0;
  for (std::uint64_t s : subsets)
    for (std::uint64_t x = 0; x < law.size(); ++x)
      if (std::popcount(x & s) < 2 * r && std::popcount(x & ~s) >= 4 * r) acc += law[x];
  BoundCheck c;
  c.lhs = acc / static_cast<double>(subsets.size());
  c.rhs = std::exp(-2.0 * r * r / static_cast<double>(t));
  c.ok = c.lhs <= c.rhs + 1e-9;
  return c;
}

/// Per-state quantities of X_S for one subset S.
struct SubsetMoments {
  double mean_walks = 0;       ///< sum_chi w_chi E_f Tr[N_{f,S} sigma], from walk marginals
  double mean_registers = 0;   ///< sum_{j in S} Tr[H_j sigma]
  double second = 0;           ///< E[X_S^2]
  double positive = 0;         ///< Pr[X_S > 0]
  double cross = 0;            ///< sum_{i != j in S} Tr[H_i H_j sigma]
  double second_bound = 0;     ///< (1 + C_mu) mean + omega cross
};

/// Exact moments of X_S in a pure state.
class MomentEngine {
 public:
  explicit MomentEngine(const AmplifiedOperator& amp) : amp_(amp) {
    if (amp.mode() != AmpMode::Walks) throw DomainError("moments need a walk-mode operator");
    const int regs = amp.registers();
    for (const auto& w : amp.walks()) {
      WalkFamily walks(w.graph, regs);
      std::vector<RealMatrix> by_gap(static_cast<std::size_t>(regs));
      for (int gap = 1; gap < regs; ++gap) by_gap[gap] = stationary_walk_marginals(walks, 1, 1 + gap);
      pair_marginals_.push_back(std::move(by_gap));
    }
    cmu_ = c_mu(amp.mu(), regs);
    omega_ = amp.base().omega_min();
  }

  double c_mu_value() const { return cmu_; }
  double omega() const { return omega_; }

  SubsetMoments subset(const Vector& sigma, std::uint64_t s_mask) const {
    const auto& base = amp_.base();
    const int regs = amp_.registers();
    std::vector<int> regs_in;
    for (int j = 0; j < regs; ++j)
      if ((s_mask >> j) & 1U) regs_in.push_back(j);
    const std::size_t nt = base.num_terms();
    // proj[a][i] = Pi_i on register regs_in[a] applied to sigma.
    std::vector<std::vector<Vector>> proj(regs_in.size(), std::vector<Vector>(nt));
    std::vector<std::vector<double>> p(regs_in.size(), std::vector<double>(nt));
    for (std::size_t a = 0; a < regs_in.size(); ++a)
      for (std::size_t i = 0; i < nt; ++i) {
        proj[a][i] = sigma;
        amp_.projector_op(regs_in[a], static_cast<int>(i)).apply(proj[a][i]);
        p[a][i] = proj[a][i].squaredNorm();
      }

    SubsetMoments m;
    for (int c = 0; c < base.num_layers(); ++c) {
      const auto& w = amp_.walks()[c];
      const double wc = base.weights()[c];
      const int mv = w.graph.m;
      double first = 0.0;
      for (std::size_t a = 0; a < regs_in.size(); ++a)
        for (int v = 0; v < mv; ++v) first += p[a][amp_.term_at(c, v)] / mv;
      double pairs = 0.0;
      for (std::size_t a = 0; a < regs_in.size(); ++a)
        for (std::size_t b = 0; b < regs_in.size(); ++b) {
          if (a == b) continue;
          const int gap = std::abs(regs_in[a] - regs_in[b]);
          const RealMatrix& jm = pair_marginals_[c][gap];
          for (int u = 0; u < mv; ++u)
            for (int v = 0; v < mv; ++v) {
              const double pr = jm(u, v);
              if (pr == 0.0) continue;
              pairs += pr * proj[a][amp_.term_at(c, u)].dot(proj[b][amp_.term_at(c, v)]).real();
            }
        }
      m.mean_walks += wc * first;
      m.second += wc * (first + pairs);
      Vector surv;
      amp_.survival(c, sigma, surv, s_mask);
      m.positive += wc * (1.0 - sigma.dot(surv).real());
    }

    std::vector<Vector> hv(regs_in.size());
    for (std::size_t a = 0; a < regs_in.size(); ++a) {
      amp_.apply_base_on(regs_in[a], sigma, hv[a]);
      m.mean_registers += sigma.dot(hv[a]).real();
    }
    for (std::size_t a = 0; a < regs_in.size(); ++a)
      for (std::size_t b = 0; b < regs_in.size(); ++b)
        if (a != b) m.cross += hv[a].dot(hv[b]).real();
    m.second_bound = (1.0 + cmu_) * m.mean_registers + omega_ * m.cross;
    return m;
  }

  /// Tr[H_j sigma] for every register.
  std::vector<double> register_energies(const Vector& sigma) const {
    std::vector<double> e;
    Vector hv;
    for (int j = 0; j < amp_.registers(); ++j) {
      amp_.apply_base_on(j, sigma, hv);
      e.push_back(sigma.dot(hv).real());
    }
    return e;
  }

 private:
  const AmplifiedOperator& amp_;
  std::vector<std::vector<RealMatrix>> pair_marginals_;
  double cmu_ = 0;
  double omega_ = 1;
};

/// Everything the soundness argument measures on one state, for fixed r and alpha.
struct SoundnessAnalysis {
  int t = 0, r = 0;
  double alpha = 0;
  double c_mu = 0, omega = 0, mu = 0;
  double lambda_base = 0;          ///< lambda_min(H)
  double energy = 0;               ///< Tr[H^(2t) rho]
  double delta = 0;                ///< E_S Pr[U]
  double low_mass = 0;             ///< E_S Pr[not U]
  double mean_x = 0;               ///< E[X]
  double second_x = 0;             ///< E[X^2]
  double positive_x = 0;           ///< Pr[X > 0]
  double high_term = 0;            ///< E_S sum_{c in U} Pr[c] Pr[X_S > 0 | c]
  double cross_low = 0;            ///< E_S sum_{c in not U} Pr[c] sum_{i != j} Tr[H_i H_j rho_c]
  double max_register_energy = 0;  ///< max_i Tr[H_i rho]
  double first_moment_residual = 0;
  double second_moment_worst_slack = 1e300;  ///< min over (S, branch) of bound - E[X_S^2]
  double pruned_mass = 0;
  std::vector<std::string> warnings;
};

/// One analysis per r in `rs`; the auxiliary branches are shared across r.
inline std::vector<SoundnessAnalysis> analyse_soundness(const AmplifiedOperator& amp, const SpectralSplit& split,
                                                        const std::vector<int>& rs, const Vector& rho) {
  const int t = amp.t();
  for (int r : rs)
    if (r < 1 || r > t) throw DomainError("r must lie in [1, t]");
  const int regs = amp.registers();
  const RegisterSplit reg_split(split, amp.base().n_qubits(), regs);
  const MomentEngine engine(amp);
  SoundnessAnalysis proto;
  proto.t = t;
  proto.alpha = split.alpha;
  proto.c_mu = engine.c_mu_value();
  proto.omega = engine.omega();
  proto.mu = amp.mu();
  proto.lambda_base = split.lambda_min;
  proto.warnings = split.warnings;
  proto.energy = energy(amp, rho);
  const auto e = engine.register_energies(rho);
  proto.max_register_energy = *std::max_element(e.begin(), e.end());
  std::vector<SoundnessAnalysis> out(rs.size(), proto);
  for (std::size_t k = 0; k < rs.size(); ++k) out[k].r = rs[k];

  const auto subsets = subsets_of_size(regs, t);
  const double ns = static_cast<double>(subsets.size());
  for (std::uint64_t s : subsets) {
    const auto sm = engine.subset(rho, s);
    const auto aux = aux_measure(rho, reg_split, s);
    double worst = sm.second_bound - sm.second;
    double residual = 0.0;
    std::vector<SubsetMoments> bms;
    for (const auto& b : aux.branches) {
      bms.push_back(engine.subset(b.state, s));
      const auto& bm = bms.back();
      residual = std::max(residual, std::abs(bm.mean_walks - bm.mean_registers));
      worst = std::min(worst, bm.second_bound - bm.second);
    }
    for (std::size_t k = 0; k < rs.size(); ++k) {
      auto& a = out[k];
      a.pruned_mass += aux.pruned_mass / ns;
      a.first_moment_residual = std::max(a.first_moment_residual, residual);
      a.second_moment_worst_slack = std::min(a.second_moment_worst_slack, worst);
      for (std::size_t bi = 0; bi < aux.branches.size(); ++bi) {
        const auto& b = aux.branches[bi];
        const auto& bm = bms[bi];
        const double w = b.probability / ns;
        if (b.weight >= 4 * a.r) {
          a.delta += w;
          a.high_term += w * bm.positive;
        } else {
          a.low_mass += w;
          a.mean_x += w * bm.mean_registers;
          a.second_x += w * bm.second;
          a.positive_x += w * bm.positive;
          a.cross_low += w * bm.cross;
        }
      }
    }
  }
  return out;
}

inline SoundnessAnalysis analyse_soundness(const AmplifiedOperator& amp, const SpectralSplit& split, int r,
                                           const Vector& rho) {
  return analyse_soundness(amp, split, std::vector<int>{r}, rho).front();
}

/// Decoupling inequality, or its fallback when the balance hypothesis fails.
struct DecouplingCheck {
  bool hypothesis = false;  ///< max_i Tr[H_i rho] <= E[X]
  double lhs = 0, rhs = 0;
  bool ok = false;
};

inline double decoupling_factor(int r, double alpha, int t) {
  return 8.0 * r + alpha * t + 2.0 * t * std::exp(-8.0 * r * r / static_cast<double>(t));
}

inline DecouplingCheck check_decoupling(const SoundnessAnalysis& a) {
  DecouplingCheck c;
  c.hypothesis = a.max_register_energy <= a.mean_x + 1e-12;
  if (c.hypothesis) {
    c.lhs = a.cross_low;
    c.rhs = decoupling_factor(a.r, a.alpha, a.t) * a.mean_x;
  } else {
    c.lhs = a.t * a.lambda_base * a.low_mass;
    c.rhs = a.energy;
  }
  c.ok = c.lhs <= c.rhs + 1e-8;
  return c;
}

/// Both lower bounds of the soundness proposition.
struct SoundnessBounds {
  double high_branch = 0;  ///< (2 alpha r / t)(Delta - e^{-2 r^2 / t})
  double low_branch = 0;   ///< t (1 - Delta) lambda(H) / (1 + C_mu + omega (1 + decoupling factor))
  double bound() const { return std::max(high_branch, low_branch); }
};

inline SoundnessBounds soundness_bounds(const SoundnessAnalysis& a) {
  SoundnessBounds b;
  b.high_branch = 2.0 * a.alpha * a.r / a.t * (a.delta - std::exp(-2.0 * a.r * a.r / static_cast<double>(a.t)));
  b.low_branch = a.t * (1.0 - a.delta) * a.lambda_base /
                 (1.0 + a.c_mu + a.omega * (1.0 + decoupling_factor(a.r, a.alpha, a.t)));
  return b;
}

struct SuggestedParams {
  int r = 1;
  double alpha = 1;
  double predicted_floor = 0;
  std::vector<std::string> warnings;
  bool asymptotic_regime = false;  ///< t large enough for the stated hypotheses
};

/// r = round(sqrt(t ln t)) clamped to [1, t], alpha = r / t.
inline SuggestedParams suggest_params(int t, double lambda_base = 0.0, double cmu = 0.0, double omega = 1.0) {
  if (t < 1) throw DomainError("t must be at least 1");
  SuggestedParams p;
  const double lt = std::log(static_cast<double>(t));
  p.r = std::clamp(static_cast<int>(std::lround(std::sqrt(t * lt))), 1, t);
  p.alpha = static_cast<double>(p.r) / t;
  if (t < 2) p.warnings.push_back("t < 2: the parameter choice is degenerate");
  p.asymptotic_regime = t >= 100000;
  if (t >= 2)
    p.predicted_floor = std::min(lt / (3.0 * t), lambda_base * std::sqrt(t / lt) / (20.0 * std::max(1.0 + cmu, omega)));
  return p;
}

}  // namespace qamp

#pragma once

// End-to-end protocols: state transfer, two-atom three-component state, Bell
// state, swap, three-atom GHZ and six-component states, each scored against
// its target ket.

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "qzd/dynamics.hpp"

namespace qzd {

enum class ProtocolName { StateTransfer, ThreeDimEntangle, BellState, Swap, GHZ, SixDim };
enum class Engine { Effective, FullRestricted };
enum class Reduction { Trace, PostSelect };

inline std::string to_string(ProtocolName n) {
  switch (n) {
    case ProtocolName::StateTransfer: return "state_transfer";
    case ProtocolName::ThreeDimEntangle: return "three_dim";
    case ProtocolName::BellState: return "bell";
    case ProtocolName::Swap: return "swap";
    case ProtocolName::GHZ: return "ghz";
    case ProtocolName::SixDim: return "six_dim";
  }
  return "?";
}

inline std::string to_string(Engine e) { return e == Engine::Effective ? "effective" : "full"; }
inline std::string to_string(Reduction r) { return r == Reduction::Trace ? "trace" : "postselect"; }

struct ProtocolSpec {
  ProtocolName name{ProtocolName::StateTransfer};
  Branch branch{Branch::Left};
  UniformParams params{};
  int k{1};
  Engine engine{Engine::Effective};
  // Interpretation of the fiber Hadamard step (three_dim and six_dim only).
  // Unset means post-selection.
  std::optional<Reduction> reduction;
  int post_select_outcome{0};

  friend bool operator==(const ProtocolSpec&, const ProtocolSpec&) = default;
};

struct ProtocolResult {
  ProtocolSpec spec;
  std::variant<StateVector, DensityMatrix> final_state;
  StateVector evolved;  // branch-subspace state before any Hadamard or reduction
  StateVector target;
  double fidelity{0.0};
  std::optional<double> negativity;
  std::optional<double> success_probability;
  double tau{0.0};
  double zeno_ratio{0.0};
  std::vector<std::string> flags;
};

inline bool uses_hadamard(ProtocolName n) {
  return n == ProtocolName::ThreeDimEntangle || n == ProtocolName::SixDim;
}

inline bool needs_combined(ProtocolName n) { return n == ProtocolName::GHZ || n == ProtocolName::SixDim; }

// Atoms kept after reduction, as model slots.
inline std::set<std::size_t> kept_atoms(const ProtocolSpec& spec) {
  if (spec.branch == Branch::Combined) return {slot::atom_a, slot::atom_b, slot::atom_c};
  if (spec.branch == Branch::Right) return {slot::atom_a, slot::atom_c};
  return {slot::atom_a, slot::atom_b};
}

inline std::vector<ModeLabel> hadamard_modes(Branch branch) {
  switch (branch) {
    case Branch::Left: return {ModeLabel::F_l};
    case Branch::Right: return {ModeLabel::F_r};
    case Branch::Combined: break;
  }
  return {ModeLabel::F_l, ModeLabel::F_r};
}

inline void validate(const ProtocolSpec& spec) {
  if (needs_combined(spec.name) && spec.branch != Branch::Combined)
    throw InvalidSpec(to_string(spec.name) + " requires the combined branch");
  if ((spec.name == ProtocolName::BellState || spec.name == ProtocolName::ThreeDimEntangle) &&
      spec.branch == Branch::Combined)
    throw InvalidSpec(to_string(spec.name) + " is a two-atom protocol; use left or right");
  if (spec.k < 1) throw InvalidSpec("k must be >= 1");
  if (spec.post_select_outcome != 0 && spec.post_select_outcome != 1)
    throw InvalidSpec("post-selection outcome must be 0 or 1");
  UniformParams p = spec.params;
  p.to_system().validate();
  if (!(p.g > 0.0) || !(p.lambda > 0.0)) throw InvalidSpec("g and lambda must be > 0");
}

namespace detail {

// Product ket of the kept atoms on their own tensor-product space.
inline StateVector atom_ket(const SpacePtr& space, const std::vector<std::pair<std::vector<Level>, double>>& terms) {
  auto v = StateVector::zero(space);
  for (const auto& [levels, amp] : terms) {
    BasisState s;
    for (std::size_t k = 0; k < levels.size(); ++k) s.push_back(*space->subsystems()[k].local_index(levels[k]));
    v.amplitudes(static_cast<Eigen::Index>(*space->index_of(s))) += amp;
  }
  return v;
}

inline SpacePtr atom_space(const std::set<std::size_t>& keep) {
  std::vector<SubsystemSpec> specs;
  const auto all = model_subsystems();
  for (auto k : keep) specs.push_back(all[k]);
  return build_space(std::move(specs));
}

}  // namespace detail

// Target ket of a protocol: on the branch subspace for state transfer, swap
// and GHZ; on the kept atoms' product space for the others.
inline StateVector target_state(const ProtocolSpec& spec) {
  validate(spec);
  using L = Level;
  const double r2 = 1.0 / std::sqrt(2.0), r3 = 1.0 / std::sqrt(3.0), r6 = 1.0 / std::sqrt(6.0);
  const bool right = spec.branch == Branch::Right;
  switch (spec.name) {
    case ProtocolName::StateTransfer: {
      const auto basis = analytic_dark_bright(spec.params, spec.branch);
      return {basis.space, cplx(0.0, -1.0) * basis.dark[2].amplitudes};
    }
    case ProtocolName::Swap:
    case ProtocolName::GHZ: {
      // D1 on a single branch; (D1 + D1')/sqrt(2) on the combined one.
      const auto basis = analytic_dark_bright(spec.params, spec.branch);
      return basis.dark[1];
    }
    case ProtocolName::BellState: {
      const auto space = detail::atom_space(kept_atoms(spec));
      if (right) return detail::atom_ket(space, {{{L::e_r, L::g_r}, r2}, {{L::g_r, L::e_r}, r2}});
      return detail::atom_ket(space, {{{L::e_l, L::g_l}, r2}, {{L::g_l, L::e_l}, r2}});
    }
    case ProtocolName::ThreeDimEntangle: {
      const auto space = detail::atom_space(kept_atoms(spec));
      if (right)
        return detail::atom_ket(space, {{{L::e_r, L::g_r}, r3}, {{L::g_r, L::g_r}, -r3}, {{L::g_r, L::e_r}, r3}});
      return detail::atom_ket(space, {{{L::e_l, L::g_l}, r3}, {{L::g_l, L::g_l}, -r3}, {{L::g_l, L::e_l}, r3}});
    }
    case ProtocolName::SixDim: {
      const auto space = detail::atom_space(kept_atoms(spec));
      return detail::atom_ket(space, {{{L::e_r, L::g_l, L::g_r}, r6},
                                      {{L::g_r, L::g_l, L::g_r}, -r6},
                                      {{L::g_r, L::g_l, L::e_r}, r6},
                                      {{L::e_l, L::g_l, L::g_r}, r6},
                                      {{L::g_l, L::g_l, L::g_r}, -r6},
                                      {{L::g_l, L::e_l, L::g_r}, r6}});
    }
  }
  throw InvalidSpec("target_state: unknown protocol");
}

struct ReducedOutcome {
  DensityMatrix rho;
  double success_probability{1.0};
};

// Hadamard on each listed fiber mode, then either a partial trace onto `keep`
// (no post_select) or projection of every listed mode onto the Fock outcome,
// renormalization, and the partial trace.
inline ReducedOutcome hadamard_and_reduce(const StateVector& psi, const std::vector<ModeLabel>& modes,
                                          const std::set<std::size_t>& keep, std::optional<int> post_select) {
  StateVector cur = psi;
  std::vector<std::size_t> slots;
  for (auto m : modes) {
    auto k = cur.space->find_mode(m);
    if (!k) throw InvalidSpec("hadamard_and_reduce: state has no mode " + to_string(m));
    cur = apply_mode_gate(cur, *k, hadamard_gate());
    slots.push_back(*k);
  }
  if (!post_select) return {reduce(cur, keep), 1.0};
  const int want = post_select.value_or(0);
  if (want != 0 && want != 1) throw InvalidSpec("hadamard_and_reduce: outcome must be 0 or 1");
  for (std::size_t i = 0; i < cur.dimension(); ++i) {
    const auto& s = cur.space->basis()[i];
    for (auto k : slots)
      if (s[k] != want) cur.amplitudes(static_cast<Eigen::Index>(i)) = 0.0;
  }
  const double p = cur.amplitudes.squaredNorm();
  if (p <= 1e-14) throw InvalidSpec("hadamard_and_reduce: post-selected outcome has zero probability");
  cur.amplitudes /= std::sqrt(p);
  return {reduce(cur, keep), p};
}

inline Timing protocol_timing(const ProtocolSpec& spec) {
  const bool pi = spec.name == ProtocolName::Swap || spec.name == ProtocolName::GHZ;
  return pi ? Timing::pi(spec.k) : Timing::half_pi(spec.k);
}

// Evolved state on the branch subspace and the time used.
inline std::pair<StateVector, double> evolve_protocol(const ProtocolSpec& spec) {
  const auto timing = protocol_timing(spec);
  const double tau = (timing.kind == Timing::Kind::Pi && spec.k % 2 == 0)
                         ? time_for_phase(spec.k * M_PI, spec.params, spec.branch)
                         : solve_timing(timing, spec.params, spec.branch);
  const auto psi0 = initial_dark_state(spec.branch);
  const auto H = spec.engine == Engine::Effective ? effective_hamiltonian(spec.params, spec.branch)
                                                  : build_hamiltonian(spec.params, psi0.space).H_tot;
  return {evolve(H, psi0, tau), tau};
}

inline ProtocolResult run(const ProtocolSpec& spec) {
  validate(spec);
  const auto& p = spec.params;
  ProtocolResult res;
  res.spec = spec;
  res.zeno_ratio = std::max({p.omega1, p.omega2, p.omega3}) / std::min(p.g, p.lambda);
  if (res.zeno_ratio > 0.1) res.flags.push_back("weak-zeno: max drive / min(g, lambda) > 0.1");
  if (spec.name == ProtocolName::BellState && p.g / p.lambda > 0.2)
    res.flags.push_back("bell-regime: g / lambda > 0.2");
  if (uses_hadamard(spec.name) && std::abs(p.g - p.lambda) > 1e-12 * std::max(p.g, p.lambda))
    res.flags.push_back("three-component target assumes g = lambda");
  if (spec.branch == Branch::Combined && std::abs(std::hypot(p.omega1, p.omega2) - std::hypot(p.omega1, p.omega3)) >
                                             1e-12 * std::hypot(p.omega1, std::max(p.omega2, p.omega3)))
    res.flags.push_back("combined-drives: sectors rotate at different rates; timing follows the left sector");
  if ((spec.name == ProtocolName::Swap || spec.name == ProtocolName::GHZ)) {
    if (spec.k % 2 == 0) res.flags.push_back("even-k: the pi condition returns the initial state");
    const double o2 = second_drive(p, spec.branch);
    if (std::abs(p.omega1 - o2) > 1e-12 * std::max(p.omega1, o2))
      res.flags.push_back("swap needs equal drives on both atoms");
  }

  auto [evolved, tau] = evolve_protocol(spec);
  res.tau = tau;
  res.evolved = evolved;
  res.target = target_state(spec);
  const auto keep = kept_atoms(spec);

  switch (spec.name) {
    case ProtocolName::StateTransfer:
    case ProtocolName::Swap:
    case ProtocolName::GHZ: {
      res.fidelity = fidelity(evolved, res.target);
      const auto atoms = reduce(evolved, keep);
      res.negativity = negativity(atoms, {0});
      res.final_state = std::move(evolved);
      break;
    }
    case ProtocolName::BellState: {
      auto rho = reduce(evolved, keep);
      res.fidelity = fidelity(rho, res.target);
      res.negativity = negativity(rho, {0});
      res.final_state = std::move(rho);
      break;
    }
    case ProtocolName::ThreeDimEntangle:
    case ProtocolName::SixDim: {
      const auto mode = spec.reduction.value_or(Reduction::PostSelect);
      std::optional<int> outcome;
      if (mode == Reduction::PostSelect) outcome = spec.post_select_outcome;
      auto red = hadamard_and_reduce(evolved, hadamard_modes(spec.branch), keep, outcome);
      res.fidelity = fidelity(red.rho, res.target);
      res.negativity = negativity(red.rho, {0});
      if (mode == Reduction::PostSelect) res.success_probability = red.success_probability;
      else res.flags.push_back("trace: the reduced state is mixed");
      res.final_state = std::move(red.rho);
      break;
    }
  }
  return res;
}

}  // namespace qzd

#pragma once

// Atom-cavity-fiber Hamiltonian H_tot = H_ac + H_cf + H_d in the interaction
// picture (all transitions resonant), and the single-excitation evolution
// subspaces obtained by reachable-state closure.

#include <cmath>
#include <deque>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "qzd/statespace.hpp"

namespace qzd {

// Subsystem slots of the nine-subsystem model space.
namespace slot {
inline constexpr std::size_t atom_a = 0;
inline constexpr std::size_t atom_b = 1;
inline constexpr std::size_t atom_c = 2;
inline constexpr std::size_t A_l = 3;
inline constexpr std::size_t A_r = 4;
inline constexpr std::size_t B_l = 5;
inline constexpr std::size_t B_r = 6;
inline constexpr std::size_t F_l = 7;
inline constexpr std::size_t F_r = 8;
inline constexpr std::size_t count = 9;
}  // namespace slot

inline std::size_t mode_slot(ModeLabel m) { return slot::A_l + static_cast<std::size_t>(m); }

enum class Branch { Left, Right, Combined };

inline std::string to_string(Branch b) {
  switch (b) {
    case Branch::Left: return "left";
    case Branch::Right: return "right";
    case Branch::Combined: return "combined";
  }
  return "?";
}

struct FiberData {
  double length{0.0};
  double decay_rate{0.0};
  double speed_of_light{299792458.0};

  // 2 L nu / (2 pi c); the single-mode fiber picture needs this <= 1.
  double short_fiber_parameter() const {
    return 2.0 * length * decay_rate / (2.0 * M_PI * speed_of_light);
  }
};

struct SystemParams {
  double g_al{0}, g_ar{0}, g_bl{0}, g_cr{0};
  double omega_al{0}, omega_ar{0}, omega_bl{0}, omega_cr{0};
  double lambda_l{0}, lambda_r{0};
  std::optional<FiberData> fiber;

  void validate() const {
    for (double r : {g_al, g_ar, g_bl, g_cr, omega_al, omega_ar, omega_bl, omega_cr, lambda_l, lambda_r})
      if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidSpec("SystemParams: rates must be finite and >= 0");
    if (fiber) {
      if (!(fiber->speed_of_light > 0.0)) throw InvalidSpec("SystemParams: speed of light must be > 0");
      if (fiber->length < 0.0 || fiber->decay_rate < 0.0) throw InvalidSpec("SystemParams: negative fiber data");
      if (fiber->short_fiber_parameter() > 1.0)
        throw InvalidSpec("SystemParams: short-fiber condition 2 L nu / (2 pi c) <= 1 violated");
    }
  }
};

// The symmetric parameterization used by every protocol.
struct UniformParams {
  double g{1.0};
  double omega1{0.0}, omega2{0.0}, omega3{0.0};
  double lambda{1.0};

  double chi() const { return std::sqrt(1.0 + 2.0 * lambda * lambda / (g * g)); }

  SystemParams to_system() const {
    SystemParams p;
    p.g_al = p.g_ar = p.g_bl = p.g_cr = g;
    p.omega_al = p.omega_ar = omega1;
    p.omega_bl = omega2;
    p.omega_cr = omega3;
    p.lambda_l = p.lambda_r = lambda;
    return p;
  }

  friend bool operator==(const UniformParams&, const UniformParams&) = default;
};

inline std::vector<SubsystemSpec> model_subsystems(int cutoff = 1) {
  return {SubsystemSpec::atom_a(),
          SubsystemSpec::atom_b(),
          SubsystemSpec::atom_c(),
          SubsystemSpec::boson(ModeLabel::A_l, cutoff),
          SubsystemSpec::boson(ModeLabel::A_r, cutoff),
          SubsystemSpec::boson(ModeLabel::B_l, cutoff),
          SubsystemSpec::boson(ModeLabel::B_r, cutoff),
          SubsystemSpec::boson(ModeLabel::F_l, cutoff),
          SubsystemSpec::boson(ModeLabel::F_r, cutoff)};
}

inline SpacePtr model_space(int cutoff = 1) { return build_space(model_subsystems(cutoff)); }

// Product state of the model from named atom levels and photon numbers
// ordered (A_l, A_r, B_l, B_r, F_l, F_r).
inline BasisState model_state(Level a, Level b, Level c, std::array<int, 6> photons = {}) {
  const auto subs = model_subsystems();
  auto idx = [&](std::size_t k, Level l) {
    auto i = subs[k].local_index(l);
    if (!i) throw InvalidSpec("model_state: level " + to_string(l) + " does not exist on atom " + subs[k].name());
    return *i;
  };
  BasisState s{idx(slot::atom_a, a), idx(slot::atom_b, b), idx(slot::atom_c, c)};
  s.insert(s.end(), photons.begin(), photons.end());
  return s;
}

inline BasisState initial_left() { return model_state(Level::f_l, Level::g_l, Level::g_r); }
inline BasisState initial_right() { return model_state(Level::f_r, Level::g_l, Level::g_r); }

enum class Part { AtomCavity, CavityFiber, Drive };

// One non-Hermitian half of a coupling; the Hamiltonian is sum(rate * (T + T^dagger)).
struct Term {
  Part part;
  double rate;
  std::optional<std::tuple<std::size_t, Level, Level>> atom_flip;  // (slot, from, to): |to><from|
  std::vector<std::pair<std::size_t, bool>> mode_ops;              // (slot, is_creation)
};

inline std::vector<Term> model_terms(const SystemParams& p) {
  using std::make_tuple;
  const bool create = true, destroy = false;
  return {
      {Part::AtomCavity, p.g_al, make_tuple(slot::atom_a, Level::g_l, Level::e_l), {{slot::A_l, destroy}}},
      {Part::AtomCavity, p.g_ar, make_tuple(slot::atom_a, Level::g_r, Level::e_r), {{slot::A_r, destroy}}},
      {Part::AtomCavity, p.g_bl, make_tuple(slot::atom_b, Level::g_l, Level::e_l), {{slot::B_l, destroy}}},
      {Part::AtomCavity, p.g_cr, make_tuple(slot::atom_c, Level::g_r, Level::e_r), {{slot::B_r, destroy}}},
      {Part::CavityFiber, p.lambda_l, std::nullopt, {{slot::A_l, destroy}, {slot::F_l, create}}},
      {Part::CavityFiber, p.lambda_l, std::nullopt, {{slot::B_l, destroy}, {slot::F_l, create}}},
      {Part::CavityFiber, p.lambda_r, std::nullopt, {{slot::A_r, destroy}, {slot::F_r, create}}},
      {Part::CavityFiber, p.lambda_r, std::nullopt, {{slot::B_r, destroy}, {slot::F_r, create}}},
      {Part::Drive, p.omega_al, make_tuple(slot::atom_a, Level::f_l, Level::e_l), {}},
      {Part::Drive, p.omega_ar, make_tuple(slot::atom_a, Level::f_r, Level::e_r), {}},
      {Part::Drive, p.omega_bl, make_tuple(slot::atom_b, Level::f_l, Level::e_l), {}},
      {Part::Drive, p.omega_cr, make_tuple(slot::atom_c, Level::f_r, Level::e_r), {}},
  };
}

// T|s> (or T^dagger|s>) as (image, amplitude excluding the rate), if nonzero.
inline std::optional<std::pair<BasisState, double>> apply_term(const Term& t, const BasisState& s,
                                                              const std::vector<SubsystemSpec>& subs,
                                                              bool adjoint) {
  BasisState out = s;
  double amp = 1.0;
  if (t.atom_flip) {
    auto [k, from, to] = *t.atom_flip;
    if (adjoint) std::swap(from, to);
    if (out[k] != *subs[k].local_index(from)) return std::nullopt;
    out[k] = *subs[k].local_index(to);
  }
  for (auto [k, creation] : t.mode_ops) {
    if (adjoint) creation = !creation;
    if (creation) {
      if (out[k] + 1 > subs[k].cutoff) return std::nullopt;
      amp *= std::sqrt(static_cast<double>(out[k] + 1));
      ++out[k];
    } else {
      if (out[k] == 0) return std::nullopt;
      amp *= std::sqrt(static_cast<double>(out[k]));
      --out[k];
    }
  }
  return std::make_pair(std::move(out), amp);
}

inline void require_model_layout(const HilbertSpace& space) {
  const auto& subs = space.subsystems();
  if (subs.size() != slot::count) throw InvalidSpec("model: space must contain the nine model subsystems");
  const auto expected = model_subsystems(1);
  for (std::size_t k = 0; k < slot::count; ++k) {
    if (subs[k].kind != expected[k].kind || (subs[k].kind == SubsystemKind::Boson && subs[k].mode != expected[k].mode))
      throw InvalidSpec("model: subsystem " + std::to_string(k) + " is not " + expected[k].name());
  }
}

struct HamiltonianParts {
  OperatorMatrix H_ac, H_cf, H_d, H_strong, H_tot;
};

namespace detail {
inline void accumulate_part(Matrix& m, const HilbertSpace& space, const std::vector<Term>& terms, Part part) {
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    for (const auto& t : terms) {
      if (t.part != part || t.rate == 0.0) continue;
      auto img = apply_term(t, space.basis()[i], space.subsystems(), false);
      if (!img) continue;
      auto j = space.index_of(img->first);
      if (!j) continue;  // compression onto a restricted space
      const double v = t.rate * img->second;
      m(static_cast<Eigen::Index>(*j), static_cast<Eigen::Index>(i)) += v;
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*j)) += v;
    }
  }
}
}  // namespace detail

// Matrix of the model Hamiltonian on `space`. On a restricted space this is
// the compression P H P onto its basis.
inline HamiltonianParts build_hamiltonian(const SystemParams& params, const SpacePtr& space) {
  params.validate();
  require_model_layout(*space);
  const auto terms = model_terms(params);
  const auto n = static_cast<Eigen::Index>(space->dimension());
  Matrix ac = Matrix::Zero(n, n), cf = Matrix::Zero(n, n), d = Matrix::Zero(n, n);
  detail::accumulate_part(ac, *space, terms, Part::AtomCavity);
  detail::accumulate_part(cf, *space, terms, Part::CavityFiber);
  detail::accumulate_part(d, *space, terms, Part::Drive);
  Matrix strong = ac + cf;
  Matrix tot = strong + d;
  return {{space, std::move(ac), true},
          {space, std::move(cf), true},
          {space, std::move(d), true},
          {space, std::move(strong), true},
          {space, std::move(tot), true}};
}

inline HamiltonianParts build_hamiltonian(const UniformParams& params, const SpacePtr& space) {
  return build_hamiltonian(params.to_system(), space);
}

// Total excitation number: photons plus atoms in an e or f level.
inline OperatorMatrix excitation_number(const SpacePtr& space) {
  const auto n = static_cast<Eigen::Index>(space->dimension());
  Matrix m = Matrix::Zero(n, n);
  const auto& subs = space->subsystems();
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = space->basis()[static_cast<std::size_t>(i)];
    int count = 0;
    for (std::size_t k = 0; k < subs.size(); ++k) {
      if (subs[k].is_atom()) {
        const Level l = subs[k].levels()[static_cast<std::size_t>(s[k])];
        count += (l == Level::g_l || l == Level::g_r) ? 0 : 1;
      } else {
        count += s[k];
      }
    }
    m(i, i) = count;
  }
  return {space, std::move(m), true};
}

inline constexpr double kClosureTol = 1e-14;
inline constexpr std::size_t kClosureCap = 512;

// Restricted subspace plus its injection into the parent space.
struct Subspace {
  SpacePtr space;
  SpacePtr parent;
  std::vector<std::size_t> embedding;  // basis index in parent, per restricted index
};

// Breadth-first closure over basis states connected by |H_ij| > tol, starting
// from the seed's support in index order. Basis order is discovery order.
inline Subspace reachable_subspace(const OperatorMatrix& H, const StateVector& seed, double tol = kClosureTol,
                                   std::size_t cap = kClosureCap) {
  require_same_space(H.space, seed.space, "reachable_subspace");
  if (!(tol > 0.0)) throw InvalidSpec("reachable_subspace: tol must be > 0");
  const auto n = static_cast<Eigen::Index>(H.dimension());
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<std::size_t> order;
  std::deque<Eigen::Index> queue;
  auto visit = [&](Eigen::Index i) {
    if (seen[static_cast<std::size_t>(i)]) return;
    seen[static_cast<std::size_t>(i)] = true;
    order.push_back(static_cast<std::size_t>(i));
    if (order.size() > cap) throw CapExceeded("reachable_subspace: closure exceeds cap of " + std::to_string(cap));
    queue.push_back(i);
  };
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(seed.amplitudes(i)) > 0.0) visit(i);
  if (order.empty()) throw InvalidSpec("reachable_subspace: seed is the zero vector");
  while (!queue.empty()) {
    const auto i = queue.front();
    queue.pop_front();
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(H.entries(j, i)) > tol) visit(j);
  }
  std::vector<BasisState> basis;
  basis.reserve(order.size());
  for (auto i : order) basis.push_back(H.space->basis()[i]);
  return {restricted_space(H.space->subsystems(), std::move(basis)), H.space, std::move(order)};
}

// Same closure, driven by the model's term list instead of a dense matrix, so
// that it works on spaces too large to store (e.g. Fock cutoff 2).
inline SpacePtr reachable_subspace(const SystemParams& params, const std::vector<BasisState>& seeds, int cutoff = 1,
                                   std::size_t cap = kClosureCap) {
  const auto subs = model_subsystems(cutoff);
  const auto terms = model_terms(params);
  std::set<BasisState> seen;
  std::vector<BasisState> order;
  std::deque<BasisState> queue;
  auto visit = [&](const BasisState& s) {
    if (!seen.insert(s).second) return;
    order.push_back(s);
    if (order.size() > cap) throw CapExceeded("reachable_subspace: closure exceeds cap of " + std::to_string(cap));
    queue.push_back(s);
  };
  for (const auto& s : seeds) visit(s);
  while (!queue.empty()) {
    const auto s = queue.front();
    queue.pop_front();
    for (const auto& t : terms) {
      if (std::abs(t.rate) <= kClosureTol) continue;
      for (bool adj : {false, true})
        if (auto img = apply_term(t, s, subs, adj)) visit(img->first);
    }
  }
  return restricted_space(subs, std::move(order));
}

// Evolution subspace of a protocol branch: U1 (7 states), U1' (7 states), or
// their union (14 states, U1 first). Built from unit rates so that switching a
// drive off does not shrink the basis.
inline SpacePtr branch_subspace(Branch branch, int cutoff = 1) {
  const UniformParams unit{1.0, 1.0, 1.0, 1.0, 1.0};
  const auto sys = unit.to_system();
  switch (branch) {
    case Branch::Left: return reachable_subspace(sys, {initial_left()}, cutoff);
    case Branch::Right: return reachable_subspace(sys, {initial_right()}, cutoff);
    case Branch::Combined: {
      auto l = reachable_subspace(sys, {initial_left()}, cutoff);
      auto r = reachable_subspace(sys, {initial_right()}, cutoff);
      auto basis = l->basis();
      basis.insert(basis.end(), r->basis().begin(), r->basis().end());
      return restricted_space(l->subsystems(), std::move(basis));
    }
  }
  throw InvalidSpec("branch_subspace: unknown branch");
}

// Compression of H onto a subspace whose basis states all exist in H's space.
inline OperatorMatrix restrict(const OperatorMatrix& H, const SpacePtr& sub) {
  if (sub->subsystems() != H.space->subsystems())
    throw DimensionMismatch("restrict: subspace built over different subsystems");
  std::vector<Eigen::Index> emb;
  emb.reserve(sub->dimension());
  for (const auto& s : sub->basis()) {
    auto j = H.space->index_of(s);
    if (!j) throw DimensionMismatch("restrict: subspace state " + HilbertSpace(sub->subsystems(), {s}, false).label(0) +
                                    " is not in the operator's space");
    emb.push_back(static_cast<Eigen::Index>(*j));
  }
  const auto n = static_cast<Eigen::Index>(emb.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = H.entries(emb[static_cast<std::size_t>(i)], emb[static_cast<std::size_t>(j)]);
  return {sub, std::move(m), H.hermitian};
}

inline OperatorMatrix restrict(const OperatorMatrix& H, const Subspace& sub) { return restrict(H, sub.space); }

// Re-expresses a state on another space over the same subsystems. Amplitude on
// basis states missing from the target is dropped; see leakage().
inline StateVector transfer(const StateVector& psi, const SpacePtr& target) {
  if (psi.space->subsystems() != target->subsystems())
    throw DimensionMismatch("transfer: spaces have different subsystems");
  auto out = StateVector::zero(target);
  for (std::size_t i = 0; i < psi.dimension(); ++i)
    if (auto j = target->index_of(psi.space->basis()[i]))
      out.amplitudes(static_cast<Eigen::Index>(*j)) = psi.amplitudes(static_cast<Eigen::Index>(i));
  return out;
}

// Squared norm of psi outside the basis of `sub`.
inline double leakage(const StateVector& psi, const SpacePtr& sub) {
  double out = 0.0;
  for (std::size_t i = 0; i < psi.dimension(); ++i)
    if (!sub->index_of(psi.space->basis()[i])) out += std::norm(psi.amplitudes(static_cast<Eigen::Index>(i)));
  return out;
}

}  // namespace qzd

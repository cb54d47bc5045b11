#pragma once

// Tensor-product Hilbert spaces over the atom/cavity/fiber subsystems, dense
// state and operator containers, and the quantum-information primitives
// (partial trace, fidelity, negativity, single-mode gates).

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <complex>
#include <cstddef>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "qzd/errors.hpp"

namespace qzd {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kStructuralTol = 1e-12;
inline constexpr double kSpectralTol = 1e-9;

enum class Level : std::uint8_t { f_l, e_l, g_l, f_r, e_r, g_r };
enum class ModeLabel : std::uint8_t { A_l, A_r, B_l, B_r, F_l, F_r };
enum class SubsystemKind : std::uint8_t { AtomA, AtomB, AtomC, Boson };

inline std::string to_string(Level l) {
  static constexpr std::array<const char*, 6> names{"f_l", "e_l", "g_l", "f_r", "e_r", "g_r"};
  return names[static_cast<std::size_t>(l)];
}

inline std::string to_string(ModeLabel m) {
  static constexpr std::array<const char*, 6> names{"A_l", "A_r", "B_l", "B_r", "F_l", "F_r"};
  return names[static_cast<std::size_t>(m)];
}

struct SubsystemSpec {
  SubsystemKind kind{SubsystemKind::AtomA};
  ModeLabel mode{ModeLabel::A_l};
  int cutoff{1};

  static SubsystemSpec atom_a() { return {SubsystemKind::AtomA}; }
  static SubsystemSpec atom_b() { return {SubsystemKind::AtomB}; }
  static SubsystemSpec atom_c() { return {SubsystemKind::AtomC}; }
  static SubsystemSpec boson(ModeLabel m, int cutoff = 1) {
    return {SubsystemKind::Boson, m, cutoff};
  }

  bool is_atom() const { return kind != SubsystemKind::Boson; }

  // Level list of an atom, in local-index order.
  std::span<const Level> levels() const {
    static constexpr std::array<Level, 6> a{Level::f_l, Level::e_l, Level::g_l,
                                            Level::f_r, Level::e_r, Level::g_r};
    static constexpr std::array<Level, 3> b{Level::f_l, Level::e_l, Level::g_l};
    static constexpr std::array<Level, 3> c{Level::f_r, Level::e_r, Level::g_r};
    switch (kind) {
      case SubsystemKind::AtomA: return a;
      case SubsystemKind::AtomB: return b;
      case SubsystemKind::AtomC: return c;
      case SubsystemKind::Boson: break;
    }
    return {};
  }

  int dimension() const {
    return is_atom() ? static_cast<int>(levels().size()) : cutoff + 1;
  }

  std::optional<int> local_index(Level l) const {
    auto lv = levels();
    auto it = std::find(lv.begin(), lv.end(), l);
    if (it == lv.end()) return std::nullopt;
    return static_cast<int>(it - lv.begin());
  }

  std::string name() const {
    switch (kind) {
      case SubsystemKind::AtomA: return "a";
      case SubsystemKind::AtomB: return "b";
      case SubsystemKind::AtomC: return "c";
      case SubsystemKind::Boson: break;
    }
    return to_string(mode);
  }

  friend bool operator==(const SubsystemSpec& x, const SubsystemSpec& y) {
    if (x.kind != y.kind) return false;
    if (x.kind != SubsystemKind::Boson) return true;
    return x.mode == y.mode && x.cutoff == y.cutoff;
  }
};

// Local index per subsystem: the atom level index, or the Fock occupation.
using BasisState = std::vector<int>;

class HilbertSpace {
 public:
  HilbertSpace(std::vector<SubsystemSpec> subsystems, std::vector<BasisState> basis, bool full)
      : subsystems_(std::move(subsystems)), basis_(std::move(basis)), full_(full) {
    if (subsystems_.empty()) throw InvalidSpec("space needs at least one subsystem");
    if (basis_.empty()) throw InvalidSpec("space needs at least one basis state");
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      const auto& s = basis_[i];
      if (s.size() != subsystems_.size())
        throw InvalidSpec("basis state arity does not match subsystem count");
      for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] < 0 || s[k] >= subsystems_[k].dimension())
          throw InvalidSpec("basis state occupation out of range for " + subsystems_[k].name());
      }
      if (!index_.emplace(s, i).second) throw InvalidSpec("duplicate basis state");
    }
  }

  const std::vector<SubsystemSpec>& subsystems() const { return subsystems_; }
  const std::vector<BasisState>& basis() const { return basis_; }
  std::size_t dimension() const { return basis_.size(); }
  bool is_full_product() const { return full_; }

  std::optional<std::size_t> index_of(const BasisState& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::size_t> find_mode(ModeLabel m) const {
    for (std::size_t k = 0; k < subsystems_.size(); ++k)
      if (subsystems_[k].kind == SubsystemKind::Boson && subsystems_[k].mode == m) return k;
    return std::nullopt;
  }

  std::optional<std::size_t> find_kind(SubsystemKind kind) const {
    for (std::size_t k = 0; k < subsystems_.size(); ++k)
      if (subsystems_[k].kind == kind) return k;
    return std::nullopt;
  }

  // Human-readable ket, e.g. |f_l,g_l,g_r;0,0,0,0,0,0>.
  std::string label(std::size_t i) const {
    std::string out = "|";
    const auto& s = basis_.at(i);
    bool in_modes = false;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const auto& sub = subsystems_[k];
      if (k > 0) out += (!sub.is_atom() && !in_modes) ? ";" : ",";
      if (sub.is_atom()) {
        out += to_string(sub.levels()[static_cast<std::size_t>(s[k])]);
      } else {
        in_modes = true;
        out += std::to_string(s[k]);
      }
    }
    return out + ">";
  }

  friend bool operator==(const HilbertSpace& x, const HilbertSpace& y) {
    return x.subsystems_ == y.subsystems_ && x.basis_ == y.basis_;
  }

 private:
  std::vector<SubsystemSpec> subsystems_;
  std::vector<BasisState> basis_;
  std::map<BasisState, std::size_t> index_;
  bool full_;
};

using SpacePtr = std::shared_ptr<const HilbertSpace>;

inline bool same_space(const SpacePtr& a, const SpacePtr& b) {
  return a == b || (a && b && *a == *b);
}

inline void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* what) {
  if (!same_space(a, b)) throw DimensionMismatch(std::string(what) + ": operands live on different spaces");
}

// Full tensor product with lexicographic basis order (last subsystem fastest).
inline SpacePtr build_space(std::vector<SubsystemSpec> specs) {
  if (specs.empty()) throw InvalidSpec("build_space: empty subsystem list");
  std::size_t dim = 1;
  for (const auto& s : specs) {
    if (s.kind == SubsystemKind::Boson && s.cutoff < 1)
      throw InvalidSpec("build_space: Fock cutoff must be >= 1 for mode " + s.name());
    dim *= static_cast<std::size_t>(s.dimension());
  }
  std::vector<BasisState> basis;
  basis.reserve(dim);
  BasisState cur(specs.size(), 0);
  for (std::size_t n = 0; n < dim; ++n) {
    basis.push_back(cur);
    for (std::size_t k = specs.size(); k-- > 0;) {
      if (++cur[k] < specs[k].dimension()) break;
      cur[k] = 0;
    }
  }
  return std::make_shared<const HilbertSpace>(std::move(specs), std::move(basis), true);
}

// Restricted space over an explicit list of product states; order is kept.
inline SpacePtr restricted_space(std::vector<SubsystemSpec> specs, std::vector<BasisState> basis) {
  for (const auto& s : specs)
    if (s.kind == SubsystemKind::Boson && s.cutoff < 1)
      throw InvalidSpec("restricted_space: Fock cutoff must be >= 1");
  return std::make_shared<const HilbertSpace>(std::move(specs), std::move(basis), false);
}

struct StateVector {
  SpacePtr space;
  Vector amplitudes;

  StateVector() = default;
  StateVector(SpacePtr s, Vector a) : space(std::move(s)), amplitudes(std::move(a)) {
    if (!space || static_cast<std::size_t>(amplitudes.size()) != space->dimension())
      throw DimensionMismatch("StateVector: amplitude count does not match space dimension");
  }

  static StateVector zero(SpacePtr s) {
    const auto n = static_cast<Eigen::Index>(s->dimension());
    return {std::move(s), Vector::Zero(n)};
  }

  static StateVector basis_ket(SpacePtr s, const BasisState& b) {
    auto idx = s->index_of(b);
    if (!idx) throw InvalidSpec("basis_ket: state not in space");
    auto out = zero(std::move(s));
    out.amplitudes(static_cast<Eigen::Index>(*idx)) = 1.0;
    return out;
  }

  std::size_t dimension() const { return space->dimension(); }
  double norm() const { return amplitudes.norm(); }

  StateVector normalized() const {
    const double n = norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw NumericalFailure("cannot normalize a zero or non-finite state");
    return {space, amplitudes / n};
  }
};

inline cplx inner(const StateVector& a, const StateVector& b) {
  require_same_space(a.space, b.space, "inner");
  return a.amplitudes.dot(b.amplitudes);  // Eigen's dot conjugates the first argument
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const Matrix& m) {
  return max_abs(m - m.adjoint());
}

struct OperatorMatrix {
  SpacePtr space;
  Matrix entries;
  bool hermitian{false};

  OperatorMatrix() = default;
  OperatorMatrix(SpacePtr s, Matrix m, bool is_hermitian)
      : space(std::move(s)), entries(std::move(m)), hermitian(is_hermitian) {
    const auto n = static_cast<Eigen::Index>(space->dimension());
    if (entries.rows() != n || entries.cols() != n)
      throw DimensionMismatch("OperatorMatrix: entries do not match space dimension");
    // Relative to the entry scale so that products of O(10) rates still pass.
    if (hermitian && hermiticity_defect(entries) > kStructuralTol * std::max(1.0, max_abs(entries)))
      throw NotHermitian("OperatorMatrix flagged Hermitian but |M - M^dagger| exceeds tolerance");
  }

  static OperatorMatrix zero(SpacePtr s) {
    const auto n = static_cast<Eigen::Index>(s->dimension());
    return {std::move(s), Matrix::Zero(n, n), true};
  }

  std::size_t dimension() const { return space->dimension(); }

  StateVector apply(const StateVector& v) const {
    require_same_space(space, v.space, "OperatorMatrix::apply");
    return {space, entries * v.amplitudes};
  }

  cplx element(const StateVector& bra, const StateVector& ket) const {
    require_same_space(space, bra.space, "OperatorMatrix::element");
    require_same_space(space, ket.space, "OperatorMatrix::element");
    return bra.amplitudes.dot(entries * ket.amplitudes);
  }
};

inline OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_space(a.space, b.space, "operator+");
  return {a.space, a.entries + b.entries, a.hermitian && b.hermitian};
}

struct DensityMatrix {
  SpacePtr space;
  Matrix entries;

  DensityMatrix() = default;
  DensityMatrix(SpacePtr s, Matrix m) : space(std::move(s)), entries(std::move(m)) {
    const auto n = static_cast<Eigen::Index>(space->dimension());
    if (entries.rows() != n || entries.cols() != n)
      throw DimensionMismatch("DensityMatrix: entries do not match space dimension");
  }

  static DensityMatrix pure(const StateVector& v) {
    return {v.space, v.amplitudes * v.amplitudes.adjoint()};
  }

  std::size_t dimension() const { return space->dimension(); }
  cplx trace() const { return entries.trace(); }

  // Hermitian to 1e-12, unit trace to 1e-10, spectrum above -1e-10.
  bool is_valid() const {
    if (hermiticity_defect(entries) > kStructuralTol) return false;
    if (std::abs(trace() - 1.0) > 1e-10) return false;
    Eigen::SelfAdjointEigenSolver<Matrix> es(entries, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -1e-10;
  }
};

namespace detail {

inline std::vector<std::size_t> checked_subset(const HilbertSpace& space, const std::set<std::size_t>& idx,
                                               const char* what) {
  if (idx.empty()) throw InvalidSpec(std::string(what) + ": empty subsystem set");
  for (auto k : idx)
    if (k >= space.subsystems().size())
      throw InvalidSpec(std::string(what) + ": subsystem index " + std::to_string(k) + " out of range");
  return {idx.begin(), idx.end()};
}

// Row-major index of the kept subsystems' local indices inside their own product.
inline std::size_t kept_offset(const BasisState& s, const std::vector<std::size_t>& keep,
                               const std::vector<SubsystemSpec>& subs) {
  std::size_t off = 0;
  for (auto k : keep) off = off * static_cast<std::size_t>(subs[k].dimension()) + static_cast<std::size_t>(s[k]);
  return off;
}

inline BasisState traced_key(const BasisState& s, const std::vector<bool>& kept) {
  BasisState out;
  for (std::size_t k = 0; k < s.size(); ++k)
    if (!kept[k]) out.push_back(s[k]);
  return out;
}

struct TraceLayout {
  SpacePtr reduced;
  // For each traced configuration, the (input index, reduced index) pairs sharing it.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> groups;
};

inline TraceLayout trace_layout(const HilbertSpace& space, const std::vector<std::size_t>& keep) {
  const auto& subs = space.subsystems();
  std::vector<bool> kept(subs.size(), false);
  std::vector<SubsystemSpec> kept_specs;
  for (auto k : keep) {
    kept[k] = true;
    kept_specs.push_back(subs[k]);
  }
  TraceLayout layout{build_space(std::move(kept_specs)), {}};
  std::map<BasisState, std::size_t> group_of;
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    const auto& s = space.basis()[i];
    auto [it, inserted] = group_of.emplace(traced_key(s, kept), layout.groups.size());
    if (inserted) layout.groups.emplace_back();
    layout.groups[it->second].emplace_back(i, kept_offset(s, keep, subs));
  }
  return layout;
}

}  // namespace detail

// Reduced density matrix on the full tensor product of the kept subsystems
// (in their original order). Keeping every subsystem returns rho unchanged.
inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::set<std::size_t>& keep) {
  const auto keep_list = detail::checked_subset(*rho.space, keep, "partial_trace");
  if (keep_list.size() == rho.space->subsystems().size()) return rho;
  const auto layout = detail::trace_layout(*rho.space, keep_list);
  const auto n = static_cast<Eigen::Index>(layout.reduced->dimension());
  Matrix red = Matrix::Zero(n, n);
  for (const auto& group : layout.groups)
    for (const auto& [p, kp] : group)
      for (const auto& [q, kq] : group)
        red(static_cast<Eigen::Index>(kp), static_cast<Eigen::Index>(kq)) +=
            rho.entries(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
  return {layout.reduced, std::move(red)};
}

// Same as partial_trace(DensityMatrix::pure(psi), keep) without forming the
// full projector.
inline DensityMatrix reduce(const StateVector& psi, const std::set<std::size_t>& keep) {
  const auto keep_list = detail::checked_subset(*psi.space, keep, "reduce");
  if (keep_list.size() == psi.space->subsystems().size()) return DensityMatrix::pure(psi);
  const auto layout = detail::trace_layout(*psi.space, keep_list);
  const auto n = static_cast<Eigen::Index>(layout.reduced->dimension());
  Matrix red = Matrix::Zero(n, n);
  for (const auto& group : layout.groups)
    for (const auto& [p, kp] : group)
      for (const auto& [q, kq] : group)
        red(static_cast<Eigen::Index>(kp), static_cast<Eigen::Index>(kq)) +=
            psi.amplitudes(static_cast<Eigen::Index>(p)) *
            std::conj(psi.amplitudes(static_cast<Eigen::Index>(q)));
  return {layout.reduced, std::move(red)};
}

inline Eigen::Matrix2cd hadamard_gate() {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd h;
  h << s, s, s, -s;
  return h;
}

// Applies a 2x2 unitary on the {|0>,|1>} space of one cutoff-1 boson mode.
// On a restricted space the result lives on the smallest space closed under
// flipping that mode (the input space itself when already closed).
inline StateVector apply_mode_gate(const StateVector& psi, std::size_t mode, const Eigen::Matrix2cd& gate) {
  const auto& space = *psi.space;
  if (mode >= space.subsystems().size()) throw InvalidSpec("apply_mode_gate: subsystem index out of range");
  const auto& sub = space.subsystems()[mode];
  if (sub.kind != SubsystemKind::Boson) throw InvalidSpec("apply_mode_gate: subsystem is not a boson mode");
  if (sub.cutoff != 1) throw Unsupported("apply_mode_gate: gate defined only on the cutoff-1 truncation");
  if (max_abs(gate.adjoint() * gate - Eigen::Matrix2cd::Identity()) > kStructuralTol)
    throw InvalidSpec("apply_mode_gate: gate is not unitary");

  SpacePtr out_space = psi.space;
  if (!space.is_full_product()) {
    std::set<BasisState> closed(space.basis().begin(), space.basis().end());
    bool grew = false;
    for (const auto& s : space.basis()) {
      auto f = s;
      f[mode] = 1 - f[mode];
      grew |= closed.insert(std::move(f)).second;
    }
    if (grew) out_space = restricted_space(space.subsystems(), {closed.begin(), closed.end()});
  }

  auto out = StateVector::zero(out_space);
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    const cplx a = psi.amplitudes(static_cast<Eigen::Index>(i));
    if (a == cplx{}) continue;
    auto s = space.basis()[i];
    const int n = s[mode];
    for (int m = 0; m < 2; ++m) {
      s[mode] = m;
      out.amplitudes(static_cast<Eigen::Index>(*out_space->index_of(s))) += gate(m, n) * a;
    }
  }
  return out;
}

// Pure-target fidelity <t|rho|t>.
inline double fidelity(const DensityMatrix& rho, const StateVector& target) {
  require_same_space(rho.space, target.space, "fidelity");
  return std::real(target.amplitudes.dot(rho.entries * target.amplitudes));
}

inline double fidelity(const StateVector& psi, const StateVector& target) {
  return std::norm(inner(target, psi));
}

inline constexpr std::size_t kMaxNegativityDimension = 64;

// Sum of |negative eigenvalues| of the partial transpose over `side`.
inline double negativity(const DensityMatrix& rho, const std::set<std::size_t>& side) {
  const auto& space = *rho.space;
  if (!space.is_full_product()) throw Unsupported("negativity: requires a full tensor-product space");
  if (space.dimension() > kMaxNegativityDimension)
    throw Unsupported("negativity: dimension exceeds " + std::to_string(kMaxNegativityDimension));
  const auto side_list = detail::checked_subset(space, side, "negativity");
  if (side_list.size() >= space.subsystems().size())
    throw InvalidSpec("negativity: bipartition must leave a non-empty complement");

  const auto n = static_cast<Eigen::Index>(space.dimension());
  Matrix pt(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      auto si = space.basis()[static_cast<std::size_t>(i)];
      auto sj = space.basis()[static_cast<std::size_t>(j)];
      for (auto k : side_list) std::swap(si[k], sj[k]);
      pt(static_cast<Eigen::Index>(*space.index_of(si)), static_cast<Eigen::Index>(*space.index_of(sj))) =
          rho.entries(i, j);
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(pt, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalFailure("negativity: eigensolver failed");
  double neg = 0.0;
  for (Eigen::Index k = 0; k < n; ++k)
    if (es.eigenvalues()(k) < 0.0) neg -= es.eigenvalues()(k);
  return neg;
}

}  // namespace qzd

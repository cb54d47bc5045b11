#pragma once

// Exact propagation (spectral), closed-form dark-state coefficients, protocol
// timing, and the full-versus-effective convergence report.

#include <Eigen/Sparse>

#include <array>
#include <cmath>
#include <vector>

#include "qzd/zeno.hpp"

namespace qzd {

// exp(-i H t) from a cached eigendecomposition of a Hermitian generator.
class Propagator {
 public:
  explicit Propagator(const OperatorMatrix& H) : space_(H.space) {
    require_hermitian(H, "Propagator");
    solve(H.entries);
  }

  explicit Propagator(const Matrix& H) {
    if (hermiticity_defect(H) > kStructuralTol * std::max(1.0, max_abs(H)))
      throw NotHermitian("Propagator: generator is not Hermitian");
    solve(H);
  }

  const Eigen::VectorXd& eigenvalues() const { return values_; }
  const Matrix& eigenvectors() const { return vectors_; }

  Matrix unitary(double t) const {
    const Vector phases = (values_.cast<cplx>() * cplx(0.0, -t)).array().exp().matrix();
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
  }

  Vector apply(const Vector& psi, double t) const {
    const Vector phases = (values_.cast<cplx>() * cplx(0.0, -t)).array().exp().matrix();
    return vectors_ * phases.cwiseProduct(vectors_.adjoint() * psi);
  }

  StateVector apply(const StateVector& psi, double t) const {
    if (space_) require_same_space(space_, psi.space, "Propagator::apply");
    return {psi.space, apply(psi.amplitudes, t)};
  }

 private:
  void solve(const Matrix& H) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (H + H.adjoint()));
    if (es.info() != Eigen::Success) throw NumericalFailure("Propagator: eigensolver failed");
    values_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
  }

  SpacePtr space_;
  Eigen::VectorXd values_;
  Matrix vectors_;
};

inline StateVector evolve(const OperatorMatrix& H, const StateVector& psi0, double t) {
  require_same_space(H.space, psi0.space, "evolve");
  return Propagator(H).apply(psi0, t);
}

using SparseMatrix = Eigen::SparseMatrix<cplx>;

// Model Hamiltonian as a sparse matrix, for spaces where a dense
// eigendecomposition is too expensive (the 3456-dim full space).
inline SparseMatrix sparse_hamiltonian(const SystemParams& params, const SpacePtr& space) {
  params.validate();
  require_model_layout(*space);
  std::vector<Eigen::Triplet<cplx>> trip;
  for (std::size_t i = 0; i < space->dimension(); ++i) {
    for (const auto& t : model_terms(params)) {
      if (t.rate == 0.0) continue;
      auto img = apply_term(t, space->basis()[i], space->subsystems(), false);
      if (!img) continue;
      auto j = space->index_of(img->first);
      if (!j) continue;
      const double v = t.rate * img->second;
      trip.emplace_back(static_cast<int>(*j), static_cast<int>(i), v);
      trip.emplace_back(static_cast<int>(i), static_cast<int>(*j), v);
    }
  }
  const auto n = static_cast<int>(space->dimension());
  SparseMatrix H(n, n);
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

// exp(-i H t) psi by a Taylor series on sub-steps with ||H dt||_1 <= 1/2.
inline StateVector evolve_taylor(const SparseMatrix& H, const StateVector& psi0, double t) {
  double h_norm = 0.0;
  for (int k = 0; k < H.outerSize(); ++k) {
    double col = 0.0;
    for (SparseMatrix::InnerIterator it(H, k); it; ++it) col += std::abs(it.value());
    h_norm = std::max(h_norm, col);
  }
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t) * h_norm / 0.5)));
  const double dt = t / steps;
  Vector v = psi0.amplitudes;
  for (int s = 0; s < steps; ++s) {
    Vector term = v;
    Vector acc = v;
    for (int k = 1; k < 64; ++k) {
      term = (cplx(0.0, -dt) / static_cast<double>(k)) * (H * term);
      acc += term;
      if (term.norm() <= 1e-18 * acc.norm()) break;
    }
    v = std::move(acc);
  }
  return {psi0.space, std::move(v)};
}

// Coefficients of A1|D0> + A2|D2> + A3|D1> under the three-level dark generator.
struct AnalyticCoefficients {
  double theta{0.0};  // tan(theta) = Omega_2 / Omega_1 (Omega_3 on the right branch)
  double Omega{0.0};  // quadrature sum of the two drives
  double rate{0.0};   // Omega lambda / (g chi): phase per unit time

  double phase(double tau) const { return rate * tau; }

  std::array<cplx, 3> at(double tau) const {
    const double c = std::cos(theta), s = std::sin(theta);
    const double cp = std::cos(phase(tau)), sp = std::sin(phase(tau));
    return {cplx(s * s + c * c * cp, 0.0), cplx(0.0, -c * sp), cplx(0.5 * std::sin(2.0 * theta) * (cp - 1.0), 0.0)};
  }
};

// Second drive of a branch: Omega_2 on the left, Omega_3 on the right. The
// combined branch uses the left value; protocols flag a mismatch.
inline double second_drive(const UniformParams& p, Branch branch) {
  return branch == Branch::Right ? p.omega3 : p.omega2;
}

inline AnalyticCoefficients analytic_coefficients(const UniformParams& p, Branch branch) {
  if (!(p.g > 0.0) || !(p.lambda > 0.0)) throw DegenerateStructure("analytic_coefficients: g and lambda must be > 0");
  const double o2 = second_drive(p, branch);
  if (p.omega1 == 0.0 && o2 == 0.0) throw DegenerateStructure("analytic_coefficients: mixing angle undefined, both drives are zero");
  AnalyticCoefficients a;
  a.theta = std::atan2(o2, p.omega1);
  a.Omega = std::hypot(p.omega1, o2);
  a.rate = a.Omega * p.lambda / (p.g * p.chi());
  return a;
}

// Dark-state superposition at time tau, embedded in the branch subspace.
// The combined branch evolves each sector with its own angle.
inline StateVector analytic_dark_state(const UniformParams& p, Branch branch, double tau) {
  const auto basis = analytic_dark_bright(p, branch);
  auto sector = [&](Branch b, const StateVector& d0, const StateVector& d1, const StateVector& d2) {
    const auto a = analytic_coefficients(p, b).at(tau);
    return Vector(a[0] * d0.amplitudes + a[1] * d2.amplitudes + a[2] * d1.amplitudes);
  };
  if (branch != Branch::Combined) return {basis.space, sector(branch, basis.dark[0], basis.dark[1], basis.dark[2])};
  const double s = 1.0 / std::sqrt(2.0);
  auto part = [&](std::size_t i, double sign) {
    return StateVector(basis.space, s * (basis.dark[i].amplitudes + sign * basis.dark_complement[i].amplitudes));
  };
  Vector v = sector(Branch::Left, part(0, 1), part(1, 1), part(2, 1)) +
             sector(Branch::Right, part(0, -1), part(1, -1), part(2, -1));
  return {basis.space, s * v};
}

struct Timing {
  enum class Kind { HalfPi, Pi };
  Kind kind{Kind::HalfPi};
  int k{1};

  static Timing half_pi(int k) { return {Kind::HalfPi, k}; }
  static Timing pi(int k) { return {Kind::Pi, k}; }

  // Target value of Omega lambda tau / (g chi).
  double phase() const {
    if (k < 1) throw InvalidSpec("Timing: k must be >= 1");
    if (kind == Kind::HalfPi) return (2.0 * k - 1.0) * M_PI / 2.0;
    // cos(k pi) = +1 for even k returns the initial state, so only odd k swap.
    if (k % 2 == 0) throw InvalidSpec("Timing: the pi condition needs odd k (even k is the identity)");
    return k * M_PI;
  }
};

inline double time_for_phase(double phase, const UniformParams& p, Branch branch = Branch::Left) {
  const double Omega = std::hypot(p.omega1, second_drive(p, branch));
  if (!(p.g > 0.0) || !(p.lambda > 0.0) || !(Omega > 0.0))
    throw DegenerateStructure("solve_timing: g, lambda and the drive amplitude must all be > 0");
  return phase * p.g * p.chi() / (Omega * p.lambda);
}

inline double solve_timing(Timing condition, const UniformParams& p, Branch branch = Branch::Left) {
  return time_for_phase(condition.phase(), p, branch);
}

// Initial dark state: |psi_0>, |psi_0'>, or their normalized sum.
inline StateVector initial_dark_state(Branch branch) {
  const auto space = branch_subspace(branch);
  switch (branch) {
    case Branch::Left: return StateVector::basis_ket(space, initial_left());
    case Branch::Right: return StateVector::basis_ket(space, initial_right());
    case Branch::Combined: break;
  }
  auto v = StateVector::basis_ket(space, initial_left());
  v.amplitudes += StateVector::basis_ket(space, initial_right()).amplitudes;
  return v.normalized();
}

struct ComparisonPoint {
  double tau{0.0};
  double fidelity{0.0};
};

struct ComparisonReport {
  Branch branch{Branch::Left};
  double zeno_ratio{0.0};  // max drive / min(g, lambda)
  std::vector<ComparisonPoint> points;
};

// |<psi_eff(tau)|psi_full(tau)>|^2 on the branch subspace, starting from the
// initial dark state.
inline ComparisonReport compare_full_vs_effective(const UniformParams& p, Branch branch,
                                                  const std::vector<double>& taus) {
  const auto space = branch_subspace(branch);
  const Propagator full(build_hamiltonian(p, space).H_tot);
  const Propagator eff(effective_hamiltonian(p, branch));
  const auto psi0 = initial_dark_state(branch);
  ComparisonReport report;
  report.branch = branch;
  report.zeno_ratio = std::max({p.omega1, p.omega2, p.omega3}) / std::min(p.g, p.lambda);
  for (double tau : taus) report.points.push_back({tau, fidelity(full.apply(psi0, tau), eff.apply(psi0, tau))});
  return report;
}

}  // namespace qzd

#pragma once

// Quantum Zeno decomposition of a strong Hamiltonian H_C into eigenprojector
// clusters, the Zeno Hamiltonian sum_n P_n H_S P_n, and the closed-form dark
// and bright states of the three-atom chain.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qzd/model.hpp"

namespace qzd {

struct EigenCluster {
  double eigenvalue{0.0};
  int multiplicity{0};
  Matrix vectors;    // orthonormal columns spanning the cluster
  Matrix projector;  // vectors * vectors^dagger
};

struct ZenoDecomposition {
  OperatorMatrix strong;
  std::vector<EigenCluster> clusters;  // ascending eigenvalue
  double width{0.0};
  double K{1.0};

  Matrix reconstruct() const {
    Matrix m = Matrix::Zero(strong.entries.rows(), strong.entries.cols());
    for (const auto& c : clusters) m += c.eigenvalue * c.projector;
    return m;
  }

  // Cluster whose eigenvalue is closest to `e`.
  const EigenCluster& nearest(double e) const {
    return *std::min_element(clusters.begin(), clusters.end(), [e](const auto& a, const auto& b) {
      return std::abs(a.eigenvalue - e) < std::abs(b.eigenvalue - e);
    });
  }
};

inline constexpr double kDefaultRelativeClusterWidth = 1e-6;

inline void require_hermitian(const OperatorMatrix& H, const char* what) {
  if (!H.hermitian || hermiticity_defect(H.entries) > kStructuralTol * std::max(1.0, max_abs(H.entries)))
    throw NotHermitian(std::string(what) + ": operator is not Hermitian");
}

// Eigenvalues within `cluster_width` of a neighbour share one projector. A gap
// between distinct clusters smaller than 2 * cluster_width is ambiguous.
// cluster_width <= 0 selects 1e-6 times the spectral radius.
inline ZenoDecomposition decompose(const OperatorMatrix& H_C, double cluster_width = 0.0) {
  require_hermitian(H_C, "decompose");
  Eigen::SelfAdjointEigenSolver<Matrix> es(H_C.entries);
  if (es.info() != Eigen::Success) throw NumericalFailure("decompose: eigensolver failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  const auto n = ev.size();
  if (cluster_width <= 0.0) {
    const double radius = n == 0 ? 0.0 : std::max(std::abs(ev(0)), std::abs(ev(n - 1)));
    cluster_width = radius > 0.0 ? kDefaultRelativeClusterWidth * radius : kStructuralTol;
  }

  ZenoDecomposition dec{H_C, {}, cluster_width, 1.0};
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (i < n && ev(i) - ev(i - 1) <= cluster_width) continue;
    if (i < n && ev(i) - ev(i - 1) < 2.0 * cluster_width)
      throw AmbiguousClustering("decompose: eigenvalue gap " + std::to_string(ev(i) - ev(i - 1)) +
                                " is comparable to the cluster width");
    EigenCluster c;
    c.multiplicity = static_cast<int>(i - start);
    c.eigenvalue = ev.segment(start, i - start).mean();
    c.vectors = es.eigenvectors().middleCols(start, i - start);
    c.projector = c.vectors * c.vectors.adjoint();
    dec.clusters.push_back(std::move(c));
    start = i;
  }
  return dec;
}

// H_Z = sum_n P_n H_S P_n.
inline OperatorMatrix zeno_hamiltonian(const ZenoDecomposition& dec, const OperatorMatrix& H_S) {
  require_same_space(dec.strong.space, H_S.space, "zeno_hamiltonian");
  Matrix m = Matrix::Zero(H_S.entries.rows(), H_S.entries.cols());
  for (const auto& c : dec.clusters) m += c.projector * H_S.entries * c.projector;
  if (H_S.hermitian) m = (0.5 * (m + m.adjoint())).eval();
  return {H_S.space, std::move(m), H_S.hermitian};
}

// sum_n (K E_n P_n + P_n H_S P_n). The generator is time independent; the
// propagator is exp(-i H t).
inline OperatorMatrix limiting_generator(const ZenoDecomposition& dec, const OperatorMatrix& H_S, double K) {
  auto out = zeno_hamiltonian(dec, H_S);
  for (const auto& c : dec.clusters) out.entries += (K * c.eigenvalue) * c.projector;
  return out;
}

// Largest sine of the principal angles between span(a) and span(b); both
// arguments hold orthonormal columns of equal count.
inline double max_principal_angle_sine(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols() || a.rows() != b.rows()) return 1.0;
  if (a.cols() == 0) return 0.0;
  Matrix residual = a - b * (b.adjoint() * a);
  Eigen::JacobiSVD<Matrix> svd(residual);
  return svd.singularValues()(0);
}

inline Matrix orthonormalize(const std::vector<StateVector>& states) {
  if (states.empty()) return {};
  Matrix m(static_cast<Eigen::Index>(states.front().dimension()), static_cast<Eigen::Index>(states.size()));
  for (std::size_t k = 0; k < states.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = states[k].amplitudes;
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
}

struct DarkBrightBasis {
  Branch branch{Branch::Left};
  SpacePtr space;
  double chi{0.0};
  // D0, D1, D2. Combined branch: (D_i + D_i')/sqrt(2).
  std::vector<StateVector> dark;
  // Combined branch only: (D_i - D_i')/sqrt(2), completing the 6-dim dark space.
  std::vector<StateVector> dark_complement;
  // B0 (+g), B1 (-g), B2 (+g chi), B3 (-g chi), from the numeric eigensolver.
  std::vector<StateVector> bright;
  std::vector<StateVector> bright_complement;
  std::vector<double> bright_eigenvalues;
  // Predicted spectrum of the strong Hamiltonian on this space.
  std::vector<double> eigenvalues;

  std::vector<StateVector> all_dark() const {
    auto out = dark;
    out.insert(out.end(), dark_complement.begin(), dark_complement.end());
    return out;
  }
};

namespace detail {

// Positions of phi_0..phi_6 inside a branch subspace.
inline std::array<std::size_t, 7> chain_positions(std::size_t offset) {
  std::array<std::size_t, 7> p{};
  for (std::size_t i = 0; i < 7; ++i) p[i] = offset + i;
  return p;
}

inline StateVector printed_d2(const UniformParams& params, const SpacePtr& space, std::size_t offset) {
  const auto phi = chain_positions(offset);
  const double g = params.g, lam = params.lambda, chi = params.chi();
  auto d = StateVector::zero(space);
  const double pref = lam / (g * chi);
  d.amplitudes(static_cast<Eigen::Index>(phi[1])) = pref;
  d.amplitudes(static_cast<Eigen::Index>(phi[3])) = -pref * g / lam;
  d.amplitudes(static_cast<Eigen::Index>(phi[5])) = pref;
  return d;
}

inline StateVector basis_at(const SpacePtr& space, std::size_t i) {
  auto v = StateVector::zero(space);
  v.amplitudes(static_cast<Eigen::Index>(i)) = 1.0;
  return v;
}

// First component above 1e-6 of the largest made real positive.
inline Vector fix_phase(Vector v) {
  const double big = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-6 * big) {
      v *= std::conj(v(i)) / std::abs(v(i));
      break;
    }
  }
  return v;
}

struct SingleBranch {
  std::vector<StateVector> dark;
  std::vector<StateVector> bright;
  std::vector<double> bright_eigenvalues;
};

inline SingleBranch single_branch(const UniformParams& params, const SpacePtr& branch_space) {
  SingleBranch out;
  out.dark = {basis_at(branch_space, 0), basis_at(branch_space, 6), printed_d2(params, branch_space, 0)};

  const auto strong = build_hamiltonian(params, branch_space).H_strong;
  const auto n = static_cast<Eigen::Index>(branch_space->dimension());
  Matrix dark_cols(n, 3);
  for (int k = 0; k < 3; ++k) dark_cols.col(k) = out.dark[static_cast<std::size_t>(k)].amplitudes;
  Matrix complement_proj = Matrix::Identity(n, n) - dark_cols * dark_cols.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> pes(complement_proj);
  Matrix q = pes.eigenvectors().rightCols(n - 3);  // eigenvalue-1 block
  Matrix hq = q.adjoint() * strong.entries * q;
  hq = (0.5 * (hq + hq.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(hq);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double radius = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  for (Eigen::Index i = 1; i < ev.size(); ++i)
    if (ev(i) - ev(i - 1) < 2.0 * kDefaultRelativeClusterWidth * radius)
      throw AmbiguousClustering("analytic_dark_bright: degenerate bright eigenvalues");

  // ascending order is (-g chi, -g, +g, +g chi); emit B0(+g), B1(-g), B2(+g chi), B3(-g chi)
  for (Eigen::Index col : {2, 1, 3, 0}) {
    out.bright.emplace_back(branch_space, fix_phase(q * es.eigenvectors().col(col)));
    out.bright_eigenvalues.push_back(ev(col));
  }
  return out;
}

}  // namespace detail

inline DarkBrightBasis analytic_dark_bright(const UniformParams& params, Branch branch) {
  if (!(params.g > 0.0) || !(params.lambda > 0.0))
    throw DegenerateStructure("analytic_dark_bright: g and lambda must both be > 0");
  DarkBrightBasis out;
  out.branch = branch;
  out.chi = params.chi();
  const double g = params.g, gx = params.g * out.chi;

  if (branch != Branch::Combined) {
    out.space = branch_subspace(branch);
    auto sb = detail::single_branch(params, out.space);
    out.dark = std::move(sb.dark);
    out.bright = std::move(sb.bright);
    out.bright_eigenvalues = std::move(sb.bright_eigenvalues);
    out.eigenvalues = {0.0, 0.0, 0.0, g, -g, gx, -gx};
    return out;
  }

  out.space = branch_subspace(Branch::Combined);
  const auto left = detail::single_branch(params, branch_subspace(Branch::Left));
  const auto right = detail::single_branch(params, branch_subspace(Branch::Right));
  const double s = 1.0 / std::sqrt(2.0);
  auto join = [&](const StateVector& l, const StateVector& r, double sign) {
    Vector v(14);
    v << l.amplitudes, sign * r.amplitudes;
    return StateVector(out.space, s * v);
  };
  for (std::size_t i = 0; i < 3; ++i) {
    out.dark.push_back(join(left.dark[i], right.dark[i], 1.0));
    out.dark_complement.push_back(join(left.dark[i], right.dark[i], -1.0));
  }
  for (std::size_t i = 0; i < 4; ++i) {
    out.bright.push_back(join(left.bright[i], right.bright[i], 1.0));
    out.bright_complement.push_back(join(left.bright[i], right.bright[i], -1.0));
  }
  out.bright_eigenvalues = left.bright_eigenvalues;
  out.eigenvalues = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, g, g, -g, -g, gx, gx, -gx, -gx};
  return out;
}

// Literal bright-state expressions with their printed (unnormalized)
// prefactors, on a single-branch subspace. Kept for the comparison report only.
inline std::vector<StateVector> printed_bright_states(const UniformParams& params, Branch branch) {
  if (branch == Branch::Combined) throw InvalidSpec("printed_bright_states: single branch only");
  const auto space = branch_subspace(branch);
  const double chi = params.chi(), r = params.lambda / params.g;
  auto make = [&](double pref, std::array<double, 5> c) {
    auto v = StateVector::zero(space);
    for (int i = 0; i < 5; ++i) v.amplitudes(i + 1) = pref * c[static_cast<std::size_t>(i)];
    return v;
  };
  return {make(0.5, {-1, -1, 0, 1, 1}), make(0.5, {-1, 1, 0, -1, 1}), make(2 * chi, {1, chi, r, -chi, 1}),
          make(2 * chi, {1, -chi, r, -chi, 1})};
}

struct BrightComparison {
  std::string label;
  double predicted_eigenvalue{0.0};
  double printed_norm{0.0};
  double printed_residual{0.0};  // ||H b - E b|| / ||b|| for the printed vector
  double overlap{0.0};           // |<b_printed/|b_printed| | b_numeric>|^2
};

inline std::vector<BrightComparison> compare_bright_states(const UniformParams& params, Branch branch) {
  const auto basis = analytic_dark_bright(params, branch);
  const auto printed = printed_bright_states(params, branch);
  const auto strong = build_hamiltonian(params, basis.space).H_strong;
  const double g = params.g, chi = params.chi();
  const std::array<double, 4> predicted{g, -g, g * chi, -g * chi};
  std::vector<BrightComparison> out;
  for (std::size_t i = 0; i < 4; ++i) {
    BrightComparison c;
    c.label = "B" + std::to_string(i);
    c.predicted_eigenvalue = predicted[i];
    c.printed_norm = printed[i].norm();
    c.printed_residual =
        (strong.entries * printed[i].amplitudes - predicted[i] * printed[i].amplitudes).norm() / c.printed_norm;
    c.overlap = std::norm(basis.bright[i].amplitudes.dot(printed[i].amplitudes)) / (c.printed_norm * c.printed_norm);
    out.push_back(c);
  }
  return out;
}

// Dark-space generator (lambda/(g chi)) (Omega_1 |D0><D2| + Omega_x |D1><D2| + h.c.)
// embedded in the branch subspace; Omega_x is Omega_2 (left) or Omega_3
// (right). The combined branch carries the direct sum of both.
inline OperatorMatrix effective_hamiltonian(const UniformParams& params, Branch branch) {
  const auto basis = analytic_dark_bright(params, branch);
  const double scale = params.lambda / (params.g * basis.chi);
  auto add_branch = [&](Matrix& m, const StateVector& d0, const StateVector& d1, const StateVector& d2,
                         double second) {
    m += scale * params.omega1 * (d0.amplitudes * d2.amplitudes.adjoint() + d2.amplitudes * d0.amplitudes.adjoint());
    m += scale * second * (d1.amplitudes * d2.amplitudes.adjoint() + d2.amplitudes * d1.amplitudes.adjoint());
  };
  const auto n = static_cast<Eigen::Index>(basis.space->dimension());
  Matrix m = Matrix::Zero(n, n);
  if (branch == Branch::Combined) {
    const double s = 1.0 / std::sqrt(2.0);
    auto part = [&](std::size_t i, double sign) {
      return StateVector(basis.space, s * (basis.dark[i].amplitudes + sign * basis.dark_complement[i].amplitudes));
    };
    add_branch(m, part(0, 1), part(1, 1), part(2, 1), params.omega2);
    add_branch(m, part(0, -1), part(1, -1), part(2, -1), params.omega3);
  } else {
    add_branch(m, basis.dark[0], basis.dark[1], basis.dark[2],
               branch == Branch::Left ? params.omega2 : params.omega3);
  }
  return {basis.space, std::move(m), true};
}

}  // namespace qzd

#include "support.hpp"

using namespace qzd;
using qzd::testing::uniform;

namespace {

SpacePtr line_space(int n) { return build_space({SubsystemSpec::boson(ModeLabel::F_l, n - 1)}); }

// Dark-basis generator: columns/rows (D0, D1, D2).
Matrix three_level(double c1, double c2) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 2) = m(2, 0) = c1;
  m(1, 2) = m(2, 1) = c2;
  return m;
}

}  // namespace

TEST(Evolve, ZeroTimeIsIdentity) {
  const auto space = line_space(5);
  const OperatorMatrix h(space, qzd::testing::random_hermitian(5), true);
  StateVector psi(space, qzd::testing::random_vector(5));
  EXPECT_LE((evolve(h, psi, 0.0).amplitudes - psi.amplitudes).norm(), 1e-12);
  EXPECT_LE(max_abs(Propagator(h).unitary(0.0) - Matrix::Identity(5, 5)), 1e-12);
}

TEST(Evolve, DiagonalGivesPhases) {
  const auto space = line_space(3);
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << -0.4, 1.1, 2.5;
  StateVector psi(space, qzd::testing::random_vector(3));
  const double t = 1.7;
  const auto out = evolve({space, d, true}, psi, t);
  for (int k = 0; k < 3; ++k)
    EXPECT_NEAR(std::abs(out.amplitudes(k) - std::exp(cplx(0, -d(k, k).real() * t)) * psi.amplitudes(k)), 0.0, 1e-14);
}

TEST(Evolve, RabiHalfPeriodInvertsPopulation) {
  const auto space = line_space(2);
  const double omega = 0.37;
  Matrix h = Matrix::Zero(2, 2);
  h(0, 1) = h(1, 0) = omega;
  const auto out = evolve({space, h, true}, StateVector::basis_ket(space, {0}), M_PI / (2.0 * omega));
  EXPECT_NEAR(std::norm(out.amplitudes(1)), 1.0, 1e-14);
}

TEST(Evolve, UnitarityNormAndEnergy) {
  const auto space = branch_subspace(Branch::Combined);
  const UniformParams p{1.0, 0.2, 0.1, 0.3, 0.7};
  const auto H = build_hamiltonian(p, space).H_tot;
  const Propagator prop(H);
  StateVector psi(space, qzd::testing::random_vector(14));
  const double e0 = std::real(H.element(psi, psi));
  for (double t : {0.3, 5.0, 111.0}) {
    EXPECT_LE(max_abs(prop.unitary(t).adjoint() * prop.unitary(t) - Matrix::Identity(14, 14)), 1e-10);
    const auto out = prop.apply(psi, t);
    EXPECT_NEAR(out.norm(), 1.0, 1e-10);
    EXPECT_NEAR(std::real(H.element(out, out)), e0, 1e-9);
  }
}

TEST(Evolve, NonHermitianThrows) {
  const auto space = line_space(2);
  Matrix h = Matrix::Zero(2, 2);
  h(0, 1) = 1.0;
  EXPECT_THROW(evolve({space, h, false}, StateVector::basis_ket(space, {0}), 1.0), NotHermitian);
  EXPECT_THROW(Propagator{h}, NotHermitian);
}

TEST(Evolve, TaylorMatchesSpectral) {
  const auto space = branch_subspace(Branch::Combined);
  const UniformParams p{1.0, 0.2, 0.1, 0.3, 0.7};
  const auto psi0 = initial_dark_state(Branch::Combined);
  const auto dense = evolve(build_hamiltonian(p, space).H_tot, psi0, 37.0);
  const auto taylor = evolve_taylor(sparse_hamiltonian(p.to_system(), space), psi0, 37.0);
  EXPECT_LE((dense.amplitudes - taylor.amplitudes).norm(), 1e-10);
}

TEST(AnalyticCoefficients, UnitNormAndInitialValue) {
  for (int rep = 0; rep < 200; ++rep) {
    AnalyticCoefficients a{uniform(0, M_PI / 2), 1.0, 1.0};
    const auto c = a.at(uniform(0, 20));
    EXPECT_NEAR(std::norm(c[0]) + std::norm(c[1]) + std::norm(c[2]), 1.0, 1e-10);
    const auto c0 = a.at(0.0);
    EXPECT_NEAR(std::abs(c0[0] - 1.0), 0.0, 1e-15);
    EXPECT_EQ(std::abs(c0[1]), 0.0);
    EXPECT_EQ(std::abs(c0[2]), 0.0);
  }
}

TEST(AnalyticCoefficients, PeriodicInPhase) {
  for (int rep = 0; rep < 50; ++rep) {
    AnalyticCoefficients a{uniform(0, M_PI / 2), 1.0, 1.0};
    const double ph = uniform(0, 10);
    const auto x = a.at(ph), y = a.at(ph + 2 * M_PI);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)]), 0.0, 1e-12);
  }
}

TEST(AnalyticCoefficients, MatchThreeLevelEvolution) {
  for (int rep = 0; rep < 100; ++rep) {
    const double theta = uniform(0, M_PI / 2), Omega = uniform(0.001, 0.1);
    const UniformParams p{uniform(0.2, 5), Omega * std::cos(theta), Omega * std::sin(theta), 0.0, uniform(0.2, 5)};
    const auto a = analytic_coefficients(p, Branch::Left);
    const double tau = uniform(0, 6 * M_PI) / a.rate;
    const double scale = p.lambda / (p.g * p.chi());
    Vector d0 = Vector::Zero(3);
    d0(0) = 1.0;
    const Vector psi = Propagator(three_level(scale * p.omega1, scale * p.omega2)).apply(d0, tau);
    const auto c = a.at(tau);
    EXPECT_NEAR(std::abs(psi(0) - c[0]), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(psi(2) - c[1]), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(psi(1) - c[2]), 0.0, 1e-10);
  }
}

TEST(AnalyticCoefficients, RightBranchUsesOmega3) {
  const UniformParams p{1.0, 0.01, 0.05, 0.02, 1.0};
  const auto a = analytic_coefficients(p, Branch::Right);
  EXPECT_NEAR(std::tan(a.theta), 0.02 / 0.01, 1e-12);
  EXPECT_NEAR(a.Omega, std::hypot(0.01, 0.02), 1e-15);
}

TEST(AnalyticCoefficients, BothDrivesZeroThrows) {
  EXPECT_THROW(analytic_coefficients({1.0, 0, 0, 0.3, 1.0}, Branch::Left), DegenerateStructure);
}

TEST(AnalyticDarkState, StateTransferGivesMinusID2) {
  const UniformParams p{1.0, 0.01, 0.0, 0.0, 1.0};
  const double tau = solve_timing(Timing::half_pi(1), p);
  const auto psi = analytic_dark_state(p, Branch::Left, tau);
  const auto basis = analytic_dark_bright(p, Branch::Left);
  EXPECT_NEAR(std::abs(inner(basis.dark[2], psi) - cplx(0, -1)), 0.0, 1e-10);
}

TEST(AnalyticDarkState, SwapGivesMinusD1) {
  const double o = 0.01 / std::sqrt(2.0);
  const UniformParams p{1.0, o, o, 0.0, 1.0};
  const auto psi = analytic_dark_state(p, Branch::Left, solve_timing(Timing::pi(1), p));
  const auto basis = analytic_dark_bright(p, Branch::Left);
  EXPECT_NEAR(std::abs(inner(basis.dark[1], psi) + 1.0), 0.0, 1e-10);
}

TEST(AnalyticDarkState, ZeroTimeIsD0) {
  const UniformParams p{0.6, 0.02, 0.03, 0.04, 1.1};
  for (Branch b : {Branch::Left, Branch::Right}) {
    const auto psi = analytic_dark_state(p, b, 0.0);
    EXPECT_NEAR(std::abs(inner(analytic_dark_bright(p, b).dark[0], psi) - 1.0), 0.0, 1e-15);
  }
}

TEST(AnalyticDarkState, MatchesEffectiveEvolutionOnBranch) {
  for (int rep = 0; rep < 20; ++rep) {
    const UniformParams p{uniform(0.2, 5), uniform(0.001, 0.05), uniform(0.001, 0.05), uniform(0.001, 0.05),
                          uniform(0.2, 5)};
    for (Branch b : {Branch::Left, Branch::Right, Branch::Combined}) {
      const double tau = uniform(0, 2000);
      const auto exact = evolve(effective_hamiltonian(p, b), initial_dark_state(b), tau);
      EXPECT_NEAR(fidelity(analytic_dark_state(p, b, tau), exact), 1.0, 1e-10);
    }
  }
}

TEST(Timing, HalfPiExample) {
  const UniformParams p{1.0, 0.01, 0.0, 0.0, 1.0};
  EXPECT_NEAR(solve_timing(Timing::half_pi(1), p), (M_PI / 2.0) * std::sqrt(3.0) / 0.01, 1e-9);
}

TEST(Timing, ScalingInK) {
  const UniformParams p{0.7, 0.01, 0.02, 0.0, 1.3};
  const double base = solve_timing(Timing::half_pi(1), p);
  EXPECT_NEAR(solve_timing(Timing::pi(1), p), 2.0 * base, 1e-9);
  EXPECT_NEAR(solve_timing(Timing::half_pi(2), p), 3.0 * base, 1e-9);
  EXPECT_NEAR(solve_timing(Timing::pi(3), p), 6.0 * base, 1e-9);
}

TEST(Timing, Errors) {
  const UniformParams p{1.0, 0.01, 0.0, 0.0, 1.0};
  EXPECT_THROW(solve_timing(Timing::pi(2), p), InvalidSpec);
  EXPECT_THROW(solve_timing(Timing::half_pi(0), p), InvalidSpec);
  EXPECT_THROW(solve_timing(Timing::half_pi(1), UniformParams{1.0, 0.0, 0.0, 0.0, 1.0}), DegenerateStructure);
  EXPECT_THROW(solve_timing(Timing::half_pi(1), UniformParams{1.0, 0.01, 0.0, 0.0, 0.0}), DegenerateStructure);
}

TEST(CompareFullEffective, NoDriveIsFrozen) {
  const UniformParams p{1.0, 0.0, 0.0, 0.0, 1.0};
  const auto rep = compare_full_vs_effective(p, Branch::Left, {0.0, 10.0, 1000.0});
  for (const auto& pt : rep.points) EXPECT_NEAR(pt.fidelity, 1.0, 1e-12);
  EXPECT_EQ(rep.zeno_ratio, 0.0);
}

TEST(CompareFullEffective, ZenoRegimeAtStateTransferTime) {
  std::vector<double> f;
  for (double ratio : {0.1, 0.03, 0.01}) {
    const UniformParams p{1.0, ratio, 0.0, 0.0, 1.0};
    const double tau = solve_timing(Timing::half_pi(1), p);
    f.push_back(compare_full_vs_effective(p, Branch::Left, {tau}).points[0].fidelity);
  }
  EXPECT_GE(f[2], 0.98);
  EXPECT_GT(f[1], f[0]);
  EXPECT_GT(f[2], f[1]);
}

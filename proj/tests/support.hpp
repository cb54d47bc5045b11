#pragma once

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "qzd/protocols.hpp"

namespace qzd::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline Matrix random_hermitian(Eigen::Index n) {
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(uniform(-1, 1), uniform(-1, 1));
  return 0.5 * (m + m.adjoint());
}

inline Matrix random_unitary(Eigen::Index n) {
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(uniform(-1, 1), uniform(-1, 1));
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ();
}

inline Vector random_vector(Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(uniform(-1, 1), uniform(-1, 1));
  return v.normalized();
}

// Random density matrix: normalized A A^dagger.
inline Matrix random_density(Eigen::Index n) {
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cplx(uniform(-1, 1), uniform(-1, 1));
  Matrix rho = a * a.adjoint();
  return rho / rho.trace();
}

// Symbolic 7x7 fixture ("g", "lambda", "omega1".. or "0") evaluated at p.
inline Matrix load_symbolic_fixture(const std::string& name, const UniformParams& p) {
  std::ifstream in(std::string(QZD_FIXTURE_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  Matrix m = Matrix::Zero(7, 7);
  int row = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string tok;
    for (int col = 0; ss >> tok; ++col) {
      double v = 0.0;
      if (tok == "g") v = p.g;
      else if (tok == "lambda") v = p.lambda;
      else if (tok == "omega1") v = p.omega1;
      else if (tok == "omega2") v = p.omega2;
      else if (tok == "omega3") v = p.omega3;
      else if (tok != "0") throw std::runtime_error("bad fixture token " + tok);
      m(row, col) = v;
    }
    ++row;
  }
  return m;
}

}  // namespace qzd::testing

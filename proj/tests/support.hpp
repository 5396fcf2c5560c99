#pragma once

// Shared helpers for the test suite: conversions to Eigen (the independent
// oracle) and seeded random matrices.

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "evpos/evpos.hpp"

namespace evpos::test {

using EMat = Eigen::MatrixXcd;

inline EMat to_eigen(const ComplexMatrix& m) {
  EMat e(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  return e;
}

inline ComplexMatrix from_eigen(const EMat& e) {
  ComplexMatrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = e(i, j);
  return m;
}

/// Spectral norm of the difference, computed by Eigen.
inline double oracle_diff(const ComplexMatrix& a, const EMat& b) {
  return Eigen::JacobiSVD<EMat>(to_eigen(a) - b).singularValues()(0);
}

inline double oracle_norm(const EMat& b) { return Eigen::JacobiSVD<EMat>(b).singularValues()(0); }

/// Entries uniform in the unit disc (complex) or [-1, 1] (real), scaled so that ||A||_2 == norm.
inline ComplexMatrix random_matrix(std::size_t n, std::uint64_t seed, double norm = 1.0, bool complex_entries = true) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  EMat e(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) {
      const double re = u(rng);
      e(i, j) = Complex(re, complex_entries ? u(rng) : 0.0);
    }
  e *= norm / oracle_norm(e);
  return from_eigen(e);
}

/// Random diagonalizable matrix V diag(d) V^{-1}; eigenvalues on a grid with pairwise gaps >= min_gap.
struct Diagonalizable {
  ComplexMatrix matrix;
  std::vector<Complex> eigenvalues;
  EMat v;
};

inline Diagonalizable random_diagonalizable(std::size_t n, std::uint64_t seed, double min_gap = 0.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Complex> d;
  while (d.size() < n) {
    const Complex z(2.0 * u(rng), 2.0 * u(rng));
    bool ok = true;
    for (const auto& w : d) ok = ok && std::abs(z - w) >= min_gap;
    if (ok) d.push_back(z);
  }
  EMat v(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    for (Eigen::Index j = 0; j < v.cols(); ++j) v(i, j) = Complex(u(rng), u(rng));
  v += 2.0 * EMat::Identity(v.rows(), v.cols());  // keep V comfortably invertible
  Eigen::VectorXcd dv(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) dv(static_cast<Eigen::Index>(k)) = d[k];
  const EMat a = v * dv.asDiagonal() * v.inverse();
  return {from_eigen(a), d, v};
}

/// Oracle spectral projection for eigenvalue index k of a Diagonalizable.
inline EMat oracle_projection(const Diagonalizable& d, std::size_t k) {
  const EMat vinv = d.v.inverse();
  const auto kk = static_cast<Eigen::Index>(k);
  return d.v.col(kk) * vinv.row(kk);
}

inline ComplexMatrix real_matrix(std::initializer_list<std::initializer_list<double>> rows) {
  ComplexMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (double x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

}  // namespace evpos::test

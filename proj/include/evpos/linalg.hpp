#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "evpos/error.hpp"
#include "evpos/matrix.hpp"

namespace evpos {

inline constexpr double kDefaultRankTol = 1e-10;

/// Eigenvalues closer than this merge into one cluster: 1e-7 (1 + ||M||).
inline double default_cluster_tol(const ComplexMatrix& m) { return 1e-7 * (1.0 + norm2(m)); }

namespace detail {

inline constexpr double kEps = 2.220446049250313e-16;

inline std::string describe(Complex z) {
  std::ostringstream os;
  os.precision(10);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

/// Givens rotation G = [[c, s], [-conj(s), c]] with G [a; b] = [r; 0].
struct Givens {
  double c = 1.0;
  Complex s{};

  static Givens zeroing(Complex a, Complex b) {
    const double abs_a = std::abs(a);
    const double abs_b = std::abs(b);
    if (abs_b == 0.0) return {1.0, Complex{}};
    if (abs_a == 0.0) return {0.0, Complex(1.0, 0.0)};
    const double r = std::hypot(abs_a, abs_b);
    return {abs_a / r, (a / abs_a) * std::conj(b) / r};
  }

  // rows p, q of m over columns [c0, c1)
  void apply_rows(ComplexMatrix& m, std::size_t p, std::size_t q, std::size_t c0, std::size_t c1) const {
    for (std::size_t j = c0; j < c1; ++j) {
      const Complex x = m(p, j);
      const Complex y = m(q, j);
      m(p, j) = c * x + s * y;
      m(q, j) = -std::conj(s) * x + c * y;
    }
  }

  // m <- m G^H on columns p, q over rows [r0, r1)
  void apply_cols(ComplexMatrix& m, std::size_t p, std::size_t q, std::size_t r0, std::size_t r1) const {
    for (std::size_t i = r0; i < r1; ++i) {
      const Complex x = m(i, p);
      const Complex y = m(i, q);
      m(i, p) = c * x + std::conj(s) * y;
      m(i, q) = -s * x + c * y;
    }
  }
};

inline void hessenberg_reduce(ComplexMatrix& h, ComplexMatrix& q) {
  const std::size_t n = h.rows();
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double norm_x = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) norm_x += std::norm(h(i, k));
    norm_x = std::sqrt(norm_x);
    if (norm_x == 0.0) continue;
    const Complex x0 = h(k + 1, k);
    const Complex phase = std::abs(x0) == 0.0 ? Complex(1.0, 0.0) : x0 / std::abs(x0);
    const Complex alpha = -phase * norm_x;

    std::vector<Complex> v(n, Complex{});
    for (std::size_t i = k + 1; i < n; ++i) v[i] = h(i, k);
    v[k + 1] -= alpha;
    double vn = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vn += std::norm(v[i]);
    vn = std::sqrt(vn);
    if (vn == 0.0) continue;
    for (std::size_t i = k + 1; i < n; ++i) v[i] /= vn;

    // h <- (I - 2 v v^H) h
    for (std::size_t j = 0; j < n; ++j) {
      Complex dot{};
      for (std::size_t i = k + 1; i < n; ++i) dot += std::conj(v[i]) * h(i, j);
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= 2.0 * v[i] * dot;
    }
    // h <- h (I - 2 v v^H), q <- q (I - 2 v v^H)
    for (ComplexMatrix* m : {&h, &q}) {
      for (std::size_t i = 0; i < n; ++i) {
        Complex dot{};
        for (std::size_t j = k + 1; j < n; ++j) dot += (*m)(i, j) * v[j];
        for (std::size_t j = k + 1; j < n; ++j) (*m)(i, j) -= 2.0 * dot * std::conj(v[j]);
      }
    }
    h(k + 1, k) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = Complex{};
  }
}

}  // namespace detail

/// Complex Schur form M = Z T Z^H with T upper triangular and Z unitary.
struct SchurForm {
  ComplexMatrix t;
  ComplexMatrix z;
};

/**
 * @brief Complex Schur decomposition.
 *
 * Householder reduction to Hessenberg form followed by single-shift QR
 * sweeps with Wilkinson shifts and exceptional shifts every tenth
 * iteration without deflation.
 */
inline SchurForm schur(const ComplexMatrix& m) {
  require_square(m, "schur");
  if (!all_finite(m)) throw NumericalFailure("schur: matrix has non-finite entries");
  const std::size_t n = m.rows();
  // Schur vectors are invariant under scaling; a power of two keeps T exact.
  int exponent = 0;
  const double peak = max_abs(m);
  if (peak > 0.0) std::frexp(peak, &exponent);
  ComplexMatrix h = m * Complex(std::ldexp(1.0, -exponent));
  ComplexMatrix z = ComplexMatrix::identity(n);
  detail::hessenberg_reduce(h, z);

  const double scale = std::max(frobenius_norm(h), std::numeric_limits<double>::min());
  const int max_iter_per_eigenvalue = 60;
  int total_iter = 0;
  std::size_t hi = n - 1;
  int iter = 0;
  while (hi > 0) {
    std::size_t lo = hi;
    for (; lo > 0; --lo) {
      const double off = std::abs(h(lo, lo - 1));
      double diag = std::abs(h(lo, lo)) + std::abs(h(lo - 1, lo - 1));
      if (diag == 0.0) diag = scale;
      if (off <= detail::kEps * diag) {
        h(lo, lo - 1) = Complex{};
        break;
      }
    }
    if (lo == hi) {
      --hi;
      iter = 0;
      continue;
    }
    ++iter;
    ++total_iter;
    if (iter > max_iter_per_eigenvalue) {
      std::ostringstream os;
      os << "schur: QR iteration did not converge (matrix norm " << scale << ", " << total_iter
         << " iterations)";
      throw NumericalFailure(os.str());
    }

    Complex mu;
    if (iter % 10 == 0) {
      mu = h(hi, hi) + 0.75 * std::abs(h(hi, hi - 1));
    } else {
      const Complex a = h(hi - 1, hi - 1), b = h(hi - 1, hi);
      const Complex c = h(hi, hi - 1), d = h(hi, hi);
      const Complex half = 0.5 * (a - d);
      const Complex disc = std::sqrt(half * half + b * c);
      const Complex mu1 = 0.5 * (a + d) + disc;
      const Complex mu2 = 0.5 * (a + d) - disc;
      mu = std::abs(mu1 - d) < std::abs(mu2 - d) ? mu1 : mu2;
    }

    for (std::size_t i = lo; i <= hi; ++i) h(i, i) -= mu;
    std::vector<detail::Givens> rotations(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) {
      auto g = detail::Givens::zeroing(h(k, k), h(k + 1, k));
      g.apply_rows(h, k, k + 1, k, n);
      h(k + 1, k) = Complex{};
      rotations[k - lo] = g;
    }
    for (std::size_t k = lo; k < hi; ++k) {
      const auto& g = rotations[k - lo];
      g.apply_cols(h, k, k + 1, 0, std::min(k + 2, hi) + 1);
      g.apply_cols(z, k, k + 1, 0, n);
    }
    for (std::size_t i = lo; i <= hi; ++i) h(i, i) += mu;
  }
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) h(i, j) = Complex{};
  h *= Complex(std::ldexp(1.0, exponent));
  return {std::move(h), std::move(z)};
}

/// Swaps diagonal entries k and k+1 of a Schur form by a unitary rotation.
inline void swap_schur_diagonal(SchurForm& s, std::size_t k) {
  ComplexMatrix& t = s.t;
  const std::size_t n = t.rows();
  const Complex t11 = t(k, k);
  const Complex t22 = t(k + 1, k + 1);
  if (t11 == t22) return;
  const auto g = detail::Givens::zeroing(t(k, k + 1), t22 - t11);
  g.apply_rows(t, k, k + 1, k, n);
  g.apply_cols(t, k, k + 1, 0, k + 2);
  g.apply_cols(s.z, k, k + 1, 0, n);
  t(k, k) = t22;
  t(k + 1, k + 1) = t11;
  t(k + 1, k) = Complex{};
}

/// Reorders the Schur form so that the listed diagonal positions come first.
inline void move_to_front(SchurForm& s, std::vector<std::size_t> positions) {
  std::sort(positions.begin(), positions.end());
  for (std::size_t dest = 0; dest < positions.size(); ++dest) {
    for (std::size_t k = positions[dest]; k > dest; --k) swap_schur_diagonal(s, k - 1);
  }
}

/// Number of singular values above tol_rank times the largest one.
inline std::size_t rank(const ComplexMatrix& m, double tol_rank = kDefaultRankTol) {
  if (tol_rank <= 0.0) throw ParameterError("rank: tol_rank must be positive");
  if (m.empty()) return 0;
  const auto sv = svd(m).singular_values;
  if (sv.front() == 0.0) return 0;
  return static_cast<std::size_t>(
      std::count_if(sv.begin(), sv.end(), [&](double s) { return s > tol_rank * sv.front(); }));
}

struct EigenCluster {
  Complex value;                     // mean of the member eigenvalues
  std::vector<std::size_t> members;  // indices into EigenData::eigenvalues
  int algebraic = 0;
  int geometric = 0;
  int index = 0;  // size of the largest Jordan block
};

/**
 * @brief Eigenstructure of a square matrix.
 *
 * Column k of right_eigenvectors and row k of left_eigenvectors belong to
 * eigenvalues[k]; both are unit vectors (row k satisfies row * M = lambda row).
 */
struct EigenData {
  std::vector<Complex> eigenvalues;
  ComplexMatrix right_eigenvectors;
  ComplexMatrix left_eigenvectors;
  std::vector<EigenCluster> clusters;
  double tol_cluster = 0.0;
  double tol_rank = kDefaultRankTol;
  double matrix_norm = 0.0;

  /// Cluster whose value lies within tol_cluster of lambda, if any.
  const EigenCluster* find_cluster(Complex lambda) const {
    const EigenCluster* best = nullptr;
    double best_d = tol_cluster;
    for (const auto& c : clusters) {
      double d = std::abs(c.value - lambda);
      for (std::size_t k : c.members) d = std::min(d, std::abs(eigenvalues[k] - lambda));
      if (d <= best_d) {
        best_d = d;
        best = &c;
      }
    }
    return best;
  }
};

namespace detail {

inline std::vector<std::vector<std::size_t>> cluster_indices(const std::vector<Complex>& ev, double tol) {
  const std::size_t n = ev.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(ev[i] - ev[j]) <= tol) parent[find(i)] = find(j);
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::ptrdiff_t> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::ptrdiff_t>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[r])].push_back(i);
  }
  return groups;
}

/// Number of singular values of n_k above tol_rank * scale.
inline std::size_t nilpotent_rank(const ComplexMatrix& n_k, double tol_rank, double scale) {
  if (n_k.empty()) return 0;
  const auto sv = svd(n_k).singular_values;
  return static_cast<std::size_t>(
      std::count_if(sv.begin(), sv.end(), [&](double s) { return s > tol_rank * scale; }));
}

/**
 * Jordan data of one cluster from the leading block of a reordered Schur
 * form. The block minus its diagonal is exactly nilpotent, so the kernel
 * dimensions of its powers give the geometric multiplicity and index.
 */
inline void fill_jordan_data(const SchurForm& base, EigenCluster& c, double tol_rank, double norm) {
  SchurForm s = base;
  move_to_front(s, c.members);
  const std::size_t a = c.members.size();
  ComplexMatrix nil = s.t.block(0, 0, a, a);
  for (std::size_t i = 0; i < a; ++i) nil(i, i) = Complex{};
  c.algebraic = static_cast<int>(a);
  // N^k is compared against (1 + ||M||) ||N||^(k-1): rounding noise in N is of order eps ||M||.
  const double nil_norm = norm2(nil);
  ComplexMatrix pw = nil;
  std::size_t prev_rank = a;  // rank of N^0
  int k = 1;
  for (;; ++k) {
    const std::size_t r =
        nilpotent_rank(pw, tol_rank, (1.0 + norm) * std::pow(std::max(nil_norm, 1e-300), k - 1));
    if (k == 1) c.geometric = static_cast<int>(a - r);
    if (r == prev_rank || r == 0) {
      c.index = r == 0 ? k : k - 1;
      break;
    }
    prev_rank = r;
    pw = pw * nil;
  }
  c.index = std::max(c.index, 1);
  c.geometric = std::max(c.geometric, 1);
}

}  // namespace detail

/**
 * @brief Eigenvalues, eigenvectors and per-cluster Jordan data.
 *
 * Eigenvalues within tol_cluster of one another (single linkage) form one
 * cluster. Eigenvectors come from back substitution on the triangular
 * Schur factor, with near-zero pivots perturbed as in inverse iteration.
 */
inline EigenData eig(const ComplexMatrix& m, std::optional<double> tol_cluster = std::nullopt,
                     double tol_rank = kDefaultRankTol) {
  require_square(m, "eig");
  const double norm = norm2(m);
  const double tol = tol_cluster.value_or(1e-7 * (1.0 + norm));
  if (tol <= 0.0) throw ParameterError("eig: tol_cluster must be positive");

  const SchurForm s = schur(m);
  const std::size_t n = m.rows();
  const ComplexMatrix& t = s.t;

  EigenData out;
  out.tol_cluster = tol;
  out.tol_rank = tol_rank;
  out.matrix_norm = norm;
  out.eigenvalues.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.eigenvalues[k] = t(k, k);

  const double small = std::max(detail::kEps * std::max(norm, 1e-300), std::numeric_limits<double>::min());
  out.right_eigenvectors = ComplexMatrix(n, n);
  out.left_eigenvectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex lambda = t(k, k);
    std::vector<Complex> y(n, Complex{});
    y[k] = 1.0;
    for (std::size_t j = k; j-- > 0;) {
      Complex acc{};
      for (std::size_t l = j + 1; l <= k; ++l) acc += t(j, l) * y[l];
      Complex d = t(j, j) - lambda;
      if (std::abs(d) < small) d = small;
      y[j] = -acc / d;
    }
    auto x = mat_vec(s.z, y);
    const double xn = vector_norm(x);
    for (std::size_t i = 0; i < n; ++i) out.right_eigenvectors(i, k) = x[i] / xn;

    // left: z^H T = lambda z^H, forward substitution on T^H
    std::vector<Complex> zl(n, Complex{});
    zl[k] = 1.0;
    for (std::size_t j = k + 1; j < n; ++j) {
      Complex acc{};
      for (std::size_t l = k; l < j; ++l) acc += std::conj(t(l, j)) * zl[l];
      Complex d = std::conj(t(j, j)) - std::conj(lambda);
      if (std::abs(d) < small) d = small;
      zl[j] = -acc / d;
    }
    auto w = mat_vec(s.z, zl);
    const double wn = vector_norm(w);
    for (std::size_t i = 0; i < n; ++i) out.left_eigenvectors(k, i) = std::conj(w[i]) / wn;
  }

  for (auto& members : detail::cluster_indices(out.eigenvalues, tol)) {
    EigenCluster c;
    Complex sum{};
    for (std::size_t k : members) sum += out.eigenvalues[k];
    c.value = sum / static_cast<double>(members.size());
    c.members = std::move(members);
    detail::fill_jordan_data(s, c, tol_rank, norm);
    out.clusters.push_back(std::move(c));
  }
  std::sort(out.clusters.begin(), out.clusters.end(), [](const EigenCluster& a, const EigenCluster& b) {
    if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
    return a.value.imag() > b.value.imag();
  });
  return out;
}

/**
 * @brief Index of lambda: smallest k with ker (lambda I - M)^k = ker (lambda I - M)^(k+1).
 *
 * Equals the pole order of the resolvent at lambda.
 */
inline int matrix_index(const ComplexMatrix& m, Complex lambda, double tol_rank = kDefaultRankTol,
                        std::optional<double> tol_cluster = std::nullopt) {
  const EigenData e = eig(m, tol_cluster, tol_rank);
  const EigenCluster* c = e.find_cluster(lambda);
  if (c == nullptr)
    throw NotSpectralValue("matrix_index: " + detail::describe(lambda) + " is not an eigenvalue");
  return c->index;
}

namespace detail {

template <class Scalar>
BasicMatrix<Scalar> expm_impl(const BasicMatrix<Scalar>& m) {
  using Real = typename Scalar::value_type;
  const std::size_t n = m.rows();
  const double nrm = norm1(m);
  if (nrm == 0.0) return BasicMatrix<Scalar>::identity(n);

  int squarings = 0;
  if (nrm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  if (squarings > 1100) {
    std::ostringstream os;
    os << "expm: norm " << nrm << " is outside the supported range; rescale the matrix or shorten the horizon";
    throw RangeError(os.str());
  }
  const BasicMatrix<Scalar> x = m * Scalar(std::ldexp(Real(1), -squarings));

  constexpr int q = 6;
  Real c = 1;
  BasicMatrix<Scalar> num = BasicMatrix<Scalar>::identity(n);
  BasicMatrix<Scalar> den = BasicMatrix<Scalar>::identity(n);
  BasicMatrix<Scalar> xk = BasicMatrix<Scalar>::identity(n);
  for (int k = 1; k <= q; ++k) {
    c *= Real(q - k + 1) / Real(k * (2 * q - k + 1));
    xk = xk * x;
    num += xk * Scalar(c);
    den += xk * Scalar((k % 2 == 0) ? c : -c);
  }
  BasicMatrix<Scalar> f = solve(den, num);
  for (int k = 0; k < squarings; ++k) {
    f = f * f;
    if (!all_finite(f)) {
      std::ostringstream os;
      os << "expm: overflow after " << (k + 1) << " of " << squarings << " squarings (1-norm " << nrm
         << "); rescale the matrix or shorten the horizon";
      throw RangeError(os.str());
    }
  }
  if (!all_finite(f)) throw RangeError("expm: result overflowed; rescale the matrix or shorten the horizon");
  return f;
}

}  // namespace detail

/**
 * @brief Matrix exponential by scaling and squaring with a [6/6] Pade approximant.
 *
 * The argument is scaled by 2^-s so that its 1-norm is at most 1/2, where the
 * [6/6] approximant's relative backward error is below 4e-16. Throws
 * RangeError when the result (or an intermediate square) overflows.
 */
inline ComplexMatrix expm(const ComplexMatrix& m) {
  require_square(m, "expm");
  if (!all_finite(m)) throw RangeError("expm: matrix has non-finite entries");
  return detail::expm_impl(m);
}

/**
 * @brief expm evaluated in extended precision and rounded back to double.
 *
 * Squaring amplifies rounding roughly by ||M|| times machine epsilon, which
 * matters for the very long horizons of Cesaro means.
 */
inline ComplexMatrix expm_extended(const ComplexMatrix& m) {
  require_square(m, "expm_extended");
  if (!all_finite(m)) throw RangeError("expm_extended: matrix has non-finite entries");
  using Wide = std::complex<long double>;
  const std::size_t n = m.rows();
  BasicMatrix<Wide> w(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w(i, j) = Wide(m(i, j).real(), m(i, j).imag());
  const auto e = detail::expm_impl(w);
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Complex z(static_cast<double>(e(i, j).real()), static_cast<double>(e(i, j).imag()));
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw RangeError("expm_extended: result overflowed; rescale the matrix or shorten the horizon");
      out(i, j) = z;
    }
  return out;
}

/**
 * @brief Resolvent (zI - M)^-1.
 *
 * Throws SpectralCollision when z lies within tol_cluster of an eigenvalue.
 */
inline ComplexMatrix resolvent(const ComplexMatrix& m, Complex z,
                               std::optional<double> tol_cluster = std::nullopt) {
  require_square(m, "resolvent");
  const double tol = tol_cluster.value_or(default_cluster_tol(m));
  const SchurForm s = schur(m);
  for (std::size_t k = 0; k < m.rows(); ++k) {
    if (std::abs(s.t(k, k) - z) <= tol)
      throw SpectralCollision("resolvent: " + detail::describe(z) + " collides with eigenvalue " +
                                  detail::describe(s.t(k, k)),
                              s.t(k, k));
  }
  LuDecomposition<Complex> lu(shifted(-m, -z));
  if (lu.singular())
    throw SpectralCollision("resolvent: singular system at " + detail::describe(z), z);
  return lu.inverse();
}

/// Resolvent without the spectrum check, for callers that already verified the distance.
inline ComplexMatrix resolvent_unchecked(const ComplexMatrix& m, Complex z) {
  LuDecomposition<Complex> lu(shifted(-m, -z));
  if (lu.singular()) throw SpectralCollision("resolvent: singular system at " + detail::describe(z), z);
  return lu.inverse();
}

/**
 * @brief (zI - M)^-1 factored and inverted in extended precision, rounded back to double.
 *
 * Near-singular shifts lose roughly log10(cond) digits; the extra precision
 * keeps the rounded result accurate to double working precision.
 */
inline ComplexMatrix resolvent_extended(const ComplexMatrix& m, Complex z) {
  using Wide = std::complex<long double>;
  const std::size_t n = m.rows();
  BasicMatrix<Wide> a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = -Wide(m(i, j).real(), m(i, j).imag());
  for (std::size_t i = 0; i < n; ++i) a(i, i) += Wide(z.real(), z.imag());
  LuDecomposition<Wide> lu(std::move(a));
  if (lu.singular()) throw SpectralCollision("resolvent: singular system at " + detail::describe(z), z);
  const auto inv = lu.inverse();
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out(i, j) = Complex(static_cast<double>(inv(i, j).real()), static_cast<double>(inv(i, j).imag()));
  return out;
}

}  // namespace evpos

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "evpos/error.hpp"

namespace evpos {

using Complex = std::complex<double>;

/**
 * @brief Dense row-major matrix over a real or complex scalar.
 *
 * The analysis code works with ComplexMatrix; other scalars are used
 * where extended precision is needed (see resolvent_extended).
 */
template <class Scalar>
class BasicMatrix {
 public:
  using value_type = Scalar;

  BasicMatrix() = default;

  BasicMatrix(std::size_t rows, std::size_t cols, Scalar fill = Scalar{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  BasicMatrix(std::initializer_list<std::initializer_list<Scalar>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionError("ragged initializer list");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static BasicMatrix identity(std::size_t n) {
    BasicMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Scalar(1);
    return m;
  }

  static BasicMatrix zero(std::size_t n) { return BasicMatrix(n, n); }

  static BasicMatrix diagonal(std::span<const Scalar> d) {
    BasicMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static BasicMatrix diagonal(std::initializer_list<Scalar> d) {
    return diagonal(std::span<const Scalar>(d.begin(), d.size()));
  }

  /// Column vector from a span of entries.
  static BasicMatrix column(std::span<const Scalar> v) {
    BasicMatrix m(v.size(), 1);
    std::copy(v.begin(), v.end(), m.data_.begin());
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  Scalar& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Scalar& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const Scalar> data() const noexcept { return data_; }
  std::span<Scalar> data() noexcept { return data_; }

  std::vector<Scalar> col(std::size_t j) const {
    std::vector<Scalar> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  std::vector<Scalar> row(std::size_t i) const {
    return {data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
            data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
  }

  void set_col(std::size_t j, std::span<const Scalar> c) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
  }

  BasicMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    BasicMatrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

  void set_block(std::size_t r0, std::size_t c0, const BasicMatrix& b) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }

  BasicMatrix transpose() const {
    BasicMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  BasicMatrix adjoint() const {
    BasicMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = conj_of((*this)(i, j));
    return t;
  }

  BasicMatrix& operator+=(const BasicMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }

  BasicMatrix& operator-=(const BasicMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }

  BasicMatrix& operator*=(Scalar s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  BasicMatrix& operator/=(Scalar s) {
    for (auto& x : data_) x /= s;
    return *this;
  }

  friend BasicMatrix operator+(BasicMatrix a, const BasicMatrix& b) { return a += b; }
  friend BasicMatrix operator-(BasicMatrix a, const BasicMatrix& b) { return a -= b; }
  friend BasicMatrix operator*(BasicMatrix a, Scalar s) { return a *= s; }
  friend BasicMatrix operator*(Scalar s, BasicMatrix a) { return a *= s; }
  friend BasicMatrix operator/(BasicMatrix a, Scalar s) { return a /= s; }
  friend BasicMatrix operator-(BasicMatrix a) { return a *= Scalar(-1); }

  friend BasicMatrix operator*(const BasicMatrix& a, const BasicMatrix& b) {
    if (a.cols_ != b.rows_)
      throw DimensionError("matrix product of " + a.shape_string() + " and " + b.shape_string());
    BasicMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Scalar aik = a(i, k);
        if (aik == Scalar{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend bool operator==(const BasicMatrix& a, const BasicMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  std::string shape_string() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

 private:
  static Scalar conj_of(const Scalar& x) {
    if constexpr (requires { std::conj(x).real(); }) {
      return std::conj(x);
    } else {
      return x;
    }
  }

  void require_same_shape(const BasicMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw DimensionError("shape mismatch " + shape_string() + " vs " + o.shape_string());
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> data_;
};

using ComplexMatrix = BasicMatrix<Complex>;
using ComplexVector = std::vector<Complex>;

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (m.empty()) throw DimensionError(std::string(what) + ": empty matrix");
  if (!m.is_square())
    throw DimensionError(std::string(what) + ": expected a square matrix, got " + m.shape_string());
}

template <class Scalar>
bool all_finite(const BasicMatrix<Scalar>& m) {
  return std::all_of(m.data().begin(), m.data().end(), [](const Scalar& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

inline double frobenius_norm(const ComplexMatrix& m) {
  double s = 0.0;
  for (const auto& z : m.data()) s += std::norm(z);
  return std::sqrt(s);
}

/// Maximum absolute column sum.
template <class Scalar>
double norm1(const BasicMatrix<Scalar>& m) {
  double best = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) s += static_cast<double>(std::abs(m(i, j)));
    best = std::max(best, s);
  }
  return best;
}

inline double max_abs(const ComplexMatrix& m) {
  double best = 0.0;
  for (const auto& z : m.data()) best = std::max(best, std::abs(z));
  return best;
}

inline Complex trace(const ComplexMatrix& m) {
  Complex t{};
  for (std::size_t i = 0; i < std::min(m.rows(), m.cols()); ++i) t += m(i, i);
  return t;
}

inline ComplexMatrix entrywise_abs(const ComplexMatrix& m) {
  ComplexMatrix r(m.rows(), m.cols());
  for (std::size_t k = 0; k < m.size(); ++k) r.data()[k] = std::abs(m.data()[k]);
  return r;
}

inline ComplexVector mat_vec(const ComplexMatrix& m, std::span<const Complex> v) {
  if (m.cols() != v.size()) throw DimensionError("matrix-vector size mismatch");
  ComplexVector out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Complex s{};
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

inline double vector_norm(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

inline ComplexMatrix shifted(const ComplexMatrix& m, Complex shift) {
  ComplexMatrix r = m;
  for (std::size_t i = 0; i < r.rows(); ++i) r(i, i) -= shift;
  return r;
}

inline ComplexMatrix power(const ComplexMatrix& m, unsigned k) {
  ComplexMatrix result = ComplexMatrix::identity(m.rows());
  ComplexMatrix base = m;
  while (k > 0) {
    if (k & 1u) result = result * base;
    k >>= 1u;
    if (k > 0) base = base * base;
  }
  return result;
}

/**
 * @brief LU factorization with partial pivoting, P A = L U.
 *
 * Works for any field scalar; the complex long double instantiation backs
 * the extended-precision resolvent.
 */
template <class Scalar>
class LuDecomposition {
 public:
  explicit LuDecomposition(BasicMatrix<Scalar> a) : lu_(std::move(a)), perm_(lu_.rows()) {
    if (!lu_.is_square()) throw DimensionError("LU of non-square matrix " + lu_.shape_string());
    const std::size_t n = lu_.rows();
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      auto best = std::abs(lu_(k, k));
      for (std::size_t i = k + 1; i < n; ++i) {
        const auto v = std::abs(lu_(i, k));
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (best == decltype(best){0}) {
        singular_ = true;
        continue;
      }
      if (p != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
        std::swap(perm_[k], perm_[p]);
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        const Scalar f = lu_(i, k) / lu_(k, k);
        lu_(i, k) = f;
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
      }
    }
  }

  bool singular() const noexcept { return singular_; }

  BasicMatrix<Scalar> solve(const BasicMatrix<Scalar>& b) const {
    if (singular_) throw NumericalFailure("LU solve with an exactly singular matrix");
    const std::size_t n = lu_.rows();
    if (b.rows() != n) throw DimensionError("LU solve right-hand side has wrong row count");
    BasicMatrix<Scalar> x(n, b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) {
      std::vector<Scalar> y(n);
      for (std::size_t i = 0; i < n; ++i) {
        Scalar s = b(perm_[i], c);
        for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * y[j];
        y[i] = s;
      }
      for (std::size_t ii = n; ii-- > 0;) {
        Scalar s = y[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= lu_(ii, j) * x(j, c);
        x(ii, c) = s / lu_(ii, ii);
      }
    }
    return x;
  }

  BasicMatrix<Scalar> inverse() const { return solve(BasicMatrix<Scalar>::identity(lu_.rows())); }

 private:
  BasicMatrix<Scalar> lu_;
  std::vector<std::size_t> perm_;
  bool singular_ = false;
};

template <class Scalar>
BasicMatrix<Scalar> solve(const BasicMatrix<Scalar>& a, const BasicMatrix<Scalar>& b) {
  return LuDecomposition<Scalar>(a).solve(b);
}

template <class Scalar>
BasicMatrix<Scalar> inverse(const BasicMatrix<Scalar>& a) {
  return LuDecomposition<Scalar>(a).inverse();
}

/// Singular value decomposition A = U diag(s) V^H with s sorted descending.
struct Svd {
  std::vector<double> singular_values;
  ComplexMatrix u;
  ComplexMatrix v;
};

/**
 * @brief One-sided (Hestenes) Jacobi SVD of a square or tall complex matrix.
 *
 * Columns of a working copy of A are rotated pairwise until mutually
 * orthogonal; the column norms are then the singular values.
 */
inline Svd svd(const ComplexMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) {
    Svd t = svd(a.adjoint());
    return {std::move(t.singular_values), std::move(t.v), std::move(t.u)};
  }
  if (!all_finite(a)) throw NumericalFailure("svd: matrix has non-finite entries");

  // Work on A / max|a_ij| so that squared column norms cannot underflow.
  const double scale = max_abs(a);
  ComplexMatrix w = scale > 0.0 ? a / Complex(scale) : a;
  ComplexMatrix v = ComplexMatrix::identity(n);
  constexpr double eps = 2.220446049250313e-16;
  constexpr double tiny = std::numeric_limits<double>::min();
  constexpr int max_sweeps = 80;

  bool converged = n < 2;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0;
        Complex gamma{};
        for (std::size_t i = 0; i < m; ++i) {
          alpha += std::norm(w(i, p));
          beta += std::norm(w(i, q));
          gamma += std::conj(w(i, p)) * w(i, q);
        }
        const double g = std::abs(gamma);
        if (g == 0.0 || alpha < tiny || beta < tiny || g <= eps * std::sqrt(alpha) * std::sqrt(beta)) continue;
        converged = false;

        const Complex phase = gamma / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const Complex rot = std::conj(phase);
        for (std::size_t i = 0; i < m; ++i) {
          const Complex xp = w(i, p);
          const Complex xq = w(i, q) * rot;
          w(i, p) = c * xp - s * xq;
          w(i, q) = s * xp + c * xq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const Complex xp = v(i, p);
          const Complex xq = v(i, q) * rot;
          v(i, p) = c * xp - s * xq;
          v(i, q) = s * xp + c * xq;
        }
      }
    }
  }
  if (!converged)
    throw NumericalFailure("svd: Jacobi sweeps did not converge (Frobenius norm " +
                           std::to_string(frobenius_norm(a)) + ", " + std::to_string(max_sweeps) +
                           " sweeps)");

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += std::norm(w(i, j));
    sigma[j] = std::sqrt(s) * scale;
  }
  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < n; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  Svd out;
  out.singular_values.resize(n);
  out.u = ComplexMatrix(m, n);
  out.v = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.singular_values[k] = sigma[j];
    for (std::size_t i = 0; i < n; ++i) out.v(i, k) = v(i, j);
    if (sigma[j] > 0.0) {
      for (std::size_t i = 0; i < m; ++i) out.u(i, k) = w(i, j) * (scale / sigma[j]);
    }
  }
  return out;
}

/// Spectral (operator 2-) norm.
inline double norm2(const ComplexMatrix& m) {
  if (m.empty()) return 0.0;
  return svd(m).singular_values.front();
}

}  // namespace evpos

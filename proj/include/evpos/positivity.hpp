#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evpos/error.hpp"
#include "evpos/linalg.hpp"
#include "evpos/matrix.hpp"

namespace evpos {

enum class PositivityKind { power, semigroup };

enum class PositivityVerdict {
  positive_from_start,
  eventually_positive,
  not_detected,
  certified_strictly_eventually_positive,
};

inline const char* to_string(PositivityKind k) { return k == PositivityKind::power ? "power" : "semigroup"; }

inline const char* to_string(PositivityVerdict v) {
  switch (v) {
    case PositivityVerdict::positive_from_start: return "positive-from-start";
    case PositivityVerdict::eventually_positive: return "eventually-positive";
    case PositivityVerdict::not_detected: return "not-detected";
    case PositivityVerdict::certified_strictly_eventually_positive:
      return "certified-strictly-eventually-positive";
  }
  return "unknown";
}

/// Perron-Frobenius data: a real, simple, strictly dominant eigenvalue with
/// entrywise strictly positive right and left eigenvectors.
struct SpectralCertificate {
  Complex dominant_eigenvalue;
  double right_min = 0.0;
  double left_min = 0.0;
  double gap = 0.0;  // to the second largest modulus (power) or real part (semigroup)
  ComplexVector right_vector;
  ComplexVector left_vector;
};

struct PositivityCertificate {
  PositivityKind kind = PositivityKind::power;
  PositivityVerdict verdict = PositivityVerdict::not_detected;
  std::optional<double> witness;  // n0 (power) or t0 (semigroup)
  std::optional<SpectralCertificate> spectral_certificate;
  double horizon = 0.0;
  double tol_pos = 0.0;  // slack applied to max-entry normalized iterates; negative means default

  bool detected() const noexcept { return verdict != PositivityVerdict::not_detected; }
};

/// Default slack 1e-9 (1 + ||M||_F).
inline double default_positivity_tol(const ComplexMatrix& m) { return 1e-9 * (1.0 + frobenius_norm(m)); }

/// Every entry has |Im| <= tol_pos and Re >= -tol_pos.
inline bool is_positive_matrix(const ComplexMatrix& m, double tol_pos) {
  if (tol_pos < 0.0) throw ParameterError("is_positive_matrix: tol_pos must be nonnegative");
  return std::all_of(m.data().begin(), m.data().end(), [&](const Complex& z) {
    return std::abs(z.imag()) <= tol_pos && z.real() >= -tol_pos;
  });
}

/// Multiplies v by the unit scalar that makes its largest-modulus entry real and positive.
inline ComplexVector normalize_phase(std::span<const Complex> v) {
  ComplexVector out(v.begin(), v.end());
  std::size_t k = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[k]) * (1.0 + 1e-12)) k = i;
  if (v.empty() || std::abs(v[k]) == 0.0) return out;
  const Complex phase = std::conj(v[k]) / std::abs(v[k]);
  for (auto& z : out) z *= phase;
  return out;
}

/// Smallest real part after phase normalization, or -inf when some imaginary part exceeds tol.
inline double strictly_positive_margin(std::span<const Complex> v, double tol) {
  const ComplexVector u = normalize_phase(v);
  double min_re = std::numeric_limits<double>::infinity();
  for (const auto& z : u) {
    if (std::abs(z.imag()) > tol) return -std::numeric_limits<double>::infinity();
    min_re = std::min(min_re, z.real());
  }
  return min_re;
}

/**
 * @brief Perron-Frobenius certificate for eventual strict positivity.
 *
 * Power mode requires the spectral radius to be a simple, real, strictly
 * dominant (in modulus) eigenvalue; semigroup mode the same for the spectral
 * bound with "real part" in place of "modulus". Both eigenvectors must be
 * entrywise strictly positive after phase normalization. Failure is not a
 * refutation of eventual positivity.
 */
inline std::optional<SpectralCertificate> perron_frobenius_certificate(const ComplexMatrix& m,
                                                                       PositivityKind mode,
                                                                       double tol = 1e-8) {
  require_square(m, "perron_frobenius_certificate");
  const EigenData e = eig(m);
  auto key = [&](Complex z) { return mode == PositivityKind::power ? std::abs(z) : z.real(); };

  const EigenCluster* dominant = nullptr;
  for (const auto& c : e.clusters)
    if (dominant == nullptr || key(c.value) > key(dominant->value)) dominant = &c;
  if (dominant == nullptr || dominant->algebraic != 1) return std::nullopt;

  const Complex lambda = e.eigenvalues[dominant->members.front()];
  if (std::abs(lambda.imag()) > tol * (1.0 + std::abs(lambda))) return std::nullopt;
  if (mode == PositivityKind::power && lambda.real() <= 0.0) return std::nullopt;

  double second = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < e.eigenvalues.size(); ++k)
    if (k != dominant->members.front()) second = std::max(second, key(e.eigenvalues[k]));
  const double gap = key(lambda) - second;
  if (!(gap > tol * (1.0 + std::abs(lambda)))) return std::nullopt;

  const std::size_t k = dominant->members.front();
  const ComplexVector right = e.right_eigenvectors.col(k);
  const ComplexVector left = e.left_eigenvectors.row(k);
  const double right_min = strictly_positive_margin(right, tol);
  const double left_min = strictly_positive_margin(left, tol);
  if (!(right_min > tol) || !(left_min > tol)) return std::nullopt;

  SpectralCertificate cert;
  cert.dominant_eigenvalue = Complex(lambda.real(), 0.0);
  cert.right_min = right_min;
  cert.left_min = left_min;
  cert.gap = gap;
  cert.right_vector = normalize_phase(right);
  cert.left_vector = normalize_phase(left);
  return cert;
}

namespace detail {

inline bool normalized_positive(const ComplexMatrix& x, std::optional<double> tol_pos) {
  const double scale = max_abs(x);
  if (scale == 0.0) return true;
  const ComplexMatrix y = x / Complex(scale);
  return is_positive_matrix(y, tol_pos.value_or(default_positivity_tol(y)));
}

// Tail rule: a witness must leave at least the final quarter of the horizon positive.
inline bool witness_in_range(double witness, double horizon) { return witness <= 0.75 * horizon; }

inline PositivityVerdict combine(const std::optional<double>& witness, bool certified) {
  if (witness && *witness == 0.0) return PositivityVerdict::positive_from_start;
  if (witness && certified) return PositivityVerdict::certified_strictly_eventually_positive;
  if (witness) return PositivityVerdict::eventually_positive;
  return PositivityVerdict::not_detected;
}

inline std::optional<double> scan_powers(const ComplexMatrix& t, int n_max, std::optional<double> tol_pos) {
  const EigenData e = eig(t);
  double radius = 0.0;
  for (const auto& z : e.eigenvalues) radius = std::max(radius, std::abs(z));
  // positivity is invariant under positive scaling; iterate T / r(T)
  const ComplexMatrix base = radius > 0.0 ? t / Complex(radius) : t;
  ComplexMatrix x = ComplexMatrix::identity(t.rows());
  int last_bad = -1;
  for (int k = 1; k <= n_max; ++k) {
    x = x * base;
    if (!all_finite(x))
      throw RangeError("eventual_positivity_of_powers: powers overflow at n = " + std::to_string(k) +
                       "; rescale T by its spectral radius");
    const double s = max_abs(x);
    if (s > 0.0) x /= Complex(s);  // keep iterates bounded, sign pattern is unchanged
    if (!normalized_positive(x, tol_pos)) last_bad = k;
  }
  const double n0 = static_cast<double>(last_bad + 1);
  if (witness_in_range(n0, n_max)) return n0;
  return std::nullopt;
}

inline std::vector<double> positivity_grid(double t_max, int steps) {
  std::vector<double> grid;
  const double h = t_max / static_cast<double>(steps - 1);
  for (int i = 0; i < steps; ++i) grid.push_back(h * i);
  for (int j = 1; j <= 10; ++j) grid.push_back(h * std::ldexp(1.0, -j));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

inline std::optional<double> scan_semigroup(const ComplexMatrix& a, double spectral_bound, double t_max,
                                            int steps, std::optional<double> tol_pos) {
  // e^{tA} and e^{t(A - sI)} differ by the positive factor e^{st}
  const ComplexMatrix rescaled = shifted(a, spectral_bound);
  const auto grid = positivity_grid(t_max, steps);
  std::ptrdiff_t last_bad = -1;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const ComplexMatrix x = expm(rescaled * Complex(grid[i]));
    if (!normalized_positive(x, tol_pos)) last_bad = static_cast<std::ptrdiff_t>(i);
  }
  if (last_bad + 1 >= static_cast<std::ptrdiff_t>(grid.size())) return std::nullopt;
  const double t0 = last_bad < 0 ? 0.0 : grid[static_cast<std::size_t>(last_bad + 1)];
  if (witness_in_range(t0, t_max)) return t0;
  return std::nullopt;
}

}  // namespace detail

/**
 * @brief Least n0 <= n_max with T^n positive for every n in [n0, n_max].
 *
 * Positivity is tested on T^n / max|T^n| (the sign pattern is scale free).
 * The simulation witness must leave at least the last quarter of the
 * horizon positive. When the spectral certificate holds but the witness is
 * missing, the horizon is doubled up to four times.
 */
inline PositivityCertificate eventual_positivity_of_powers(const ComplexMatrix& t, int n_max = 200,
                                                           std::optional<double> tol_pos = std::nullopt) {
  require_square(t, "eventual_positivity_of_powers");
  if (n_max < 1) throw ParameterError("eventual_positivity_of_powers: n_max must be at least 1");

  PositivityCertificate out;
  out.kind = PositivityKind::power;
  out.tol_pos = tol_pos.value_or(-1.0);
  out.spectral_certificate = perron_frobenius_certificate(t, PositivityKind::power);
  int horizon = n_max;
  std::optional<double> witness = detail::scan_powers(t, horizon, tol_pos);
  for (int attempt = 0; !witness && out.spectral_certificate && attempt < 4; ++attempt) {
    horizon *= 2;
    witness = detail::scan_powers(t, horizon, tol_pos);
  }
  out.horizon = horizon;
  out.witness = witness;
  out.verdict = detail::combine(witness, out.spectral_certificate.has_value());
  return out;
}

/**
 * @brief Least sampled t0 with e^{tA} positive at every later grid point.
 *
 * The grid is uniform with `steps` points on [0, t_max] plus ten geometric
 * refinements below the first step. Sampling uses e^{t(A - s(A) I)}, which has
 * the same sign pattern as e^{tA}.
 */
inline PositivityCertificate eventual_positivity_of_semigroup(const ComplexMatrix& a, double t_max = 50.0,
                                                              int steps = 256,
                                                              std::optional<double> tol_pos = std::nullopt) {
  require_square(a, "eventual_positivity_of_semigroup");
  if (!(t_max > 0.0)) throw ParameterError("eventual_positivity_of_semigroup: t_max must be positive");
  if (steps < 2) throw ParameterError("eventual_positivity_of_semigroup: steps must be at least 2");

  const EigenData e = eig(a);
  double s = -std::numeric_limits<double>::infinity();
  for (const auto& z : e.eigenvalues) s = std::max(s, z.real());

  PositivityCertificate out;
  out.kind = PositivityKind::semigroup;
  out.tol_pos = tol_pos.value_or(-1.0);
  out.spectral_certificate = perron_frobenius_certificate(a, PositivityKind::semigroup);
  double horizon = t_max;
  std::optional<double> witness = detail::scan_semigroup(a, s, horizon, steps, tol_pos);
  for (int attempt = 0; !witness && out.spectral_certificate && attempt < 4; ++attempt) {
    horizon *= 2.0;
    witness = detail::scan_semigroup(a, s, horizon, steps, tol_pos);
  }
  out.horizon = horizon;
  out.witness = witness;
  out.verdict = detail::combine(witness, out.spectral_certificate.has_value());
  return out;
}

}  // namespace evpos

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "evpos/error.hpp"
#include "evpos/linalg.hpp"
#include "evpos/matrix.hpp"
#include "evpos/spectral.hpp"

namespace evpos {

inline constexpr double kDefaultConvergenceTol = 1e-7;
inline constexpr double kDefaultHorizon = 50.0;

/// Number of horizon doublings tried before the two pathways are declared inconsistent.
inline constexpr int kMaxHorizonDoublings = 5;

inline double spectral_bound(const EigenData& e) {
  double s = -std::numeric_limits<double>::infinity();
  for (const auto& z : e.eigenvalues) s = std::max(s, z.real());
  return s;
}

inline ComplexMatrix semigroup_at(const ComplexMatrix& a, double t) {
  require_square(a, "semigroup_at");
  if (!(t >= 0.0)) throw ParameterError("semigroup_at: t must be nonnegative");
  return expm(a * Complex(t));
}

/// e^{t(A - s(A) I)}.
inline ComplexMatrix rescaled_semigroup_at(const ComplexMatrix& a, double t) {
  require_square(a, "rescaled_semigroup_at");
  if (!(t >= 0.0)) throw ParameterError("rescaled_semigroup_at: t must be nonnegative");
  const double s = spectral_bound(eig(a));
  return expm(shifted(a, s) * Complex(t));
}

/**
 * @brief Cesaro mean (1/t) \int_0^t e^{sA} ds.
 *
 * The integral is the top-right block of exp(t [[A, I], [0, 0]]). The
 * extended flag evaluates that exponential in long double, which long
 * horizons need.
 */
inline ComplexMatrix cesaro_mean(const ComplexMatrix& a, double t, bool extended = false) {
  require_square(a, "cesaro_mean");
  if (!(t > 0.0)) throw ParameterError("cesaro_mean: t must be positive");
  const std::size_t n = a.rows();
  ComplexMatrix big(2 * n, 2 * n);
  big.set_block(0, 0, a * Complex(t));
  for (std::size_t i = 0; i < n; ++i) big(i, n + i) = t;
  const ComplexMatrix e = extended ? expm_extended(big) : expm(big);
  return e.block(0, n, n, n) / Complex(t);
}

namespace detail {

/// 64 geometric points from t_max/8 to t_max; the ratio 8^(1/63) is irrational.
inline std::vector<double> convergence_grid(double t_max) {
  std::vector<double> g(64);
  for (int i = 0; i < 64; ++i) g[static_cast<std::size_t>(i)] = t_max / 8.0 * std::pow(8.0, i / 63.0);
  g.back() = t_max;
  return g;
}

inline constexpr std::size_t kTailPoints = 16;

inline double pairwise_defect(const std::vector<ComplexMatrix>& xs) {
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) d = std::max(d, norm2(xs[i] - xs[j]));
  return d;
}

struct NumericTail {
  bool converges = false;
  double defect = std::numeric_limits<double>::infinity();
  std::optional<ComplexMatrix> last;
  bool overflow = false;
};

template <class Sampler>
NumericTail sample_tail(const std::vector<double>& grid, double tol, Sampler&& sample) {
  NumericTail out;
  std::vector<ComplexMatrix> xs;
  try {
    for (std::size_t i = grid.size() - kTailPoints; i < grid.size(); ++i) xs.push_back(sample(grid[i]));
  } catch (const RangeError&) {
    out.overflow = true;
    return out;
  }
  out.defect = pairwise_defect(xs);
  out.converges = out.defect < tol;
  out.last = xs.back();
  return out;
}

/// Spectral facts shared by the boundedness and convergence decisions.
struct AxisFacts {
  double s = 0.0;
  bool bounded = false;
  bool axis_only_zero = false;  // every eigenvalue with |Re| <= tol is 0
  std::optional<int> zero_index;
  std::vector<Complex> axis;
  std::vector<Complex> peripheral;
  std::optional<int> pole_order_at_bound;
};

inline AxisFacts axis_facts(const EigenData& e, double tol) {
  AxisFacts f;
  f.s = spectral_bound(e);
  bool nonneg_semisimple = true;
  f.axis_only_zero = true;
  for (const auto& c : e.clusters) {
    if (c.value.real() >= -tol && c.index > 1) nonneg_semisimple = false;
    if (std::abs(c.value.real()) <= tol) {
      f.axis.push_back(c.value);
      if (std::abs(c.value) > tol) f.axis_only_zero = false;
    }
    if (std::abs(c.value) <= tol) f.zero_index = c.index;
    if (c.value.real() >= f.s - tol) f.peripheral.push_back(c.value);
    if (std::abs(c.value.real() - f.s) <= tol &&
        (!f.pole_order_at_bound || std::abs(c.value.imag()) < tol))
      f.pole_order_at_bound = c.index;
  }
  f.bounded = f.s < -tol || (f.s <= tol && nonneg_semisimple);
  return f;
}

/// Spectral limit of e^{tA} or of the Cesaro means: projection at 0, or zero.
inline ComplexMatrix zero_projection_or_zero(const ComplexMatrix& a, const AxisFacts& f) {
  if (f.zero_index) return spectral_projection_algebraic(a, Complex{}).projection;
  return ComplexMatrix(a.rows(), a.cols());
}

}  // namespace detail

struct BoundednessResult {
  bool bounded = false;
  std::string method = "spectral";  // the verdict is the spectral one; sampling cross-checks it
  double bound_estimate = 0.0;      // max sampled ||e^{tA}||
  bool sampled_bounded = false;
  double horizon = 0.0;
};

namespace detail {

inline std::vector<double> boundedness_grid(double t_max) {
  std::vector<double> g;
  for (int i = 0; i < 16; ++i) g.push_back(t_max / 8.0 * i / 16.0);
  for (double t : convergence_grid(t_max)) g.push_back(t);
  return g;
}

inline std::pair<bool, double> sampled_boundedness(const ComplexMatrix& a, double t_max, double tol) {
  const auto grid = boundedness_grid(t_max);
  double head = 0.0, tail = 0.0;
  try {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double nrm = norm2(expm(a * Complex(grid[i])));
      if (!std::isfinite(nrm)) return {false, std::numeric_limits<double>::infinity()};
      double& slot = i + kTailPoints < grid.size() ? head : tail;
      slot = std::max(slot, nrm);
    }
  } catch (const RangeError&) {
    return {false, std::numeric_limits<double>::infinity()};
  }
  return {tail <= (1.0 + 1e-6) * head + tol, std::max(head, tail)};
}

}  // namespace detail

/**
 * @brief Boundedness of t -> e^{tA}.
 *
 * Spectral rule (exact for matrices): bounded iff s(A) < -tol, or
 * |s(A)| <= tol and every eigenvalue with Re >= -tol is semisimple. A
 * sampled sup-norm test (tail maximum against head maximum) cross-checks it;
 * the horizon is doubled while the two disagree.
 */
inline BoundednessResult is_bounded(const ComplexMatrix& a, double tol = kDefaultConvergenceTol,
                                    double t_max = kDefaultHorizon, bool cross_check = true) {
  require_square(a, "is_bounded");
  const detail::AxisFacts f = detail::axis_facts(eig(a), tol);
  BoundednessResult out;
  out.bounded = f.bounded;
  double horizon = t_max;
  auto sampled = detail::sampled_boundedness(a, horizon, tol);
  for (int k = 0; sampled.first != f.bounded && k < kMaxHorizonDoublings; ++k) {
    horizon *= 2.0;
    sampled = detail::sampled_boundedness(a, horizon, tol);
  }
  out.sampled_bounded = sampled.first;
  out.bound_estimate = sampled.second;
  out.horizon = horizon;
  if (cross_check && sampled.first != f.bounded)
    throw InconsistencyError(std::string("is_bounded: spectral verdict ") + (f.bounded ? "bounded" : "unbounded") +
                             " disagrees with sampling up to t = " + std::to_string(horizon) +
                             " (check the tolerance)");
  return out;
}

enum class ConvergenceMode { strong, uniform, balancing, mean_ergodic };

inline const char* to_string(ConvergenceMode m) {
  switch (m) {
    case ConvergenceMode::strong: return "strong";
    case ConvergenceMode::uniform: return "uniform";
    case ConvergenceMode::balancing: return "balancing";
    case ConvergenceMode::mean_ergodic: return "mean-ergodic";
  }
  return "unknown";
}

/// Which spectral conditions held, and what each pathway concluded.
struct ConvergenceCertificate {
  bool bounded = false;
  double spectral_bound = 0.0;
  std::optional<int> pole_order_at_bound;
  std::vector<Complex> peripheral;
  std::vector<Complex> axis_spectrum;  // eigenvalues on iR (of the shifted generator for balancing)
  bool axis_only_zero = false;
  bool spectral_converges = false;
  bool numeric_converges = false;
  double horizon = 0.0;
};

struct ConvergenceVerdict {
  ConvergenceMode mode = ConvergenceMode::strong;
  bool converges = false;
  std::optional<ComplexMatrix> limit;
  double tail_defect = 0.0;
  ConvergenceCertificate certificate;
  std::optional<std::size_t> limit_rank;  // balancing only
  std::vector<std::string> notes;
};

namespace detail {

inline void check_limit_agreement(const ComplexMatrix& numeric, const ComplexMatrix& spectral, double tol,
                                  const char* what) {
  const double gap = norm2(numeric - spectral);
  if (gap > 10.0 * tol * (1.0 + norm2(spectral)))
    throw InconsistencyError(std::string(what) + ": numeric limit differs from the spectral limit by " +
                             std::to_string(gap));
}

inline ConvergenceVerdict strong_verdict(const ComplexMatrix& a, double t_max, double tol, bool cross_check,
                                         ConvergenceMode mode) {
  const EigenData e = eig(a);
  const AxisFacts f = axis_facts(e, tol);
  ConvergenceVerdict v;
  v.mode = mode;
  auto& c = v.certificate;
  c.bounded = f.bounded;
  c.spectral_bound = f.s;
  c.pole_order_at_bound = f.pole_order_at_bound;
  c.peripheral = f.peripheral;
  c.axis_spectrum = f.axis;
  c.axis_only_zero = f.axis_only_zero;
  c.spectral_converges = f.bounded && f.axis_only_zero;

  double horizon = t_max;
  auto sample = [&](double t) { return expm(a * Complex(t)); };
  NumericTail tail = sample_tail(convergence_grid(horizon), tol, sample);
  for (int k = 0; tail.converges != c.spectral_converges && k < kMaxHorizonDoublings; ++k) {
    horizon *= 2.0;
    tail = sample_tail(convergence_grid(horizon), tol, sample);
  }
  c.horizon = horizon;
  c.numeric_converges = tail.converges;
  v.tail_defect = tail.defect;
  if (tail.overflow) v.notes.push_back("semigroup overflowed on the tail grid; treated as divergent");

  if (cross_check && tail.converges != c.spectral_converges)
    throw InconsistencyError(std::string("convergence: numeric pathway says ") +
                             (tail.converges ? "convergent" : "divergent") + " but the spectral pathway says " +
                             (c.spectral_converges ? "convergent" : "divergent") + " (tail defect " +
                             std::to_string(tail.defect) + ", horizon " + std::to_string(horizon) + ")");
  v.converges = tail.converges;
  if (v.converges) {
    if (c.spectral_converges) {
      const ComplexMatrix spectral = zero_projection_or_zero(a, f);
      if (cross_check) check_limit_agreement(*tail.last, spectral, tol, "convergence");
      v.limit = spectral;
    } else {
      v.limit = *tail.last;
    }
  }
  v.notes.push_back("on C^n strong and uniform (operator norm) convergence coincide");
  return v;
}

}  // namespace detail

/**
 * @brief Does e^{tA} converge as t -> infinity?
 *
 * Numeric pathway: Cauchy test (max pairwise operator-norm defect below tol)
 * on the last 16 points of a 64-point geometric grid ending at t_max.
 * Spectral pathway: bounded and sigma(A) on iR contained in {0}. While
 * the two disagree the horizon is doubled; persistent disagreement raises
 * InconsistencyError when cross_check is set.
 */
inline ConvergenceVerdict strong_convergence_verdict(const ComplexMatrix& a, double t_max = kDefaultHorizon,
                                                     double tol = kDefaultConvergenceTol, bool cross_check = true) {
  require_square(a, "strong_convergence_verdict");
  if (!(t_max > 0.0)) throw ParameterError("strong_convergence_verdict: t_max must be positive");
  return detail::strong_verdict(a, t_max, tol, cross_check, ConvergenceMode::strong);
}

/// Same decision as strong_convergence_verdict, labelled as uniform (they coincide on C^n).
inline ConvergenceVerdict uniform_convergence_verdict(const ComplexMatrix& a, double t_max = kDefaultHorizon,
                                                      double tol = kDefaultConvergenceTol, bool cross_check = true) {
  require_square(a, "uniform_convergence_verdict");
  if (!(t_max > 0.0)) throw ParameterError("uniform_convergence_verdict: t_max must be positive");
  return detail::strong_verdict(a, t_max, tol, cross_check, ConvergenceMode::uniform);
}

/**
 * @brief Mean ergodicity: do the Cesaro means converge as t -> infinity?
 *
 * Cesaro means converge like 1/t, so the numeric horizon is
 * max(t_max, 10 / tol). The spectral pathway uses that a matrix semigroup
 * is mean ergodic iff it is bounded; the limit is the spectral projection at
 * 0, or zero when 0 is not an eigenvalue.
 */
inline ConvergenceVerdict is_mean_ergodic(const ComplexMatrix& a, double t_max = kDefaultHorizon,
                                          double tol = kDefaultConvergenceTol, bool cross_check = true) {
  require_square(a, "is_mean_ergodic");
  if (!(t_max > 0.0)) throw ParameterError("is_mean_ergodic: t_max must be positive");
  if (!(tol > 0.0)) throw ParameterError("is_mean_ergodic: tol must be positive");
  const EigenData e = eig(a);
  const detail::AxisFacts f = detail::axis_facts(e, tol);
  ConvergenceVerdict v;
  v.mode = ConvergenceMode::mean_ergodic;
  auto& c = v.certificate;
  c.bounded = f.bounded;
  c.spectral_bound = f.s;
  c.pole_order_at_bound = f.pole_order_at_bound;
  c.peripheral = f.peripheral;
  c.axis_spectrum = f.axis;
  c.axis_only_zero = f.axis_only_zero;
  c.spectral_converges = f.bounded;

  double horizon = std::max(t_max, 10.0 / tol);
  auto sample = [&](double t) { return cesaro_mean(a, t, true); };
  detail::NumericTail tail = detail::sample_tail(detail::convergence_grid(horizon), tol, sample);
  for (int k = 0; tail.converges != c.spectral_converges && k < kMaxHorizonDoublings; ++k) {
    horizon *= 2.0;
    tail = detail::sample_tail(detail::convergence_grid(horizon), tol, sample);
  }
  c.horizon = horizon;
  c.numeric_converges = tail.converges;
  v.tail_defect = tail.defect;
  if (tail.overflow) v.notes.push_back("Cesaro means overflowed on the tail grid; treated as divergent");
  if (cross_check && tail.converges != c.spectral_converges)
    throw InconsistencyError(std::string("is_mean_ergodic: numeric pathway says ") +
                             (tail.converges ? "convergent" : "divergent") + " but the spectral pathway says " +
                             (c.spectral_converges ? "convergent" : "divergent") + " (tail defect " +
                             std::to_string(tail.defect) + ")");
  v.converges = tail.converges;
  if (v.converges) {
    if (c.spectral_converges) {
      const ComplexMatrix spectral = detail::zero_projection_or_zero(a, f);
      if (cross_check) detail::check_limit_agreement(*tail.last, spectral, tol, "is_mean_ergodic");
      v.limit = spectral;
    } else {
      v.limit = *tail.last;
    }
  }
  return v;
}

/**
 * @brief Uniform exponential balancing: does e^{t(A - s(A) I)} converge to a nonzero limit?
 *
 * Runs the strong convergence test on A - s(A) I. The limit is compared with
 * the spectral projection at s(A) and its rank is reported. A zero numeric
 * limit is inconsistent (the rescaled semigroup always has 0 in its spectrum).
 */
inline ConvergenceVerdict uniform_balancing_verdict(const ComplexMatrix& a, double t_max = kDefaultHorizon,
                                                    double tol = kDefaultConvergenceTol, bool cross_check = true) {
  require_square(a, "uniform_balancing_verdict");
  if (!(t_max > 0.0)) throw ParameterError("uniform_balancing_verdict: t_max must be positive");
  const double s = spectral_bound(eig(a));
  const ComplexMatrix b = shifted(a, s);
  ConvergenceVerdict v = detail::strong_verdict(b, t_max, tol, cross_check, ConvergenceMode::balancing);
  v.certificate.spectral_bound = s;
  for (auto& z : v.certificate.peripheral) z += s;
  if (v.converges) {
    if (norm2(*v.limit) <= tol) {
      if (cross_check) throw InconsistencyError("uniform_balancing_verdict: numeric balancing limit is zero");
      v.converges = false;
      v.limit.reset();
      v.notes.push_back("zero numeric limit rejected: balancing limits are non-zero");
      return v;
    }
    v.limit_rank = rank(*v.limit, 1e-8);
  }
  return v;
}

struct NormContinuity {
  bool holds = true;
  std::string note =
      "matrix semigroups are uniformly continuous, so t -> e^{tA} is norm continuous at infinity";
};

inline NormContinuity norm_continuity_at_infinity(const ComplexMatrix& a) {
  require_square(a, "norm_continuity_at_infinity");
  return {};
}

struct DecayFit {
  double slope = 0.0;          // fitted d/dt log ||e^{t(A-s)} - P||
  double expected_slope = 0.0; // -(s(A) - max Re over the rest of the spectrum)
  double relative_error = 0.0;
  double t_max = 0.0;
  std::size_t points = 0;
};

/**
 * @brief Least-squares slope of log ||e^{t(A - s)} - P|| over the convergence tail grid.
 *
 * P is the spectral projection at s(A). The default horizon is 25 / gap so
 * that the tail stays well above rounding level.
 */
inline DecayFit decay_rate_fit(const ComplexMatrix& a, std::optional<double> t_max = std::nullopt) {
  require_square(a, "decay_rate_fit");
  const EigenData e = eig(a);
  const double s = spectral_bound(e);
  double second = -std::numeric_limits<double>::infinity();
  for (const auto& c : e.clusters)
    if (std::abs(c.value.real() - s) > e.tol_cluster) second = std::max(second, c.value.real());
  if (!std::isfinite(second)) throw ParameterError("decay_rate_fit: no spectral gap (single real part)");
  const double gap = s - second;

  const Complex top = [&] {
    for (const auto& c : e.clusters)
      if (std::abs(c.value.real() - s) <= e.tol_cluster) return c.value;
    return Complex(s);
  }();
  const ComplexMatrix p = spectral_projection_algebraic(a, top).projection;
  const ComplexMatrix b = shifted(a, s);

  DecayFit fit;
  fit.t_max = t_max.value_or(25.0 / gap);
  fit.expected_slope = -gap;
  const auto grid = detail::convergence_grid(fit.t_max);
  std::vector<double> xs, ys;
  for (std::size_t i = grid.size() - detail::kTailPoints; i < grid.size(); ++i) {
    const double d = norm2(expm(b * Complex(grid[i])) - p);
    if (d > 0.0) {
      xs.push_back(grid[i]);
      ys.push_back(std::log(d));
    }
  }
  if (xs.size() < 2) throw NumericalFailure("decay_rate_fit: too few nonzero samples");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  fit.slope = sxy / sxx;
  fit.relative_error = std::abs(fit.slope - fit.expected_slope) / gap;
  fit.points = xs.size();
  return fit;
}

}  // namespace evpos

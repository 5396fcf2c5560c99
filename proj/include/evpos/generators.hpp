#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "evpos/error.hpp"
#include "evpos/matrix.hpp"
#include "evpos/spectral.hpp"

namespace evpos {

enum class Family { evpos_semigroup, metzler, evpos_power, rotation_counterexample, jordan_counterexample };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::evpos_semigroup: return "evpos-semigroup";
    case Family::metzler: return "metzler";
    case Family::evpos_power: return "evpos-power";
    case Family::rotation_counterexample: return "rotation-counterexample";
    case Family::jordan_counterexample: return "jordan-counterexample";
  }
  return "unknown";
}

inline Family parse_family(const std::string& name) {
  for (Family f : {Family::evpos_semigroup, Family::metzler, Family::evpos_power, Family::rotation_counterexample,
                   Family::jordan_counterexample})
    if (name == to_string(f)) return f;
  throw ParameterError("unknown family '" + name +
                       "' (expected evpos-semigroup, metzler, evpos-power, rotation-counterexample, "
                       "jordan-counterexample)");
}

struct GeneratorParams {
  std::optional<double> s;  // evpos-semigroup: spectral bound (default uniform in [-1, 1]); metzler: shift (default 0)
  double gap = 1.0;         // evpos-semigroup: s(A) minus the largest other real part
  bool rotation = true;     // slowest complement mode is a rotating pair
  double omega = 2.0 * std::numbers::pi / 3.0;  // its angular frequency
  double radius = 1.0;                          // evpos-power: spectral radius
  double contraction = 0.5;                     // evpos-power: complement spectral radius / r
  double angle = 2.0 * std::numbers::pi / 3.0;  // evpos-power: rotation angle of the complement
  int period = 1;                               // evpos-power: > 1 gives a block-cyclic positive matrix
};

struct GroundTruth {
  std::optional<double> spectral_bound;
  std::optional<double> spectral_radius;
  std::optional<ComplexMatrix> projection;  // dominant spectral projection
  std::optional<std::size_t> projection_rank;
  std::optional<double> gap;
  std::vector<std::pair<std::string, std::string>> expected_verdicts;  // theorem id -> verdict
};

struct InstanceBundle {
  ComplexMatrix matrix;
  Family family = Family::evpos_semigroup;
  std::size_t dim = 0;
  GroundTruth ground_truth;
  std::uint64_t seed = 0;
  GeneratorParams params;
};

namespace detail {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

/// Householder reflector mapping w to a multiple of e_1; its columns 1..n-1 span w^perp.
inline ComplexMatrix complement_basis(const std::vector<double>& w) {
  const std::size_t n = w.size();
  double nw = 0.0;
  for (double x : w) nw += x * x;
  nw = std::sqrt(nw);
  std::vector<double> u(w);
  u[0] += nw;  // w[0] > 0, so no cancellation
  double uu = 0.0;
  for (double x : u) uu += x * x;
  ComplexMatrix h = ComplexMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) -= 2.0 * u[i] * u[j] / uu;
  return h.block(0, 1, n, n - 1);
}

/// Random orthogonal matrix by Gram-Schmidt on a Gaussian matrix.
inline ComplexMatrix random_orthogonal(std::size_t n, Rng& rng) {
  std::normal_distribution<double> gauss;
  ComplexMatrix q(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> x(n);
    for (auto& v : x) v = gauss(rng);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) d += q(i, k).real() * x[i];
        for (std::size_t i = 0; i < n; ++i) x[i] -= d * q(i, k).real();
      }
    double nx = 0.0;
    for (double v : x) nx += v * v;
    nx = std::sqrt(nx);
    for (std::size_t i = 0; i < n; ++i) q(i, j) = x[i] / nx;
  }
  return q;
}

/// Real block-diagonal matrix: 1x1 blocks for real eigenvalues, [[a, b], [-b, a]] for a +- ib.
struct Placement {
  ComplexMatrix d;
  std::vector<Complex> eigenvalues;
};

inline void put_pair(Placement& p, std::size_t k, double re, double im) {
  p.d(k, k) = re;
  p.d(k + 1, k + 1) = re;
  p.d(k, k + 1) = im;
  p.d(k + 1, k) = -im;
  p.eigenvalues.emplace_back(re, im);
  p.eigenvalues.emplace_back(re, -im);
}

/// Similarity V diag(top, B) V^-1 with V = [v, U], U an orthonormal basis of w^perp.
inline ComplexMatrix assemble(double top, const ComplexMatrix& b, const std::vector<double>& v,
                              const std::vector<double>& w) {
  const std::size_t n = v.size();
  ComplexMatrix vm(n, n);
  for (std::size_t i = 0; i < n; ++i) vm(i, 0) = v[i];
  vm.set_block(0, 1, complement_basis(w));
  ComplexMatrix core(n, n);
  core(0, 0) = top;
  core.set_block(1, 1, b);
  ComplexMatrix m = vm * core * inverse(vm);
  for (auto& z : m.data()) z = Complex(z.real(), 0.0);  // the construction is real
  return m;
}

inline ComplexMatrix outer_projection(const std::vector<double>& v, const std::vector<double>& w) {
  const std::size_t n = v.size();
  double wv = 0.0;
  for (std::size_t i = 0; i < n; ++i) wv += w[i] * v[i];
  ComplexMatrix p(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p(i, j) = v[i] * w[j] / wv;
  return p;
}

inline std::vector<double> positive_vector(std::size_t n, Rng& rng) {
  std::vector<double> x(n);
  for (auto& v : x) v = uniform(rng, 0.2, 1.0);
  return x;
}

inline bool is_metzler(const ComplexMatrix& a) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j && a(i, j).real() < 0.0) return false;
  return true;
}

inline void semigroup_expectations(GroundTruth& g, double s, bool evpos) {
  const bool bounded = s <= 0.0;
  auto v = [](bool ok) { return ok ? std::string("confirmed") : std::string("hypotheses-not-met"); };
  g.expected_verdicts = {{"thm-2.1", v(evpos && bounded)}, {"cor-2.2", v(evpos)},
                         {"thm-3.1", v(evpos && bounded)}, {"lem-3.2", v(evpos && s == 0.0)},
                         {"thm-5.1", v(evpos)},            {"thm-5.2", v(evpos)},
                         {"lem-5.3", v(evpos)}};
}

inline InstanceBundle make_evpos_semigroup(std::size_t n, const GeneratorParams& p, Rng& rng) {
  if (!(p.gap > 0.0)) throw ParameterError("evpos-semigroup: gap must be positive");
  if (p.rotation && !(p.omega > 0.0)) throw ParameterError("evpos-semigroup: omega must be positive");
  const double s = p.s ? *p.s : uniform(rng, -1.0, 1.0);
  const double slow = s - p.gap;
  const bool rotate = p.rotation && n >= 3;

  for (int attempt = 0; attempt < 100; ++attempt) {
    const auto v = positive_vector(n, rng);
    const auto w = positive_vector(n, rng);
    const std::size_t m = n - 1;
    Placement pl{ComplexMatrix(m, m), {}};
    std::size_t k = 0;
    if (rotate) {
      put_pair(pl, 0, slow, p.omega);
      k = 2;
    } else {
      pl.d(0, 0) = slow;
      pl.eigenvalues.emplace_back(slow);
      k = 1;
    }
    while (k < m) {
      const double re = uniform(rng, slow - 2.0, slow);
      if (k + 1 < m && uniform(rng, 0.0, 1.0) < 1.0 / 3.0) {
        put_pair(pl, k, re, uniform(rng, 0.5, 2.0));
        k += 2;
      } else {
        pl.d(k, k) = re;
        pl.eigenvalues.emplace_back(re);
        k += 1;
      }
    }
    const ComplexMatrix o = random_orthogonal(m, rng);
    const ComplexMatrix b = o * pl.d * o.transpose();
    ComplexMatrix a = assemble(s, b, v, w);
    // a Metzler draw would be positive from the start; the family wants a sign transient
    if (rotate && is_metzler(a)) continue;

    InstanceBundle out;
    out.matrix = std::move(a);
    out.ground_truth.spectral_bound = s;
    double radius = std::abs(s);
    for (const auto& z : pl.eigenvalues) radius = std::max(radius, std::abs(z));
    out.ground_truth.spectral_radius = radius;
    out.ground_truth.projection = outer_projection(v, w);
    out.ground_truth.projection_rank = 1;
    out.ground_truth.gap = p.gap;
    semigroup_expectations(out.ground_truth, s, true);
    return out;
  }
  throw ParameterError("evpos-semigroup: every draw was Metzler; no sign transient could be placed");
}

inline InstanceBundle make_metzler(std::size_t n, const GeneratorParams& p, Rng& rng) {
  const double shift = p.s.value_or(0.0);
  ComplexMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double x = uniform(rng, 0.0, 1.0);
      a(i, j) = x;
      row += x;
    }
    a(i, i) = shift - row;
  }
  // left Perron vector: pi^T (A - shift I) = 0, sum pi = 1
  ComplexMatrix m = shifted(a, shift).transpose();
  for (std::size_t j = 0; j < n; ++j) m(n - 1, j) = 1.0;
  ComplexMatrix rhs(n, 1);
  rhs(n - 1, 0) = 1.0;
  const ComplexMatrix pi = solve(m, rhs);
  ComplexMatrix proj(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) proj(i, j) = pi(j, 0).real();

  InstanceBundle out;
  out.matrix = std::move(a);
  out.ground_truth.spectral_bound = shift;
  out.ground_truth.projection = std::move(proj);
  out.ground_truth.projection_rank = 1;
  semigroup_expectations(out.ground_truth, shift, true);
  return out;
}

inline void power_expectations(GroundTruth& g, bool evpos) {
  const std::string v = evpos ? "confirmed" : "hypotheses-not-met";
  g.expected_verdicts = {{"thm-4.1", v}, {"thm-4.3", v}, {"eq-4.2-sequences", v}};
}

inline InstanceBundle make_cyclic_power(std::size_t n, const GeneratorParams& p, Rng& rng) {
  const std::size_t per = static_cast<std::size_t>(p.period);
  if (per > n) throw ParameterError("evpos-power: period exceeds the dimension");
  std::vector<std::size_t> start(per + 1, 0);
  for (std::size_t b = 0; b < per; ++b) start[b + 1] = start[b] + n / per + (b < n % per ? 1 : 0);
  ComplexMatrix t(n, n);
  for (std::size_t b = 0; b < per; ++b) {
    const std::size_t nb = (b + 1) % per;
    for (std::size_t i = start[b]; i < start[b + 1]; ++i) {
      double row = 0.0;
      for (std::size_t j = start[nb]; j < start[nb + 1]; ++j) {
        const double x = uniform(rng, 0.2, 1.0);
        t(i, j) = x;
        row += x;
      }
      for (std::size_t j = start[nb]; j < start[nb + 1]; ++j) t(i, j) *= p.radius / row;
    }
  }
  InstanceBundle out;
  out.matrix = t;
  out.ground_truth.spectral_radius = p.radius;
  out.ground_truth.projection = spectral_projection_algebraic(t, Complex(p.radius)).projection;
  out.ground_truth.projection_rank = 1;
  power_expectations(out.ground_truth, true);
  return out;
}

inline InstanceBundle make_evpos_power(std::size_t n, const GeneratorParams& p, Rng& rng) {
  if (!(p.radius > 0.0)) throw ParameterError("evpos-power: radius must be positive");
  if (!(p.contraction >= 0.0 && p.contraction < 1.0))
    throw ParameterError("evpos-power: contraction must lie in [0, 1)");
  if (p.period < 1) throw ParameterError("evpos-power: period must be at least 1");
  if (p.period > 1) return make_cyclic_power(n, p, rng);

  const double c = p.contraction * p.radius;
  const auto v = positive_vector(n, rng);
  const auto w = positive_vector(n, rng);
  const std::size_t m = n - 1;
  Placement pl{ComplexMatrix(m, m), {}};
  std::size_t k = 0;
  if (p.rotation && m >= 2) {
    put_pair(pl, 0, c * std::cos(p.angle), c * std::sin(p.angle));
    k = 2;
  }
  while (k < m) {
    if (k + 1 < m && uniform(rng, 0.0, 1.0) < 1.0 / 3.0) {
      const double mod = uniform(rng, 0.0, c);
      const double arg = uniform(rng, 0.0, std::numbers::pi);
      put_pair(pl, k, mod * std::cos(arg), mod * std::sin(arg));
      k += 2;
    } else {
      const double x = uniform(rng, -c, c);
      pl.d(k, k) = x;
      pl.eigenvalues.emplace_back(x);
      k += 1;
    }
  }
  const ComplexMatrix o = random_orthogonal(m, rng);
  InstanceBundle out;
  out.matrix = assemble(p.radius, o * pl.d * o.transpose(), v, w);
  out.ground_truth.spectral_radius = p.radius;
  out.ground_truth.projection = outer_projection(v, w);
  out.ground_truth.projection_rank = 1;
  double second = 0.0;
  for (const auto& z : pl.eigenvalues) second = std::max(second, std::abs(z));
  out.ground_truth.gap = p.radius - second;
  power_expectations(out.ground_truth, true);
  return out;
}

inline InstanceBundle make_counterexample(std::size_t n, bool rotation) {
  ComplexMatrix a(n, n);
  if (rotation) {
    a(0, 1) = -1.0;
    a(1, 0) = 1.0;
  } else {
    a(0, 1) = 1.0;
  }
  for (std::size_t i = 2; i < n; ++i) a(i, i) = -1.0;
  InstanceBundle out;
  out.matrix = std::move(a);
  out.ground_truth.spectral_bound = 0.0;
  out.ground_truth.spectral_radius = 1.0;
  if (!rotation && n == 2) out.ground_truth.spectral_radius = 0.0;
  const std::string hnm = "hypotheses-not-met";
  if (rotation) {
    out.ground_truth.expected_verdicts = {{"thm-2.1", hnm}, {"cor-2.2", hnm}, {"thm-3.1", hnm}, {"lem-3.2", hnm},
                                          {"thm-4.1", hnm}, {"thm-4.3", hnm}, {"eq-4.2-sequences", hnm},
                                          {"thm-5.1", hnm}, {"thm-5.2", hnm}, {"lem-5.3", hnm}};
  } else {
    // positive semigroup, s(A) = 0 a pole of order 2: unbounded, no convergence
    out.ground_truth.expected_verdicts = {{"thm-2.1", hnm},         {"cor-2.2", "confirmed"}, {"thm-3.1", hnm},
                                          {"lem-3.2", hnm},         {"thm-4.1", hnm},         {"thm-4.3", hnm},
                                          {"eq-4.2-sequences", hnm}, {"thm-5.1", "confirmed"}, {"thm-5.2", "confirmed"},
                                          {"lem-5.3", hnm}};
  }
  return out;
}

}  // namespace detail

/**
 * @brief Seeded instance with ground truth.
 *
 * evpos-semigroup: A = V diag(s, B) V^-1 with V = [v, U], U an orthonormal
 * basis of w^perp and v, w drawn from [0.2, 1]^n, so the spectral projection
 * at s is P = v w^T / (w^T v) and e^{t(A - s)} -> P. B = O D O^T places the
 * complement spectrum at real parts in [s - gap - 2, s - gap], with the
 * slowest mode s - gap +- i omega when rotation is requested.
 * evpos-power: T = V diag(r, B) V^-1 with the spectral radius of B at most
 * contraction * r; period > 1 gives a block-cyclic positive T with row sums r.
 */
inline InstanceBundle generate(Family family, std::size_t n, std::uint64_t seed, const GeneratorParams& params = {}) {
  if (n < 2) throw ParameterError(std::string(to_string(family)) + ": dimension must be at least 2");
  detail::Rng rng(seed);
  InstanceBundle out;
  switch (family) {
    case Family::evpos_semigroup: out = detail::make_evpos_semigroup(n, params, rng); break;
    case Family::metzler: out = detail::make_metzler(n, params, rng); break;
    case Family::evpos_power: out = detail::make_evpos_power(n, params, rng); break;
    case Family::rotation_counterexample: out = detail::make_counterexample(n, true); break;
    case Family::jordan_counterexample: out = detail::make_counterexample(n, false); break;
  }
  out.family = family;
  out.dim = n;
  out.seed = seed;
  out.params = params;
  return out;
}

}  // namespace evpos

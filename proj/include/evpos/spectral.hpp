#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "evpos/error.hpp"
#include "evpos/linalg.hpp"
#include "evpos/matrix.hpp"

namespace evpos {

/// Peripheral tolerance default 1e-7 (1 + ||A||).
inline double default_peripheral_tol(const ComplexMatrix& a) { return 1e-7 * (1.0 + norm2(a)); }

struct SpectrumReport {
  EigenData eigen;
  double spectral_bound = 0.0;   // max Re over the eigenvalues
  double spectral_radius = 0.0;  // max modulus over the eigenvalues
  double tol_peripheral = 0.0;
  std::vector<Complex> peripheral_set;  // cluster values with Re >= s(A) - tol
  // cluster values on the imaginary axis, after subtracting axis_shift
  std::vector<Complex> peripheral_point_set_on_axis;
  double axis_shift = 0.0;
  // matrices have empty essential spectrum; reported, not computed
  double essential_spectral_radius = 0.0;
  std::string growth_note =
      "for matrices the growth bound of e^{tA} equals the spectral bound s(A)";

  const std::vector<Complex>& peripheral_spectrum() const { return peripheral_set; }
  /// On matrices the peripheral point spectrum and peripheral spectrum coincide.
  const std::vector<Complex>& peripheral_point_spectrum() const { return peripheral_set; }
};

/**
 * @brief Spectral bound, spectral radius and peripheral set of A.
 *
 * With shift_to_bound the imaginary-axis set is computed for A - s(A) I,
 * otherwise for A itself.
 */
inline SpectrumReport spectrum_report(const ComplexMatrix& a, std::optional<double> tol_peripheral = std::nullopt,
                                      bool shift_to_bound = false) {
  require_square(a, "spectrum_report");
  SpectrumReport r;
  r.eigen = eig(a);
  r.tol_peripheral = tol_peripheral.value_or(1e-7 * (1.0 + r.eigen.matrix_norm));
  if (r.tol_peripheral < 0.0) throw ParameterError("spectrum_report: tolerance must be nonnegative");
  r.spectral_bound = -std::numeric_limits<double>::infinity();
  for (const auto& z : r.eigen.eigenvalues) {
    r.spectral_bound = std::max(r.spectral_bound, z.real());
    r.spectral_radius = std::max(r.spectral_radius, std::abs(z));
  }
  r.axis_shift = shift_to_bound ? r.spectral_bound : 0.0;
  for (const auto& c : r.eigen.clusters) {
    if (c.value.real() >= r.spectral_bound - r.tol_peripheral) r.peripheral_set.push_back(c.value);
    if (std::abs(c.value.real() - r.axis_shift) <= r.tol_peripheral)
      r.peripheral_point_set_on_axis.push_back(c.value - r.axis_shift);
  }
  return r;
}

/// Clusters with modulus within tol of the spectral radius (the peripheral set of an operator T).
inline std::vector<const EigenCluster*> peripheral_by_modulus(const EigenData& e, double radius, double tol) {
  std::vector<const EigenCluster*> out;
  for (const auto& c : e.clusters)
    if (std::abs(c.value) >= radius - tol) out.push_back(&c);
  return out;
}

/// Pole order of the resolvent at lambda, i.e. the index of lambda.
inline int pole_order(const ComplexMatrix& a, Complex lambda, double tol_rank = kDefaultRankTol) {
  return matrix_index(a, lambda, tol_rank);
}

enum class ProjectionMethod { algebraic, contour };

inline const char* to_string(ProjectionMethod m) {
  return m == ProjectionMethod::algebraic ? "algebraic" : "contour";
}

struct ProjectionResiduals {
  double idempotency = 0.0;  // ||P^2 - P||
  double commutation = 0.0;  // ||AP - PA||
  double trace_gap = 0.0;    // |trace P - algebraic multiplicity|
};

struct ProjectionResult {
  ComplexMatrix projection;
  Complex eigenvalue;
  ProjectionMethod method = ProjectionMethod::algebraic;
  int algebraic_multiplicity = 0;
  ProjectionResiduals residuals;
  double condition = 0.0;  // algebraic: basis condition number
  double radius = 0.0;     // contour only
  int nodes = 0;           // contour only
};

namespace detail {

inline ProjectionResiduals projection_residuals(const ComplexMatrix& a, const ComplexMatrix& p, int multiplicity) {
  ProjectionResiduals r;
  r.idempotency = norm2(p * p - p);
  r.commutation = norm2(a * p - p * a);
  r.trace_gap = std::abs(trace(p) - Complex(multiplicity));
  return r;
}

inline const EigenCluster& require_cluster(const EigenData& e, Complex lambda, const char* what) {
  const EigenCluster* c = e.find_cluster(lambda);
  if (c == nullptr) throw NotSpectralValue(std::string(what) + ": " + describe(lambda) + " is not an eigenvalue");
  return *c;
}

}  // namespace detail

/**
 * @brief Spectral projection onto ker (lambda I - A)^m along im (lambda I - A)^m.
 *
 * m is the index of lambda. The kernel basis X is the trailing a right
 * singular vectors of (lambda I - A)^m and the image basis Y its leading
 * n - a left singular vectors; P = X * (first a rows of [X Y]^-1).
 */
inline ProjectionResult spectral_projection_algebraic(const ComplexMatrix& a, Complex lambda,
                                                      double tol_rank = kDefaultRankTol) {
  require_square(a, "spectral_projection_algebraic");
  const EigenData e = eig(a, std::nullopt, tol_rank);
  const EigenCluster& c = detail::require_cluster(e, lambda, "spectral_projection_algebraic");
  const std::size_t n = a.rows();
  const std::size_t alg = static_cast<std::size_t>(c.algebraic);

  ProjectionResult out;
  out.eigenvalue = c.value;
  out.method = ProjectionMethod::algebraic;
  out.algebraic_multiplicity = c.algebraic;
  if (alg == n) {
    out.projection = ComplexMatrix::identity(n);
    out.condition = 1.0;
  } else {
    const ComplexMatrix b = power(shifted(-a, -c.value), static_cast<unsigned>(c.index));
    const Svd d = svd(b);
    ComplexMatrix basis(n, n);
    for (std::size_t j = 0; j < alg; ++j) basis.set_col(j, d.v.col(n - alg + j));
    for (std::size_t j = 0; j < n - alg; ++j) basis.set_col(alg + j, d.u.col(j));
    const auto sb = svd(basis).singular_values;
    out.condition = sb.back() > 0.0 ? sb.front() / sb.back() : std::numeric_limits<double>::infinity();
    if (!(out.condition <= 1e12))
      throw ConditioningError("spectral_projection_algebraic: basis condition number " +
                                  std::to_string(out.condition) + " at " + detail::describe(lambda),
                              out.condition);
    const ComplexMatrix inv = inverse(basis);
    out.projection = basis.block(0, 0, n, alg) * inv.block(0, 0, alg, n);
  }
  out.residuals = detail::projection_residuals(a, out.projection, c.algebraic);
  return out;
}

/// Half the distance from lambda to the nearest eigenvalue outside its cluster (1 when there is none).
inline double default_contour_radius(const EigenData& e, const EigenCluster& c) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < e.eigenvalues.size(); ++k) {
    if (std::find(c.members.begin(), c.members.end(), k) != c.members.end()) continue;
    d = std::min(d, std::abs(e.eigenvalues[k] - c.value));
  }
  return std::isfinite(d) ? 0.5 * d : 1.0;
}

/**
 * @brief Spectral projection by the normalized Cauchy integral (2 pi i)^-1 \oint R(mu, A) d mu.
 *
 * The circle |mu - lambda| = radius is discretized by the trapezoidal rule,
 * giving P = (1/N) sum_j radius e^{i theta_j} R(lambda + radius e^{i theta_j}).
 * A radius of 0 selects the default (half the gap to the nearest other eigenvalue).
 */
inline ProjectionResult spectral_projection_contour(const ComplexMatrix& a, Complex lambda, double radius = 0.0,
                                                    int nodes = 64) {
  require_square(a, "spectral_projection_contour");
  if (nodes < 3) throw ParameterError("spectral_projection_contour: nodes must be at least 3");
  if (radius < 0.0) throw ParameterError("spectral_projection_contour: radius must be nonnegative");
  const EigenData e = eig(a);
  const EigenCluster& c = detail::require_cluster(e, lambda, "spectral_projection_contour");
  const Complex center = c.value;
  if (radius == 0.0) radius = default_contour_radius(e, c);

  const double margin = e.tol_cluster;
  for (std::size_t k = 0; k < e.eigenvalues.size(); ++k) {
    const double d = std::abs(e.eigenvalues[k] - center);
    if (std::abs(d - radius) <= margin)
      throw ContourError("spectral_projection_contour: circle of radius " + std::to_string(radius) +
                         " passes through eigenvalue " + detail::describe(e.eigenvalues[k]));
    const bool member = std::find(c.members.begin(), c.members.end(), k) != c.members.end();
    if (!member && d < radius)
      throw ContourError("spectral_projection_contour: circle encloses foreign eigenvalue " +
                         detail::describe(e.eigenvalues[k]));
  }

  const std::size_t n = a.rows();
  ComplexMatrix sum(n, n);
  for (int j = 0; j < nodes; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / nodes;
    const Complex w = radius * std::polar(1.0, theta);
    sum += resolvent_unchecked(a, center + w) * w;
  }
  ProjectionResult out;
  out.projection = sum / Complex(static_cast<double>(nodes));
  out.eigenvalue = center;
  out.method = ProjectionMethod::contour;
  out.algebraic_multiplicity = c.algebraic;
  out.radius = radius;
  out.nodes = nodes;
  out.residuals = detail::projection_residuals(a, out.projection, c.algebraic);
  if (out.residuals.trace_gap > 1e-6)
    throw ContourError("spectral_projection_contour: trace " + detail::describe(trace(out.projection)) +
                       " differs from multiplicity " + std::to_string(c.algebraic) +
                       " (foreign enclosure or too few nodes)");
  return out;
}

/// Algebraic spectral projections for every eigenvalue cluster, in cluster order.
inline std::vector<ProjectionResult> all_spectral_projections(const ComplexMatrix& a) {
  const EigenData e = eig(a);
  std::vector<ProjectionResult> out;
  for (const auto& c : e.clusters) out.push_back(spectral_projection_algebraic(a, c.value));
  return out;
}

struct RieszPoint {
  bool is_riesz = true;  // every eigenvalue of a matrix is a Riesz point
  int pole_order = 0;
  int spectral_space_dim = 0;
};

inline RieszPoint riesz_point_check(const ComplexMatrix& t, Complex lambda, double tol_rank = kDefaultRankTol) {
  const ProjectionResult p = spectral_projection_algebraic(t, lambda, tol_rank);
  RieszPoint r;
  r.pole_order = matrix_index(t, lambda, tol_rank);
  r.spectral_space_dim = static_cast<int>(std::lround(trace(p.projection).real()));
  return r;
}

}  // namespace evpos

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "evpos/dynamics.hpp"
#include "evpos/error.hpp"
#include "evpos/linalg.hpp"
#include "evpos/matrix.hpp"
#include "evpos/positivity.hpp"
#include "evpos/spectral.hpp"

namespace evpos {

enum class CheckVerdict { confirmed, hypotheses_not_met, violation };

inline const char* to_string(CheckVerdict v) {
  switch (v) {
    case CheckVerdict::confirmed: return "confirmed";
    case CheckVerdict::hypotheses_not_met: return "hypotheses-not-met";
    case CheckVerdict::violation: return "VIOLATION";
  }
  return "unknown";
}

struct CheckItem {
  std::string name;
  bool held = false;
  std::string evidence;
};

using WitnessValue = std::variant<double, Complex, std::vector<double>, std::vector<Complex>, ComplexMatrix>;

struct Witness {
  std::string name;
  WitnessValue value;
};

struct CheckReport {
  std::string theorem_id;
  std::vector<CheckItem> hypotheses;
  std::vector<CheckItem> conclusions;
  CheckVerdict verdict = CheckVerdict::hypotheses_not_met;
  std::vector<std::pair<std::string, double>> tolerances;
  std::vector<Witness> witnesses;
  std::vector<std::string> notes;
  std::uint64_t seed = 0;

  bool hypotheses_held() const {
    return std::all_of(hypotheses.begin(), hypotheses.end(), [](const CheckItem& i) { return i.held; });
  }
  bool conclusions_held() const {
    return std::all_of(conclusions.begin(), conclusions.end(), [](const CheckItem& i) { return i.held; });
  }
  /// VIOLATION iff every hypothesis held and some conclusion failed.
  void finalize() {
    if (!hypotheses_held())
      verdict = CheckVerdict::hypotheses_not_met;
    else
      verdict = conclusions_held() ? CheckVerdict::confirmed : CheckVerdict::violation;
  }
};

struct CheckConfig {
  double tol = kDefaultConvergenceTol;  // boundedness, convergence and |s(A)| decisions
  std::optional<double> tol_pos;        // positivity slack (default scale-aware)
  double t_max = kDefaultHorizon;
  int steps = 256;
  int n_max = 200;
  std::uint64_t seed = 0;
  int samples = 1000;                  // random vectors for sampled inequalities
  double sequence_exponent = 3.0;      // r_n = 1 + n^-p in the resolvent sequences
  std::vector<int> n_list = {2, 4, 8, 16, 32, 64, 128, 256};
  double domination_slack = 1e-10;
  double projection_limit_tol = 1e-6;  // ||P_n - P|| at the largest n
};

inline const std::vector<std::string>& theorem_ids() {
  static const std::vector<std::string> ids = {"thm-2.1", "cor-2.2", "thm-3.1", "lem-3.2",
                                               "thm-4.1", "lem-4.2", "thm-4.3", "eq-4.2-sequences",
                                               "thm-5.1", "thm-5.2", "lem-5.3"};
  return ids;
}

namespace detail {

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

inline std::string fmt(Complex z) {
  std::ostringstream os;
  os.precision(6);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

inline std::string fmt(const std::vector<Complex>& zs) {
  std::string s = "{";
  for (std::size_t i = 0; i < zs.size(); ++i) s += (i ? ", " : "") + fmt(zs[i]);
  return s + "}";
}

inline const char* yes_no(bool b) { return b ? "yes" : "no"; }

inline CheckReport start_report(const char* id, const ComplexMatrix& m, const CheckConfig& cfg) {
  CheckReport r;
  r.theorem_id = id;
  r.seed = cfg.seed;
  r.tolerances = {{"tol", cfg.tol},
                  {"tol_pos", cfg.tol_pos.value_or(-1.0)},
                  {"tol_cluster", default_cluster_tol(m)},
                  {"tol_peripheral", default_peripheral_tol(m)},
                  {"tol_rank", kDefaultRankTol}};
  return r;
}

inline CheckItem semigroup_positivity_item(const ComplexMatrix& a, const CheckConfig& cfg, CheckReport& r) {
  const PositivityCertificate c = eventual_positivity_of_semigroup(a, cfg.t_max, cfg.steps, cfg.tol_pos);
  const bool held = c.witness.has_value() || c.spectral_certificate.has_value();
  std::string ev = std::string("verdict ") + to_string(c.verdict);
  if (c.witness) {
    ev += ", t0 = " + fmt(*c.witness);
    r.witnesses.push_back({"t0", *c.witness});
  }
  ev += std::string(", Perron-Frobenius certificate ") + yes_no(c.spectral_certificate.has_value());
  return {"uniformly eventually positive semigroup", held, ev};
}

inline CheckItem power_positivity_item(const ComplexMatrix& t, const CheckConfig& cfg, CheckReport& r,
                                       std::optional<double>* witness_out = nullptr) {
  const PositivityCertificate c = eventual_positivity_of_powers(t, cfg.n_max, cfg.tol_pos);
  const bool held = c.witness.has_value() || c.spectral_certificate.has_value();
  std::string ev = std::string("verdict ") + to_string(c.verdict);
  if (c.witness) {
    ev += ", n0 = " + fmt(*c.witness);
    r.witnesses.push_back({"n0", *c.witness});
  }
  ev += std::string(", Perron-Frobenius certificate ") + yes_no(c.spectral_certificate.has_value());
  if (witness_out) *witness_out = c.witness;
  return {"uniformly eventually positive powers", held, ev};
}

inline CheckItem bounded_item(const ComplexMatrix& a, const CheckConfig& cfg, const char* name, bool* out = nullptr) {
  const BoundednessResult b = is_bounded(a, cfg.tol, cfg.t_max, false);
  std::string ev = std::string("spectral rule ") + yes_no(b.bounded) + ", sampled sup " + fmt(b.bound_estimate) +
                   " up to t = " + fmt(b.horizon);
  if (b.sampled_bounded != b.bounded) ev += " (sampling disagrees)";
  if (out) *out = b.bounded;
  return {name, b.bounded, ev};
}

/// Cluster at the real spectral value x (s(A) or r(T)), if x is an eigenvalue.
inline const EigenCluster* cluster_at_real(const EigenData& e, double x) {
  const EigenCluster* best = nullptr;
  for (const auto& c : e.clusters) {
    if (std::abs(c.value - Complex(x)) > e.tol_cluster) continue;
    if (best == nullptr || std::abs(c.value.imag()) < std::abs(best->value.imag())) best = &c;
  }
  return best;
}

inline CheckItem first_order_pole_item(const EigenData& e, double x, const char* name) {
  const EigenCluster* c = cluster_at_real(e, x);
  if (c == nullptr) return {name, false, fmt(x) + " is not an eigenvalue"};
  return {name, c->index == 1, "pole order " + std::to_string(c->index) + " at " + fmt(c->value)};
}

inline double spectral_radius(const EigenData& e) {
  double r = 0.0;
  for (const auto& z : e.eigenvalues) r = std::max(r, std::abs(z));
  return r;
}

}  // namespace detail

/**
 * @brief Cyclicity of the boundary point spectrum.
 *
 * Hypotheses: uniform eventual positivity and bounded orbits (the
 * finite-dimensional form of relatively compact orbits). Conclusion: the
 * eigenvalues on iR are closed under integer multiples, which for a finite
 * set means they are contained in {0}.
 */
inline CheckReport check_cyclicity_thm21(const ComplexMatrix& a, const CheckConfig& cfg = {}) {
  require_square(a, "check_cyclicity_thm21");
  CheckReport r = detail::start_report("thm-2.1", a, cfg);
  r.hypotheses.push_back(detail::semigroup_positivity_item(a, cfg, r));
  r.hypotheses.push_back(detail::bounded_item(a, cfg, "orbits bounded (relatively compact on C^n)"));
  const SpectrumReport s = spectrum_report(a);
  bool only_zero = true;
  for (const auto& z : s.peripheral_point_set_on_axis)
    if (std::abs(z) > s.tol_peripheral) only_zero = false;
  r.conclusions.push_back({"point spectrum on iR contained in {0}", only_zero,
                           "sigma_p(A) on iR = " + detail::fmt(s.peripheral_point_set_on_axis)});
  r.witnesses.push_back({"axis_point_spectrum", s.peripheral_point_set_on_axis});
  r.notes.push_back("closure of a finite set under integer multiples of its imaginary parts forces it into {0}");
  r.notes.push_back("individual eventual positivity is tested with the uniform detector (basis vectors suffice on C^n)");
  r.finalize();
  return r;
}

/**
 * @brief Strong convergence criterion.
 *
 * Hypothesis: eventual positivity. Conclusions: numeric convergence of
 * e^{tA} is equivalent to (bounded, sigma_p(A) on iR inside {0}, 0 semisimple),
 * and to bounded orbits alone.
 */
inline CheckReport check_strong_convergence_cor22(const ComplexMatrix& a, const CheckConfig& cfg = {}) {
  require_square(a, "check_strong_convergence_cor22");
  CheckReport r = detail::start_report("cor-2.2", a, cfg);
  r.hypotheses.push_back(detail::semigroup_positivity_item(a, cfg, r));

  const ConvergenceVerdict v = strong_convergence_verdict(a, cfg.t_max, cfg.tol, false);
  bool bounded = false;
  const CheckItem b = detail::bounded_item(a, cfg, "bounded", &bounded);
  const detail::AxisFacts f = detail::axis_facts(eig(a), cfg.tol);
  const bool zero_semisimple = !f.zero_index || *f.zero_index == 1;
  const bool rhs = bounded && f.axis_only_zero && zero_semisimple;
  const bool lhs = v.certificate.numeric_converges;

  const std::string conv = std::string("numeric convergence ") + detail::yes_no(lhs) + " (tail defect " +
                           detail::fmt(v.tail_defect) + ")";
  r.conclusions.push_back({"convergence <=> bounded and sigma_p(A) on iR in {0} with 0 semisimple", lhs == rhs,
                           conv + "; bounded " + detail::yes_no(bounded) + ", axis spectrum " +
                               detail::fmt(f.axis) + ", 0 semisimple " + detail::yes_no(zero_semisimple)});
  r.conclusions.push_back({"convergence <=> orbits relatively compact (bounded)", lhs == bounded,
                           conv + "; " + b.evidence});
  r.witnesses.push_back({"tail_defect", v.tail_defect});
  if (v.limit) r.witnesses.push_back({"limit", *v.limit});
  r.notes.push_back("strong and operator-norm convergence coincide on C^n");
  r.notes.push_back("relative compactness of orbits is realized as boundedness (Heine-Borel)");
  r.finalize();
  return r;
}

/**
 * @brief Mean ergodicity versus convergence for bounded eventually positive semigroups.
 *
 * Norm continuity at infinity holds for every matrix semigroup and is cited,
 * not tested. Conclusion: strong convergence <=> mean ergodicity.
 */
inline CheckReport check_thm31(const ComplexMatrix& a, const CheckConfig& cfg = {}) {
  require_square(a, "check_thm31");
  CheckReport r = detail::start_report("thm-3.1", a, cfg);
  r.hypotheses.push_back(detail::semigroup_positivity_item(a, cfg, r));
  r.hypotheses.push_back({"norm continuous at infinity", true, norm_continuity_at_infinity(a).note});
  r.hypotheses.push_back(detail::bounded_item(a, cfg, "bounded"));

  const ConvergenceVerdict sc = strong_convergence_verdict(a, cfg.t_max, cfg.tol, false);
  const ConvergenceVerdict me = is_mean_ergodic(a, cfg.t_max, cfg.tol, false);
  const bool lhs = sc.certificate.numeric_converges;
  const bool rhs = me.certificate.numeric_converges;
  r.conclusions.push_back({"strong convergence <=> mean ergodic", lhs == rhs,
                           std::string("convergent ") + detail::yes_no(lhs) + " (defect " +
                               detail::fmt(sc.tail_defect) + "), mean ergodic " + detail::yes_no(rhs) +
                               " (defect " + detail::fmt(me.tail_defect) + ")"});
  if (me.limit) r.witnesses.push_back({"mean_ergodic_limit", *me.limit});
  if (sc.limit) r.witnesses.push_back({"limit", *sc.limit});
  r.notes.push_back("norm continuity at infinity is automatic for matrices");
  r.notes.push_back("bounded semigroups on C^n are mean ergodic (reflexive space), so mean ergodicity is live only through the hypotheses");
  r.finalize();
  return r;
}

/// Bounded eventually positive semigroups with s(A) = 0 have peripheral spectrum {0}.
inline CheckReport check_lemma32(const ComplexMatrix& a, const CheckConfig& cfg = {}) {
  require_square(a, "check_lemma32");
  CheckReport r = detail::start_report("lem-3.2", a, cfg);
  r.hypotheses.push_back(detail::semigroup_positivity_item(a, cfg, r));
  r.hypotheses.push_back(detail::bounded_item(a, cfg, "bounded"));
  const SpectrumReport s = spectrum_report(a);
  r.hypotheses.push_back({"s(A) = 0", std::abs(s.spectral_bound) <= cfg.tol, "s(A) = " + detail::fmt(s.spectral_bound)});
  const bool singleton = s.peripheral_set.size() == 1 && std::abs(s.peripheral_set.front()) <= s.tol_peripheral;
  r.conclusions.push_back({"peripheral spectrum = {0}", singleton, "sigma_per(A) = " + detail::fmt(s.peripheral_set)});
  r.witnesses.push_back({"peripheral_spectrum", s.peripheral_set});
  r.witnesses.push_back({"spectral_bound", s.spectral_bound});
  r.finalize();
  return r;
}

namespace detail {

inline CheckReport power_peripheral_check(const char* id, const ComplexMatrix& t, const CheckConfig& cfg,
                                          bool geometric) {
  CheckReport r = start_report(id, t, cfg);
  r.hypotheses.push_back(power_positivity_item(t, cfg, r));
  const EigenData e = eig(t);
  const double radius = spectral_radius(e);
  r.hypotheses.push_back(first_order_pole_item(e, radius, "r(T) is a first order pole"));
  r.witnesses.push_back({"spectral_radius", radius});

  const EigenCluster* top = cluster_at_real(e, radius);
  const double tol_p = default_peripheral_tol(t);
  std::vector<Complex> peripheral;
  bool poles_ok = true, dims_ok = true;
  std::string pole_ev, dim_ev;
  for (const EigenCluster* c : peripheral_by_modulus(e, radius, tol_p)) {
    peripheral.push_back(c->value);
    poles_ok = poles_ok && c->index == 1;
    pole_ev += (pole_ev.empty() ? "" : ", ") + fmt(c->value) + ": " + std::to_string(c->index);
    const int mine = geometric ? c->geometric : c->algebraic;
    const int ref = top ? (geometric ? top->geometric : top->algebraic) : 0;
    dims_ok = dims_ok && top != nullptr && mine <= ref;
    dim_ev += (dim_ev.empty() ? "" : ", ") + fmt(c->value) + ": " + std::to_string(mine) + " <= " +
              std::to_string(ref);
  }
  r.witnesses.push_back({"peripheral_spectrum", peripheral});
  if (!geometric) r.conclusions.push_back({"every peripheral eigenvalue is a first order pole", poles_ok, "pole orders " + pole_ev});
  const std::string dim_name = geometric ? "dim ker(lambda I - T) <= dim ker(r(T) I - T) on the peripheral set"
                                         : "spectral space dimension at lambda <= that at r(T) on the peripheral set";
  r.conclusions.push_back({dim_name, dims_ok, top ? dim_ev : "r(T) is not an eigenvalue"});
  r.notes.push_back("every eigenvalue of a matrix is a Riesz point (finite-dimensional spectral space)");
  r.finalize();
  return r;
}

}  // namespace detail

/// First-order peripheral poles and spectral-space dimension bound for eventually positive T.
inline CheckReport check_niiro_sawashima(const ComplexMatrix& t, const CheckConfig& cfg = {}) {
  require_square(t, "check_niiro_sawashima");
  return detail::power_peripheral_check("thm-4.1", t, cfg, false);
}

/// Peripheral eigenspace dimensions are bounded by the eigenspace dimension at r(T).
inline CheckReport check_eigenspace_bound_thm43(const ComplexMatrix& t, const CheckConfig& cfg = {}) {
  require_square(t, "check_eigenspace_bound_thm43");
  return detail::power_peripheral_check("thm-4.3", t, cfg, true);
}

/**
 * @brief Fixed space of a dominated operator.
 *
 * Hypotheses: P is a projection and |Q_ij| <= P_ij entrywise (on C^n this is
 * equivalent to |Qf| <= P|f| for every f). Conclusion: dim Fix Q <= rank P.
 */
inline CheckReport check_domination_lemma42(const ComplexMatrix& q, const ComplexMatrix& p, const CheckConfig& cfg = {}) {
  require_square(q, "check_domination_lemma42");
  require_square(p, "check_domination_lemma42");
  if (q.rows() != p.rows())
    throw DimensionError("check_domination_lemma42: Q is " + q.shape_string() + " but P is " + p.shape_string());
  const std::size_t n = q.rows();
  CheckReport r = detail::start_report("lem-4.2", q, cfg);

  const double idem = norm2(p * p - p);
  r.hypotheses.push_back({"P is a projection", idem <= cfg.tol * (1.0 + norm2(p)), "||P^2 - P|| = " + detail::fmt(idem)});
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      margin = std::min(margin, p(i, j).real() - std::abs(q(i, j)));
      margin = std::min(margin, -std::abs(p(i, j).imag()));
    }
  r.hypotheses.push_back({"|Q f| <= P |f| for all f (entrywise |Q_ij| <= P_ij)", margin >= -cfg.tol,
                          "min entrywise margin " + detail::fmt(margin)});

  // sampled form of the same inequality, informational
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss;
  double sampled = std::numeric_limits<double>::infinity();
  for (int k = 0; k < cfg.samples; ++k) {
    ComplexVector f(n), af(n);
    for (std::size_t i = 0; i < n; ++i) {
      f[i] = Complex(gauss(rng), gauss(rng));
      af[i] = std::abs(f[i]);
    }
    const auto qf = mat_vec(q, f);
    const auto pf = mat_vec(p, af);
    for (std::size_t i = 0; i < n; ++i) sampled = std::min(sampled, pf[i].real() - std::abs(qf[i]));
  }
  r.witnesses.push_back({"sampled_domination_margin", sampled});

  const std::size_t fix = n - rank(shifted(q, 1.0));
  const std::size_t im = rank(p);
  r.conclusions.push_back({"dim Fix Q <= dim Im P", fix <= im,
                           "dim Fix Q = " + std::to_string(fix) + ", rank P = " + std::to_string(im)});
  r.witnesses.push_back({"dim_fix_q", static_cast<double>(fix)});
  r.witnesses.push_back({"rank_p", static_cast<double>(im)});
  r.finalize();
  return r;
}

/**
 * @brief The resolvent sequences Q_n, P_n, R_n, S_n and their domination inequality.
 *
 * T is first divided by r(T) and lambda by r(T) (then projected onto the
 * unit circle). With r_n = 1 + n^-p:
 *   Q_n = (r_n lambda - lambda) R(r_n lambda, T),  P_n = (r_n - 1) R(r_n, T),
 *   S_n = (r_n lambda - lambda) sum_{k<k0} (r_n lambda)^-(k+1) T^k,
 *   R_n = -(r_n - 1) sum_{k<k0} r_n^-(k+1) T^k,
 * and |Q_n f| <= |S_n f| + R_n|f| + P_n|f| is tested on random and basis vectors.
 * k0 defaults to the positivity witness of the powers.
 */
inline CheckReport check_sequences_eq42(const ComplexMatrix& t, std::optional<Complex> lambda = std::nullopt,
                                        std::optional<int> k0 = std::nullopt, const CheckConfig& cfg = {}) {
  require_square(t, "check_sequences_eq42");
  CheckReport r = detail::start_report("eq-4.2-sequences", t, cfg);
  const std::size_t n = t.rows();
  const EigenData e0 = eig(t);
  const double radius = detail::spectral_radius(e0);
  r.witnesses.push_back({"spectral_radius", radius});
  if (!(radius > 1e-300)) {
    r.hypotheses.push_back({"r(T) > 0", false, "spectral radius is zero"});
    r.finalize();
    return r;
  }
  const ComplexMatrix th = t / Complex(radius);
  Complex lam = lambda.value_or(Complex(radius)) / radius;
  const double tol_p = default_peripheral_tol(th);
  if (std::abs(std::abs(lam) - 1.0) > tol_p)
    throw ParameterError("check_sequences_eq42: |lambda| = " + detail::fmt(std::abs(lam) * radius) +
                         " differs from r(T) = " + detail::fmt(radius));
  lam /= std::abs(lam);
  r.witnesses.push_back({"lambda_normalized", lam});

  std::optional<double> witness;
  r.hypotheses.push_back(detail::power_positivity_item(t, cfg, r, &witness));
  const EigenData e = eig(th);
  r.hypotheses.push_back(detail::first_order_pole_item(e, 1.0, "r(T) is a first order pole"));
  const int k0_used = k0.value_or(witness ? static_cast<int>(*witness) : 0);
  if (k0_used < 0) throw ParameterError("check_sequences_eq42: k0 must be nonnegative");
  r.hypotheses.push_back({"T^k positive for every k >= k0", witness.has_value() && k0_used >= *witness,
                          "k0 = " + std::to_string(k0_used) +
                              (witness ? ", positivity witness n0 = " + detail::fmt(*witness) : ", no witness")});
  r.witnesses.push_back({"k0", static_cast<double>(k0_used)});

  const double collision = 1e-12 * (1.0 + norm2(th));
  std::vector<ComplexMatrix> powers{ComplexMatrix::identity(n)};
  for (int k = 1; k < k0_used; ++k) powers.push_back(powers.back() * th);

  std::optional<ComplexMatrix> proj;
  try {
    proj = spectral_projection_algebraic(th, Complex(1.0)).projection;
  } catch (const NotSpectralValue&) {
  }

  // sample vectors: seeded random complex unit vectors plus the standard basis
  std::vector<ComplexVector> fs;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < cfg.samples; ++k) {
    ComplexVector f(n);
    for (auto& z : f) z = Complex(gauss(rng), gauss(rng));
    const double nf = vector_norm(f);
    for (auto& z : f) z /= nf;
    fs.push_back(std::move(f));
  }
  for (std::size_t i = 0; i < n; ++i) {
    ComplexVector f(n);
    f[i] = 1.0;
    fs.push_back(std::move(f));
  }

  std::vector<double> slack, r_norms, s_norms, p_defects;
  for (int idx : cfg.n_list) {
    if (idx < 1) throw ParameterError("check_sequences_eq42: n_list entries must be positive");
    const double rn = 1.0 + std::pow(static_cast<double>(idx), -cfg.sequence_exponent);
    const Complex z = rn * lam;
    for (const auto& ev : e.eigenvalues)
      for (Complex w : {z, Complex(rn)})
        if (std::abs(ev - w) <= collision)
          throw SpectralCollision("check_sequences_eq42: shift " + detail::fmt(w) + " collides with the spectrum", ev);
    const ComplexMatrix qn = resolvent_extended(th, z) * (z - lam);
    const ComplexMatrix pn = resolvent_extended(th, Complex(rn)) * Complex(rn - 1.0);
    ComplexMatrix sn(n, n), rnm(n, n);
    for (int k = 0; k < k0_used; ++k) {
      sn += powers[static_cast<std::size_t>(k)] * ((z - lam) * std::pow(z, -(k + 1)));
      rnm -= powers[static_cast<std::size_t>(k)] * Complex((rn - 1.0) * std::pow(rn, -(k + 1)));
    }
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& f : fs) {
      ComplexVector af(n);
      for (std::size_t i = 0; i < n; ++i) af[i] = std::abs(f[i]);
      const auto qf = mat_vec(qn, f);
      const auto sf = mat_vec(sn, f);
      const auto rf = mat_vec(rnm, af);
      const auto pf = mat_vec(pn, af);
      for (std::size_t i = 0; i < n; ++i)
        worst = std::min(worst, std::abs(sf[i]) + (rf[i] + pf[i]).real() - std::abs(qf[i]));
    }
    slack.push_back(worst);
    r_norms.push_back(norm2(rnm));
    s_norms.push_back(norm2(sn));
    p_defects.push_back(proj ? norm2(pn - *proj) : std::numeric_limits<double>::infinity());
  }

  const double min_slack = slack.empty() ? 0.0 : *std::min_element(slack.begin(), slack.end());
  r.conclusions.push_back({"|Q_n f| <= |S_n f| + R_n|f| + P_n|f|", min_slack >= -cfg.domination_slack,
                           "minimum slack " + detail::fmt(min_slack) + " over " + std::to_string(fs.size()) +
                               " vectors"});
  auto non_increasing = [&](const std::vector<double>& xs) {
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      if (cfg.n_list[i] < 8) continue;
      if (xs[i + 1] > xs[i] * (1.0 + 1e-9) + 1e-300) return false;
    }
    return true;
  };
  const bool mono = non_increasing(r_norms) && non_increasing(s_norms);
  r.conclusions.push_back({"||R_n||, ||S_n|| decrease toward 0 (beyond n = 8)", mono,
                           "last ||R_n|| = " + detail::fmt(r_norms.empty() ? 0.0 : r_norms.back()) +
                               ", last ||S_n|| = " + detail::fmt(s_norms.empty() ? 0.0 : s_norms.back())});
  const double last_defect = p_defects.empty() ? std::numeric_limits<double>::infinity() : p_defects.back();
  r.conclusions.push_back({"P_n converges to the spectral projection at r(T)", last_defect < cfg.projection_limit_tol,
                           proj ? "||P_n - P|| = " + detail::fmt(last_defect) + " at n = " +
                                      std::to_string(cfg.n_list.empty() ? 0 : cfg.n_list.back())
                                : "r(T) is not an eigenvalue"});

  std::vector<double> ns(cfg.n_list.begin(), cfg.n_list.end());
  r.witnesses.push_back({"n_list", ns});
  r.witnesses.push_back({"domination_slack", slack});
  r.witnesses.push_back({"norm_R_n", r_norms});
  r.witnesses.push_back({"norm_S_n", s_norms});
  r.witnesses.push_back({"projection_defect", p_defects});
  r.tolerances.push_back({"domination_slack", cfg.domination_slack});
  r.tolerances.push_back({"sequence_exponent", cfg.sequence_exponent});
  r.notes.push_back("r_n = 1 + n^-p; resolvents are formed in extended precision");
  r.notes.push_back("R_n uses the real weights r_n^-(k+1), which makes R_n|f| + P_n|f| the tail sum over k >= k0");
  r.finalize();
  return r;
}

/**
 * @brief Uniform exponential balancing <=> rescaled semigroup bounded.
 *
 * Conditions (i) norm continuity at infinity and (iii) s(A) a pole hold for
 * every matrix and are cited; the live content is the equivalence of
 * balancing with boundedness of e^{t(A - s(A) I)}.
 */
inline CheckReport check_thm51(const ComplexMatrix& a, const CheckConfig& cfg = {}) {
  require_square(a, "check_thm51");
  CheckReport r = detail::start_report("thm-5.1", a, cfg);
  r.hypotheses.push_back(detail::semigroup_positivity_item(a, cfg, r));
  r.hypotheses.push_back({"s(A) > -infinity", true, "automatic for matrices"});
  const ConvergenceVerdict v = uniform_balancing_verdict(a, cfg.t_max, cfg.tol, false);
  const double s = v.certificate.spectral_bound;
  bool bounded = false;
  const CheckItem b = detail::bounded_item(shifted(a, s), cfg, "rescaled semigroup bounded", &bounded);
  r.conclusions.push_back({"balancing <=> (i) norm continuous at infinity, (ii) rescaled bounded, (iii) s(A) a pole",
                           v.converges == bounded,
                           std::string("balancing ") + detail::yes_no(v.converges) + " (defect " +
                               detail::fmt(v.tail_defect) + "); (ii) " + b.evidence});
  if (v.limit) r.witnesses.push_back({"balancing_limit", *v.limit});
  r.witnesses.push_back({"spectral_bound", s});
  r.notes.push_back("condition (i) is vacuous on C^n: matrix semigroups are norm continuous");
  r.notes.push_back("condition (iii) is vacuous on C^n: every eigenvalue is a pole of the resolvent");
  r.finalize();
  return r;
}

/// Balancing with a finite-rank limit <=> s(A) is a first order pole.
inline CheckReport check_thm52(const ComplexMatrix& a, const CheckConfig& cfg = {}) {
  require_square(a, "check_thm52");
  CheckReport r = detail::start_report("thm-5.2", a, cfg);
  r.hypotheses.push_back(detail::semigroup_positivity_item(a, cfg, r));
  const ConvergenceVerdict v = uniform_balancing_verdict(a, cfg.t_max, cfg.tol, false);
  const double s = v.certificate.spectral_bound;
  const CheckItem pole = detail::first_order_pole_item(eig(a), s, "s(A) is a first order pole");
  std::string ev = std::string("balancing ") + detail::yes_no(v.converges);
  if (v.limit_rank) ev += " with limit rank " + std::to_string(*v.limit_rank);
  r.conclusions.push_back({"balancing with finite-rank limit <=> s(A) first order pole", v.converges == pole.held,
                           ev + "; " + pole.evidence});
  if (v.limit_rank) r.witnesses.push_back({"limit_rank", static_cast<double>(*v.limit_rank)});
  if (v.limit) r.witnesses.push_back({"balancing_limit", *v.limit});
  r.notes.push_back("the spectral space at s(A) is finite-dimensional on C^n, so that condition is vacuous");
  r.finalize();
  return r;
}

/// A first order pole at s(A) forces the peripheral spectrum to be {s(A)}.
inline CheckReport check_lemma53(const ComplexMatrix& a, const CheckConfig& cfg = {}) {
  require_square(a, "check_lemma53");
  CheckReport r = detail::start_report("lem-5.3", a, cfg);
  r.hypotheses.push_back(detail::semigroup_positivity_item(a, cfg, r));
  const SpectrumReport s = spectrum_report(a);
  r.hypotheses.push_back(detail::first_order_pole_item(s.eigen, s.spectral_bound, "s(A) is a first order pole"));
  const bool singleton = s.peripheral_set.size() == 1 &&
                         std::abs(s.peripheral_set.front() - Complex(s.spectral_bound)) <= s.tol_peripheral;
  r.conclusions.push_back({"peripheral spectrum = {s(A)}", singleton,
                           "s(A) = " + detail::fmt(s.spectral_bound) + ", sigma_per(A) = " +
                               detail::fmt(s.peripheral_set)});
  r.witnesses.push_back({"peripheral_spectrum", s.peripheral_set});
  r.witnesses.push_back({"spectral_bound", s.spectral_bound});
  r.finalize();
  return r;
}

/**
 * @brief Runs every checker on one matrix in the fixed order of theorem_ids().
 *
 * The matrix serves as generator A for semigroup statements and as T for
 * power statements. lem-4.2 needs a projection and is skipped without one.
 * Checks may run concurrently; the result order does not depend on it.
 */
inline std::vector<CheckReport> check_all(const ComplexMatrix& m, const CheckConfig& cfg = {},
                                          const std::optional<ComplexMatrix>& projection = std::nullopt,
                                          bool concurrent = true) {
  require_square(m, "check_all");
  std::vector<std::function<CheckReport()>> jobs;
  for (const auto& id : theorem_ids()) {
    if (id == "thm-2.1") jobs.push_back([&] { return check_cyclicity_thm21(m, cfg); });
    else if (id == "cor-2.2") jobs.push_back([&] { return check_strong_convergence_cor22(m, cfg); });
    else if (id == "thm-3.1") jobs.push_back([&] { return check_thm31(m, cfg); });
    else if (id == "lem-3.2") jobs.push_back([&] { return check_lemma32(m, cfg); });
    else if (id == "thm-4.1") jobs.push_back([&] { return check_niiro_sawashima(m, cfg); });
    else if (id == "lem-4.2") {
      if (projection) jobs.push_back([&] { return check_domination_lemma42(m, *projection, cfg); });
    } else if (id == "thm-4.3") jobs.push_back([&] { return check_eigenspace_bound_thm43(m, cfg); });
    else if (id == "eq-4.2-sequences") jobs.push_back([&] { return check_sequences_eq42(m, std::nullopt, std::nullopt, cfg); });
    else if (id == "thm-5.1") jobs.push_back([&] { return check_thm51(m, cfg); });
    else if (id == "thm-5.2") jobs.push_back([&] { return check_thm52(m, cfg); });
    else if (id == "lem-5.3") jobs.push_back([&] { return check_lemma53(m, cfg); });
  }
  std::vector<CheckReport> out;
  if (!concurrent) {
    for (auto& job : jobs) out.push_back(job());
    return out;
  }
  std::vector<std::future<CheckReport>> futures;
  for (auto& job : jobs) futures.push_back(std::async(std::launch::async, job));
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

}  // namespace evpos

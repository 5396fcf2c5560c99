// Acceptance run: prints one PASS/FAIL line per acceptance criterion (1-9).
//
// Exit status is nonzero when a criterion fails for a reason not listed as a
// known failure. Known failures are printed as FAIL with the reason and are
// documented in the README.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"

using namespace evpos;
using namespace evpos::test;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

/// Outcome of one criterion: failures and the subset that are known and documented.
struct Outcome {
  std::vector<std::string> failures;
  std::vector<std::string> known;
  std::string summary;

  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void require_known(bool ok, const std::string& what, const std::string& reason) {
    if (!ok) {
      failures.push_back(what);
      known.push_back(what + " (" + reason + ")");
    }
  }
  bool passed() const { return failures.empty(); }
  bool only_known() const { return !failures.empty() && failures.size() == known.size(); }
};

ComplexMatrix fixture(const std::string& name) { return read_matrix_file(std::string(EVPOS_FIXTURES) + "/" + name); }

double rel(const ComplexMatrix& diff, const ComplexMatrix& ref) {
  return frobenius_norm(diff) / std::max(frobenius_norm(ref), 1e-300);
}

// 1. semigroup law, expm inverse, resolvent identity and Cesaro identity on 100 random matrices.
Outcome kernel_suite() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst[4] = {0, 0, 0, 0};
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const std::size_t n = 2 + seed % 11;
    const double scale = 2.0 * (0.1 + 0.9 * static_cast<double>(seed % 10) / 9.0);
    const auto a = random_matrix(n, 1000 + seed, scale, seed % 3 != 0);
    const auto id = ComplexMatrix::identity(n);
    const double s = 0.6, t = 1.3;
    const auto e_st = expm(a * Complex(s + t));
    worst[0] = std::max(worst[0], rel(e_st - expm(a * Complex(s)) * expm(a * Complex(t)), e_st));
    worst[1] = std::max(worst[1], rel(expm(a) * expm(-a) - id, id));
    const Complex z = 3.0, w = Complex(-2.5, 4.0);
    const auto rz = resolvent(a, z), rw = resolvent(a, w);
    worst[2] = std::max(worst[2], rel(rz - rw - (w - z) * rz * rw, rz - rw));
    const double tc = 2.5;
    const auto grow = expm(a * Complex(tc)) - id;
    worst[3] = std::max(worst[3], rel(a * cesaro_mean(a, tc) * Complex(tc) - grow, grow));
  }
  const double elapsed = seconds_since(t0);
  const char* names[4] = {"semigroup law", "expm inverse", "resolvent identity", "Cesaro identity"};
  for (int k = 0; k < 4; ++k) o.require(worst[k] < 1e-9, std::string(names[k]) + " residual " + sci(worst[k]));
  o.require(elapsed < 10.0, "runtime " + std::to_string(elapsed) + " s");
  o.summary = "100 matrices, worst relative residuals " + sci(worst[0]) + ", " + sci(worst[1]) + ", " +
              sci(worst[2]) + ", " + sci(worst[3]) + " in " + sci(elapsed) + " s";
  return o;
}

// 2. contour vs algebraic projections and the resolution of the identity.
Outcome projection_equivalence() {
  Outcome o;
  double worst_pair = 0, worst_sum = 0, worst_oracle = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto d = random_diagonalizable(6, 2000 + seed, 0.5);
    ComplexMatrix sum_alg = ComplexMatrix::zero(6), sum_con = ComplexMatrix::zero(6);
    for (std::size_t k = 0; k < 6; ++k) {
      const auto alg = spectral_projection_algebraic(d.matrix, d.eigenvalues[k]).projection;
      const auto con = spectral_projection_contour(d.matrix, d.eigenvalues[k]).projection;
      worst_pair = std::max(worst_pair, norm2(alg - con));
      worst_oracle = std::max(worst_oracle, oracle_diff(alg, oracle_projection(d, k)) / (1 + norm2(alg)));
      sum_alg += alg;
      sum_con += con;
    }
    worst_sum = std::max({worst_sum, norm2(sum_alg - ComplexMatrix::identity(6)),
                          norm2(sum_con - ComplexMatrix::identity(6))});
  }
  o.require(worst_pair < 1e-8, "contour vs algebraic " + sci(worst_pair));
  o.require(worst_sum < 1e-8, "resolution of identity " + sci(worst_sum));
  o.require(worst_oracle < 1e-8, "Eigen oracle " + sci(worst_oracle));
  o.summary = "50 matrices, max ||P_contour - P_alg|| " + sci(worst_pair) + ", max ||sum P - I|| " + sci(worst_sum) +
              ", Eigen oracle " + sci(worst_oracle);
  return o;
}

// 3. Lemma 5.3 on 200 evpos-semigroup instances.
Outcome lemma53_property() {
  Outcome o;
  const auto t0 = Clock::now();
  int singleton = 0, confirmed = 0, violations = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const std::size_t n = 3 + seed % 10;
    const auto b = generate(Family::evpos_semigroup, n, 3000 + seed);
    const auto rep = spectrum_report(b.matrix);
    if (rep.peripheral_set.size() == 1 && std::abs(rep.peripheral_set[0] - rep.spectral_bound) <= rep.tol_peripheral)
      ++singleton;
    const auto r = check_lemma53(b.matrix);
    confirmed += r.verdict == CheckVerdict::confirmed;
    violations += r.verdict == CheckVerdict::violation;
  }
  const double elapsed = seconds_since(t0);
  o.require(singleton == 200, std::to_string(singleton) + "/200 singleton peripheral spectra");
  o.require(confirmed == 200, std::to_string(confirmed) + "/200 confirmed");
  o.require(violations == 0, std::to_string(violations) + " VIOLATION reports");
  o.require(elapsed < 30.0, "runtime " + std::to_string(elapsed) + " s");
  o.summary = std::to_string(singleton) + "/200 sigma_per = {s(A)}, " + std::to_string(confirmed) + " confirmed, " +
              std::to_string(violations) + " VIOLATION, " + sci(elapsed) + " s";
  return o;
}

// 4. First-order poles and eigenspace bounds on 200 evpos-power instances; the Jordan fixture.
Outcome niiro_sawashima_suite() {
  Outcome o;
  int ok41 = 0, ok43 = 0, direct = 0, violations = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const std::size_t n = 3 + seed % 10;
    const auto b = generate(Family::evpos_power, n, 4000 + seed);
    const auto r41 = check_niiro_sawashima(b.matrix);
    const auto r43 = check_eigenspace_bound_thm43(b.matrix);
    ok41 += r41.verdict == CheckVerdict::confirmed;
    ok43 += r43.verdict == CheckVerdict::confirmed;
    violations += (r41.verdict == CheckVerdict::violation) + (r43.verdict == CheckVerdict::violation);
    // Direct: every peripheral eigenvalue has index 1 and geometric multiplicity <= that of r(T).
    const auto e = eig(b.matrix);
    double radius = 0.0;
    for (const auto& z : e.eigenvalues) radius = std::max(radius, std::abs(z));
    const auto* top = e.find_cluster(radius);
    bool good = top != nullptr;
    for (const auto& c : e.clusters)
      if (good && std::abs(std::abs(c.value) - radius) <= default_peripheral_tol(b.matrix))
        good = c.index == 1 && c.geometric <= top->geometric;
    direct += good;
  }
  const auto jordan = fixture("jordan-power.json");
  const auto j41 = check_niiro_sawashima(jordan), j43 = check_eigenspace_bound_thm43(jordan);
  o.require(ok41 == 200 && ok43 == 200, "confirmed thm-4.1 " + std::to_string(ok41) + ", thm-4.3 " + std::to_string(ok43));
  o.require(direct == 200, std::to_string(direct) + "/200 direct pole and multiplicity checks");
  o.require(violations == 0, std::to_string(violations) + " VIOLATION reports");
  o.require(j41.verdict == CheckVerdict::hypotheses_not_met && j43.verdict == CheckVerdict::hypotheses_not_met,
            "Jordan fixture verdicts " + std::string(to_string(j41.verdict)) + ", " + to_string(j43.verdict));
  o.summary = "thm-4.1 " + std::to_string(ok41) + "/200, thm-4.3 " + std::to_string(ok43) + "/200 confirmed; Jordan fixture " +
              to_string(j41.verdict);
  return o;
}

// 5. The resolvent sequences of the proof: domination, decay of R_n and S_n, P_n -> P.
Outcome sequences_suite() {
  Outcome o;
  double min_slack = 1e300, worst_defect = 0, worst_oracle = 0;
  int mono = 0, confirmed = 0;
  const CheckConfig cfg;  // 1000 samples, n in {2, 4, ..., 256}, slack -1e-10
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const std::size_t n = 3 + seed % 6;
    const auto b = generate(Family::evpos_power, n, 5000 + seed);
    const auto r = check_sequences_eq42(b.matrix, std::nullopt, std::nullopt, cfg);
    confirmed += r.verdict == CheckVerdict::confirmed;
    for (const auto& w : r.witnesses) {
      if (w.name == "domination_slack")
        for (double s : std::get<std::vector<double>>(w.value)) min_slack = std::min(min_slack, s);
      if (w.name == "projection_defect") worst_defect = std::max(worst_defect, std::get<std::vector<double>>(w.value).back());
    }
    mono += r.conclusions.at(1).held;
    // Oracle for P_256 with Eigen: (r_n - 1)(r_n I - T)^{-1}, r(T) = 1 by construction.
    const double rn = 1.0 + std::pow(256.0, -cfg.sequence_exponent);
    const auto id = EMat::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const EMat pn = (rn - 1.0) * (rn * id - to_eigen(b.matrix)).partialPivLu().inverse();
    worst_oracle = std::max(worst_oracle, oracle_diff(*b.ground_truth.projection, pn));
  }
  o.require(min_slack >= -1e-10, "minimum domination slack " + sci(min_slack));
  o.require(mono == 50, std::to_string(mono) + "/50 monotone ||R_n||, ||S_n|| beyond n = 8");
  o.require(worst_defect < 1e-6, "||P_256 - P|| " + sci(worst_defect));
  o.require(worst_oracle < 1e-6, "Eigen oracle ||P_256 - P|| " + sci(worst_oracle));
  o.require(confirmed == 50, std::to_string(confirmed) + "/50 confirmed");
  o.summary = "50 instances, min slack " + sci(min_slack) + ", max ||P_256 - P|| " + sci(worst_defect) + " (oracle " +
              sci(worst_oracle) + "), " + std::to_string(mono) + "/50 monotone";
  return o;
}

// 6. Equivalence theorems in both truth-value combinations; rotation contrapositive.
Outcome equivalences() {
  Outcome o;
  using Checker = std::function<CheckReport(const ComplexMatrix&)>;
  const std::vector<std::pair<std::string, Checker>> checks = {
      {"cor-2.2", [](const ComplexMatrix& a) { return check_strong_convergence_cor22(a); }},
      {"thm-3.1", [](const ComplexMatrix& a) { return check_thm31(a); }},
      {"thm-5.1", [](const ComplexMatrix& a) { return check_thm51(a); }},
      {"thm-5.2", [](const ComplexMatrix& a) { return check_thm52(a); }}};
  int generated_ok = 0;
  GeneratorParams p;
  p.s = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto a = generate(Family::evpos_semigroup, 3 + seed % 6, 6000 + seed, p).matrix;
    for (const auto& [id, check] : checks) {
      const bool ok = check(a).verdict == CheckVerdict::confirmed;
      generated_ok += ok;
      o.require(ok, id + " on generated seed " + std::to_string(6000 + seed));
    }
  }
  const auto nil = fixture("nilpotent.json");
  const auto rot = fixture("rotation.json");
  std::string nil_verdicts, rot_verdicts;
  for (const auto& [id, check] : checks) {
    const auto rn = check(nil);
    nil_verdicts += " " + id + "=" + to_string(rn.verdict);
    const std::string what = id + " on the nilpotent fixture is " + to_string(rn.verdict);
    if (id == "thm-3.1")
      o.require_known(rn.verdict == CheckVerdict::confirmed, what,
                      "boundedness is a listed hypothesis and this semigroup is unbounded");
    else
      o.require(rn.verdict == CheckVerdict::confirmed, what);
    const auto rr = check(rot);
    rot_verdicts += " " + id + "=" + to_string(rr.verdict);
    o.require(rr.verdict == CheckVerdict::hypotheses_not_met && !rr.conclusions.empty(),
              id + " on the rotation fixture is " + to_string(rr.verdict));
  }
  o.summary = std::to_string(generated_ok) + "/80 generated confirmed; nilpotent:" + nil_verdicts + "; rotation:" +
              rot_verdicts;
  return o;
}

// 7. Fitted decay rate of e^{t(A - s)} - P against the ground-truth gap.
Outcome decay_rate() {
  Outcome o;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto b = generate(Family::evpos_semigroup, 3 + seed % 10, 7000 + seed);
    const auto f = decay_rate_fit(b.matrix);
    const double err = std::abs(f.slope + *b.ground_truth.gap) / *b.ground_truth.gap;
    worst = std::max(worst, err);
  }
  o.require(worst <= 0.1, "worst relative slope error " + sci(worst));
  o.summary = "50 instances, worst relative slope error " + sci(worst);
  return o;
}

// 8. Verdicts on the hand-computed fixtures.
Outcome fixture_verdicts() {
  Outcome o;
  const double tol = kDefaultConvergenceTol;
  const auto rot = fixture("rotation.json");
  const auto pos = eventual_positivity_of_semigroup(rot);
  o.require(pos.verdict == PositivityVerdict::not_detected, std::string("rotation positivity ") + to_string(pos.verdict));
  o.require(is_bounded(rot).bounded, "rotation bounded");
  const auto me = is_mean_ergodic(rot);
  o.require(me.converges && me.limit && max_abs(*me.limit) <= tol, "rotation mean ergodic with limit 0");
  o.require(!strong_convergence_verdict(rot).converges, "rotation not convergent");

  const auto diag = strong_convergence_verdict(fixture("metzler-diag.json"));
  o.require(diag.converges && diag.limit && max_abs(*diag.limit - ComplexMatrix::diagonal({1.0, 0.0})) <= tol,
            "diag(0, -1) limit diag(1, 0)");
  const auto sym = strong_convergence_verdict(fixture("metzler.json"));
  o.require(sym.converges && sym.limit && max_abs(*sym.limit - real_matrix({{0.5, 0.5}, {0.5, 0.5}})) <= tol,
            "[[-1,1],[1,-1]] limit (1/2)[[1,1],[1,1]]");
  o.summary = "rotation: not-detected, bounded, mean ergodic to 0, not convergent; Metzler limits within " + sci(tol);
  return o;
}

// 9. Runtime and byte-for-byte reproducibility.
Outcome reproducibility(double elapsed_so_far) {
  Outcome o;
  int identical = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    for (auto f : {Family::evpos_semigroup, Family::evpos_power}) {
      const auto b1 = generate(f, 5, 9000 + seed), b2 = generate(f, 5, 9000 + seed);
      const bool same_bundle = format_matrix_file(b1.matrix) == format_matrix_file(b2.matrix) &&
                               metadata_json(b1).dump() == metadata_json(b2).dump();
      CheckConfig cfg;
      cfg.seed = seed;
      cfg.samples = 200;
      std::string j1, j2;
      for (const auto& r : check_all(b1.matrix, cfg, std::nullopt, true)) j1 += to_json(r).dump();
      for (const auto& r : check_all(b2.matrix, cfg, std::nullopt, false)) j2 += to_json(r).dump();
      const bool ok = same_bundle && j1 == j2;
      identical += ok;
      o.require(ok, std::string("reproducibility of ") + to_string(f) + " seed " + std::to_string(9000 + seed));
    }
  }
  o.require(elapsed_so_far < 120.0, "acceptance wall-clock " + std::to_string(elapsed_so_far) + " s");
  o.summary = std::to_string(identical) + "/6 bundles and check-all reports byte-identical; acceptance wall-clock " +
              sci(elapsed_so_far) + " s";
  return o;
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "kernel suite", kernel_suite},
      {2, "projection oracle equivalence", projection_equivalence},
      {3, "peripheral spectrum {s(A)} on evpos-semigroup instances", lemma53_property},
      {4, "first-order poles and eigenspace bounds on evpos-power instances", niiro_sawashima_suite},
      {5, "resolvent sequence formulas", sequences_suite},
      {6, "equivalence theorems in both truth-value combinations", equivalences},
      {7, "balancing decay rate", decay_rate},
      {8, "fixture verdicts", fixture_verdicts},
      {9, "runtime and reproducibility", [&] { return reproducibility(seconds_since(t0)); }},
  };
  int unexpected = 0, known = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.failures.push_back(std::string("exception: ") + e.what());
    }
    std::cout << (o.passed() ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << ": " << o.summary << "\n";
    if (o.passed()) continue;
    if (o.only_known()) {
      ++known;
      for (const auto& k : o.known) std::cout << "    known failure: " << k << "\n";
    } else {
      ++unexpected;
      for (const auto& f : o.failures) std::cout << "    failed: " << f << "\n";
    }
  }
  std::cout << "acceptance: " << (criteria.size() - static_cast<std::size_t>(unexpected + known)) << " of "
            << criteria.size() << " criteria passed, " << known << " known failure(s), " << unexpected
            << " unexpected failure(s), " << sci(seconds_since(t0)) << " s\n";
  return unexpected == 0 ? 0 : 1;
}

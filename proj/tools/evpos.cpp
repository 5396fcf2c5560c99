// evpos: spectral analysis and theorem checks for eventually positive
// matrix semigroups and matrix powers.
//
// Exit codes: 0 data verdicts, 2 usage or parse errors, 3 numerical
// failures, 4 when some check reports VIOLATION.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evpos/evpos.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitViolation = 4;

std::string cplx(evpos::Complex z) {
  char buf[80];
  if (z.imag() == 0.0)
    std::snprintf(buf, sizeof buf, "%.10g", z.real());
  else
    std::snprintf(buf, sizeof buf, "%.10g%+.10gi", z.real(), z.imag());
  return buf;
}

std::string cplx_list(const std::vector<evpos::Complex>& zs) {
  std::string s = "{";
  for (std::size_t i = 0; i < zs.size(); ++i) s += (i ? ", " : "") + cplx(zs[i]);
  return s + "}";
}

std::string real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void print_matrix(const evpos::ComplexMatrix& m, const std::string& indent) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::cout << indent;
    for (std::size_t j = 0; j < m.cols(); ++j) std::cout << (j ? "  " : "") << cplx(m(i, j));
    std::cout << "\n";
  }
}

std::optional<evpos::Complex> parse_complex(const std::string& text) {
  std::istringstream in(text);
  double re = 0.0, im = 0.0;
  char comma = 0;
  if (!(in >> re)) return std::nullopt;
  if (in >> comma) {
    if (comma != ',' || !(in >> im)) return std::nullopt;
  }
  return evpos::Complex(re, im);
}

struct Common {
  std::string path;
  std::optional<double> tol;
  bool json = false;
  double horizon = 0.0;  // 0 selects the command default
  int steps = 256;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, Common& c, bool with_path = true) {
  if (with_path) cmd->add_option("path", c.path, "MatrixFile JSON")->required();
  cmd->add_option("--tol", c.tol, "tolerance (meaning depends on the command)");
  cmd->add_flag("--json", c.json, "emit JSON");
  cmd->add_option("--horizon", c.horizon, "time horizon (semigroups) or power horizon");
  cmd->add_option("--steps", c.steps, "grid steps for semigroup sampling")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "seed for sampled vectors");
}

int cmd_analyze(const Common& c, bool shift) {
  const auto m = evpos::read_matrix_file(c.path);
  const auto r = evpos::spectrum_report(m, c.tol, shift);
  if (c.json) {
    std::cout << evpos::to_json(r).dump(2) << "\n";
    return kExitOk;
  }
  std::cout << "dimension: " << m.rows() << "\n";
  std::cout << "spectral bound s(A): " << real(r.spectral_bound) << "\n";
  std::cout << "spectral radius r(T): " << real(r.spectral_radius) << "\n";
  std::cout << "peripheral set: " << cplx_list(r.peripheral_set) << "\n";
  std::cout << "point spectrum on the imaginary axis" << (shift ? " (after subtracting s(A))" : "") << ": "
            << cplx_list(r.peripheral_point_set_on_axis) << "\n";
  std::cout << "eigenvalues (algebraic / geometric / pole order):\n";
  for (const auto& cl : r.eigen.clusters)
    std::cout << "  " << cplx(cl.value) << "  " << cl.algebraic << " / " << cl.geometric << " / " << cl.index << "\n";
  std::cout << "note: " << r.growth_note << "\n";
  return kExitOk;
}

int cmd_positivity(const Common& c, const std::string& mode) {
  const auto m = evpos::read_matrix_file(c.path);
  evpos::PositivityCertificate cert;
  if (mode == "power")
    cert = evpos::eventual_positivity_of_powers(m, c.horizon > 0 ? static_cast<int>(c.horizon) : 200, c.tol);
  else
    cert = evpos::eventual_positivity_of_semigroup(m, c.horizon > 0 ? c.horizon : 50.0, c.steps, c.tol);
  if (c.json) {
    std::cout << evpos::to_json(cert).dump(2) << "\n";
    return kExitOk;
  }
  std::cout << "mode: " << evpos::to_string(cert.kind) << "\n";
  std::cout << "verdict: " << evpos::to_string(cert.verdict) << "\n";
  std::cout << "witness: " << (cert.witness ? real(*cert.witness) : std::string("none")) << "\n";
  std::cout << "horizon: " << real(cert.horizon) << "\n";
  if (cert.spectral_certificate) {
    const auto& s = *cert.spectral_certificate;
    std::cout << "Perron-Frobenius certificate: dominant eigenvalue " << cplx(s.dominant_eigenvalue) << ", gap "
              << real(s.gap) << ", min right " << real(s.right_min) << ", min left " << real(s.left_min) << "\n";
  } else {
    std::cout << "Perron-Frobenius certificate: none\n";
  }
  return kExitOk;
}

int cmd_converge(const Common& c, const std::string& mode) {
  const auto m = evpos::read_matrix_file(c.path);
  const double tol = c.tol.value_or(evpos::kDefaultConvergenceTol);
  const double horizon = c.horizon > 0 ? c.horizon : evpos::kDefaultHorizon;
  if (mode == "bounded") {
    const auto b = evpos::is_bounded(m, tol, horizon);
    if (c.json) {
      std::cout << evpos::to_json(b).dump(2) << "\n";
    } else {
      std::cout << "bounded: " << (b.bounded ? "yes" : "no") << " (sampled sup " << real(b.bound_estimate)
                << " up to t = " << real(b.horizon) << ")\n";
    }
    return kExitOk;
  }
  evpos::ConvergenceVerdict v;
  if (mode == "strong") v = evpos::strong_convergence_verdict(m, horizon, tol);
  else if (mode == "uniform") v = evpos::uniform_convergence_verdict(m, horizon, tol);
  else if (mode == "balancing") v = evpos::uniform_balancing_verdict(m, horizon, tol);
  else v = evpos::is_mean_ergodic(m, horizon, tol);
  if (c.json) {
    std::cout << evpos::to_json(v).dump(2) << "\n";
    return kExitOk;
  }
  std::cout << "mode: " << evpos::to_string(v.mode) << "\n";
  std::cout << "converges: " << (v.converges ? "yes" : "no") << "\n";
  std::cout << "tail defect: " << real(v.tail_defect) << "\n";
  std::cout << "bounded: " << (v.certificate.bounded ? "yes" : "no") << ", s(A) = " << real(v.certificate.spectral_bound)
            << ", peripheral " << cplx_list(v.certificate.peripheral) << "\n";
  if (v.limit_rank) std::cout << "limit rank: " << *v.limit_rank << "\n";
  if (v.limit) {
    std::cout << "limit:\n";
    print_matrix(*v.limit, "  ");
  }
  return kExitOk;
}

void print_report(const evpos::CheckReport& r) {
  std::cout << r.theorem_id << ": " << evpos::to_string(r.verdict) << "\n";
  for (const auto& h : r.hypotheses)
    std::cout << "  hypothesis [" << (h.held ? "held" : "failed") << "] " << h.name << ": " << h.evidence << "\n";
  for (const auto& k : r.conclusions)
    std::cout << "  conclusion [" << (k.held ? "held" : "failed") << "] " << k.name << ": " << k.evidence << "\n";
  for (const auto& n : r.notes) std::cout << "  note: " << n << "\n";
}

struct CheckArgs {
  std::string theorem;
  std::string projection;
  std::string lambda;
  std::optional<int> k0;
  bool sequential = false;
};

int cmd_check(const Common& c, const CheckArgs& a) {
  const auto& ids = evpos::theorem_ids();
  if (a.theorem != "all" && std::find(ids.begin(), ids.end(), a.theorem) == ids.end()) {
    std::string list;
    for (const auto& id : ids) list += " " + id;
    std::cerr << "error: unknown theorem id '" << a.theorem << "'; expected all or one of:" << list << "\n";
    return kExitUsage;
  }
  const auto m = evpos::read_matrix_file(c.path);
  evpos::CheckConfig cfg;
  if (c.tol) cfg.tol = *c.tol;
  if (c.horizon > 0) cfg.t_max = c.horizon;
  cfg.steps = c.steps;
  cfg.seed = c.seed;
  std::optional<evpos::ComplexMatrix> projection;
  if (!a.projection.empty()) projection = evpos::read_matrix_file(a.projection);
  std::optional<evpos::Complex> lambda;
  if (!a.lambda.empty()) {
    lambda = parse_complex(a.lambda);
    if (!lambda) {
      std::cerr << "error: --lambda expects 're' or 're,im', got '" << a.lambda << "'\n";
      return kExitUsage;
    }
  }

  std::vector<evpos::CheckReport> reports;
  if (a.theorem == "all") {
    reports = evpos::check_all(m, cfg, projection, !a.sequential);
  } else if (a.theorem == "thm-2.1") reports.push_back(evpos::check_cyclicity_thm21(m, cfg));
  else if (a.theorem == "cor-2.2") reports.push_back(evpos::check_strong_convergence_cor22(m, cfg));
  else if (a.theorem == "thm-3.1") reports.push_back(evpos::check_thm31(m, cfg));
  else if (a.theorem == "lem-3.2") reports.push_back(evpos::check_lemma32(m, cfg));
  else if (a.theorem == "thm-4.1") reports.push_back(evpos::check_niiro_sawashima(m, cfg));
  else if (a.theorem == "lem-4.2") {
    if (!projection) {
      std::cerr << "error: lem-4.2 needs --projection <MatrixFile> (the matrix argument is Q)\n";
      return kExitUsage;
    }
    reports.push_back(evpos::check_domination_lemma42(m, *projection, cfg));
  } else if (a.theorem == "thm-4.3") reports.push_back(evpos::check_eigenspace_bound_thm43(m, cfg));
  else if (a.theorem == "eq-4.2-sequences") reports.push_back(evpos::check_sequences_eq42(m, lambda, a.k0, cfg));
  else if (a.theorem == "thm-5.1") reports.push_back(evpos::check_thm51(m, cfg));
  else if (a.theorem == "thm-5.2") reports.push_back(evpos::check_thm52(m, cfg));
  else reports.push_back(evpos::check_lemma53(m, cfg));

  bool violation = false;
  for (const auto& r : reports) violation = violation || r.verdict == evpos::CheckVerdict::violation;
  if (c.json) {
    if (reports.size() == 1) {
      std::cout << evpos::to_json(reports.front()).dump(2) << "\n";
    } else {
      evpos::json arr = evpos::json::array();
      for (const auto& r : reports) arr.push_back(evpos::to_json(r));
      std::cout << arr.dump(2) << "\n";
    }
  } else {
    for (const auto& r : reports) print_report(r);
  }
  return violation ? kExitViolation : kExitOk;
}

struct GenerateArgs {
  std::string family;
  std::size_t dim = 3;
  std::string out;
  evpos::GeneratorParams params;
  std::optional<double> s;
  bool no_rotation = false;
};

int cmd_generate(const Common& c, GenerateArgs g) {
  g.params.s = g.s;
  g.params.rotation = !g.no_rotation;
  const auto bundle = evpos::generate(evpos::parse_family(g.family), g.dim, c.seed, g.params);
  const std::string text = evpos::format_matrix_file(bundle.matrix);
  const std::string meta = evpos::metadata_json(bundle).dump(2) + "\n";
  if (g.out.empty()) {
    std::cout << text;
    if (c.json) std::cout << meta;
    return kExitOk;
  }
  evpos::write_text_file(g.out, text);
  evpos::write_text_file(g.out + ".meta.json", meta);
  if (!c.json) std::cout << "wrote " << g.out << " and " << g.out << ".meta.json\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evpos: spectral analysis and theorem checks for eventually positive matrix semigroups and powers"};
  app.require_subcommand(1);

  Common common;
  bool shift = false;
  auto* analyze = app.add_subcommand("analyze", "spectral bound, radius, peripheral set and pole orders");
  add_common(analyze, common);
  analyze->add_flag("--shift", shift, "report the axis spectrum of A - s(A) I");

  std::string pos_mode = "semigroup";
  auto* positivity = app.add_subcommand("positivity", "eventual positivity of powers or of the semigroup");
  add_common(positivity, common);
  positivity->add_option("--mode", pos_mode, "power or semigroup")->check(CLI::IsMember({"power", "semigroup"}));

  std::string conv_mode = "strong";
  auto* converge = app.add_subcommand("converge", "boundedness, convergence, balancing, mean ergodicity");
  add_common(converge, common);
  converge->add_option("--mode", conv_mode, "strong, uniform, balancing, mean-ergodic or bounded")
      ->check(CLI::IsMember({"strong", "uniform", "balancing", "mean-ergodic", "bounded"}));

  CheckArgs check_args;
  auto* check = app.add_subcommand("check", "run one theorem checker, or all of them");
  check->add_option("theorem", check_args.theorem, "theorem id or 'all'")->required();
  add_common(check, common);
  check->add_option("--projection", check_args.projection, "projection P for lem-4.2 (MatrixFile)");
  check->add_option("--lambda", check_args.lambda, "eq-4.2-sequences: lambda as 're' or 're,im' (default r(T))");
  check->add_option("--k0", check_args.k0, "eq-4.2-sequences: positivity exponent (default the witness)");
  check->add_flag("--sequential", check_args.sequential, "run 'all' without threads");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "write a seeded instance and its metadata sidecar");
  add_common(generate, common, false);
  generate->add_option("--family", gen.family,
                       "evpos-semigroup, metzler, evpos-power, rotation-counterexample, jordan-counterexample")
      ->required();
  generate->add_option("--dim", gen.dim, "dimension")->check(CLI::PositiveNumber);
  generate->add_option("--out", gen.out, "output MatrixFile path (sidecar is <out>.meta.json)");
  generate->add_option("--s", gen.s, "spectral bound (evpos-semigroup) or shift (metzler)");
  generate->add_option("--gap", gen.params.gap, "spectral gap (evpos-semigroup)");
  generate->add_flag("--no-rotation", gen.no_rotation, "no rotating slowest mode");
  generate->add_option("--radius", gen.params.radius, "spectral radius (evpos-power)");
  generate->add_option("--contraction", gen.params.contraction, "complement radius / r (evpos-power)");
  generate->add_option("--period", gen.params.period, "block-cyclic period (evpos-power)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*analyze) return cmd_analyze(common, shift);
    if (*positivity) return cmd_positivity(common, pos_mode);
    if (*converge) return cmd_converge(common, conv_mode);
    if (*check) return cmd_check(common, check_args);
    if (*generate) return cmd_generate(common, gen);
  } catch (const evpos::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const evpos::DimensionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const evpos::ParameterError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const evpos::NotSpectralValue& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const evpos::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

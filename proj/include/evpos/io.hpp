#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "evpos/checkers.hpp"
#include "evpos/dynamics.hpp"
#include "evpos/error.hpp"
#include "evpos/generators.hpp"
#include "evpos/matrix.hpp"
#include "evpos/positivity.hpp"
#include "evpos/spectral.hpp"

namespace evpos {

using json = nlohmann::ordered_json;

/// Malformed input file; what() names the file and the offending location.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

namespace detail {

inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline double finite_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ParseError(where + ": number is not finite");
  return x;
}

}  // namespace detail

inline json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const std::vector<Complex>& zs) {
  json a = json::array();
  for (const auto& z : zs) a.push_back(to_json(z));
  return a;
}

inline json to_json(const ComplexMatrix& m) {
  json entries = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    entries.push_back(std::move(row));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

/**
 * @brief Parses a MatrixFile object {"rows", "cols", "entries"}.
 *
 * entries is a list of rows, each a list of [re, im] pairs. `where` prefixes
 * error locations.
 */
inline ComplexMatrix matrix_from_json(const json& j, const std::string& where = "matrix") {
  if (!j.is_object()) throw ParseError(where + ": expected an object with rows, cols, entries");
  for (const char* key : {"rows", "cols", "entries"})
    if (!j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  if (!j["rows"].is_number_unsigned() || !j["cols"].is_number_unsigned())
    throw ParseError(where + ": rows and cols must be positive integers");
  const std::size_t rows = j["rows"].get<std::size_t>();
  const std::size_t cols = j["cols"].get<std::size_t>();
  if (rows == 0 || cols == 0) throw ParseError(where + ": rows and cols must be positive");
  const json& e = j["entries"];
  if (!e.is_array() || e.size() != rows)
    throw ParseError(where + ".entries: expected " + std::to_string(rows) + " rows");
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string row_at = where + ".entries[" + std::to_string(i) + "]";
    if (!e[i].is_array() || e[i].size() != cols)
      throw ParseError(row_at + ": expected " + std::to_string(cols) + " entries");
    for (std::size_t k = 0; k < cols; ++k) {
      const std::string at = row_at + "[" + std::to_string(k) + "]";
      const json& z = e[i][k];
      if (!z.is_array() || z.size() != 2) throw ParseError(at + ": expected an [re, im] pair");
      m(i, k) = Complex(detail::finite_number(z[0], at + "[0]"), detail::finite_number(z[1], at + "[1]"));
    }
  }
  return m;
}

inline json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& err) {
    throw ParseError(source + ": invalid JSON at " + detail::line_col(text, err.byte) + " (" + err.what() + ")");
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline ComplexMatrix read_matrix_file(const std::string& path) {
  return matrix_from_json(parse_json_text(read_text_file(path), path), path);
}

namespace detail {

inline std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

/// MatrixFile text with every number printed as %.17g (exact double round trip).
inline std::string format_matrix_file(const ComplexMatrix& m) {
  std::string s = "{\n  \"rows\": " + std::to_string(m.rows()) + ",\n  \"cols\": " + std::to_string(m.cols()) +
                  ",\n  \"entries\": [\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    s += "    [";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      s += (j ? ", [" : "[") + detail::g17(m(i, j).real()) + ", " + detail::g17(m(i, j).imag()) + "]";
    }
    s += (i + 1 < m.rows()) ? "],\n" : "]\n";
  }
  return s + "  ]\n}\n";
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ": cannot open file for writing");
  out << text;
  if (!out) throw Error(path + ": write failed");
}

inline void write_matrix_file(const std::string& path, const ComplexMatrix& m) {
  write_text_file(path, format_matrix_file(m));
}

inline json to_json(const EigenCluster& c) {
  return json{{"eigenvalue", to_json(c.value)},
              {"algebraic_multiplicity", c.algebraic},
              {"geometric_multiplicity", c.geometric},
              {"index", c.index}};
}

inline json to_json(const SpectrumReport& r) {
  json clusters = json::array();
  for (const auto& c : r.eigen.clusters) clusters.push_back(to_json(c));
  return json{{"spectral_bound", r.spectral_bound},
              {"spectral_radius", r.spectral_radius},
              {"peripheral_set", to_json(r.peripheral_set)},
              {"peripheral_point_set_on_axis", to_json(r.peripheral_point_set_on_axis)},
              {"axis_shift", r.axis_shift},
              {"essential_spectral_radius", r.essential_spectral_radius},
              {"growth_note", r.growth_note},
              {"eigenvalues", to_json(r.eigen.eigenvalues)},
              {"clusters", std::move(clusters)},
              {"tolerances",
               {{"tol_cluster", r.eigen.tol_cluster}, {"tol_rank", r.eigen.tol_rank}, {"tol_peripheral", r.tol_peripheral}}}};
}

inline json to_json(const ProjectionResult& p) {
  json j{{"eigenvalue", to_json(p.eigenvalue)},
         {"method", to_string(p.method)},
         {"algebraic_multiplicity", p.algebraic_multiplicity},
         {"projection", to_json(p.projection)},
         {"residuals",
          {{"idempotency", p.residuals.idempotency},
           {"commutation", p.residuals.commutation},
           {"trace_gap", p.residuals.trace_gap}}}};
  if (p.method == ProjectionMethod::algebraic) j["condition"] = p.condition;
  else {
    j["radius"] = p.radius;
    j["nodes"] = p.nodes;
  }
  return j;
}

inline json to_json(const PositivityCertificate& c) {
  json j{{"kind", to_string(c.kind)}, {"verdict", to_string(c.verdict)}};
  j["witness"] = c.witness ? json(*c.witness) : json(nullptr);
  if (c.spectral_certificate) {
    const auto& s = *c.spectral_certificate;
    j["spectral_certificate"] = json{{"dominant_eigenvalue", to_json(s.dominant_eigenvalue)},
                                     {"right_min", s.right_min},
                                     {"left_min", s.left_min},
                                     {"gap", s.gap},
                                     {"right_vector", to_json(s.right_vector)},
                                     {"left_vector", to_json(s.left_vector)}};
  } else {
    j["spectral_certificate"] = nullptr;
  }
  j["horizon"] = c.horizon;
  j["tol_pos"] = c.tol_pos < 0.0 ? json("default") : json(c.tol_pos);
  return j;
}

inline json to_json(const BoundednessResult& b) {
  return json{{"bounded", b.bounded},
              {"method", b.method},
              {"bound_estimate", b.bound_estimate},
              {"sampled_bounded", b.sampled_bounded},
              {"horizon", b.horizon}};
}

inline json to_json(const ConvergenceVerdict& v) {
  const auto& c = v.certificate;
  json cert{{"bounded", c.bounded},
            {"spectral_bound", c.spectral_bound},
            {"pole_order_at_bound", c.pole_order_at_bound ? json(*c.pole_order_at_bound) : json(nullptr)},
            {"peripheral", to_json(c.peripheral)},
            {"axis_spectrum", to_json(c.axis_spectrum)},
            {"axis_only_zero", c.axis_only_zero},
            {"spectral_converges", c.spectral_converges},
            {"numeric_converges", c.numeric_converges},
            {"horizon", c.horizon}};
  json j{{"mode", to_string(v.mode)},
         {"converges", v.converges},
         {"limit", v.limit ? to_json(*v.limit) : json(nullptr)},
         {"tail_defect", v.tail_defect},
         {"certificate", std::move(cert)}};
  if (v.limit_rank) j["limit_rank"] = *v.limit_rank;
  j["notes"] = v.notes;
  return j;
}

inline json to_json(const WitnessValue& w) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) return x;
        else if constexpr (std::is_same_v<T, std::vector<double>>) return x;
        else return to_json(x);
      },
      w);
}

inline json to_json(const CheckItem& i) { return json{{"name", i.name}, {"held", i.held}, {"evidence", i.evidence}}; }

inline json to_json(const CheckReport& r) {
  json hyps = json::array(), concl = json::array(), tols = json::object(), wits = json::object();
  for (const auto& h : r.hypotheses) hyps.push_back(to_json(h));
  for (const auto& c : r.conclusions) concl.push_back(to_json(c));
  for (const auto& [k, v] : r.tolerances) tols[k] = v;
  for (const auto& w : r.witnesses) wits[w.name] = to_json(w.value);
  return json{{"theorem_id", r.theorem_id}, {"verdict", to_string(r.verdict)},
              {"hypotheses", std::move(hyps)}, {"conclusions", std::move(concl)},
              {"tolerances", std::move(tols)}, {"witnesses", std::move(wits)},
              {"notes", r.notes},              {"seed", r.seed}};
}

/// Metadata sidecar for a generated instance (mirrors its ground truth).
inline json metadata_json(const InstanceBundle& b) {
  const auto& g = b.ground_truth;
  auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  json expected = json::object();
  for (const auto& [id, verdict] : g.expected_verdicts) expected[id] = verdict;
  const auto& p = b.params;
  return json{{"family", to_string(b.family)},
              {"dim", b.dim},
              {"seed", b.seed},
              {"params",
               {{"s", opt(p.s)},
                {"gap", p.gap},
                {"rotation", p.rotation},
                {"omega", p.omega},
                {"radius", p.radius},
                {"contraction", p.contraction},
                {"angle", p.angle},
                {"period", p.period}}},
              {"ground_truth",
               {{"spectral_bound", opt(g.spectral_bound)},
                {"spectral_radius", opt(g.spectral_radius)},
                {"gap", opt(g.gap)},
                {"projection", g.projection ? to_json(*g.projection) : json(nullptr)},
                {"projection_rank", g.projection_rank ? json(*g.projection_rank) : json(nullptr)},
                {"expected_verdicts", std::move(expected)}}}};
}

}  // namespace evpos

#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "smirnovkit/expr.hpp"
#include "smirnovkit/frostman.hpp"
#include "smirnovkit/inner_outer.hpp"

namespace smirnovkit {

struct SpecIssue {
  std::string path;
  std::string message;
};

// Input validation failure carrying every issue found in one pass.
class SpecError : public std::invalid_argument {
 public:
  explicit SpecError(std::vector<SpecIssue> issues)
      : std::invalid_argument(render(issues)), issues_(std::move(issues)) {}
  const std::vector<SpecIssue>& issues() const { return issues_; }

 private:
  static std::string render(const std::vector<SpecIssue>& issues) {
    std::string acc = "invalid function spec:";
    for (const auto& i : issues) acc += "\n  " + i.path + ": " + i.message;
    return acc;
  }
  std::vector<SpecIssue> issues_;
};

// Parsed document: a function tree plus an optional planar measure for the
// potential-theoretic subcommands.
struct FunctionSpecDocument {
  int version = 1;
  int dim = 1;
  FunctionExpr root;
  std::optional<PlanarMeasure> measure;
};

struct RunConfig {
  int grid_nodes = 0;  // 0 = per-subcommand default
  std::optional<double> phase_offset;
  int ladder_j_min = 1;
  int ladder_j_max = 10;
  std::optional<double> ladder_r_max;  // default 1 - 1e-3
  double tol_quad = kQuadTol;
  double gap_tol = kGapTol;
  double boundary_tol = kBoundaryDefectTol;
  std::optional<std::array<double, 5>> lambda_rect;  // re0, re1, im0, im1, step
  std::optional<Complex> eval_point;
  int k_max = 8;
  std::string out_path;  // empty = stdout

  void validate() const {
    if (grid_nodes != 0 && (grid_nodes < 64 || (grid_nodes & (grid_nodes - 1)) != 0))
      throw std::invalid_argument("RunConfig: nodes must be a power of two, at least 64");
    if (ladder_j_min < 1 || ladder_j_max < ladder_j_min)
      throw std::invalid_argument("RunConfig: bad ladder exponents");
    if (ladder_r_max && !(*ladder_r_max > 0.0 && *ladder_r_max < 1.0))
      throw std::invalid_argument("RunConfig: r_max must lie in (0, 1)");
    if (!(tol_quad > 0.0) || !(gap_tol > 0.0) || !(boundary_tol > 0.0))
      throw std::invalid_argument("RunConfig: tolerances must be positive");
    if (k_max < 1) throw std::invalid_argument("RunConfig: k_max must be positive");
  }

  int resolved_nodes(const std::string& subcommand) const {
    if (grid_nodes != 0) return grid_nodes;
    return subcommand == "frostman-scan" ? 8192 : kDefaultNodes;
  }
  CircleGrid make_grid(const std::string& subcommand) const {
    return CircleGrid(resolved_nodes(subcommand), phase_offset.value_or(-1.0));
  }
  RadialLadder make_ladder() const {
    return RadialLadder(ladder_j_min, ladder_j_max, ladder_r_max.value_or(1.0 - 1e-3));
  }
};

namespace spec_detail {

using nlohmann::json;

inline void issue(std::vector<SpecIssue>& issues, const std::string& path,
                  const std::string& message) {
  issues.push_back({path, message});
}

inline std::optional<double> parse_real(const json& j, const std::string& path,
                                        std::vector<SpecIssue>& issues) {
  if (!j.is_number()) {
    issue(issues, path, "expected a number");
    return std::nullopt;
  }
  return j.get<double>();
}

inline std::optional<Complex> parse_complex(const json& j, const std::string& path,
                                            std::vector<SpecIssue>& issues) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    issue(issues, path, "expected a complex number as [re, im]");
    return std::nullopt;
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline std::optional<Matrix> parse_matrix(const json& j, const std::string& path,
                                          std::vector<SpecIssue>& issues) {
  if (!j.is_array() || j.empty()) {
    issue(issues, path, "expected a matrix as an array of rows");
    return std::nullopt;
  }
  const std::size_t n = j.size();
  if (n > static_cast<std::size_t>(kMaxDim)) {
    issue(issues, path, "matrix dimension exceeds the cap");
    return std::nullopt;
  }
  Matrix m(static_cast<int>(n), static_cast<int>(n));
  for (std::size_t r = 0; r < n; ++r) {
    if (!j[r].is_array() || j[r].size() != n) {
      issue(issues, path + "[" + std::to_string(r) + "]", "expected a square row of length " +
                                                              std::to_string(n));
      return std::nullopt;
    }
    for (std::size_t c = 0; c < n; ++c) {
      const auto v = parse_complex(j[r][c], path + "[" + std::to_string(r) + "][" +
                                                std::to_string(c) + "]",
                                   issues);
      if (!v) return std::nullopt;
      m(static_cast<int>(r), static_cast<int>(c)) = *v;
    }
  }
  return m;
}

inline std::optional<BoundaryWeight> parse_weight(const json& j, const std::string& path,
                                                  std::vector<SpecIssue>& issues) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    issue(issues, path, "expected a weight object with a string 'kind'");
    return std::nullopt;
  }
  const std::string kind = j["kind"].get<std::string>();
  try {
    if (kind == "constant") {
      const auto v = parse_real(j.value("value", json()), path + ".value", issues);
      if (!v) return std::nullopt;
      return BoundaryWeight::constant(*v);
    }
    if (kind == "abs_poly") {
      if (!j.contains("coefficients") || !j["coefficients"].is_array()) {
        issue(issues, path + ".coefficients", "expected an array of complex coefficients");
        return std::nullopt;
      }
      std::vector<Complex> coeff;
      for (std::size_t i = 0; i < j["coefficients"].size(); ++i) {
        const auto c = parse_complex(j["coefficients"][i],
                                     path + ".coefficients[" + std::to_string(i) + "]", issues);
        if (!c) return std::nullopt;
        coeff.push_back(*c);
      }
      return BoundaryWeight::abs_poly(std::move(coeff));
    }
    if (kind == "grid") {
      if (!j.contains("samples") || !j["samples"].is_array()) {
        issue(issues, path + ".samples", "expected an array of nonnegative samples");
        return std::nullopt;
      }
      std::vector<double> samples;
      for (std::size_t i = 0; i < j["samples"].size(); ++i) {
        const auto v =
            parse_real(j["samples"][i], path + ".samples[" + std::to_string(i) + "]", issues);
        if (!v) return std::nullopt;
        samples.push_back(*v);
      }
      return BoundaryWeight::grid_samples(std::move(samples));
    }
  } catch (const std::invalid_argument& e) {
    issue(issues, path, e.what());
    return std::nullopt;
  }
  issue(issues, path + ".kind", "unknown weight kind '" + kind + "'");
  return std::nullopt;
}

inline std::optional<std::vector<CircleAtom>> parse_circle_atoms(
    const json& j, const std::string& path, const char* weight_key,
    std::vector<SpecIssue>& issues) {
  if (!j.is_array() || j.empty()) {
    issue(issues, path, "expected a nonempty array of atoms");
    return std::nullopt;
  }
  std::vector<CircleAtom> atoms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string apath = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_object() || !j[i].contains("location") || !j[i].contains(weight_key)) {
      issue(issues, apath, std::string("expected an atom with 'location' and '") + weight_key +
                               "'");
      return std::nullopt;
    }
    const auto loc = parse_complex(j[i]["location"], apath + ".location", issues);
    const auto w = parse_real(j[i][weight_key], apath + "." + weight_key, issues);
    if (!loc || !w) return std::nullopt;
    if (std::abs(std::abs(*loc) - 1.0) > kAtomCircleTol) {
      issue(issues, apath + ".location", "atom must lie on the unit circle (within 1e-9)");
      return std::nullopt;
    }
    atoms.push_back({*loc, *w});
  }
  return atoms;
}

inline std::optional<FunctionExpr> parse_node(const json& j, int dim, const std::string& path,
                                              std::vector<SpecIssue>& issues);

inline std::optional<std::vector<FunctionExpr>> parse_children(const json& j, int dim,
                                                               const std::string& path,
                                                               std::vector<SpecIssue>& issues) {
  if (!j.is_array() || j.empty()) {
    issue(issues, path, "expected a nonempty array of child nodes");
    return std::nullopt;
  }
  std::vector<FunctionExpr> children;
  bool ok = true;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto c = parse_node(j[i], dim, path + "[" + std::to_string(i) + "]", issues);
    if (c)
      children.push_back(*c);
    else
      ok = false;
  }
  if (!ok) return std::nullopt;
  return children;
}

inline std::optional<FunctionExpr> parse_node(const json& j, int dim, const std::string& path,
                                              std::vector<SpecIssue>& issues) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    issue(issues, path, "expected a node object with a string 'kind'");
    return std::nullopt;
  }
  const std::string kind = j["kind"].get<std::string>();
  try {
    if (kind == "constant") {
      const auto m = parse_matrix(j.value("matrix", json()), path + ".matrix", issues);
      if (!m) return std::nullopt;
      if (m->rows() != dim) {
        issue(issues, path + ".matrix", "constant dimension does not match the ambient dimension");
        return std::nullopt;
      }
      return FunctionExpr::constant(*m);
    }
    if (kind == "coordinate_z") return FunctionExpr::coordinate_z(dim);
    if (kind == "scalar_blaschke") {
      const auto a = parse_complex(j.value("zero", json()), path + ".zero", issues);
      if (!a) return std::nullopt;
      if (!(std::abs(*a) < 1.0)) {
        issue(issues, path + ".zero", "Blaschke zero must lie in the open unit disc");
        return std::nullopt;
      }
      return FunctionExpr::scalar_blaschke_node(*a, dim);
    }
    if (kind == "bp_product") {
      const std::string side_name = j.value("side", "left");
      if (side_name != "left" && side_name != "right") {
        issue(issues, path + ".side", "side must be 'left' or 'right'");
        return std::nullopt;
      }
      Matrix unitary = Matrix::Identity(dim, dim);
      if (j.contains("unitary")) {
        const auto u = parse_matrix(j["unitary"], path + ".unitary", issues);
        if (!u) return std::nullopt;
        unitary = *u;
      }
      if (!j.contains("factors") || !j["factors"].is_array()) {
        issue(issues, path + ".factors", "expected an array of elementary factors");
        return std::nullopt;
      }
      std::vector<ElementaryFactor> factors;
      for (std::size_t i = 0; i < j["factors"].size(); ++i) {
        const std::string fpath = path + ".factors[" + std::to_string(i) + "]";
        const json& fj = j["factors"][i];
        if (!fj.is_object() || !fj.contains("zero") || !fj.contains("projection")) {
          issue(issues, fpath, "expected a factor with 'zero' and 'projection'");
          return std::nullopt;
        }
        const auto zero = parse_complex(fj["zero"], fpath + ".zero", issues);
        const auto proj = parse_matrix(fj["projection"], fpath + ".projection", issues);
        if (!zero || !proj) return std::nullopt;
        if (!(std::abs(*zero) < 1.0)) {
          issue(issues, fpath + ".zero", "Blaschke zero must lie in the open unit disc");
          return std::nullopt;
        }
        try {
          factors.emplace_back(*zero, Orthoprojection(*proj));
        } catch (const std::invalid_argument& e) {
          issue(issues, fpath + ".projection", e.what());
          return std::nullopt;
        }
      }
      const ProductSide side = side_name == "left" ? ProductSide::left : ProductSide::right;
      return FunctionExpr::bp_product(BPProduct(std::move(factors), side, unitary));
    }
    if (kind == "singular_inner") {
      const auto atoms =
          parse_circle_atoms(j.value("atoms", json()), path + ".atoms", "mass", issues);
      if (!atoms) return std::nullopt;
      return FunctionExpr::singular_inner(AtomicSingularMeasure(*atoms), dim);
    }
    if (kind == "herglotz") {
      const auto atoms =
          parse_circle_atoms(j.value("atoms", json()), path + ".atoms", "coefficient", issues);
      if (!atoms) return std::nullopt;
      return FunctionExpr::herglotz(*atoms, dim);
    }
    if (kind == "outer") {
      if (!j.contains("weight")) {
        issue(issues, path + ".weight", "outer node requires a weight");
        return std::nullopt;
      }
      const auto weight = parse_weight(j["weight"], path + ".weight", issues);
      if (!weight) return std::nullopt;
      Complex normalization(1.0, 0.0);
      if (j.contains("normalization")) {
        const auto c = parse_complex(j["normalization"], path + ".normalization", issues);
        if (!c) return std::nullopt;
        normalization = *c;
      }
      int synthesis = kDefaultNodes;
      if (j.contains("synthesis_nodes")) {
        if (!j["synthesis_nodes"].is_number_integer()) {
          issue(issues, path + ".synthesis_nodes", "expected an integer node count");
          return std::nullopt;
        }
        synthesis = j["synthesis_nodes"].get<int>();
      }
      return FunctionExpr::outer(*weight, dim, synthesis, normalization);
    }
    if (kind == "sum" || kind == "product") {
      const auto children = parse_children(j.value("children", json()), dim, path + ".children",
                                           issues);
      if (!children) return std::nullopt;
      return kind == "sum" ? FunctionExpr::sum(*children) : FunctionExpr::product(*children);
    }
    if (kind == "diag") {
      const auto children =
          parse_children(j.value("children", json()), 1, path + ".children", issues);
      if (!children) return std::nullopt;
      if (static_cast<int>(children->size()) != dim) {
        issue(issues, path + ".children",
              "diag needs exactly " + std::to_string(dim) + " scalar children");
        return std::nullopt;
      }
      return FunctionExpr::diag(*children);
    }
    if (kind == "shift" || kind == "scale") {
      const char* key = kind == "shift" ? "lambda" : "factor";
      const auto s = parse_complex(j.value(key, json()), path + "." + key, issues);
      if (!j.contains("child")) {
        issue(issues, path + ".child", "expected a child node");
        return std::nullopt;
      }
      const auto child = parse_node(j["child"], dim, path + ".child", issues);
      if (!s || !child) return std::nullopt;
      return kind == "shift" ? FunctionExpr::shift(*child, *s) : FunctionExpr::scale(*child, *s);
    }
    if (kind == "transpose" || kind == "exp") {
      if (!j.contains("child")) {
        issue(issues, path + ".child", "expected a child node");
        return std::nullopt;
      }
      const int child_dim = kind == "exp" ? 1 : dim;
      const auto child = parse_node(j["child"], child_dim, path + ".child", issues);
      if (!child) return std::nullopt;
      return kind == "exp" ? FunctionExpr::exp_of(*child, dim) : FunctionExpr::transpose(*child);
    }
  } catch (const std::invalid_argument& e) {
    issue(issues, path, e.what());
    return std::nullopt;
  }
  issue(issues, path + ".kind", "unknown node kind '" + kind + "'");
  return std::nullopt;
}

inline std::optional<PlanarMeasure> parse_measure(const json& j, const std::string& path,
                                                  std::vector<SpecIssue>& issues) {
  if (!j.is_object()) {
    issue(issues, path, "expected a measure object");
    return std::nullopt;
  }
  std::vector<PlanarMeasure::Atom> atoms;
  std::vector<PlanarMeasure::Segment> segments;
  if (j.contains("atoms")) {
    if (!j["atoms"].is_array()) {
      issue(issues, path + ".atoms", "expected an array");
      return std::nullopt;
    }
    for (std::size_t i = 0; i < j["atoms"].size(); ++i) {
      const std::string apath = path + ".atoms[" + std::to_string(i) + "]";
      const auto loc = parse_complex(j["atoms"][i].value("location", json()), apath + ".location",
                                     issues);
      const auto mass = parse_real(j["atoms"][i].value("mass", json()), apath + ".mass", issues);
      if (!loc || !mass) return std::nullopt;
      atoms.push_back({*loc, *mass});
    }
  }
  if (j.contains("segments")) {
    if (!j["segments"].is_array()) {
      issue(issues, path + ".segments", "expected an array");
      return std::nullopt;
    }
    for (std::size_t i = 0; i < j["segments"].size(); ++i) {
      const std::string spath = path + ".segments[" + std::to_string(i) + "]";
      const auto a = parse_complex(j["segments"][i].value("a", json()), spath + ".a", issues);
      const auto b = parse_complex(j["segments"][i].value("b", json()), spath + ".b", issues);
      const auto density =
          parse_real(j["segments"][i].value("density", json()), spath + ".density", issues);
      if (!a || !b || !density) return std::nullopt;
      segments.push_back({*a, *b, *density});
    }
  }
  try {
    return PlanarMeasure(std::move(atoms), std::move(segments));
  } catch (const std::invalid_argument& e) {
    issue(issues, path, e.what());
    return std::nullopt;
  }
}

inline json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

inline json node_json(const FunctionExpr& f) {
  json j;
  switch (f.kind()) {
    case ExprKind::constant:
      j["kind"] = "constant";
      j["matrix"] = matrix_json(f.constant_matrix());
      return j;
    case ExprKind::coordinate_z:
      j["kind"] = "coordinate_z";
      return j;
    case ExprKind::scalar_blaschke:
      j["kind"] = "scalar_blaschke";
      j["zero"] = complex_json(f.scalar_param());
      return j;
    case ExprKind::bp_product: {
      j["kind"] = "bp_product";
      j["side"] = f.bp().side() == ProductSide::left ? "left" : "right";
      j["unitary"] = matrix_json(f.bp().unitary_constant());
      json factors = json::array();
      for (const auto& factor : f.bp().factors()) {
        json fj;
        fj["zero"] = complex_json(factor.zero);
        fj["projection"] = matrix_json(factor.projection.matrix());
        factors.push_back(fj);
      }
      j["factors"] = factors;
      return j;
    }
    case ExprKind::singular_inner: {
      j["kind"] = "singular_inner";
      json atoms = json::array();
      for (const auto& a : f.measure().atoms())
        atoms.push_back({{"location", complex_json(a.location)}, {"mass", a.weight}});
      j["atoms"] = atoms;
      return j;
    }
    case ExprKind::herglotz: {
      j["kind"] = "herglotz";
      json atoms = json::array();
      for (const auto& a : f.atom_list())
        atoms.push_back({{"location", complex_json(a.location)}, {"coefficient", a.weight}});
      j["atoms"] = atoms;
      return j;
    }
    case ExprKind::outer: {
      j["kind"] = "outer";
      const BoundaryWeight& w = f.weight_spec();
      json wj;
      switch (w.kind()) {
        case BoundaryWeight::Kind::constant:
          wj["kind"] = "constant";
          wj["value"] = w.constant_value();
          break;
        case BoundaryWeight::Kind::abs_poly: {
          wj["kind"] = "abs_poly";
          json coeff = json::array();
          for (const Complex& c : w.coefficients()) coeff.push_back(complex_json(c));
          wj["coefficients"] = coeff;
          break;
        }
        case BoundaryWeight::Kind::grid: {
          wj["kind"] = "grid";
          wj["samples"] = w.raw_samples();
          break;
        }
      }
      j["weight"] = wj;
      j["normalization"] = complex_json(f.scalar_param());
      j["synthesis_nodes"] = f.outer_part().grid().size();
      return j;
    }
    case ExprKind::sum:
    case ExprKind::product:
    case ExprKind::diag: {
      j["kind"] = f.kind() == ExprKind::sum ? "sum"
                  : f.kind() == ExprKind::product ? "product"
                                                  : "diag";
      json children = json::array();
      for (const auto& c : f.children()) children.push_back(node_json(c));
      j["children"] = children;
      return j;
    }
    case ExprKind::shift:
      j["kind"] = "shift";
      j["lambda"] = complex_json(f.scalar_param());
      j["child"] = node_json(f.children()[0]);
      return j;
    case ExprKind::scale:
      j["kind"] = "scale";
      j["factor"] = complex_json(f.scalar_param());
      j["child"] = node_json(f.children()[0]);
      return j;
    case ExprKind::transpose:
      j["kind"] = "transpose";
      j["child"] = node_json(f.children()[0]);
      return j;
    case ExprKind::exp:
      j["kind"] = "exp";
      j["child"] = node_json(f.children()[0]);
      return j;
  }
  throw std::logic_error("node_json: unknown node kind");
}

}  // namespace spec_detail

// Parses and validates a document; throws SpecError listing every problem.
inline FunctionSpecDocument parse_spec(const std::string& text) {
  std::vector<SpecIssue> issues;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    issues.push_back({"$", e.what()});
    throw SpecError(std::move(issues));
  }
  if (!j.is_object()) {
    issues.push_back({"$", "expected a top-level object"});
    throw SpecError(std::move(issues));
  }
  FunctionSpecDocument doc;
  if (!j.contains("version") || !j["version"].is_number_integer() ||
      j["version"].get<int>() != 1)
    issues.push_back({"version", "expected the integer 1"});
  if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<int>() < 1 ||
      j["dim"].get<int>() > kMaxDim) {
    issues.push_back({"dim", "expected an integer in [1, " + std::to_string(kMaxDim) + "]"});
    throw SpecError(std::move(issues));
  }
  doc.dim = j["dim"].get<int>();
  if (!j.contains("root")) {
    issues.push_back({"root", "missing function tree"});
    throw SpecError(std::move(issues));
  }
  const auto root = spec_detail::parse_node(j["root"], doc.dim, "root", issues);
  if (j.contains("measure")) {
    const auto measure = spec_detail::parse_measure(j["measure"], "measure", issues);
    if (measure) doc.measure = *measure;
  }
  if (!issues.empty() || !root) {
    if (issues.empty()) issues.push_back({"root", "invalid function tree"});
    throw SpecError(std::move(issues));
  }
  doc.root = *root;
  return doc;
}

inline std::string serialize_spec(const FunctionSpecDocument& doc) {
  nlohmann::json j;
  j["version"] = doc.version;
  j["dim"] = doc.dim;
  j["root"] = spec_detail::node_json(doc.root);
  if (doc.measure) {
    nlohmann::json m;
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : doc.measure->atoms())
      atoms.push_back({{"location", spec_detail::complex_json(a.location)}, {"mass", a.mass}});
    nlohmann::json segments = nlohmann::json::array();
    for (const auto& s : doc.measure->segments())
      segments.push_back({{"a", spec_detail::complex_json(s.a)},
                          {"b", spec_detail::complex_json(s.b)},
                          {"density", s.density}});
    if (!atoms.empty()) m["atoms"] = atoms;
    if (!segments.empty()) m["segments"] = segments;
    j["measure"] = m;
  }
  return j.dump(2) + "\n";
}

// CSV with one header row, LF line endings and 17 significant digits, so two
// runs over the same inputs emit byte-identical artifacts.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(std::span<const std::string> names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) out_ << ',';
      out_ << names[i];
    }
    out_ << '\n';
  }

  CsvWriter& field(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    sep();
    out_ << buf;
    return *this;
  }
  CsvWriter& field(int v) {
    sep();
    out_ << v;
    return *this;
  }
  CsvWriter& field(const std::string& v) {
    sep();
    out_ << v;
    return *this;
  }
  void end_row() {
    out_ << '\n';
    col_ = 0;
  }

 private:
  void sep() {
    if (col_++) out_ << ',';
  }
  std::ostream& out_;
  int col_ = 0;
};

namespace spec_detail {

inline void run_eval(const FunctionSpecDocument& doc, const RunConfig& config,
                     std::ostream& out) {
  if (!config.eval_point) throw std::invalid_argument("eval: requires an evaluation point");
  const Matrix value = doc.root.value(*config.eval_point);
  CsvWriter csv(out);
  const std::string names[] = {"row", "col", "re", "im"};
  csv.header(names);
  for (int r = 0; r < value.rows(); ++r)
    for (int c = 0; c < value.cols(); ++c) {
      csv.field(r).field(c).field(value(r, c).real()).field(value(r, c).imag());
      csv.end_row();
    }
}

inline void run_classify(const FunctionSpecDocument& doc, const RunConfig& config,
                         std::ostream& out) {
  const CircleGrid grid = config.make_grid("classify");
  const InnerClassification c =
      classify_inner(doc.root, grid, config.make_ladder(), config.boundary_tol);
  CsvWriter csv(out);
  const std::string names[] = {"is_inner", "is_singular", "is_blaschke", "boundary_defect",
                               "det_integral_limit"};
  csv.header(names);
  csv.field(c.is_inner ? 1 : 0)
      .field(c.is_singular ? 1 : 0)
      .field(c.is_blaschke ? 1 : 0)
      .field(c.boundary_defect)
      .field(c.det_integral_limit);
  csv.end_row();
}

inline void run_check_smirnov(const FunctionSpecDocument& doc, const RunConfig& config,
                              std::ostream& out) {
  const CircleGrid grid = config.make_grid("check-smirnov");
  const RadialLadder ladder = config.make_ladder();
  const Complex probes[] = {{0.0, 0.0},   {0.5, 0.0},  {-0.5, 0.0},
                            {0.0, 0.5},   {0.0, -0.5}, {0.25, 0.25}};
  const MembershipReport report =
      smirnov_majorant_check(doc.root, probes, grid, ladder, config.tol_quad);

  std::vector<std::vector<double>> per_radius;
  for (double r : ladder.radii()) {
    const LogNormSamples rung = interior_log_norms(doc.root, r, grid);
    std::vector<double> values;
    values.reserve(rung.values.size());
    for (std::size_t j = 0; j < rung.values.size(); ++j)
      values.push_back(rung.kept[j] ? std::max(rung.values[j], 0.0) : 0.0);
    per_radius.push_back(std::move(values));
  }
  const double deltas[] = {0.1, 0.03, 0.01};
  const IntegrabilityReport ui = uniform_integrability_diagnostic(per_radius, deltas);

  double worst = 0.0;
  for (const auto& v : report.majorant_violations) worst = std::max(worst, v.lhs - v.rhs);
  CsvWriter csv(out);
  const std::string names[] = {"nevanlinna_sup",     "majorant_violations", "worst_violation",
                               "ui_worst_mass",      "ui_pass",             "dropped_mass",
                               "smirnov_verdict"};
  csv.header(names);
  csv.field(report.nevanlinna_sup)
      .field(static_cast<int>(report.majorant_violations.size()))
      .field(worst)
      .field(ui.worst_small_set_mass.back().second)
      .field(ui.pass ? 1 : 0)
      .field(report.dropped_mass)
      .field(report.smirnov_verdict == SmirnovVerdict::pass   ? std::string("pass")
             : report.smirnov_verdict == SmirnovVerdict::fail ? std::string("fail")
                                                              : std::string("undetermined"));
  csv.end_row();
}

inline void run_factor_scalar(const FunctionSpecDocument& doc, const RunConfig& config,
                              std::ostream& out) {
  const CircleGrid grid = config.make_grid("factor-scalar");
  const ScalarFactorization split = scalar_inner_outer_split(doc.root, grid, config.make_ladder());
  const Complex e0 = split.outer_at(Complex(0.0, 0.0));
  CsvWriter csv(out);
  const std::string names[] = {"outer0_re", "outer0_im", "interior_excess", "boundary_defect",
                               "dropped_mass"};
  csv.header(names);
  csv.field(e0.real())
      .field(e0.imag())
      .field(split.interior_excess)
      .field(split.boundary_defect)
      .field(split.dropped_mass);
  csv.end_row();
}

inline void run_frostman_scan(const FunctionSpecDocument& doc, const RunConfig& config,
                              std::ostream& out) {
  if (!config.lambda_rect)
    throw std::invalid_argument("frostman-scan: requires a lambda rectangle");
  const auto& r = *config.lambda_rect;
  const std::vector<Complex> lambdas = lambda_rectangle(r[0], r[1], r[2], r[3], r[4]);
  const CircleGrid grid = config.make_grid("frostman-scan");
  const std::vector<GapReport> reports =
      frostman_scan(doc.root, lambdas, grid, config.make_ladder(), config.gap_tol,
                    config.tol_quad);
  CsvWriter csv(out);
  const std::string names[] = {"lambda_re", "lambda_im", "v", "v_limit", "gap", "verdict"};
  csv.header(names);
  for (const GapReport& g : reports) {
    csv.field(g.lambda.real())
        .field(g.lambda.imag())
        .field(g.v_boundary)
        .field(g.v_limit_estimate)
        .field(g.gap)
        .field(g.blaschke_verdict ? 1 : 0);
    csv.end_row();
  }
}

inline void run_potential(const FunctionSpecDocument& doc, const RunConfig& config,
                          std::ostream& out) {
  if (!doc.measure) throw std::invalid_argument("potential: requires a measure in the spec");
  CsvWriter csv(out);
  if (config.eval_point) {
    const Matrix a = doc.root.value(*config.eval_point);
    const MatrixPotential p = matrix_potential(*doc.measure, a);
    const std::string names[] = {"phi", "phi_plus", "phi_minus"};
    csv.header(names);
    csv.field(p.phi).field(p.phi_plus).field(p.phi_minus);
    csv.end_row();
    return;
  }
  if (!config.lambda_rect)
    throw std::invalid_argument("potential: requires a lambda rectangle or an evaluation point");
  const auto& r = *config.lambda_rect;
  const std::string names[] = {"xi_re", "xi_im", "u", "u_plus", "u_minus"};
  csv.header(names);
  for (const Complex& xi : lambda_rectangle(r[0], r[1], r[2], r[3], r[4])) {
    csv.field(xi.real())
        .field(xi.imag())
        .field(log_potential(*doc.measure, xi))
        .field(log_potential_plus(*doc.measure, xi))
        .field(log_potential_minus(*doc.measure, xi));
    csv.end_row();
  }
}

inline void run_weak_invert(const FunctionSpecDocument& doc, const RunConfig& config,
                            std::ostream& out) {
  const CircleGrid grid = config.make_grid("weak-invert");
  const std::vector<WeakInvertibility> table =
      weak_invertibility_table(doc.root, config.k_max, grid, config.make_ladder());
  CsvWriter csv(out);
  const std::string names[] = {"k", "alpha_defect", "gamma_holds", "phi_interior_excess"};
  csv.header(names);
  for (const WeakInvertibility& row : table) {
    csv.field(row.k).field(row.alpha_defect).field(row.gamma_holds ? 1 : 0).field(
        row.phi_interior_excess);
    csv.end_row();
  }
}

}  // namespace spec_detail

// Runs one named subcommand against a parsed document, streaming CSV into
// `out`. Exit status: 0 success, 2 invalid input, 3 numerical failure.
inline int run_subcommand(const std::string& name, const FunctionSpecDocument& doc,
                          const RunConfig& config, std::ostream& out) {
  try {
    config.validate();
    if (name == "eval")
      spec_detail::run_eval(doc, config, out);
    else if (name == "classify")
      spec_detail::run_classify(doc, config, out);
    else if (name == "check-smirnov")
      spec_detail::run_check_smirnov(doc, config, out);
    else if (name == "factor-scalar")
      spec_detail::run_factor_scalar(doc, config, out);
    else if (name == "frostman-scan")
      spec_detail::run_frostman_scan(doc, config, out);
    else if (name == "potential")
      spec_detail::run_potential(doc, config, out);
    else if (name == "weak-invert")
      spec_detail::run_weak_invert(doc, config, out);
    else
      throw std::invalid_argument("unknown subcommand '" + name + "'");
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

// Same, resolving the output sink from the configuration.
inline int run_subcommand(const std::string& name, const FunctionSpecDocument& doc,
                          const RunConfig& config) {
  if (config.out_path.empty()) return run_subcommand(name, doc, config, std::cout);
  std::ofstream file(config.out_path, std::ios::binary);
  if (!file) {
    std::cerr << "error: cannot open output file " << config.out_path << '\n';
    return 2;
  }
  return run_subcommand(name, doc, config, file);
}

}  // namespace smirnovkit

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smirnovkit/blaschke.hpp"
#include "smirnovkit/boundary_data.hpp"
#include "smirnovkit/circle.hpp"
#include "smirnovkit/matrix.hpp"

namespace smirnovkit {

inline constexpr int kDefaultNodes = 4096;

enum class ExprKind {
  constant,
  coordinate_z,
  scalar_blaschke,
  bp_product,
  singular_inner,
  outer,
  herglotz,
  sum,
  product,
  diag,
  shift,
  scale,
  transpose,
  exp,
};

// Immutable expression tree for disc-analytic matrix functions. Scalar leaf
// kinds act as s(z) I_n in their ambient dimension. Every kind carries a
// boundary formula; boundary_exact distinguishes closed forms from the
// spectrally synthesized outer phase over sampled weights.
class FunctionExpr {
 public:
  FunctionExpr() = default;

  static FunctionExpr constant(Matrix c) {
    require_square(c, "FunctionExpr::constant");
    auto node = std::make_shared<Node>(ExprKind::constant, static_cast<int>(c.rows()));
    node->constant = std::move(c);
    return FunctionExpr(std::move(node));
  }

  static FunctionExpr coordinate_z(int dim = 1) {
    auto node = std::make_shared<Node>(ExprKind::coordinate_z, check_dim(dim));
    return FunctionExpr(std::move(node));
  }

  static FunctionExpr scalar_blaschke_node(Complex a, int dim = 1) {
    if (!(std::abs(a) < 1.0))
      throw std::invalid_argument("FunctionExpr: Blaschke zero must lie in the open disc");
    auto node = std::make_shared<Node>(ExprKind::scalar_blaschke, check_dim(dim));
    node->scalar = a;
    return FunctionExpr(std::move(node));
  }

  static FunctionExpr bp_product(BPProduct p) {
    auto node = std::make_shared<Node>(ExprKind::bp_product, p.dim());
    node->product = std::make_shared<BPProduct>(std::move(p));
    return FunctionExpr(std::move(node));
  }

  static FunctionExpr singular_inner(AtomicSingularMeasure mu, int dim = 1) {
    auto node = std::make_shared<Node>(ExprKind::singular_inner, check_dim(dim));
    node->atoms = mu.atoms();
    node->measure = std::make_shared<AtomicSingularMeasure>(std::move(mu));
    return FunctionExpr(std::move(node));
  }

  static FunctionExpr outer(const BoundaryWeight& weight, int dim = 1,
                            int synthesis_nodes = kDefaultNodes,
                            Complex normalization = Complex(1.0, 0.0)) {
    auto node = std::make_shared<Node>(ExprKind::outer, check_dim(dim));
    node->outer = std::make_shared<OuterFunction>(weight, CircleGrid(synthesis_nodes),
                                                  normalization);
    node->weight = std::make_shared<BoundaryWeight>(weight);
    node->scalar = normalization;
    node->boundary_exact = weight.closed_form();
    return FunctionExpr(std::move(node));
  }

  static FunctionExpr herglotz(std::vector<CircleAtom> atoms, int dim = 1) {
    for (const auto& a : atoms)
      if (std::abs(std::abs(a.location) - 1.0) > kAtomCircleTol)
        throw std::invalid_argument("FunctionExpr: Herglotz atom off the unit circle");
    auto node = std::make_shared<Node>(ExprKind::herglotz, check_dim(dim));
    node->atoms = std::move(atoms);
    return FunctionExpr(std::move(node));
  }

  static FunctionExpr sum(std::vector<FunctionExpr> children) {
    auto node = combine(ExprKind::sum, std::move(children));
    return FunctionExpr(std::move(node));
  }

  static FunctionExpr product(std::vector<FunctionExpr> children) {
    auto node = combine(ExprKind::product, std::move(children));
    return FunctionExpr(std::move(node));
  }

  static FunctionExpr diag(std::vector<FunctionExpr> children) {
    if (children.empty()) throw std::invalid_argument("FunctionExpr::diag: no children");
    for (const auto& c : children)
      if (c.dim() != 1) throw std::invalid_argument("FunctionExpr::diag: children must be scalar");
    auto node = std::make_shared<Node>(ExprKind::diag, check_dim(static_cast<int>(children.size())));
    node->boundary_exact = all_exact(children);
    node->children = std::move(children);
    return FunctionExpr(std::move(node));
  }

  // F - lambda I.
  static FunctionExpr shift(FunctionExpr child, Complex lambda) {
    auto node = std::make_shared<Node>(ExprKind::shift, child.dim());
    node->scalar = lambda;
    node->boundary_exact = child.boundary_exact();
    node->children.push_back(std::move(child));
    return FunctionExpr(std::move(node));
  }

  static FunctionExpr scale(FunctionExpr child, Complex factor) {
    auto node = std::make_shared<Node>(ExprKind::scale, child.dim());
    node->scalar = factor;
    node->boundary_exact = child.boundary_exact();
    node->children.push_back(std::move(child));
    return FunctionExpr(std::move(node));
  }

  static FunctionExpr transpose(FunctionExpr child) {
    auto node = std::make_shared<Node>(ExprKind::transpose, child.dim());
    node->boundary_exact = child.boundary_exact();
    node->children.push_back(std::move(child));
    return FunctionExpr(std::move(node));
  }

  // exp of a scalar-valued child, broadcast to dim.
  static FunctionExpr exp_of(FunctionExpr child, int dim = 1) {
    if (child.dim() != 1)
      throw std::invalid_argument("FunctionExpr::exp_of: child must be scalar");
    auto node = std::make_shared<Node>(ExprKind::exp, check_dim(dim));
    node->boundary_exact = child.boundary_exact();
    node->children.push_back(std::move(child));
    return FunctionExpr(std::move(node));
  }

  bool valid() const { return node_ != nullptr; }
  ExprKind kind() const { return require().kind; }
  int dim() const { return require().dim; }
  bool boundary_exact() const { return require().boundary_exact; }
  const std::vector<FunctionExpr>& children() const { return require().children; }
  Complex scalar_param() const { return require().scalar; }
  const std::vector<CircleAtom>& atom_list() const { return require().atoms; }
  const Matrix& constant_matrix() const { return require().constant; }
  const BPProduct& bp() const { return *require().product; }
  const OuterFunction& outer_part() const { return *require().outer; }
  const BoundaryWeight& weight_spec() const { return *require().weight; }
  const AtomicSingularMeasure& measure() const { return *require().measure; }

  // Value at an interior point.
  Matrix value(Complex z) const {
    require_interior(z, "FunctionExpr::value");
    return eval(z, false);
  }

  // Nontangential boundary value at |t| = 1; throws on boundary atoms.
  Matrix boundary(Complex t) const {
    require_boundary(t, "FunctionExpr::boundary");
    return eval(t, true);
  }

  // Closed-form log-magnitude channels. On the multiplicative fragment of the
  // grammar (scalar factors broadcast to s(z) I, their products, diagonals,
  // BP products, constants, scalings, transposes) log ||F|| and log |det F|
  // have exact expressions that stay finite where the matrix entries would
  // overflow or underflow near a boundary singularity. nullopt means the tree
  // leaves that fragment and the caller must evaluate the matrix instead; a
  // -infinity value marks an exact zero. Boundary variants throw domain_error
  // exactly where boundary evaluation would.
  std::optional<double> log_norm(Complex z) const {
    require_interior(z, "FunctionExpr::log_norm");
    return log_norm_impl(z, false);
  }
  std::optional<double> boundary_log_norm(Complex t) const {
    require_boundary(t, "FunctionExpr::boundary_log_norm");
    return log_norm_impl(t, true);
  }
  std::optional<double> log_abs_det(Complex z) const {
    require_interior(z, "FunctionExpr::log_abs_det");
    return log_abs_det_impl(z, false);
  }
  std::optional<double> boundary_log_abs_det(Complex t) const {
    require_boundary(t, "FunctionExpr::boundary_log_abs_det");
    return log_abs_det_impl(t, true);
  }

 private:
  struct Node {
    Node(ExprKind k, int d) : kind(k), dim(d) {}
    ExprKind kind;
    int dim;
    bool boundary_exact = true;
    Complex scalar{0.0, 0.0};
    Matrix constant;
    std::vector<CircleAtom> atoms;
    std::shared_ptr<BPProduct> product;
    std::shared_ptr<OuterFunction> outer;
    std::shared_ptr<BoundaryWeight> weight;
    std::shared_ptr<AtomicSingularMeasure> measure;
    std::vector<FunctionExpr> children;
  };

  explicit FunctionExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static int check_dim(int dim) {
    if (dim < 1 || dim > kMaxDim)
      throw std::invalid_argument("FunctionExpr: dimension must lie in [1, " +
                                  std::to_string(kMaxDim) + "]");
    return dim;
  }

  static bool all_exact(const std::vector<FunctionExpr>& children) {
    return std::all_of(children.begin(), children.end(),
                       [](const FunctionExpr& c) { return c.boundary_exact(); });
  }

  static std::shared_ptr<Node> combine(ExprKind kind, std::vector<FunctionExpr> children) {
    if (children.empty()) throw std::invalid_argument("FunctionExpr: no children");
    const int dim = children[0].dim();
    for (const auto& c : children)
      if (c.dim() != dim) throw std::invalid_argument("FunctionExpr: child dimension mismatch");
    auto node = std::make_shared<Node>(kind, dim);
    node->boundary_exact = all_exact(children);
    node->children = std::move(children);
    return node;
  }

  const Node& require() const {
    if (!node_) throw std::logic_error("FunctionExpr: empty expression");
    return *node_;
  }

  Matrix eval(Complex z, bool on_boundary) const {
    const Node& n = require();
    const Matrix id = Matrix::Identity(n.dim, n.dim);
    switch (n.kind) {
      case ExprKind::constant:
        return n.constant;
      case ExprKind::coordinate_z:
        return z * id;
      case ExprKind::scalar_blaschke:
        return scalar_blaschke(n.scalar, z) * id;
      case ExprKind::bp_product:
        return bp_eval(*n.product, z);
      case ExprKind::singular_inner:
        return (on_boundary ? singular_inner_boundary(*n.measure, z)
                            : singular_inner_value(*n.measure, z)) *
               id;
      case ExprKind::outer:
        return (on_boundary ? n.outer->boundary(z) : n.outer->value(z)) * id;
      case ExprKind::herglotz:
        return (on_boundary ? herglotz_sum_boundary(n.atoms, z)
                            : herglotz_sum_value(n.atoms, z)) *
               id;
      case ExprKind::sum: {
        Matrix acc = Matrix::Zero(n.dim, n.dim);
        for (const auto& c : n.children) acc += c.eval(z, on_boundary);
        return acc;
      }
      case ExprKind::product: {
        Matrix acc = id;
        for (const auto& c : n.children) acc = acc * c.eval(z, on_boundary);
        return acc;
      }
      case ExprKind::diag: {
        Matrix acc = Matrix::Zero(n.dim, n.dim);
        for (int j = 0; j < n.dim; ++j)
          acc(j, j) = n.children[static_cast<std::size_t>(j)].eval(z, on_boundary)(0, 0);
        return acc;
      }
      case ExprKind::shift:
        return n.children[0].eval(z, on_boundary) - n.scalar * id;
      case ExprKind::scale:
        return n.scalar * n.children[0].eval(z, on_boundary);
      case ExprKind::transpose:
        return n.children[0].eval(z, on_boundary).transpose();
      case ExprKind::exp:
        return std::exp(n.children[0].eval(z, on_boundary)(0, 0)) * id;
    }
    throw std::logic_error("FunctionExpr: unknown node kind");
  }

  // True when the value is s(z) I for a scalar s with a log-domain form.
  bool scalar_broadcast() const {
    const Node& n = require();
    switch (n.kind) {
      case ExprKind::coordinate_z:
      case ExprKind::scalar_blaschke:
      case ExprKind::singular_inner:
      case ExprKind::herglotz:
      case ExprKind::outer:
      case ExprKind::exp:
        return true;
      case ExprKind::scale:
      case ExprKind::transpose:
        return n.children[0].scalar_broadcast();
      case ExprKind::product:
        return std::all_of(n.children.begin(), n.children.end(),
                           [](const FunctionExpr& c) { return c.scalar_broadcast(); });
      default:
        return false;
    }
  }

  // log |s(z)| for a scalar-broadcast node; only called when scalar_broadcast().
  double log_scalar_abs(Complex z, bool on_boundary) const {
    const Node& n = require();
    switch (n.kind) {
      case ExprKind::coordinate_z:
        return std::log(std::abs(z));
      case ExprKind::scalar_blaschke:
        return std::log(std::abs(scalar_blaschke(n.scalar, z)));
      case ExprKind::singular_inner:
        if (on_boundary) {
          singular_inner_boundary(*n.measure, z);  // atom hit check
          return 0.0;
        }
        return -herglotz_sum_value(n.measure->atoms(), z).real();
      case ExprKind::herglotz:
        return std::log(std::abs(on_boundary ? herglotz_sum_boundary(n.atoms, z)
                                             : herglotz_sum_value(n.atoms, z)));
      case ExprKind::outer:
        return on_boundary ? n.outer->boundary_log_abs(z) : n.outer->log_abs(z);
      case ExprKind::exp:
        return n.children[0].eval(z, on_boundary)(0, 0).real();
      case ExprKind::scale:
        return std::log(std::abs(n.scalar)) + n.children[0].log_scalar_abs(z, on_boundary);
      case ExprKind::transpose:
        return n.children[0].log_scalar_abs(z, on_boundary);
      case ExprKind::product: {
        double acc = 0.0;
        for (const auto& c : n.children) acc += c.log_scalar_abs(z, on_boundary);
        return acc;
      }
      default:
        throw std::logic_error("FunctionExpr: node is not a scalar broadcast");
    }
  }

  std::optional<double> log_norm_impl(Complex z, bool on_boundary) const {
    if (scalar_broadcast()) return log_scalar_abs(z, on_boundary);
    const Node& n = require();
    switch (n.kind) {
      case ExprKind::constant: {
        const double s = operator_norm(n.constant);
        return s == 0.0 ? -kInfinity : std::log(s);
      }
      case ExprKind::diag: {
        double best = -kInfinity;
        for (const auto& c : n.children) {
          const std::optional<double> v = c.log_norm_impl(z, on_boundary);
          if (!v) return std::nullopt;
          best = std::max(best, *v);
        }
        return best;
      }
      case ExprKind::scale: {
        const std::optional<double> v = n.children[0].log_norm_impl(z, on_boundary);
        if (!v) return std::nullopt;
        return std::log(std::abs(n.scalar)) + *v;
      }
      case ExprKind::transpose:
        return n.children[0].log_norm_impl(z, on_boundary);
      default:
        return std::nullopt;
    }
  }

  std::optional<double> log_abs_det_impl(Complex z, bool on_boundary) const {
    const Node& n = require();
    if (scalar_broadcast()) return n.dim * log_scalar_abs(z, on_boundary);
    switch (n.kind) {
      case ExprKind::constant: {
        const double d = std::abs(n.constant.determinant());
        return d == 0.0 ? -kInfinity : std::log(d);
      }
      case ExprKind::bp_product: {
        double acc = std::log(std::abs(n.product->unitary_constant().determinant()));
        for (const auto& factor : n.product->factors())
          acc += factor.projection.rank() *
                 std::log(std::abs(scalar_blaschke(factor.zero, z)));
        return acc;
      }
      case ExprKind::product:
      case ExprKind::diag: {
        double acc = 0.0;
        for (const auto& c : n.children) {
          const std::optional<double> v = c.log_abs_det_impl(z, on_boundary);
          if (!v) return std::nullopt;
          acc += *v;
        }
        return acc;
      }
      case ExprKind::scale: {
        const std::optional<double> v = n.children[0].log_abs_det_impl(z, on_boundary);
        if (!v) return std::nullopt;
        return n.dim * std::log(std::abs(n.scalar)) + *v;
      }
      case ExprKind::transpose:
        return n.children[0].log_abs_det_impl(z, on_boundary);
      default:
        return std::nullopt;
    }
  }

  std::shared_ptr<const Node> node_;
};

// Boundary samples over a grid; nodes where the boundary value is singular
// (an atom sits on the node) are dropped and their arc mass reported.
struct BoundaryGridSamples {
  std::vector<Matrix> values;  // values[j] meaningful only when kept[j]
  std::vector<char> kept;
  double dropped_mass = 0.0;
};

inline BoundaryGridSamples boundary_samples(const FunctionExpr& f, const CircleGrid& grid) {
  BoundaryGridSamples out;
  out.values.resize(static_cast<std::size_t>(grid.size()));
  out.kept.assign(static_cast<std::size_t>(grid.size()), 1);
  std::size_t dropped = 0;
  for (int j = 0; j < grid.size(); ++j) {
    try {
      out.values[static_cast<std::size_t>(j)] = f.boundary(grid.node(j));
    } catch (const std::domain_error&) {
      out.kept[static_cast<std::size_t>(j)] = 0;
      ++dropped;
    }
  }
  if (dropped == static_cast<std::size_t>(grid.size()))
    throw std::invalid_argument("boundary_samples: every node was singular");
  out.dropped_mass = static_cast<double>(dropped) / grid.size();
  return out;
}

inline std::vector<Matrix> interior_samples(const FunctionExpr& f, double r,
                                            const CircleGrid& grid) {
  if (!(r >= 0.0 && r < 1.0))
    throw std::invalid_argument("interior_samples: radius outside [0, 1)");
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(grid.size()));
  for (int j = 0; j < grid.size(); ++j) out.push_back(f.value(r * grid.node(j)));
  return out;
}

// Per-node log ||F|| samples; kept[j] = 0 marks a vanishing norm or a boundary
// atom hit, both dropped from downstream quadratures.
struct LogNormSamples {
  std::vector<double> values;
  std::vector<char> kept;
  double dropped_mass = 0.0;
};

// log ||F(r t_j)|| over the grid, through the closed-form channel when the
// tree admits one (so extreme moduli near boundary singularities stay finite)
// and through operator norms otherwise.
inline LogNormSamples interior_log_norms(const FunctionExpr& f, double r,
                                         const CircleGrid& grid) {
  if (!(r >= 0.0 && r < 1.0))
    throw std::invalid_argument("interior_log_norms: radius outside [0, 1)");
  LogNormSamples out;
  out.values.assign(static_cast<std::size_t>(grid.size()), 0.0);
  out.kept.assign(static_cast<std::size_t>(grid.size()), 1);
  std::size_t dropped = 0;
  for (int j = 0; j < grid.size(); ++j) {
    const Complex z = r * grid.node(j);
    const std::size_t sj = static_cast<std::size_t>(j);
    const std::optional<double> channel = f.log_norm(z);
    double v;
    if (channel) {
      v = *channel;
    } else {
      const double norm = operator_norm(f.value(z));
      v = norm == 0.0 ? -kInfinity : std::log(norm);
    }
    if (v == -kInfinity) {
      out.kept[sj] = 0;
      ++dropped;
    } else {
      out.values[sj] = v;
    }
  }
  out.dropped_mass = static_cast<double>(dropped) / grid.size();
  return out;
}

inline LogNormSamples boundary_log_norms(const FunctionExpr& f, const CircleGrid& grid) {
  LogNormSamples out;
  out.values.assign(static_cast<std::size_t>(grid.size()), 0.0);
  out.kept.assign(static_cast<std::size_t>(grid.size()), 1);
  std::size_t dropped = 0;
  for (int j = 0; j < grid.size(); ++j) {
    const Complex t = grid.node(j);
    const std::size_t sj = static_cast<std::size_t>(j);
    double v = -kInfinity;
    try {
      const std::optional<double> channel = f.boundary_log_norm(t);
      if (channel) {
        v = *channel;
      } else {
        const double norm = operator_norm(f.boundary(t));
        v = norm == 0.0 ? -kInfinity : std::log(norm);
      }
    } catch (const std::domain_error&) {
      v = -kInfinity;  // boundary atom: node dropped
    }
    if (v == -kInfinity) {
      out.kept[sj] = 0;
      ++dropped;
    } else {
      out.values[sj] = v;
    }
  }
  out.dropped_mass = static_cast<double>(dropped) / grid.size();
  return out;
}

// mean over the grid of log+ ||F(r t)||; the Nevanlinna growth functional.
// Dropped (vanishing-norm) nodes contribute log+ = 0 exactly.
inline double nevanlinna_functional(const FunctionExpr& f, double r, const CircleGrid& grid) {
  const LogNormSamples samples = interior_log_norms(f, r, grid);
  std::vector<double> values(samples.values.size(), 0.0);
  for (std::size_t j = 0; j < values.size(); ++j)
    if (samples.kept[j]) values[j] = std::max(samples.values[j], 0.0);
  return circle_mean(std::span<const double>(values));
}

enum class SmirnovVerdict { pass, fail, undetermined };

struct MajorantViolation {
  Complex point;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct MembershipReport {
  double nevanlinna_sup = 0.0;
  SmirnovVerdict smirnov_verdict = SmirnovVerdict::undetermined;
  std::vector<MajorantViolation> majorant_violations;
  double dropped_mass = 0.0;
};

// Boundary log-norm majorant: log ||F(z)|| <= mean_t P(z, t) log ||F(t)||.
// Passing is necessary-condition evidence for the Smirnov class, not proof.
inline MembershipReport smirnov_majorant_check(const FunctionExpr& f,
                                               std::span<const Complex> interior_points,
                                               const CircleGrid& grid, const RadialLadder& ladder,
                                               double tol_quad = 1e-6) {
  if (interior_points.empty())
    throw std::invalid_argument("smirnov_majorant_check: no interior points");
  MembershipReport report;
  for (double r : ladder.radii())
    report.nevanlinna_sup = std::max(report.nevanlinna_sup, nevanlinna_functional(f, r, grid));

  const LogNormSamples boundary = boundary_log_norms(f, grid);
  report.dropped_mass = boundary.dropped_mass;

  for (const Complex& z : interior_points) {
    require_interior(z, "smirnov_majorant_check");
    std::vector<double> terms;
    terms.reserve(boundary.values.size());
    for (std::size_t j = 0; j < boundary.values.size(); ++j)
      if (boundary.kept[j])
        terms.push_back(poisson_kernel(z, grid.node(static_cast<int>(j))) * boundary.values[j]);
    const double rhs = detail::pairwise_sum(std::span<const double>(terms)) / grid.size();
    const std::optional<double> channel = f.log_norm(z);
    double lhs;
    if (channel) {
      lhs = *channel;
    } else {
      const double norm_z = operator_norm(f.value(z));
      lhs = norm_z == 0.0 ? -kInfinity : std::log(norm_z);
    }
    if (lhs > rhs + tol_quad) report.majorant_violations.push_back({z, lhs, rhs});
  }
  if (report.dropped_mass > 0.05)
    report.smirnov_verdict = SmirnovVerdict::undetermined;
  else
    report.smirnov_verdict =
        report.majorant_violations.empty() ? SmirnovVerdict::pass : SmirnovVerdict::fail;
  return report;
}

struct MaximumPrincipleReport {
  double sup_interior = 0.0;
  double ess_sup_boundary = 0.0;
  bool holds = false;
};

// sup of ||F|| over interior sampling circles against the boundary sup.
inline MaximumPrincipleReport maximum_principle_check(const FunctionExpr& f,
                                                      const CircleGrid& grid,
                                                      const RadialLadder& ladder,
                                                      double tol = 1e-9) {
  MaximumPrincipleReport report;
  for (double r : ladder.radii())
    for (int j = 0; j < grid.size(); ++j)
      report.sup_interior = std::max(report.sup_interior, operator_norm(f.value(r * grid.node(j))));
  const BoundaryGridSamples boundary = boundary_samples(f, grid);
  for (std::size_t j = 0; j < boundary.values.size(); ++j)
    if (boundary.kept[j])
      report.ess_sup_boundary = std::max(report.ess_sup_boundary,
                                         operator_norm(boundary.values[j]));
  report.holds = report.sup_interior <= report.ess_sup_boundary + tol;
  return report;
}

// sup over the ladder of mean ||F(r t)||^2; finite iff F lies in the matrix
// Hardy space H^2 (up to the resolution of the ladder).
inline double hardy2_functional(const FunctionExpr& f, const RadialLadder& ladder,
                                const CircleGrid& grid) {
  double sup = 0.0;
  for (double r : ladder.radii()) {
    const std::vector<Matrix> samples = interior_samples(f, r, grid);
    std::vector<double> values(samples.size());
    for (std::size_t j = 0; j < samples.size(); ++j) {
      const double norm = operator_norm(samples[j]);
      values[j] = norm * norm;
    }
    sup = std::max(sup, circle_mean(std::span<const double>(values)));
  }
  return sup;
}

}  // namespace smirnovkit

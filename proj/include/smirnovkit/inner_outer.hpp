#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "smirnovkit/boundary_data.hpp"
#include "smirnovkit/circle.hpp"
#include "smirnovkit/expr.hpp"
#include "smirnovkit/matrix.hpp"

namespace smirnovkit {

// Default admission tolerance for boundary unitarity defects.
inline constexpr double kBoundaryDefectTol = 1e-7;
// A vanishing radial limit of the log-det mean identifies the Blaschke part;
// calibrated for a ladder topping out at 1 - 1e-3.
inline constexpr double kDetLimitBlaschkeTol = 5e-3;
// Default quadrature slack for criterion-style equalities.
inline constexpr double kQuadTol = 1e-6;

struct LogMean {
  double value = 0.0;
  double dropped_mass = 0.0;
};

namespace detail {

// Grid mean of log |values|; zero values are log-singular and get dropped
// with their arc mass reported. Throws when nothing survives.
inline LogMean mean_log_abs(std::span<const Complex> values, std::span<const char> kept_mask) {
  std::vector<double> terms;
  terms.reserve(values.size());
  std::size_t dropped = 0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!kept_mask.empty() && !kept_mask[j]) {
      ++dropped;
      continue;
    }
    const double a = std::abs(values[j]);
    if (a == 0.0 || !std::isfinite(a)) {
      ++dropped;
      continue;
    }
    terms.push_back(std::log(a));
  }
  if (terms.empty()) throw std::invalid_argument("mean_log_abs: all nodes are log-singular");
  LogMean out;
  out.value = pairwise_sum(std::span<const double>(terms)) / static_cast<double>(values.size());
  out.dropped_mass = static_cast<double>(dropped) / static_cast<double>(values.size());
  return out;
}

// Same mean over precomputed log values from the closed-form channels:
// non-finite entries (exact zeros) and masked nodes are dropped, the divisor
// stays the full node count.
inline LogMean mean_log_finite(std::span<const double> values, std::span<const char> kept_mask) {
  std::vector<double> terms;
  terms.reserve(values.size());
  std::size_t dropped = 0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if ((!kept_mask.empty() && !kept_mask[j]) || !std::isfinite(values[j])) {
      ++dropped;
      continue;
    }
    terms.push_back(values[j]);
  }
  if (terms.empty())
    throw std::invalid_argument("mean_log_finite: every node dropped (degenerate input)");
  LogMean out;
  out.value = pairwise_sum(std::span<const double>(terms)) / static_cast<double>(values.size());
  out.dropped_mass = static_cast<double>(dropped) / static_cast<double>(values.size());
  return out;
}

// Winding number of a closed sample loop via accumulated phase increments.
// Conclusive only when every complex log step is clearly below pi in both
// components. The phase increment alone cannot certify this: a true step of
// 2 pi k + d aliases to d. The modulus component of the same log step never
// aliases, and for a holomorphic loop both components share one derivative,
// so a steep |ln|v_j+1| - ln|v_j|| marks exactly the gaps where the phase
// reading is untrustworthy. Undersampled loops (or loops through zero)
// return nullopt instead of a garbage count.
inline std::optional<int> winding_number(std::span<const Complex> values,
                                         std::span<const char> kept_mask) {
  const double step_cap = 0.9 * std::numbers::pi;
  double total = 0.0;
  Complex prev(0.0, 0.0);
  Complex first(0.0, 0.0);
  bool have_prev = false;
  auto step = [step_cap](Complex to, Complex from) -> std::optional<double> {
    const Complex ratio = to / from;
    const double delta = std::arg(ratio);
    const double stretch = std::log(std::abs(ratio));
    if (!(std::abs(delta) < step_cap) || !(std::abs(stretch) < step_cap)) return std::nullopt;
    return delta;
  };
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!kept_mask.empty() && !kept_mask[j]) return std::nullopt;
    const Complex v = values[j];
    if (v == Complex(0.0, 0.0)) return std::nullopt;
    if (!have_prev) {
      first = prev = v;
      have_prev = true;
      continue;
    }
    const std::optional<double> delta = step(v, prev);
    if (!delta) return std::nullopt;
    total += *delta;
    prev = v;
  }
  if (!have_prev) return std::nullopt;
  const std::optional<double> closing = step(first, prev);
  if (!closing) return std::nullopt;
  total += *closing;
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

inline std::vector<Complex> det_samples(std::span<const Matrix> values) {
  std::vector<Complex> out;
  out.reserve(values.size());
  for (const Matrix& m : values) out.push_back(m.determinant());
  return out;
}

// Coarse interior probe mesh: defect maxima do not need the full angular
// resolution of the quadrature grid, and outer evaluations cost O(N) each.
inline int probe_stride(const CircleGrid& grid, int target = 64) {
  return std::max(1, grid.size() / target);
}

}  // namespace detail

struct ZeroScan {
  bool det_nonvanishing = true;   // no zero detected on any resolved circle
  int resolved_radii = 0;         // circles with conclusive phase sampling
  int max_count = 0;
};

// Argument-principle scan for interior zeros of det F over the ladder
// circles. Radii where the sampled phase is inconclusive are skipped, so the
// scan is a one-sided detector: a reported zero is real, absence is evidence.
inline ZeroScan interior_zero_scan(const FunctionExpr& f, const CircleGrid& grid,
                                   const RadialLadder& ladder) {
  ZeroScan scan;
  for (double r : ladder.radii()) {
    const std::vector<Matrix> samples = interior_samples(f, r, grid);
    const std::vector<Complex> dets = detail::det_samples(samples);
    const std::optional<int> count = detail::winding_number(dets, {});
    if (!count) continue;
    ++scan.resolved_radii;
    scan.max_count = std::max(scan.max_count, *count);
    if (*count != 0) scan.det_nonvanishing = false;
  }
  return scan;
}

struct OuterCriterion {
  double lhs = 0.0;  // log |e(z0)|
  double rhs = 0.0;  // Poisson mean of log |boundary value|
  bool equal = false;
  double dropped_mass = 0.0;
};

// An outer function satisfies log |e(z0)| = mean_t P(z0, t) log |e(t)|; a
// strict inequality < at one interior point already rules the class out.
inline OuterCriterion outer_criterion_check(const FunctionExpr& f, Complex z0,
                                            const CircleGrid& grid, double tol = kQuadTol) {
  if (f.dim() != 1) throw std::invalid_argument("outer_criterion_check: scalar input required");
  require_interior(z0, "outer_criterion_check");
  const BoundaryGridSamples boundary = boundary_samples(f, grid);
  std::vector<double> terms;
  std::size_t dropped = 0;
  for (int j = 0; j < grid.size(); ++j) {
    const std::size_t sj = static_cast<std::size_t>(j);
    const double a = boundary.kept[sj] ? std::abs(boundary.values[sj](0, 0)) : 0.0;
    if (a == 0.0) {
      ++dropped;
      continue;
    }
    terms.push_back(poisson_kernel(z0, grid.node(j)) * std::log(a));
  }
  if (terms.empty()) throw std::invalid_argument("outer_criterion_check: boundary vanishes");
  OuterCriterion out;
  out.dropped_mass = static_cast<double>(dropped) / grid.size();
  out.rhs = detail::pairwise_sum(std::span<const double>(terms)) / grid.size();
  const double v = std::abs(f.value(z0)(0, 0));
  out.lhs = v == 0.0 ? -kInfinity : std::log(v);
  out.equal = std::abs(out.lhs - out.rhs) <= tol;
  return out;
}

struct ScalingReport {
  OuterFunction d;                 // scalar scaling factor, |d| = 1/||F|| on the boundary
  double interior_excess = 0.0;    // max (||d F|| - 1)+ over the sampled disc
  double boundary_deviation = 0.0; // max | ||d F|| - 1 | on the boundary grid
  double dropped_mass = 0.0;
};

// Normalizes F by the outer scalar built from 1/||F|| boundary samples; the
// scaled function is a Schur-class candidate with unit boundary norm.
inline ScalingReport matrix_outer_scaling(const FunctionExpr& f, const CircleGrid& grid,
                                          const RadialLadder& ladder) {
  const BoundaryGridSamples boundary = boundary_samples(f, grid);
  std::vector<double> inv_norm(boundary.values.size(), 0.0);
  for (std::size_t j = 0; j < boundary.values.size(); ++j) {
    if (!boundary.kept[j]) continue;
    const double norm = operator_norm(boundary.values[j]);
    inv_norm[j] = norm > 0.0 ? 1.0 / norm : 0.0;  // zero samples are dropped downstream
  }
  ScalingReport report{OuterFunction(inv_norm, grid), 0.0, 0.0, 0.0};
  report.dropped_mass = report.d.dropped_mass();
  const int stride = detail::probe_stride(grid);
  for (double r : ladder.radii())
    for (int j = 0; j < grid.size(); j += stride) {
      const Complex z = r * grid.node(j);
      const double scaled = std::abs(report.d.value(z)) * operator_norm(f.value(z));
      report.interior_excess = std::max(report.interior_excess, scaled - 1.0);
    }
  report.interior_excess = std::max(report.interior_excess, 0.0);
  for (int j = 0; j < grid.size(); ++j) {
    const std::size_t sj = static_cast<std::size_t>(j);
    if (!boundary.kept[sj] || inv_norm[sj] == 0.0) continue;
    const double scaled =
        std::abs(report.d.boundary(grid.node(j))) * operator_norm(boundary.values[sj]);
    report.boundary_deviation = std::max(report.boundary_deviation, std::abs(scaled - 1.0));
  }
  return report;
}

struct ScalarFactorization {
  OuterFunction outer;           // e(0) > 0 normalization
  FunctionExpr source;
  double interior_excess = 0.0;  // max (|f/e| - 1)+ over the sampled disc
  double boundary_defect = 0.0;  // max | |f/e| - 1 | on the boundary grid
  double dropped_mass = 0.0;

  Complex outer_at(Complex z) const { return outer.value(z); }
  Complex inner_at(Complex z) const { return source.value(z)(0, 0) / outer.value(z); }
  Complex inner_boundary_at(Complex t) const {
    return source.boundary(t)(0, 0) / outer.boundary(t);
  }
};

// f = (inner) x (outer) for scalar f: the outer part is synthesized from the
// boundary modulus, the inner part is the quotient. The e(0) > 0 gauge fixes
// the splitting uniquely.
inline ScalarFactorization scalar_inner_outer_split(const FunctionExpr& f, const CircleGrid& grid,
                                                    const RadialLadder& ladder) {
  if (f.dim() != 1)
    throw std::invalid_argument("scalar_inner_outer_split: scalar input required");
  const BoundaryGridSamples boundary = boundary_samples(f, grid);
  std::vector<double> modulus(boundary.values.size(), 0.0);
  for (std::size_t j = 0; j < boundary.values.size(); ++j)
    if (boundary.kept[j]) modulus[j] = std::abs(boundary.values[j](0, 0));
  ScalarFactorization split{OuterFunction(modulus, grid), f, 0.0, 0.0, 0.0};
  split.dropped_mass = split.outer.dropped_mass();
  const int stride = detail::probe_stride(grid);
  for (double r : ladder.radii())
    for (int j = 0; j < grid.size(); j += stride) {
      const double q = std::abs(split.inner_at(r * grid.node(j)));
      split.interior_excess = std::max(split.interior_excess, q - 1.0);
    }
  split.interior_excess = std::max(split.interior_excess, 0.0);
  for (int j = 0; j < grid.size(); ++j) {
    const std::size_t sj = static_cast<std::size_t>(j);
    if (!boundary.kept[sj] || modulus[sj] == 0.0) continue;
    split.boundary_defect =
        std::max(split.boundary_defect, std::abs(std::abs(split.inner_boundary_at(grid.node(j))) - 1.0));
  }
  return split;
}

struct InnerClassification {
  bool is_inner = false;
  bool is_singular = false;
  bool is_blaschke = false;
  double boundary_defect = 0.0;
  double det_integral_limit = 0.0;
  std::vector<std::pair<double, double>> det_sequence;  // (r, mean log |det F(r t)|)
  double dropped_mass = 0.0;
};

// Splits the inner taxonomy: boundary unitarity defect decides inner; the
// radial limit of mean log |det| near zero decides Blaschke; a clean interior
// zero scan together with innerness decides singular.
inline InnerClassification classify_inner(const FunctionExpr& f, const CircleGrid& grid,
                                          const RadialLadder& ladder,
                                          double boundary_tol = kBoundaryDefectTol,
                                          double det_limit_tol = kDetLimitBlaschkeTol) {
  InnerClassification out;
  const Matrix id = Matrix::Identity(f.dim(), f.dim());

  // The winding scan needs complex determinant samples, but the radial means
  // come from the closed-form log |det| channel when the tree provides one:
  // near boundary singularities matrix determinants underflow to exact zeros,
  // and dropping those nodes would bias the limit.
  const bool det_channel = f.log_abs_det(Complex(0.0, 0.0)).has_value();

  ZeroScan scan;
  double dropped = 0.0;
  for (double r : ladder.radii()) {
    const std::vector<Matrix> samples = interior_samples(f, r, grid);
    for (const Matrix& m : samples)
      if (operator_norm(m) > 1.0 + 1e-9)
        throw std::invalid_argument("classify_inner: input is not contractive in the disc");
    const std::vector<Complex> dets = detail::det_samples(samples);
    LogMean mean;
    if (det_channel) {
      std::vector<double> logs(static_cast<std::size_t>(grid.size()), 0.0);
      for (int j = 0; j < grid.size(); ++j)
        logs[static_cast<std::size_t>(j)] = *f.log_abs_det(r * grid.node(j));
      mean = detail::mean_log_finite(logs, {});
    } else {
      mean = detail::mean_log_abs(dets, {});
    }
    out.det_sequence.emplace_back(r, mean.value);
    dropped = std::max(dropped, mean.dropped_mass);
    if (const std::optional<int> count = detail::winding_number(dets, {})) {
      ++scan.resolved_radii;
      scan.max_count = std::max(scan.max_count, *count);
      if (*count != 0) scan.det_nonvanishing = false;
    }
  }

  const BoundaryGridSamples boundary = boundary_samples(f, grid);
  for (std::size_t j = 0; j < boundary.values.size(); ++j) {
    if (!boundary.kept[j]) continue;
    const Matrix& b = boundary.values[j];
    out.boundary_defect = std::max(out.boundary_defect, operator_norm(id - b.adjoint() * b));
  }
  out.is_inner = out.boundary_defect <= boundary_tol;
  out.dropped_mass = std::max(dropped, boundary.dropped_mass);
  out.det_integral_limit = out.det_sequence.back().second;
  out.is_blaschke = out.is_inner && std::abs(out.det_integral_limit) <= det_limit_tol;
  out.is_singular = out.is_inner && scan.det_nonvanishing;
  return out;
}

struct OuterMembership {
  bool det_nonvanishing = false;
  bool criterion_equal = false;
  bool verdict = false;
  double lhs = 0.0;  // log |det F(0)|
  double rhs = 0.0;  // mean log |det boundary value|
  double dropped_mass = 0.0;
};

// Determinant route to outer membership: det F keeps no interior zeros and
// satisfies the outer mean equality at the origin.
inline OuterMembership outer_membership_test(const FunctionExpr& f, const CircleGrid& grid,
                                             const RadialLadder& ladder,
                                             double tol = kQuadTol) {
  OuterMembership out;
  const ZeroScan scan = interior_zero_scan(f, grid, ladder);
  out.det_nonvanishing = scan.det_nonvanishing;

  const BoundaryGridSamples boundary = boundary_samples(f, grid);
  std::vector<char> kept = boundary.kept;
  const LogMean mean = detail::mean_log_abs(detail::det_samples(boundary.values),
                                            std::span<const char>(kept));
  out.rhs = mean.value;
  out.dropped_mass = std::max(boundary.dropped_mass, mean.dropped_mass);
  const double det0 = std::abs(f.value(Complex(0.0, 0.0)).determinant());
  out.lhs = det0 == 0.0 ? -kInfinity : std::log(det0);
  out.criterion_equal = std::isfinite(out.lhs) && std::abs(out.lhs - out.rhs) <= tol;
  out.verdict = out.det_nonvanishing && out.criterion_equal;
  return out;
}

struct WeakInvertibility {
  int k = 0;
  std::vector<double> weights;        // w_k on the grid (0 marks a dropped node)
  std::vector<Matrix> f_k_boundary;   // boundary samples of F_k = E^{-1} phi_k
  double alpha_defect = 0.0;          // max || E F_k - I || over the grid
  bool gamma_holds = false;           // all || E F_k || <= 1 (+ tol)
  double phi_interior_excess = 0.0;   // max (|phi_k(z)| - 1)+ over the ladder
  double dropped_mass = 0.0;
};

namespace detail {

struct InverseTable {
  BoundaryGridSamples boundary;
  std::vector<Matrix> inverses;
  std::vector<double> inverse_norms;
  std::vector<char> usable;
  double dropped_mass = 0.0;
};

inline InverseTable boundary_inverses(const FunctionExpr& f, const CircleGrid& grid) {
  InverseTable table;
  table.boundary = boundary_samples(f, grid);
  const std::size_t n = table.boundary.values.size();
  table.inverses.assign(n, Matrix());
  table.inverse_norms.assign(n, 0.0);
  table.usable.assign(n, 0);
  std::size_t dropped = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!table.boundary.kept[j] || std::abs(table.boundary.values[j].determinant()) == 0.0) {
      ++dropped;
      continue;
    }
    table.usable[j] = 1;
    table.inverses[j] = table.boundary.values[j].inverse();
    table.inverse_norms[j] = operator_norm(table.inverses[j]);
  }
  if (dropped == n)
    throw std::invalid_argument("weak_invertibility_sequence: boundary is singular everywhere");
  table.dropped_mass = static_cast<double>(dropped) / static_cast<double>(n);
  return table;
}

inline WeakInvertibility weak_invertibility_step(const InverseTable& table, int k,
                                                 const CircleGrid& grid,
                                                 const RadialLadder& ladder, int dim,
                                                 double tol) {
  const std::size_t n = table.boundary.values.size();
  WeakInvertibility out;
  out.k = k;
  out.dropped_mass = table.dropped_mass;
  out.weights.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (!table.usable[j]) continue;
    out.weights[j] =
        table.inverse_norms[j] < static_cast<double>(k) ? 1.0 : 1.0 / table.inverse_norms[j];
  }

  const OuterFunction phi(out.weights, grid);
  const int stride = probe_stride(grid);
  for (double r : ladder.radii())
    for (int j = 0; j < grid.size(); j += stride)
      out.phi_interior_excess =
          std::max(out.phi_interior_excess, std::abs(phi.value(r * grid.node(j))) - 1.0);
  out.phi_interior_excess = std::max(out.phi_interior_excess, 0.0);

  out.f_k_boundary.assign(n, Matrix());
  out.gamma_holds = true;
  const Matrix id = Matrix::Identity(dim, dim);
  for (std::size_t j = 0; j < n; ++j) {
    if (!table.usable[j]) continue;
    const Complex phi_j = phi.boundary(grid.node(static_cast<int>(j)));
    out.f_k_boundary[j] = table.inverses[j] * phi_j;
    const Matrix ef = table.boundary.values[j] * out.f_k_boundary[j];
    out.alpha_defect = std::max(out.alpha_defect, operator_norm(ef - id));
    if (operator_norm(ef) > 1.0 + tol) out.gamma_holds = false;
  }
  return out;
}

}  // namespace detail

// Builds the k-th term of the inverse-approximating sequence for an outer E:
// the clipped weight w_k, its outer lift phi_k and F_k = E^{-1} phi_k. As k
// grows the weights rise to one and E F_k tightens onto the identity.
inline WeakInvertibility weak_invertibility_sequence(const FunctionExpr& f, int k,
                                                     const CircleGrid& grid,
                                                     const RadialLadder& ladder,
                                                     double tol = kStructuralTol) {
  if (k < 1) throw std::invalid_argument("weak_invertibility_sequence: k must be positive");
  const OuterMembership membership = outer_membership_test(f, grid, ladder);
  if (!membership.verdict)
    throw std::invalid_argument("weak_invertibility_sequence: input failed the outer test");
  const detail::InverseTable table = detail::boundary_inverses(f, grid);
  return detail::weak_invertibility_step(table, k, grid, ladder, f.dim(), tol);
}

// All terms k = 1..k_max over one shared boundary inversion.
inline std::vector<WeakInvertibility> weak_invertibility_table(const FunctionExpr& f, int k_max,
                                                               const CircleGrid& grid,
                                                               const RadialLadder& ladder,
                                                               double tol = kStructuralTol) {
  if (k_max < 1) throw std::invalid_argument("weak_invertibility_table: k_max must be positive");
  const OuterMembership membership = outer_membership_test(f, grid, ladder);
  if (!membership.verdict)
    throw std::invalid_argument("weak_invertibility_table: input failed the outer test");
  const detail::InverseTable table = detail::boundary_inverses(f, grid);
  std::vector<WeakInvertibility> out;
  out.reserve(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k)
    out.push_back(detail::weak_invertibility_step(table, k, grid, ladder, f.dim(), tol));
  return out;
}

}  // namespace smirnovkit

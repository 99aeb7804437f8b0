#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "smirnovkit/circle.hpp"
#include "smirnovkit/expr.hpp"
#include "smirnovkit/inner_outer.hpp"
#include "smirnovkit/matrix.hpp"

namespace smirnovkit {

// Gap threshold separating "Blaschke inner part" from "singular mass left
// behind". The radial ladder stops at 1 - 1e-3, so even a genuine Blaschke
// determinant reports a residual gap of a few 1e-2 (the limit estimate is the
// last rung, biased from below); the threshold must sit above that truncation
// bias while staying far under the O(1) gap a singular factor leaves.
inline constexpr double kGapTol = 5e-2;
// Default subdivision count for midpoint quadrature along measure segments.
inline constexpr int kSegmentSubdivisions = 256;

// Finite positive measure in the plane: point masses plus uniform densities
// on straight segments. Segments keep the potential continuous; atoms are the
// only places where it dives to -inf.
class PlanarMeasure {
 public:
  struct Atom {
    Complex location;
    double mass = 0.0;
  };
  struct Segment {
    Complex a;
    Complex b;
    double density = 0.0;  // mass per unit length
  };

  PlanarMeasure() = default;
  PlanarMeasure(std::vector<Atom> atoms, std::vector<Segment> segments)
      : atoms_(std::move(atoms)), segments_(std::move(segments)) {
    for (const auto& a : atoms_)
      if (!(a.mass > 0.0)) throw std::invalid_argument("PlanarMeasure: atom mass must be positive");
    for (const auto& s : segments_) {
      if (!(s.density > 0.0))
        throw std::invalid_argument("PlanarMeasure: segment density must be positive");
      if (std::abs(s.b - s.a) == 0.0)
        throw std::invalid_argument("PlanarMeasure: degenerate segment");
    }
    if (atoms_.empty() && segments_.empty())
      throw std::invalid_argument("PlanarMeasure: empty measure");
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Segment>& segments() const { return segments_; }

  double total_mass() const {
    double acc = 0.0;
    for (const auto& a : atoms_) acc += a.mass;
    for (const auto& s : segments_) acc += s.density * std::abs(s.b - s.a);
    return acc;
  }

  double support_radius() const {
    double acc = 0.0;
    for (const auto& a : atoms_) acc = std::max(acc, std::abs(a.location));
    for (const auto& s : segments_) acc = std::max({acc, std::abs(s.a), std::abs(s.b)});
    return acc;
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<Segment> segments_;
};

namespace detail {

// Antiderivative of log(u^2 + c^2): G' = log(u^2 + c^2), G(0) = 0.
inline double log_quad_antideriv(double u, double c) {
  if (c == 0.0) {
    if (u == 0.0) return 0.0;
    return 2.0 * u * std::log(std::abs(u)) - 2.0 * u;
  }
  return u * std::log(u * u + c * c) - 2.0 * u + 2.0 * c * std::atan(u / c);
}

// Closed form of int_{s1}^{s2} log |A - s B| ds for B != 0; finite even when
// the line passes through xi (the log singularity is integrable).
inline double segment_log_integral(Complex a_rel, Complex b_dir, double s1, double s2) {
  const double b2 = std::norm(b_dir);
  const double s0 = (a_rel * std::conj(b_dir)).real() / b2;
  const double c = std::abs((a_rel * std::conj(b_dir)).imag()) / b2;
  return (s2 - s1) * 0.5 * std::log(b2) +
         0.5 * (log_quad_antideriv(s2 - s0, c) - log_quad_antideriv(s1 - s0, c));
}

// Parameter interval of {s in [0,1] : |A - s B| < 1}, when nonempty.
inline std::optional<std::pair<double, double>> sublevel_interval(Complex a_rel, Complex b_dir) {
  const double b2 = std::norm(b_dir);
  const double s0 = (a_rel * std::conj(b_dir)).real() / b2;
  const double c = std::abs((a_rel * std::conj(b_dir)).imag()) / b2;
  const double reach2 = 1.0 / b2 - c * c;
  if (reach2 <= 0.0) return std::nullopt;
  const double h = std::sqrt(reach2);
  const double lo = std::max(0.0, s0 - h);
  const double hi = std::min(1.0, s0 + h);
  if (lo >= hi) return std::nullopt;
  return std::make_pair(lo, hi);
}

}  // namespace detail

// U(xi) = int log |xi - lambda| d nu(lambda); -inf exactly on atoms.
inline double log_potential(const PlanarMeasure& nu, Complex xi) {
  double acc = 0.0;
  for (const auto& a : nu.atoms()) {
    const double d = std::abs(xi - a.location);
    if (d == 0.0) return -kInfinity;
    acc += a.mass * std::log(d);
  }
  for (const auto& s : nu.segments()) {
    const Complex b_dir = s.b - s.a;
    acc += s.density * std::abs(b_dir) *
           detail::segment_log_integral(xi - s.a, b_dir, 0.0, 1.0);
  }
  return acc;
}

// Negative part U_-(xi) = int log^- |xi - lambda| d nu; +inf on atoms.
inline double log_potential_minus(const PlanarMeasure& nu, Complex xi) {
  double acc = 0.0;
  for (const auto& a : nu.atoms()) {
    const double d = std::abs(xi - a.location);
    if (d == 0.0) return kInfinity;
    acc += a.mass * log_minus(d);
  }
  for (const auto& s : nu.segments()) {
    const Complex b_dir = s.b - s.a;
    if (const auto iv = detail::sublevel_interval(xi - s.a, b_dir))
      acc -= s.density * std::abs(b_dir) *
             detail::segment_log_integral(xi - s.a, b_dir, iv->first, iv->second);
  }
  return acc;
}

// Positive part; U = U_+ - U_- holds exactly for the closed forms.
inline double log_potential_plus(const PlanarMeasure& nu, Complex xi) {
  double acc = 0.0;
  for (const auto& a : nu.atoms()) acc += a.mass * log_plus(std::abs(xi - a.location));
  for (const auto& s : nu.segments()) {
    const Complex b_dir = s.b - s.a;
    const double whole = detail::segment_log_integral(xi - s.a, b_dir, 0.0, 1.0);
    double inner = 0.0;
    if (const auto iv = detail::sublevel_interval(xi - s.a, b_dir))
      inner = detail::segment_log_integral(xi - s.a, b_dir, iv->first, iv->second);
    acc += s.density * std::abs(b_dir) * (whole - inner);
  }
  return acc;
}

struct MatrixPotential {
  double phi = 0.0;
  double phi_plus = 0.0;
  double phi_minus = 0.0;
};

// Phi(A) = int log |det(A - lambda I)| d nu, evaluated through the spectrum:
// Phi = sum_k U(l_k(A)). The split parts integrate log+- |det| directly
// (atoms exactly, segments by midpoint quadrature), since log+- do not
// distribute over eigenvalue products.
inline MatrixPotential matrix_potential(const PlanarMeasure& nu, const Matrix& a,
                                        int subdivisions = kSegmentSubdivisions) {
  require_square(a, "matrix_potential");
  if (subdivisions < 1) throw std::invalid_argument("matrix_potential: subdivisions must be >= 1");
  MatrixPotential out;
  for (const Complex& l : eigenvalues(a)) {
    const double u = log_potential(nu, l);
    out.phi = out.phi == -kInfinity || u == -kInfinity ? -kInfinity : out.phi + u;
  }

  const int n = static_cast<int>(a.rows());
  const Matrix id = Matrix::Identity(n, n);
  const auto det_abs_at = [&](Complex lambda) { return std::abs((a - lambda * id).determinant()); };
  for (const auto& atom : nu.atoms()) {
    const double d = det_abs_at(atom.location);
    out.phi_plus += atom.mass * log_plus(d);
    const double lm = log_minus(d);
    out.phi_minus = lm == kInfinity ? kInfinity : out.phi_minus + atom.mass * lm;
  }
  for (const auto& s : nu.segments()) {
    const Complex b_dir = s.b - s.a;
    const double cell_mass =
        s.density * std::abs(b_dir) / static_cast<double>(subdivisions);
    for (int i = 0; i < subdivisions; ++i) {
      const double frac = (static_cast<double>(i) + 0.5) / static_cast<double>(subdivisions);
      const double d = det_abs_at(s.a + frac * b_dir);
      out.phi_plus += cell_mass * log_plus(d);
      const double lm = log_minus(d);
      out.phi_minus = lm == kInfinity ? kInfinity : out.phi_minus + cell_mass * lm;
    }
  }
  return out;
}

// Cached disc samples for scans: one boundary pass and one pass per rung,
// shared across every spectral parameter lambda. When the tree admits the
// closed-form log |det| channel the tables carry it alongside the matrices:
// at lambda = 0 the determinant of a function with boundary singularities can
// leave the double range entirely, and only the log-domain values quadrate
// correctly there.
struct LadderSamples {
  CircleGrid grid;
  std::vector<double> radii;
  BoundaryGridSamples boundary;
  std::vector<std::vector<Matrix>> interior;
  std::array<Matrix, 3> probes;  // F at 0, 0.5, 0.5i for the exclusion check
  int dim = 1;
  bool has_det_channel = false;
  std::vector<std::vector<double>> interior_log_det;  // per rung, per node
  std::vector<double> boundary_log_det;
  std::vector<char> boundary_log_kept;
};

inline LadderSamples make_ladder_samples(const FunctionExpr& f, const CircleGrid& grid,
                                         const RadialLadder& ladder) {
  LadderSamples s{grid, ladder.radii(), boundary_samples(f, grid), {}, {}, f.dim()};
  s.interior.reserve(s.radii.size());
  for (double r : s.radii) s.interior.push_back(interior_samples(f, r, grid));
  s.probes = {f.value(Complex(0.0, 0.0)), f.value(Complex(0.5, 0.0)), f.value(Complex(0.0, 0.5))};

  s.has_det_channel = f.log_abs_det(Complex(0.0, 0.0)).has_value();
  if (s.has_det_channel) {
    s.interior_log_det.reserve(s.radii.size());
    for (double r : s.radii) {
      std::vector<double> logs(static_cast<std::size_t>(grid.size()), 0.0);
      for (int j = 0; j < grid.size(); ++j)
        logs[static_cast<std::size_t>(j)] = *f.log_abs_det(r * grid.node(j));
      s.interior_log_det.push_back(std::move(logs));
    }
    s.boundary_log_det.assign(static_cast<std::size_t>(grid.size()), 0.0);
    s.boundary_log_kept.assign(static_cast<std::size_t>(grid.size()), 1);
    for (int j = 0; j < grid.size(); ++j) {
      const std::size_t sj = static_cast<std::size_t>(j);
      try {
        s.boundary_log_det[sj] = *f.boundary_log_abs_det(grid.node(j));
      } catch (const std::domain_error&) {
        s.boundary_log_kept[sj] = 0;  // boundary atom
      }
    }
  }
  return s;
}

namespace detail {

inline Complex det_shifted(const Matrix& m, Complex lambda) {
  const int n = static_cast<int>(m.rows());
  if (n == 1) return m(0, 0) - lambda;
  if (n == 2) return (m(0, 0) - lambda) * (m(1, 1) - lambda) - m(0, 1) * m(1, 0);
  return (m - lambda * Matrix::Identity(n, n)).determinant();
}

inline LogMean mean_log_det_shifted(std::span<const Matrix> values,
                                    std::span<const char> kept_mask, Complex lambda) {
  std::vector<Complex> dets;
  dets.reserve(values.size());
  std::vector<char> mask(kept_mask.begin(), kept_mask.end());
  for (const Matrix& m : values) dets.push_back(det_shifted(m, lambda));
  return mean_log_abs(dets, mask);
}

inline bool lambda_is_origin(Complex lambda) { return lambda == Complex(0.0, 0.0); }

inline LogMean v_interior_from(const LadderSamples& s, std::size_t rung, Complex lambda) {
  if (lambda_is_origin(lambda) && s.has_det_channel)
    return mean_log_finite(s.interior_log_det[rung], {});
  return mean_log_det_shifted(s.interior[rung], {}, lambda);
}

inline LogMean v_boundary_from(const LadderSamples& s, Complex lambda) {
  if (lambda_is_origin(lambda) && s.has_det_channel)
    return mean_log_finite(s.boundary_log_det, std::span<const char>(s.boundary_log_kept));
  return mean_log_det_shifted(s.boundary.values, std::span<const char>(s.boundary.kept), lambda);
}

}  // namespace detail

// v_r(lambda) = mean over the grid of log |det(F(r t) - lambda I)|. At
// lambda = 0 the closed-form log |det| channel is preferred when the tree
// provides one.
inline double v_r(const FunctionExpr& f, Complex lambda, double r, const CircleGrid& grid) {
  if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("v_r: radius outside [0, 1)");
  if (detail::lambda_is_origin(lambda) && f.log_abs_det(Complex(0.0, 0.0)).has_value()) {
    std::vector<double> logs(static_cast<std::size_t>(grid.size()), 0.0);
    for (int j = 0; j < grid.size(); ++j)
      logs[static_cast<std::size_t>(j)] = *f.log_abs_det(r * grid.node(j));
    return detail::mean_log_finite(logs, {}).value;
  }
  const std::vector<Matrix> samples = interior_samples(f, r, grid);
  return detail::mean_log_det_shifted(samples, {}, lambda).value;
}

// Boundary counterpart over nontangential values.
inline double v_boundary(const FunctionExpr& f, Complex lambda, const CircleGrid& grid) {
  if (detail::lambda_is_origin(lambda) && f.log_abs_det(Complex(0.0, 0.0)).has_value()) {
    std::vector<double> logs(static_cast<std::size_t>(grid.size()), 0.0);
    std::vector<char> kept(static_cast<std::size_t>(grid.size()), 1);
    for (int j = 0; j < grid.size(); ++j) {
      const std::size_t sj = static_cast<std::size_t>(j);
      try {
        logs[sj] = *f.boundary_log_abs_det(grid.node(j));
      } catch (const std::domain_error&) {
        kept[sj] = 0;
      }
    }
    return detail::mean_log_finite(logs, std::span<const char>(kept)).value;
  }
  const BoundaryGridSamples samples = boundary_samples(f, grid);
  return detail::mean_log_det_shifted(samples.values, std::span<const char>(samples.kept), lambda)
      .value;
}

struct VLimit {
  double estimate = 0.0;
  std::vector<std::pair<double, double>> sequence;  // (r, v_r)
};

namespace detail {

inline VLimit v_limit_from(const LadderSamples& s, Complex lambda, double mono_tol) {
  VLimit out;
  for (std::size_t i = 0; i < s.radii.size(); ++i) {
    const double v = v_interior_from(s, i, lambda).value;
    if (!out.sequence.empty() && v < out.sequence.back().second - mono_tol)
      throw std::runtime_error("v_limit: radial means decreased beyond tolerance");
    out.sequence.emplace_back(s.radii[i], v);
  }
  out.estimate = out.sequence.back().second;
  return out;
}

}  // namespace detail

// Monotone radial means; the last rung is the limit estimate (no
// extrapolation by design, the bias is the documented truncation error).
inline VLimit v_limit(const FunctionExpr& f, Complex lambda, const CircleGrid& grid,
                      const RadialLadder& ladder, double mono_tol = kQuadTol) {
  return detail::v_limit_from(make_ladder_samples(f, grid, ladder), lambda, mono_tol);
}

struct GapReport {
  Complex lambda{0.0, 0.0};
  double v_boundary = std::numeric_limits<double>::quiet_NaN();
  double v_limit_estimate = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::pair<double, double>> ladder_values;
  double gap = std::numeric_limits<double>::quiet_NaN();
  bool blaschke_verdict = false;
  bool in_exclusion_set = false;
  double dropped_mass = 0.0;
};

namespace detail {

inline bool lambda_excluded(const LadderSamples& s, Complex lambda) {
  for (const Matrix& probe : s.probes)
    if (std::abs(det_shifted(probe, lambda)) >= 1e-13) return false;
  return true;
}

inline GapReport gap_from(const LadderSamples& s, Complex lambda, double gap_tol,
                          double mono_tol) {
  GapReport report;
  report.lambda = lambda;
  if (lambda_excluded(s, lambda)) {
    report.in_exclusion_set = true;
    return report;
  }
  const LogMean boundary = v_boundary_from(s, lambda);
  const VLimit limit = v_limit_from(s, lambda, mono_tol);
  report.v_boundary = boundary.value;
  report.v_limit_estimate = limit.estimate;
  report.ladder_values = limit.sequence;
  report.gap = boundary.value - limit.estimate;
  report.dropped_mass = std::max(boundary.dropped_mass, s.boundary.dropped_mass);
  if (report.gap < -mono_tol)
    throw std::runtime_error("blaschke_gap: boundary mean fell below the radial limit");
  report.blaschke_verdict = report.gap <= gap_tol;
  return report;
}

}  // namespace detail

// Gap between the boundary mean of log |det(F - lambda I)| and its radial
// limit. A vanishing gap certifies that the inner part of det(F - lambda I)
// is a Blaschke product; lambda values where det(F - lambda I) vanishes
// identically (sampled at three interior probes) are excluded.
inline GapReport blaschke_gap(const FunctionExpr& f, Complex lambda, const CircleGrid& grid,
                              const RadialLadder& ladder, double gap_tol = kGapTol,
                              double mono_tol = kQuadTol) {
  return detail::gap_from(make_ladder_samples(f, grid, ladder), lambda, gap_tol, mono_tol);
}

// Gap reports across a list of spectral parameters, sharing one sample pass.
inline std::vector<GapReport> frostman_scan(const FunctionExpr& f,
                                            std::span<const Complex> lambdas,
                                            const CircleGrid& grid, const RadialLadder& ladder,
                                            double gap_tol = kGapTol,
                                            double mono_tol = kQuadTol) {
  if (lambdas.empty()) throw std::invalid_argument("frostman_scan: no spectral parameters");
  const LadderSamples samples = make_ladder_samples(f, grid, ladder);
  std::vector<GapReport> out;
  out.reserve(lambdas.size());
  for (const Complex& lambda : lambdas)
    out.push_back(detail::gap_from(samples, lambda, gap_tol, mono_tol));
  return out;
}

// nu-average of the gap over a measure carried by segments (atom-free so the
// potential stays continuous). Excluded lambdas carry nu-measure zero in
// exact arithmetic; quadrature cells that hit one are skipped.
inline double potential_gap_average(const FunctionExpr& f, const PlanarMeasure& nu,
                                    const CircleGrid& grid, const RadialLadder& ladder,
                                    int subdivisions = kSegmentSubdivisions,
                                    double mono_tol = kQuadTol) {
  if (!nu.atoms().empty())
    throw std::invalid_argument("potential_gap_average: measure must be atom-free");
  if (subdivisions < 1)
    throw std::invalid_argument("potential_gap_average: subdivisions must be >= 1");
  const LadderSamples samples = make_ladder_samples(f, grid, ladder);
  double acc = 0.0;
  bool any = false;
  for (const auto& s : nu.segments()) {
    const Complex b_dir = s.b - s.a;
    const double cell_mass = s.density * std::abs(b_dir) / static_cast<double>(subdivisions);
    for (int i = 0; i < subdivisions; ++i) {
      const double frac = (static_cast<double>(i) + 0.5) / static_cast<double>(subdivisions);
      const GapReport report =
          detail::gap_from(samples, s.a + frac * b_dir, kGapTol, mono_tol);
      if (report.in_exclusion_set) continue;
      acc += cell_mass * report.gap;
      any = true;
    }
  }
  if (!any) throw std::runtime_error("potential_gap_average: every quadrature cell was excluded");
  return acc;
}

// Rectangle lattice of spectral parameters for scans.
inline std::vector<Complex> lambda_rectangle(double re0, double re1, double im0, double im1,
                                             double step) {
  if (!(step > 0.0)) throw std::invalid_argument("lambda_rectangle: step must be positive");
  if (re1 < re0 || im1 < im0) throw std::invalid_argument("lambda_rectangle: empty rectangle");
  std::vector<Complex> out;
  const double eps = step * 1e-9;
  for (double im = im0; im <= im1 + eps; im += step)
    for (double re = re0; re <= re1 + eps; re += step) out.emplace_back(re, im);
  return out;
}

}  // namespace smirnovkit

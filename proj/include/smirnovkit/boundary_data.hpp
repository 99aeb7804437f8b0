#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "smirnovkit/circle.hpp"
#include "smirnovkit/matrix.hpp"

namespace smirnovkit {

// Tolerance for recognising that an evaluation point sits on a boundary atom.
inline constexpr double kAtomHitTol = 1e-12;
// Admission tolerance for atom locations relative to the unit circle.
inline constexpr double kAtomCircleTol = 1e-9;

struct CircleAtom {
  Complex location;  // |location| = 1
  double weight = 0.0;
};

// Finitely many positive point masses on the unit circle.
class AtomicSingularMeasure {
 public:
  AtomicSingularMeasure() = default;

  explicit AtomicSingularMeasure(std::vector<CircleAtom> atoms) : atoms_(std::move(atoms)) {
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (std::abs(std::abs(atoms_[i].location) - 1.0) > kAtomCircleTol)
        throw std::invalid_argument("AtomicSingularMeasure: atom off the unit circle");
      if (!(atoms_[i].weight > 0.0))
        throw std::invalid_argument("AtomicSingularMeasure: atom mass must be positive");
      for (std::size_t j = 0; j < i; ++j)
        if (std::abs(atoms_[i].location - atoms_[j].location) <= kAtomHitTol)
          throw std::invalid_argument("AtomicSingularMeasure: duplicate atom location");
    }
  }

  const std::vector<CircleAtom>& atoms() const { return atoms_; }
  double total_mass() const {
    double acc = 0.0;
    for (const auto& a : atoms_) acc += a.weight;
    return acc;
  }

 private:
  std::vector<CircleAtom> atoms_;
};

// exp( - sum_j sigma_j (t_j + z)/(t_j - z) ); zero-free, inner when the masses
// are positive.
inline Complex singular_inner_value(const AtomicSingularMeasure& mu, Complex z) {
  require_interior(z, "singular_inner_value");
  Complex acc(0.0, 0.0);
  for (const auto& a : mu.atoms()) acc += a.weight * ((a.location + z) / (a.location - z));
  return std::exp(-acc);
}

// Boundary values carry unit modulus away from the atoms: the kernel is purely
// imaginary for |t| = 1, so only its imaginary part is used.
inline Complex singular_inner_boundary(const AtomicSingularMeasure& mu, Complex t) {
  require_boundary(t, "singular_inner_boundary");
  double phase = 0.0;
  for (const auto& a : mu.atoms()) {
    if (std::abs(t - a.location) <= kAtomHitTol)
      throw std::domain_error("singular_inner_boundary: boundary singularity at an atom");
    phase += a.weight * (((a.location + t) / (a.location - t)).imag());
  }
  return std::polar(1.0, -phase);
}

// sum_j c_j (t_j + z)/(t_j - z) with real signed coefficients.
inline Complex herglotz_sum_value(std::span<const CircleAtom> atoms, Complex z) {
  require_interior(z, "herglotz_sum_value");
  Complex acc(0.0, 0.0);
  for (const auto& a : atoms) acc += a.weight * ((a.location + z) / (a.location - z));
  return acc;
}

inline Complex herglotz_sum_boundary(std::span<const CircleAtom> atoms, Complex t) {
  require_boundary(t, "herglotz_sum_boundary");
  double imag = 0.0;
  for (const auto& a : atoms) {
    if (std::abs(t - a.location) <= kAtomHitTol)
      throw std::domain_error("herglotz_sum_boundary: boundary singularity at an atom");
    imag += a.weight * (((a.location + t) / (a.location - t)).imag());
  }
  return Complex(0.0, imag);
}

// Nonnegative boundary weight with a log-integrable profile: either a closed
// form (constant, |polynomial|) or raw grid samples.
class BoundaryWeight {
 public:
  struct Constant {
    double value;
  };
  struct AbsPoly {
    std::vector<Complex> coefficients;  // p(t) = sum_k c_k t^k, w = |p|
  };
  struct GridSamples {
    std::vector<double> values;  // one nonnegative value per grid node
  };

  static BoundaryWeight constant(double value) {
    if (!(value >= 0.0)) throw std::invalid_argument("BoundaryWeight: negative constant");
    return BoundaryWeight(Constant{value});
  }
  static BoundaryWeight abs_poly(std::vector<Complex> coefficients) {
    if (coefficients.empty()) throw std::invalid_argument("BoundaryWeight: empty polynomial");
    return BoundaryWeight(AbsPoly{std::move(coefficients)});
  }
  static BoundaryWeight grid_samples(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("BoundaryWeight: empty sample list");
    for (double v : values)
      if (!(v >= 0.0)) throw std::invalid_argument("BoundaryWeight: negative sample");
    return BoundaryWeight(GridSamples{std::move(values)});
  }

  enum class Kind { constant, abs_poly, grid };

  Kind kind() const {
    if (std::holds_alternative<Constant>(body_)) return Kind::constant;
    if (std::holds_alternative<AbsPoly>(body_)) return Kind::abs_poly;
    return Kind::grid;
  }
  bool closed_form() const { return kind() != Kind::grid; }
  double constant_value() const { return std::get<Constant>(body_).value; }
  const std::vector<Complex>& coefficients() const { return std::get<AbsPoly>(body_).coefficients; }
  const std::vector<double>& raw_samples() const { return std::get<GridSamples>(body_).values; }

  // Closed forms evaluate anywhere; sampled weights only at their own nodes.
  double eval(Complex t) const {
    if (const auto* c = std::get_if<Constant>(&body_)) return c->value;
    if (const auto* p = std::get_if<AbsPoly>(&body_)) {
      Complex acc(0.0, 0.0);
      for (std::size_t k = p->coefficients.size(); k-- > 0;) acc = acc * t + p->coefficients[k];
      return std::abs(acc);
    }
    throw std::domain_error("BoundaryWeight: sampled weight has no off-grid values");
  }

  std::vector<double> samples_on(const CircleGrid& grid) const {
    if (const auto* g = std::get_if<GridSamples>(&body_)) {
      if (static_cast<int>(g->values.size()) != grid.size())
        throw std::invalid_argument("BoundaryWeight: sample count does not match grid");
      return g->values;
    }
    std::vector<double> out(static_cast<std::size_t>(grid.size()));
    for (int j = 0; j < grid.size(); ++j) out[static_cast<std::size_t>(j)] = eval(grid.node(j));
    return out;
  }

 private:
  using Body = std::variant<Constant, AbsPoly, GridSamples>;
  explicit BoundaryWeight(Body body) : body_(std::move(body)) {}
  Body body_;
};

// Outer function e(z) = C exp( mean_t [ (t+z)/(t-z) log w(t) ] ).
// Interior values come from the grid quadrature; boundary values combine the
// sampled modulus with the conjugate (Hilbert) phase computed spectrally, so
// |e(t)| = w(t) on the grid and log |e(0)| = mean log w by construction.
class OuterFunction {
 public:
  OuterFunction(const BoundaryWeight& weight, const CircleGrid& grid,
                Complex normalization = Complex(1.0, 0.0))
      : grid_(grid), normalization_(normalization) {
    if (std::abs(std::abs(normalization_) - 1.0) > 1e-12)
      throw std::invalid_argument("OuterFunction: |C| must be one");
    init_from_weight_samples(weight.samples_on(grid_));
  }

  OuterFunction(std::vector<double> weight_samples, const CircleGrid& grid,
                Complex normalization = Complex(1.0, 0.0))
      : grid_(grid), normalization_(normalization) {
    if (std::abs(std::abs(normalization_) - 1.0) > 1e-12)
      throw std::invalid_argument("OuterFunction: |C| must be one");
    if (static_cast<int>(weight_samples.size()) != grid_.size())
      throw std::invalid_argument("OuterFunction: sample count does not match grid");
    init_from_weight_samples(weight_samples);
  }

  const CircleGrid& grid() const { return grid_; }
  double dropped_mass() const { return dropped_mass_; }
  const std::vector<double>& log_weight() const { return log_w_; }

  // mean log w; log |e(z)| integrates this against the Poisson kernel.
  double log_mean() const { return log_mean_; }

  Complex value(Complex z) const { return normalization_ * std::exp(log_value(z)); }

  // Nontangential boundary value; exact in modulus on the grid nodes.
  Complex boundary(Complex t) const { return normalization_ * std::exp(log_boundary(t)); }

  // log e(z) up to the unimodular constant: real part is log |e(z)|, kept in
  // log scale so extreme moduli never leave the representable range.
  Complex log_value(Complex z) const {
    require_interior(z, "OuterFunction::value");
    std::vector<Complex> terms;
    terms.reserve(log_w_.size());
    for (std::size_t j = 0; j < log_w_.size(); ++j) {
      if (!kept_[j]) continue;
      terms.push_back((grid_.node(static_cast<int>(j)) + z) /
                      (grid_.node(static_cast<int>(j)) - z) * log_w_[j]);
    }
    if (terms.empty()) throw std::invalid_argument("OuterFunction: weight vanishes everywhere");
    return detail::pairwise_sum(std::span<const Complex>(terms)) /
           static_cast<double>(grid_.size());
  }

  Complex log_boundary(Complex t) const {
    require_boundary(t, "OuterFunction::boundary");
    const int j = node_index(t);
    if (j >= 0) {
      if (!kept_[static_cast<std::size_t>(j)])
        throw std::domain_error("OuterFunction::boundary: weight vanishes at this node");
      return Complex(log_w_[static_cast<std::size_t>(j)], conj_[static_cast<std::size_t>(j)]);
    }
    const double theta = std::arg(t);
    return Complex(detail::harmonic_eval(coeff_, theta),
                   detail::harmonic_conjugate_eval(coeff_, theta));
  }

  double log_abs(Complex z) const {
    return log_value(z).real() + std::log(std::abs(normalization_));
  }
  double boundary_log_abs(Complex t) const {
    return log_boundary(t).real() + std::log(std::abs(normalization_));
  }

 private:
  void init_from_weight_samples(const std::vector<double>& w) {
    const std::size_t n = w.size();
    log_w_.assign(n, 0.0);
    kept_.assign(n, true);
    std::size_t dropped = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!(w[j] >= 0.0)) throw std::invalid_argument("OuterFunction: negative weight sample");
      if (w[j] == 0.0) {
        kept_[j] = false;
        ++dropped;
      } else {
        log_w_[j] = std::log(w[j]);
      }
    }
    if (dropped == n) throw std::invalid_argument("OuterFunction: weight vanishes everywhere");
    dropped_mass_ = static_cast<double>(dropped) / static_cast<double>(n);
    std::vector<double> filled = log_w_;  // dropped nodes contribute zero
    conj_ = detail::conjugate_samples(filled, grid_);
    coeff_ = detail::harmonic_coefficients(filled, grid_);
    log_mean_ = circle_mean(std::span<const double>(filled));
  }

  // Index of the grid node equal to t (within kAtomHitTol), or -1.
  int node_index(Complex t) const {
    const double sector = 2.0 * std::numbers::pi / grid_.size();
    double rel = std::arg(t) - grid_.offset();
    rel -= 2.0 * std::numbers::pi * std::floor(rel / (2.0 * std::numbers::pi));
    const int j = static_cast<int>(std::lround(rel / sector)) % grid_.size();
    return std::abs(t - grid_.node(j)) <= kAtomHitTol ? j : -1;
  }

  CircleGrid grid_;
  Complex normalization_;
  std::vector<double> log_w_;
  std::vector<bool> kept_;
  std::vector<double> conj_;
  std::vector<Complex> coeff_;
  double log_mean_ = 0.0;
  double dropped_mass_ = 0.0;
};

// One-shot form of the outer synthesis.
inline Complex outer_from_weight(const BoundaryWeight& weight, Complex z, const CircleGrid& grid,
                                 Complex normalization = Complex(1.0, 0.0)) {
  return OuterFunction(weight, grid, normalization).value(z);
}

}  // namespace smirnovkit

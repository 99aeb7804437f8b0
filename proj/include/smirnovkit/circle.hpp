#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "smirnovkit/matrix.hpp"

namespace smirnovkit {

namespace detail {

// Deterministic pairwise reduction; the result does not depend on how callers
// produced the samples, only on their order.
template <typename T>
T pairwise_sum(std::span<const T> xs) {
  if (xs.empty()) return T{};
  if (xs.size() <= 8) {
    T acc = xs[0];
    for (std::size_t i = 1; i < xs.size(); ++i) acc += xs[i];
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// In-place radix-2 FFT; sign = -1 forward, +1 inverse (unscaled).
inline void fft_pow2(std::vector<Complex>& a, int sign) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft_pow2: size must be 2^k");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const Complex wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      Complex w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const Complex u = a[i + j];
        const Complex v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

inline std::vector<Complex> dft(std::span<const Complex> a, int sign) {
  std::vector<Complex> buf(a.begin(), a.end());
  fft_pow2(buf, sign);
  return buf;
}

}  // namespace detail

// Uniform grid t_j = exp(i (2 pi j / N + offset)) on the unit circle, with N
// a power of two and at least 64. The default offset pi/N keeps every node
// away from the N-th roots of unity, where boundary atoms are usually placed.
class CircleGrid {
 public:
  explicit CircleGrid(int n, double offset = -1.0) : n_(n) {
    if (n < 64 || (n & (n - 1)) != 0)
      throw std::invalid_argument("CircleGrid: node count must be a power of two, at least 64");
    const double sector = 2.0 * std::numbers::pi / n;
    offset_ = offset < 0.0 ? sector / 2.0 : offset;
    if (offset_ >= sector)
      throw std::invalid_argument("CircleGrid: offset must lie in [0, 2 pi / N)");
    nodes_.reserve(n);
    for (int j = 0; j < n; ++j) {
      const double ang = sector * j + offset_;
      nodes_.emplace_back(std::cos(ang), std::sin(ang));
    }
  }

  int size() const { return n_; }
  double offset() const { return offset_; }
  double angle(int j) const { return 2.0 * std::numbers::pi * j / n_ + offset_; }
  const Complex& node(int j) const { return nodes_[static_cast<std::size_t>(j)]; }
  const std::vector<Complex>& nodes() const { return nodes_; }

 private:
  int n_;
  double offset_;
  std::vector<Complex> nodes_;
};

// Mean against normalized arc length; exact for trigonometric polynomials of
// degree < N/2 sampled on a CircleGrid.
inline Complex circle_mean(std::span<const Complex> samples) {
  if (samples.empty()) throw std::invalid_argument("circle_mean: no samples");
  for (const Complex& s : samples)
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      throw std::invalid_argument("circle_mean: non-finite sample");
  return detail::pairwise_sum(samples) / static_cast<double>(samples.size());
}

inline double circle_mean(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("circle_mean: no samples");
  for (double s : samples)
    if (!std::isfinite(s)) throw std::invalid_argument("circle_mean: non-finite sample");
  return detail::pairwise_sum(samples) / static_cast<double>(samples.size());
}

inline void require_interior(Complex z, const char* where) {
  if (!(std::abs(z) < 1.0))
    throw std::domain_error(std::string(where) + ": point must lie in the open unit disc");
}

inline void require_boundary(Complex t, const char* where, double tol = 1e-9) {
  if (std::abs(std::abs(t) - 1.0) > tol)
    throw std::domain_error(std::string(where) + ": point must lie on the unit circle");
}

// P(z, t) = (1 - |z|^2) / |t - z|^2 for |z| < 1, |t| = 1.
inline double poisson_kernel(Complex z, Complex t) {
  require_interior(z, "poisson_kernel");
  require_boundary(t, "poisson_kernel");
  const double d2 = std::norm(t - z);
  return (1.0 - std::norm(z)) / d2;
}

// (t + z) / (t - z); its real part is the Poisson kernel.
inline Complex herglotz_kernel(Complex z, Complex t) {
  require_interior(z, "herglotz_kernel");
  require_boundary(t, "herglotz_kernel");
  return (t + z) / (t - z);
}

// Increasing radii r_j = 1 - 2^-j for j in [j_min, j_max]; an explicit final
// radius, when given, replaces every rung at or beyond it.
class RadialLadder {
 public:
  RadialLadder(int j_min, int j_max, double r_max = -1.0) {
    if (j_min < 1 || j_max < j_min) throw std::invalid_argument("RadialLadder: bad exponent range");
    for (int j = j_min; j <= j_max; ++j) radii_.push_back(1.0 - std::ldexp(1.0, -j));
    if (r_max > 0.0) {
      if (r_max >= 1.0) throw std::invalid_argument("RadialLadder: r_max must be below one");
      while (!radii_.empty() && radii_.back() >= r_max) radii_.pop_back();
      radii_.push_back(r_max);
    }
  }

  const std::vector<double>& radii() const { return radii_; }
  double top() const { return radii_.back(); }

 private:
  std::vector<double> radii_;
};

struct IntegrabilityReport {
  double sup_integral = 0.0;
  // (delta, worst over r of the mass carried by the top ceil(delta N) nodes).
  std::vector<std::pair<double, double>> worst_small_set_mass;
  bool pass = false;
};

// Uniform-integrability proxy for a family of nonnegative grid samples indexed
// by radius: the family fails when a vanishing fraction of nodes keeps a fixed
// share of the mean.
inline IntegrabilityReport uniform_integrability_diagnostic(
    const std::vector<std::vector<double>>& per_radius_values, std::span<const double> deltas,
    double epsilon = 0.25) {
  if (per_radius_values.empty())
    throw std::invalid_argument("uniform_integrability_diagnostic: no radii");
  std::vector<double> ds(deltas.begin(), deltas.end());
  if (ds.empty()) ds = {0.1, 0.03, 0.01};
  std::sort(ds.begin(), ds.end(), std::greater<double>());
  for (double d : ds)
    if (!(d > 0.0 && d <= 1.0))
      throw std::invalid_argument("uniform_integrability_diagnostic: delta outside (0, 1]");

  IntegrabilityReport report;
  std::vector<std::vector<double>> sorted = per_radius_values;
  for (auto& values : sorted) {
    for (double v : values)
      if (!(v >= 0.0))
        throw std::invalid_argument("uniform_integrability_diagnostic: negative sample");
    report.sup_integral = std::max(report.sup_integral, circle_mean(values));
    std::sort(values.begin(), values.end(), std::greater<double>());
  }
  for (double d : ds) {
    double worst = 0.0;
    for (const auto& values : sorted) {
      const std::size_t k = static_cast<std::size_t>(
          std::ceil(d * static_cast<double>(values.size())));
      const auto head = std::span<const double>(values).first(std::min(k, values.size()));
      worst = std::max(worst, detail::pairwise_sum(head) / static_cast<double>(values.size()));
    }
    report.worst_small_set_mass.emplace_back(d, worst);
  }
  report.pass = report.worst_small_set_mass.back().second < epsilon;
  return report;
}

struct ConvexProbeReport {
  double sup = 0.0;
  std::vector<double> per_radius;
  bool diverging = false;
};

// Mean of x^2 over the grid per radius. A bounded supremum across the ladder
// is evidence for the stronger square-integrability property; steady growth
// through the last rungs is flagged as divergence.
inline ConvexProbeReport strongly_convex_probe(
    const std::vector<std::vector<double>>& per_radius_values) {
  if (per_radius_values.empty()) throw std::invalid_argument("strongly_convex_probe: no radii");
  ConvexProbeReport report;
  for (const auto& values : per_radius_values) {
    std::vector<double> squares(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) squares[i] = values[i] * values[i];
    report.per_radius.push_back(circle_mean(squares));
    report.sup = std::max(report.sup, report.per_radius.back());
  }
  const std::size_t m = report.per_radius.size();
  if (m >= 3) {
    bool tail_increasing = true;
    for (std::size_t i = m / 2; i + 1 < m; ++i)
      tail_increasing = tail_increasing && report.per_radius[i + 1] > report.per_radius[i];
    report.diverging =
        tail_increasing && report.per_radius[m - 1] >= 2.0 * report.per_radius[m / 2];
  }
  return report;
}

namespace detail {

// Nonnegative-frequency Fourier coefficients c_k, k < N/2, of real samples on
// a CircleGrid, so that g(theta) ~ c_0 + 2 Re sum_k c_k e^{i k theta}.
inline std::vector<Complex> harmonic_coefficients(std::span<const double> samples,
                                                  const CircleGrid& grid) {
  const std::size_t n = samples.size();
  if (static_cast<int>(n) != grid.size())
    throw std::invalid_argument("harmonic_coefficients: samples do not match grid");
  std::vector<Complex> buf(samples.begin(), samples.end());
  std::vector<Complex> spec = dft(buf, -1);
  std::vector<Complex> coeff(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const Complex rot(std::cos(grid.offset() * static_cast<double>(k)),
                      -std::sin(grid.offset() * static_cast<double>(k)));
    coeff[k] = spec[k] / static_cast<double>(n) * rot;
  }
  return coeff;
}

inline double harmonic_eval(std::span<const Complex> coeff, double theta) {
  double acc = coeff.empty() ? 0.0 : coeff[0].real();
  for (std::size_t k = 1; k < coeff.size(); ++k) {
    const double ang = theta * static_cast<double>(k);
    acc += 2.0 * (coeff[k] * Complex(std::cos(ang), std::sin(ang))).real();
  }
  return acc;
}

// Harmonic conjugate normalized to vanish at the origin: the multiplier
// -i sgn(k) on the coefficients above.
inline double harmonic_conjugate_eval(std::span<const Complex> coeff, double theta) {
  double acc = 0.0;
  for (std::size_t k = 1; k < coeff.size(); ++k) {
    const double ang = theta * static_cast<double>(k);
    acc += 2.0 * (Complex(0.0, -1.0) * coeff[k] * Complex(std::cos(ang), std::sin(ang))).real();
  }
  return acc;
}

// Conjugate samples on the grid itself (one inverse transform).
inline std::vector<double> conjugate_samples(std::span<const double> samples,
                                             const CircleGrid& grid) {
  const std::size_t n = samples.size();
  if (static_cast<int>(n) != grid.size())
    throw std::invalid_argument("conjugate_samples: samples do not match grid");
  std::vector<Complex> buf(samples.begin(), samples.end());
  std::vector<Complex> spec = dft(buf, -1);
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0 || 2 * k == n) {
      spec[k] = Complex(0.0, 0.0);
    } else if (k < n / 2) {
      spec[k] *= Complex(0.0, -1.0);
    } else {
      spec[k] *= Complex(0.0, 1.0);
    }
  }
  std::vector<Complex> back = dft(spec, +1);
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = back[j].real() / static_cast<double>(n);
  return out;
}

}  // namespace detail

}  // namespace smirnovkit

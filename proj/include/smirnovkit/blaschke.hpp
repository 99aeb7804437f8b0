#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "smirnovkit/matrix.hpp"

namespace smirnovkit {

// b_a(z) = (|a|/a) (a - z) / (1 - conj(a) z), with b_0(z) = z. Modulus one on
// |z| = 1, and |b_a(z)| < 1 strictly inside the disc.
inline Complex scalar_blaschke(Complex a, Complex z) {
  if (!(std::abs(a) < 1.0))
    throw std::invalid_argument("scalar_blaschke: zero must lie in the open unit disc");
  if (std::abs(z) > 1.0 + 1e-12)
    throw std::domain_error("scalar_blaschke: point outside the closed unit disc");
  if (a == Complex(0.0, 0.0)) return z;
  return (std::abs(a) / a) * (a - z) / (Complex(1.0, 0.0) - std::conj(a) * z);
}

// One factor B(z) = I + (b_a(z) - 1) P; unitary on the circle, contractive in
// the disc, det B = b_a^{rank P}.
struct ElementaryFactor {
  Complex zero;
  Orthoprojection projection;

  ElementaryFactor(Complex a, Orthoprojection p) : zero(a), projection(std::move(p)) {
    if (!(std::abs(zero) < 1.0))
      throw std::invalid_argument("ElementaryFactor: zero must lie in the open unit disc");
  }
};

inline Matrix elementary_eval(const ElementaryFactor& f, Complex z) {
  const int n = f.projection.dim();
  return Matrix::Identity(n, n) +
         (scalar_blaschke(f.zero, z) - Complex(1.0, 0.0)) * f.projection.matrix();
}

enum class ProductSide { left, right };

// Finite product of elementary factors with a constant unitary: the left
// variant multiplies factors in index order and puts the unitary last, the
// right variant puts the unitary first and multiplies in reverse index order.
class BPProduct {
 public:
  BPProduct(std::vector<ElementaryFactor> factors, ProductSide side, Matrix unitary)
      : factors_(std::move(factors)), side_(side), unitary_(std::move(unitary)) {
    require_square(unitary_, "BPProduct");
    dim_ = static_cast<int>(unitary_.rows());
    for (const auto& f : factors_)
      if (f.projection.dim() != dim_)
        throw std::invalid_argument("BPProduct: factor dimension mismatch");
    if (!classify_matrix(unitary_, 1e-10).unitary)
      throw std::invalid_argument("BPProduct: constant must be unitary within 1e-10");
  }

  BPProduct(std::vector<ElementaryFactor> factors, ProductSide side, int dim)
      : BPProduct(std::move(factors), side, Matrix::Identity(dim, dim)) {}

  const std::vector<ElementaryFactor>& factors() const { return factors_; }
  ProductSide side() const { return side_; }
  const Matrix& unitary_constant() const { return unitary_; }
  int dim() const { return dim_; }

 private:
  std::vector<ElementaryFactor> factors_;
  ProductSide side_;
  Matrix unitary_;
  int dim_ = 1;
};

inline Matrix bp_eval(const BPProduct& p, Complex z) {
  Matrix acc = Matrix::Identity(p.dim(), p.dim());
  if (p.side() == ProductSide::left) {
    for (const auto& f : p.factors()) acc = acc * elementary_eval(f, z);
    acc = acc * p.unitary_constant();
  } else {
    acc = p.unitary_constant();
    for (std::size_t i = p.factors().size(); i-- > 0;)
      acc = acc * elementary_eval(p.factors()[i], z);
  }
  return acc;
}

// det of the product collapses to a scalar Blaschke product regardless of the
// projections' geometry or the ordering.
inline Complex bp_det(const BPProduct& p, Complex z) {
  Complex acc = p.unitary_constant().determinant();
  for (const auto& f : p.factors())
    acc *= std::pow(scalar_blaschke(f.zero, z), f.projection.rank());
  return acc;
}

// sum_k (1 - |z_k|) rank P_k; finiteness is the convergence condition for
// infinite products, and the margin is exact for finite ones.
inline double convergence_margin(const std::vector<ElementaryFactor>& factors) {
  double acc = 0.0;
  for (const auto& f : factors) acc += (1.0 - std::abs(f.zero)) * f.projection.rank();
  return acc;
}

}  // namespace smirnovkit

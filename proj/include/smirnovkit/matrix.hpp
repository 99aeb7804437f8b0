#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace smirnovkit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Largest admissible matrix dimension for every operation in the library.
inline constexpr int kMaxDim = 32;

// Default tolerance for structural predicates (unitary, projection, ...).
inline constexpr double kStructuralTol = 1e-9;
// Default tolerance for spectral comparisons (eigenvalue sets, norms).
inline constexpr double kSpectralTol = 1e-8;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// log+ a = max(log a, 0), with the convention log+ 0 = 0.
inline double log_plus(double a) {
  if (!(a >= 0.0)) throw std::invalid_argument("log_plus: negative or NaN argument");
  return a > 1.0 ? std::log(a) : 0.0;
}

// log- a = max(-log a, 0); log- 0 is the infinite sentinel.
inline double log_minus(double a) {
  if (!(a >= 0.0)) throw std::invalid_argument("log_minus: negative or NaN argument");
  if (a == 0.0) return kInfinity;
  return a < 1.0 ? -std::log(a) : 0.0;
}

inline bool entries_finite(const Matrix& a) {
  return a.allFinite();
}

inline void require_square(const Matrix& a, const char* where) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw std::invalid_argument(std::string(where) + ": matrix must be square and nonempty");
  if (a.rows() > kMaxDim)
    throw std::invalid_argument(std::string(where) + ": dimension exceeds cap " +
                                std::to_string(kMaxDim));
  if (!entries_finite(a))
    throw std::invalid_argument(std::string(where) + ": matrix has non-finite entries");
}

// Operator norm induced by the Euclidean vector norm: the largest singular value.
inline double operator_norm(const Matrix& a) {
  require_square(a, "operator_norm");
  if (a.isZero(0.0)) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

struct MatrixFlags {
  bool contractive = false;
  bool unitary = false;
  bool orthoprojection = false;
};

// Predicate set used throughout: contractions, unitaries, orthogonal projections.
// A matrix may satisfy several flags at once (I is all three).
inline MatrixFlags classify_matrix(const Matrix& a, double tol = kStructuralTol) {
  require_square(a, "classify_matrix");
  const int n = static_cast<int>(a.rows());
  const Matrix id = Matrix::Identity(n, n);
  MatrixFlags f;
  f.contractive = operator_norm(a) <= 1.0 + tol;
  f.unitary = operator_norm(a.adjoint() * a - id) <= tol;
  f.orthoprojection =
      operator_norm(a * a - a) <= tol && operator_norm(a - a.adjoint()) <= tol;
  return f;
}

// Self-adjoint idempotent with integral trace; rank is recovered from the trace.
class Orthoprojection {
 public:
  explicit Orthoprojection(Matrix p, double tol = kStructuralTol) : mat_(std::move(p)) {
    require_square(mat_, "Orthoprojection");
    const int n = static_cast<int>(mat_.rows());
    const Matrix delta_idem = mat_ * mat_ - mat_;
    const Matrix delta_sym = mat_ - mat_.adjoint();
    if (operator_norm(delta_idem) > tol || operator_norm(delta_sym) > tol)
      throw std::invalid_argument("Orthoprojection: matrix is not a self-adjoint idempotent");
    const double tr = mat_.trace().real();
    rank_ = static_cast<int>(std::lround(tr));
    if (std::abs(tr - rank_) > 1e-6 || rank_ < 0 || rank_ > n)
      throw std::invalid_argument("Orthoprojection: trace is not close to an integer rank");
  }

  // Projection onto the column span of an n x r basis block.
  static Orthoprojection from_span(const Matrix& basis) {
    if (basis.rows() < 1 || basis.cols() < 1 || basis.cols() > basis.rows())
      throw std::invalid_argument("Orthoprojection::from_span: bad basis shape");
    Eigen::HouseholderQR<Matrix> qr(basis);
    Matrix q = qr.householderQ() * Matrix::Identity(basis.rows(), basis.cols());
    return Orthoprojection(q * q.adjoint());
  }

  const Matrix& matrix() const { return mat_; }
  int rank() const { return rank_; }
  int dim() const { return static_cast<int>(mat_.rows()); }

 private:
  Matrix mat_;
  int rank_ = 0;
};

// Full eigenvalue list (with multiplicity) via a dense nonsymmetric solve.
inline std::vector<Complex> eigenvalues(const Matrix& a) {
  require_square(a, "eigenvalues");
  Eigen::ComplexEigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigenvalues: dense solver failed to converge");
  const auto& ev = solver.eigenvalues();
  std::vector<Complex> out(ev.data(), ev.data() + ev.size());
  Complex prod(1.0, 0.0);
  for (const Complex& l : out) prod *= l;
  const Complex det = a.determinant();
  if (std::abs(prod - det) > 1e-9 * (1.0 + std::abs(det)) * (1.0 + operator_norm(a)))
    throw std::runtime_error("eigenvalues: product of eigenvalues disagrees with determinant");
  return out;
}

struct DetBound {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// log+ |det(A - lambda I)| <= n (log+ ||A|| + log+ |lambda| + log 2).
inline DetBound det_bound_check(const Matrix& a, Complex lambda) {
  require_square(a, "det_bound_check");
  const int n = static_cast<int>(a.rows());
  const Matrix shifted = a - lambda * Matrix::Identity(n, n);
  DetBound r;
  r.lhs = log_plus(std::abs(shifted.determinant()));
  r.rhs = n * (log_plus(operator_norm(a)) + log_plus(std::abs(lambda)) + std::log(2.0));
  r.holds = r.lhs <= r.rhs + 1e-12;
  return r;
}

namespace detail {

// log det of a positive semidefinite matrix; -inf when numerically singular.
inline double log_det_psd(const Matrix& m, double tol) {
  const double scale = operator_norm(m);
  if (operator_norm(m - m.adjoint()) > tol * (1.0 + scale))
    throw std::invalid_argument("minkowski_gap: member is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("minkowski_gap: eigenvalue solve failed");
  double acc = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()(i);
    if (ev < -tol * (1.0 + scale))
      throw std::invalid_argument("minkowski_gap: member is not positive semidefinite");
    if (ev <= tol * (1.0 + scale)) return -kInfinity;
    acc += std::log(ev);
  }
  return acc;
}

}  // namespace detail

// Concavity gap of log det under convex combination:
//   log det(sum w_j M_j) - sum w_j log det M_j  >=  0.
// A singular member makes the subtracted term -inf; the gap is then reported
// as the +inf sentinel.
inline double minkowski_gap(std::span<const Matrix> family, std::span<const double> weights,
                            double tol = kStructuralTol) {
  if (family.empty() || family.size() != weights.size())
    throw std::invalid_argument("minkowski_gap: family and weights must match and be nonempty");
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("minkowski_gap: weights must be nonnegative");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw std::invalid_argument("minkowski_gap: weights must sum to one");
  const int n = static_cast<int>(family[0].rows());
  Matrix mix = Matrix::Zero(n, n);
  double members = 0.0;
  for (std::size_t j = 0; j < family.size(); ++j) {
    require_square(family[j], "minkowski_gap");
    if (family[j].rows() != n)
      throw std::invalid_argument("minkowski_gap: members must share one dimension");
    mix += weights[j] * family[j];
    members += weights[j] * detail::log_det_psd(family[j], tol);
  }
  if (members == -kInfinity) return kInfinity;
  return detail::log_det_psd(mix, tol) - members;
}

}  // namespace smirnovkit

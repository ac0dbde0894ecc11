#pragma once

// Dense symmetric linear algebra for small dimensions (d up to a few dozen).

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "mineig/numeric_policy.hpp"

namespace mineig {

using Vector = std::vector<double>;

double dot(std::span<const double> u, std::span<const double> v);
double norm(std::span<const double> v);

// Dense symmetric d x d matrix. Writes go through set()/add_outer(), which
// keep entries(i, j) == entries(j, i) bit-for-bit.
class SymMatrix {
 public:
  explicit SymMatrix(std::size_t dim);

  static SymMatrix identity(std::size_t dim);
  static SymMatrix diagonal(std::span<const double> diag);
  static SymMatrix diagonal(std::initializer_list<double> diag);
  static SymMatrix outer(std::span<const double> v, double weight = 1.0);
  // Throws InvalidMatrix unless the rows form an exactly symmetric square.
  static SymMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  // Row-major d*d buffer; must be exactly symmetric.
  static SymMatrix from_dense(std::size_t dim, std::span<const double> row_major);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return entries_[i * dim_ + j];
  }
  void set(std::size_t i, std::size_t j, double value) noexcept {
    entries_[i * dim_ + j] = value;
    entries_[j * dim_ + i] = value;
  }
  // this += weight * v v^T
  void add_outer(std::span<const double> v, double weight = 1.0);
  // this += weight * other
  void add_scaled(const SymMatrix& other, double weight);

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator-=(const SymMatrix& other);
  SymMatrix& operator*=(double scale);

  double trace() const;
  double frobenius_norm() const;
  bool all_finite() const;
  Vector apply(std::span<const double> v) const;
  // u^T A v
  double bilinear(std::span<const double> u, std::span<const double> v) const;
  // Row-major view of all d*d entries.
  std::span<const double> data() const noexcept { return entries_; }

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  std::size_t dim_;
  std::vector<double> entries_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(SymMatrix a, const SymMatrix& b);
SymMatrix operator*(double s, SymMatrix a);
// Congruence B A B for symmetric B.
SymMatrix congruence(const SymMatrix& b, const SymMatrix& a);
double frobenius_inner(const SymMatrix& a, const SymMatrix& b);

struct EigenDecomp {
  Vector values;          // ascending
  std::vector<double> q;  // column-major; column k pairs with values[k]

  std::size_t dim() const noexcept { return values.size(); }
  std::span<const double> vector(std::size_t k) const {
    return {q.data() + k * dim(), dim()};
  }
  double min() const { return values.front(); }
  double max() const { return values.back(); }
  SymMatrix reconstruct() const;

  // Q diag(fn(lambda)) Q^T
  template <class Fn>
  SymMatrix map(Fn&& fn) const {
    const std::size_t d = dim();
    SymMatrix out(d);
    for (std::size_t k = 0; k < d; ++k) out.add_outer(vector(k), fn(values[k]));
    return out;
  }
};

// Cyclic Jacobi rotations. Throws InvalidMatrix on non-finite entries.
EigenDecomp eigen_decompose(const SymMatrix& a,
                            const NumericPolicy& policy = kDefaultPolicy);

double lambda_min(const SymMatrix& a, const NumericPolicy& policy = kDefaultPolicy);
// Product of eigenvalues.
double determinant(const SymMatrix& a, const NumericPolicy& policy = kDefaultPolicy);

// Spectral pseudo-inverse of a PSD matrix, factored once for repeated
// quadratic-form queries.
class PseudoInverse {
 public:
  explicit PseudoInverse(const SymMatrix& a,
                         const NumericPolicy& policy = kDefaultPolicy);

  std::size_t dim() const noexcept { return eig_.dim(); }
  std::size_t rank() const noexcept { return rank_; }
  bool invertible() const noexcept { return rank_ == eig_.dim(); }
  const EigenDecomp& eigen() const noexcept { return eig_; }

  // ||(I - A A^+) v|| / ||v||, zero for v = 0.
  double range_residual(std::span<const double> v) const;
  bool in_range(std::span<const double> v) const;
  // v^T A^+ v; throws SingularDirection if v leaves range(A).
  double leverage(std::span<const double> v) const;
  // u^T A^+ v, no range check.
  double bilinear(std::span<const double> u, std::span<const double> v) const;
  SymMatrix matrix() const;

 private:
  EigenDecomp eig_;
  std::size_t first_kept_ = 0;  // eigenvalues [first_kept_, d) are inverted
  std::size_t rank_ = 0;
  double residual_tolerance_;
};

// v^T A^{-1} v with pseudo-inverse semantics for singular A.
double leverage_score(const SymMatrix& a, std::span<const double> v,
                      const NumericPolicy& policy = kDefaultPolicy);

// Factor f with det(A - v_out v_out^T + v_in v_in^T) = det(A) * f, from the
// matrix determinant lemma. Throws SingularMatrix unless A is positive
// definite.
double swap_gain(const SymMatrix& a, std::span<const double> v_out,
                 std::span<const double> v_in,
                 const NumericPolicy& policy = kDefaultPolicy);

struct SoftMinResult {
  double value;
  SymMatrix gradient;
};

// Smooth lower bound on lambda_min:  -(1/beta) log tr exp(-beta A), with
// gradient exp(-beta A) / tr exp(-beta A). Satisfies
// lambda_min - log(d)/beta <= value <= lambda_min.
SoftMinResult softmin_eig(const SymMatrix& a, double beta,
                          const NumericPolicy& policy = kDefaultPolicy);
double softmin_value(const SymMatrix& a, double beta,
                     const NumericPolicy& policy = kDefaultPolicy);

struct BarrierMinResult {
  double value;
  SymMatrix gradient;
  double slack;  // lambda_min(A) - t*, in [mu, d mu]
};

// Log-barrier smoothing of lambda_min:
//   max_t  t + mu * sum_i log((lambda_i - t) / (d mu)) + d mu.
// The maximiser t* solves mu tr (A - t I)^{-1} = 1, so the gradient
// mu (A - t* I)^{-1} is PSD with unit trace and concentrates on the bottom
// eigenspace as mu -> 0. value >= lambda_min, with equality at multiples
// of I. Defined for every symmetric A.
BarrierMinResult barrier_min_eig(const SymMatrix& a, double mu,
                                 const NumericPolicy& policy = kDefaultPolicy);
// Slack s with sum_i mu / (shift_i + s) = 1 for nonnegative shifts
// lambda_i - lambda_min.
double barrier_slack(std::span<const double> shifts, double mu);

SymMatrix matrix_exp(const SymMatrix& a, const NumericPolicy& policy = kDefaultPolicy);
// Throws NotPositiveDefinite unless every eigenvalue is positive.
SymMatrix matrix_log(const SymMatrix& a, const NumericPolicy& policy = kDefaultPolicy);
SymMatrix matrix_inverse(const SymMatrix& a, const NumericPolicy& policy = kDefaultPolicy);
SymMatrix matrix_inverse_sqrt(const SymMatrix& a,
                              const NumericPolicy& policy = kDefaultPolicy);

// Collection of n vectors in R^d, indexed by ground-set element.
class Vectorset {
 public:
  Vectorset() = default;
  // Throws InvalidArgument if empty, ragged, zero-dimensional or non-finite.
  explicit Vectorset(std::vector<Vector> vectors);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  std::span<const double> operator[](std::size_t i) const { return vectors_[i]; }
  const std::vector<Vector>& vectors() const noexcept { return vectors_; }

  // sum_{i in subset} v_i v_i^T
  SymMatrix gram(std::span<const std::size_t> subset) const;
  // sum_i weights[i] v_i v_i^T over all elements
  SymMatrix weighted_gram(std::span<const double> weights) const;

  friend bool operator==(const Vectorset&, const Vectorset&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Vector> vectors_;
};

}  // namespace mineig

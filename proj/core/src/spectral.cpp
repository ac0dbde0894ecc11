#include "mineig/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mineig/error.hpp"

namespace mineig {

double dot(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

// SymMatrix ------------------------------------------------------------------

SymMatrix::SymMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim, 0.0) {
  if (dim == 0) throw Error(ErrorCode::kInvalidMatrix, "dimension must be positive");
}

SymMatrix SymMatrix::identity(std::size_t dim) {
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.entries_[i * dim + i] = 1.0;
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.entries_[i * diag.size() + i] = diag[i];
  return m;
}

SymMatrix SymMatrix::diagonal(std::initializer_list<double> diag) {
  return diagonal(std::span<const double>(diag.begin(), diag.size()));
}

SymMatrix SymMatrix::outer(std::span<const double> v, double weight) {
  SymMatrix m(v.size());
  m.add_outer(v, weight);
  return m;
}

SymMatrix SymMatrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<double> flat;
  for (const auto& row : rows) {
    if (row.size() != rows.size()) throw Error(ErrorCode::kInvalidMatrix, "matrix is not square");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return from_dense(rows.size(), flat);
}

SymMatrix SymMatrix::from_dense(std::size_t dim, std::span<const double> row_major) {
  if (row_major.size() != dim * dim) throw Error(ErrorCode::kInvalidMatrix, "buffer size mismatch");
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      if (row_major[i * dim + j] != row_major[j * dim + i]) {
        throw Error(ErrorCode::kInvalidMatrix, "matrix is not symmetric");
      }
    }
  }
  std::copy(row_major.begin(), row_major.end(), m.entries_.begin());
  return m;
}

void SymMatrix::add_outer(std::span<const double> v, double weight) {
  for (std::size_t i = 0; i < dim_; ++i) {
    const double wi = weight * v[i];
    for (std::size_t j = i; j < dim_; ++j) {
      const double value = entries_[i * dim_ + j] + wi * v[j];
      entries_[i * dim_ + j] = value;
      entries_[j * dim_ + i] = value;
    }
  }
}

void SymMatrix::add_scaled(const SymMatrix& other, double weight) {
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += weight * other.entries_[k];
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  add_scaled(other, 1.0);
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
  add_scaled(other, -1.0);
  return *this;
}

SymMatrix& SymMatrix::operator*=(double scale) {
  for (double& e : entries_) e *= scale;
  return *this;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += entries_[i * dim_ + i];
  return t;
}

double SymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double e : entries_) s += e * e;
  return std::sqrt(s);
}

bool SymMatrix::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](double e) { return std::isfinite(e); });
}

Vector SymMatrix::apply(std::span<const double> v) const {
  Vector out(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    out[i] = dot(std::span<const double>(entries_.data() + i * dim_, dim_), v);
  }
  return out;
}

double SymMatrix::bilinear(std::span<const double> u, std::span<const double> v) const {
  return dot(u, apply(v));
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

SymMatrix congruence(const SymMatrix& b, const SymMatrix& a) {
  const std::size_t d = a.dim();
  std::vector<double> ba(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      const double bik = b(i, k);
      for (std::size_t j = 0; j < d; ++j) ba[i * d + j] += bik * a(k, j);
    }
  SymMatrix out(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += ba[i * d + k] * b(k, j);
      out.set(i, j, s);
    }
  return out;
}

double frobenius_inner(const SymMatrix& a, const SymMatrix& b) {
  return dot(a.data(), b.data());
}

// Eigendecomposition -------------------------------------------------------

SymMatrix EigenDecomp::reconstruct() const {
  return map([](double lambda) { return lambda; });
}

EigenDecomp eigen_decompose(const SymMatrix& a, const NumericPolicy& policy) {
  if (!a.all_finite()) throw Error(ErrorCode::kInvalidMatrix, "non-finite entry");
  const std::size_t d = a.dim();
  std::vector<double> m(a.data().begin(), a.data().end());
  std::vector<double> v(d * d, 0.0);  // row-major accumulation of rotations
  for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;

  const double scale = a.frobenius_norm();
  const double target = policy.jacobi_relative_tolerance * scale;
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) s += m[p * d + q] * m[p * d + q];
    return std::sqrt(2.0 * s);
  };

  for (int sweep = 0; sweep < policy.jacobi_max_sweeps; ++sweep) {
    if (off_norm() <= target) break;
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = m[p * d + q];
        if (apq == 0.0) continue;
        const double theta = (m[q * d + q] - m[p * d + p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          if (k == p || k == q) continue;
          const double akp = m[k * d + p];
          const double akq = m[k * d + q];
          const double new_p = c * akp - s * akq;
          const double new_q = s * akp + c * akq;
          m[k * d + p] = m[p * d + k] = new_p;
          m[k * d + q] = m[q * d + k] = new_q;
        }
        m[p * d + p] -= t * apq;
        m[q * d + q] += t * apq;
        m[p * d + q] = m[q * d + p] = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double vkp = v[k * d + p];
          const double vkq = v[k * d + q];
          v[k * d + p] = c * vkp - s * vkq;
          v[k * d + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return m[i * d + i] < m[j * d + j];
  });
  EigenDecomp out;
  out.values.resize(d);
  out.q.resize(d * d);
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t src = order[k];
    out.values[k] = m[src * d + src];
    for (std::size_t i = 0; i < d; ++i) out.q[k * d + i] = v[i * d + src];
  }
  return out;
}

double lambda_min(const SymMatrix& a, const NumericPolicy& policy) {
  return eigen_decompose(a, policy).min();
}

double determinant(const SymMatrix& a, const NumericPolicy& policy) {
  const EigenDecomp eig = eigen_decompose(a, policy);
  double det = 1.0;
  for (double lambda : eig.values) det *= lambda;
  return det;
}

// Pseudo-inverse -----------------------------------------------------------

PseudoInverse::PseudoInverse(const SymMatrix& a, const NumericPolicy& policy)
    : eig_(eigen_decompose(a, policy)),
      residual_tolerance_(policy.range_residual_tolerance) {
  const double cutoff = policy.pinv_relative_cutoff * std::max(eig_.max(), 0.0);
  first_kept_ = eig_.dim();
  for (std::size_t k = 0; k < eig_.dim(); ++k) {
    if (eig_.values[k] > cutoff && eig_.values[k] > 0.0) {
      first_kept_ = k;
      break;
    }
  }
  rank_ = eig_.dim() - first_kept_;
}

double PseudoInverse::range_residual(std::span<const double> v) const {
  const double vn = norm(v);
  if (vn == 0.0) return 0.0;
  double outside = 0.0;
  for (std::size_t k = 0; k < first_kept_; ++k) {
    const double c = dot(eig_.vector(k), v);
    outside += c * c;
  }
  return std::sqrt(outside) / vn;
}

bool PseudoInverse::in_range(std::span<const double> v) const {
  return range_residual(v) <= residual_tolerance_;
}

double PseudoInverse::leverage(std::span<const double> v) const {
  if (!in_range(v)) {
    throw Error(ErrorCode::kSingularDirection, "vector has a component outside range(A)");
  }
  return bilinear(v, v);
}

double PseudoInverse::bilinear(std::span<const double> u, std::span<const double> v) const {
  double s = 0.0;
  for (std::size_t k = first_kept_; k < eig_.dim(); ++k) {
    s += dot(eig_.vector(k), u) * dot(eig_.vector(k), v) / eig_.values[k];
  }
  return s;
}

SymMatrix PseudoInverse::matrix() const {
  SymMatrix out(eig_.dim());
  for (std::size_t k = first_kept_; k < eig_.dim(); ++k) {
    out.add_outer(eig_.vector(k), 1.0 / eig_.values[k]);
  }
  return out;
}

double leverage_score(const SymMatrix& a, std::span<const double> v,
                      const NumericPolicy& policy) {
  return PseudoInverse(a, policy).leverage(v);
}

double swap_gain(const SymMatrix& a, std::span<const double> v_out,
                 std::span<const double> v_in, const NumericPolicy& policy) {
  const PseudoInverse inv(a, policy);
  if (!inv.invertible()) throw Error(ErrorCode::kSingularMatrix, "swap_gain needs a positive definite matrix");
  const double out_lev = inv.bilinear(v_out, v_out);
  const double in_lev = inv.bilinear(v_in, v_in);
  const double cross = inv.bilinear(v_out, v_in);
  return (1.0 - out_lev) * (1.0 + in_lev) + cross * cross;
}

// Soft minimum -------------------------------------------------------------

SoftMinResult softmin_eig(const SymMatrix& a, double beta, const NumericPolicy& policy) {
  if (!(beta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "beta must be positive");
  const EigenDecomp eig = eigen_decompose(a, policy);
  const double shift = eig.min();
  Vector weights(eig.dim());
  double z = 0.0;
  for (std::size_t k = 0; k < eig.dim(); ++k) {
    weights[k] = std::exp(-beta * (eig.values[k] - shift));
    z += weights[k];
  }
  SymMatrix gradient(eig.dim());
  for (std::size_t k = 0; k < eig.dim(); ++k) gradient.add_outer(eig.vector(k), weights[k] / z);
  return {shift - std::log(z) / beta, std::move(gradient)};
}

double softmin_value(const SymMatrix& a, double beta, const NumericPolicy& policy) {
  const EigenDecomp eig = eigen_decompose(a, policy);
  const double shift = eig.min();
  double z = 0.0;
  for (double lambda : eig.values) z += std::exp(-beta * (lambda - shift));
  return shift - std::log(z) / beta;
}

double barrier_slack(std::span<const double> shifts, double mu) {
  // phi(s) = sum mu/(shift+s) - 1 is convex and decreasing, and phi(mu) >= 0,
  // so Newton from the left increases monotonically to the root.
  double s = mu;
  for (int it = 0; it < 200; ++it) {
    double phi = -1.0;
    double dphi = 0.0;
    for (double sh : shifts) {
      const double r = mu / (sh + s);
      phi += r;
      dphi -= r / (sh + s);
    }
    const double next = s - phi / dphi;
    if (!(next > s) || next - s <= 1e-16 * s) return std::max(next, s);
    s = next;
  }
  return s;
}

BarrierMinResult barrier_min_eig(const SymMatrix& a, double mu, const NumericPolicy& policy) {
  if (!(mu > 0.0)) throw Error(ErrorCode::kInvalidArgument, "mu must be positive");
  const EigenDecomp eig = eigen_decompose(a, policy);
  const std::size_t d = eig.dim();
  const double lo = eig.min();
  Vector shifts(d);
  for (std::size_t k = 0; k < d; ++k) shifts[k] = eig.values[k] - lo;
  const double s = barrier_slack(shifts, mu);
  const double dmu = static_cast<double>(d) * mu;
  double value = lo - s + dmu;
  SymMatrix gradient(d);
  for (std::size_t k = 0; k < d; ++k) {
    value += mu * std::log((shifts[k] + s) / dmu);
    gradient.add_outer(eig.vector(k), mu / (shifts[k] + s));
  }
  return {value, std::move(gradient), s};
}

// Matrix functions -----------------------------------------------------------

SymMatrix matrix_exp(const SymMatrix& a, const NumericPolicy& policy) {
  return eigen_decompose(a, policy).map([](double x) { return std::exp(x); });
}

SymMatrix matrix_log(const SymMatrix& a, const NumericPolicy& policy) {
  const EigenDecomp eig = eigen_decompose(a, policy);
  if (!(eig.min() > 0.0)) throw Error(ErrorCode::kNotPositiveDefinite, "matrix_log of a non-PD matrix");
  return eig.map([](double x) { return std::log(x); });
}

SymMatrix matrix_inverse(const SymMatrix& a, const NumericPolicy& policy) {
  const PseudoInverse inv(a, policy);
  if (!inv.invertible()) throw Error(ErrorCode::kSingularMatrix, "matrix is singular");
  return inv.matrix();
}

SymMatrix matrix_inverse_sqrt(const SymMatrix& a, const NumericPolicy& policy) {
  const PseudoInverse inv(a, policy);
  if (!inv.invertible()) throw Error(ErrorCode::kSingularMatrix, "matrix is singular");
  return inv.eigen().map([](double x) { return 1.0 / std::sqrt(x); });
}

// Vectorset ----------------------------------------------------------------

Vectorset::Vectorset(std::vector<Vector> vectors) : vectors_(std::move(vectors)) {
  if (vectors_.empty()) throw Error(ErrorCode::kInvalidArgument, "vector set is empty");
  dim_ = vectors_.front().size();
  if (dim_ == 0) throw Error(ErrorCode::kInvalidArgument, "vectors must have positive dimension");
  for (const Vector& v : vectors_) {
    if (v.size() != dim_) throw Error(ErrorCode::kInvalidArgument, "vectors have mixed dimensions");
    for (double e : v)
      if (!std::isfinite(e)) throw Error(ErrorCode::kInvalidArgument, "non-finite vector entry");
  }
}

SymMatrix Vectorset::gram(std::span<const std::size_t> subset) const {
  SymMatrix out(dim_);
  for (std::size_t i : subset) out.add_outer(vectors_[i]);
  return out;
}

SymMatrix Vectorset::weighted_gram(std::span<const double> weights) const {
  SymMatrix out(dim_);
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    if (weights[i] != 0.0) out.add_outer(vectors_[i], weights[i]);
  }
  return out;
}

}  // namespace mineig

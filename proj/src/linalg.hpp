// SPDX-License-Identifier: Apache-2.0
//
// Dense symmetric linear algebra used throughout the toolkit:
// Householder tridiagonalization + implicit-shift QL eigensolver,
// Cholesky factorization / SPD solves, and the PSD square root.
// Matrix orders stay small (a few hundred), so everything is plain
// O(d^3) dense code with no external dependencies.
#pragma once

#include <vector>

#include "errors.hpp"

namespace copplace::linalg {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
/// y += alpha * x
void axpy(double alpha, const Vec& x, Vec& y);

/// Dense row-major matrix.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* row(int r) { return data_.data() + static_cast<std::size_t>(r) * cols_; }
  const double* row(int r) const { return data_.data() + static_cast<std::size_t>(r) * cols_; }

  Mat& operator+=(const Mat& other);
  Mat& operator-=(const Mat& other);
  Mat& operator*=(double s);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

Mat matmul(const Mat& a, const Mat& b);
/// a^T * b without forming the transpose.
Mat matmul_tn(const Mat& a, const Mat& b);
Vec matvec(const Mat& a, const Vec& x);
/// a^T * x
Vec matvec_t(const Mat& a, const Vec& x);
Mat transpose(const Mat& a);
double frobenius_norm(const Mat& a);
double max_abs(const Mat& a);
/// v v^T
Mat outer(const Vec& v);

/// Symmetric matrix in packed lower-triangle storage. Construction from a
/// dense matrix rejects inputs whose asymmetry exceeds 1e-12 relative to
/// the largest entry; the stored value is the symmetrized average.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int order)
      : order_(order), data_(static_cast<std::size_t>(order) * (order + 1) / 2, 0.0) {}

  static SymMatrix identity(int order);
  static SymMatrix from_dense(const Mat& a);

  int order() const { return order_; }

  double& at(int r, int c) { return data_[index(r, c)]; }
  double at(int r, int c) const { return data_[index(r, c)]; }

  Mat to_dense() const;
  Vec apply(const Vec& x) const;

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator*=(double s);

  const std::vector<double>& packed() const { return data_; }
  std::vector<double>& packed() { return data_; }

 private:
  std::size_t index(int r, int c) const {
    if (r < c) std::swap(r, c);
    return static_cast<std::size_t>(r) * (r + 1) / 2 + c;
  }
  int order_ = 0;
  std::vector<double> data_;
};

struct EigResult {
  Vec values;   // ascending
  Mat vectors;  // column i pairs with values[i]; orthonormal
};

/// Full symmetric eigendecomposition (Householder tridiagonalization
/// followed by implicit-shift QL). Throws NumericError on non-finite
/// input or failure to converge.
EigResult eig_sym(const SymMatrix& a);
/// Eigenvalues only (ascending); skips accumulation of the transform.
Vec eig_sym_values(const SymMatrix& a);
double min_eigenvalue(const SymMatrix& a);
double max_eigenvalue(const SymMatrix& a);

/// Unified rank decision: eigenvalues below 1e-9 * lambda_max count as zero.
inline constexpr double kEigenClampRel = 1e-9;
double clamp_eigenvalue(double lambda, double lambda_max);

struct Cholesky {
  bool ok = false;
  Mat lower;          // L with A = L L^T, valid when ok
  double min_pivot = 0.0;
  double max_pivot = 0.0;
  /// Crude condition estimate (max_pivot/min_pivot)^2; diagnostics only.
  double cond_estimate() const;

  Vec solve(const Vec& b) const;
  void solve_in_place(Vec& b) const;
};

Cholesky cholesky(const SymMatrix& a);
Cholesky cholesky_dense(const Mat& a);
/// True iff a - shift*I admits a Cholesky factorization.
bool is_pd_shifted(const SymMatrix& a, double shift);

/// Solves A x = b for SPD A; throws NumericError when the factorization fails.
Vec solve_spd(const SymMatrix& a, const Vec& b);
/// Explicit inverse of an SPD matrix via its Cholesky factor.
Mat inverse_spd(const SymMatrix& a);
double trace_inverse_spd(const SymMatrix& a);

/// Symmetric PSD square root X with X*X = A. Negative eigenvalue dust down
/// to -1e-9*lambda_max is clamped to zero; anything below that throws.
SymMatrix sqrt_psd(const SymMatrix& a);

}  // namespace copplace::linalg

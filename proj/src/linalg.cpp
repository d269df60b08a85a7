// SPDX-License-Identifier: Apache-2.0
#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace copplace::linalg {

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Mat& Mat::operator+=(const Mat& other) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Mat& Mat::operator-=(const Mat& other) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Mat matmul(const Mat& a, const Mat& b) {
  Mat c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.row(k);
      double* crow = c.row(i);
      for (int j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Mat matmul_tn(const Mat& a, const Mat& b) {
  Mat c(a.cols(), b.cols());
  for (int k = 0; k < a.rows(); ++k) {
    const double* arow = a.row(k);
    const double* brow = b.row(k);
    for (int i = 0; i < a.cols(); ++i) {
      const double aki = arow[i];
      if (aki == 0.0) continue;
      double* crow = c.row(i);
      for (int j = 0; j < b.cols(); ++j) crow[j] += aki * brow[j];
    }
  }
  return c;
}

Vec matvec(const Mat& a, const Vec& x) {
  Vec y(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i);
    double s = 0.0;
    for (int j = 0; j < a.cols(); ++j) s += arow[j] * x[j];
    y[i] = s;
  }
  return y;
}

Vec matvec_t(const Mat& a, const Vec& x) {
  Vec y(a.cols(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* arow = a.row(i);
    for (int j = 0; j < a.cols(); ++j) y[j] += arow[j] * xi;
  }
  return y;
}

Mat transpose(const Mat& a) {
  Mat t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

double frobenius_norm(const Mat& a) {
  double s = 0.0;
  const double* p = a.data();
  const std::size_t n = static_cast<std::size_t>(a.rows()) * a.cols();
  for (std::size_t i = 0; i < n; ++i) s += p[i] * p[i];
  return std::sqrt(s);
}

double max_abs(const Mat& a) {
  double s = 0.0;
  const double* p = a.data();
  const std::size_t n = static_cast<std::size_t>(a.rows()) * a.cols();
  for (std::size_t i = 0; i < n; ++i) s = std::max(s, std::fabs(p[i]));
  return s;
}

Mat outer(const Vec& v) {
  const int n = static_cast<int>(v.size());
  Mat m(n, n);
  for (int i = 0; i < n; ++i) {
    if (v[i] == 0.0) continue;
    for (int j = 0; j < n; ++j) m(i, j) = v[i] * v[j];
  }
  return m;
}

SymMatrix SymMatrix::identity(int order) {
  SymMatrix s(order);
  for (int i = 0; i < order; ++i) s.at(i, i) = 1.0;
  return s;
}

SymMatrix SymMatrix::from_dense(const Mat& a) {
  if (a.rows() != a.cols()) throw ValidationError("symmetric matrix must be square");
  double scale = max_abs(a);
  double asym = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i + 1; j < a.cols(); ++j)
      asym = std::max(asym, std::fabs(a(i, j) - a(j, i)));
  if (asym > 1e-12 * std::max(scale, 1e-300))
    throw ValidationError("matrix is not symmetric within tolerance");
  SymMatrix s(a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j <= i; ++j) s.at(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

Mat SymMatrix::to_dense() const {
  Mat a(order_, order_);
  for (int i = 0; i < order_; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = at(i, j);
      a(i, j) = v;
      a(j, i) = v;
    }
  return a;
}

Vec SymMatrix::apply(const Vec& x) const {
  Vec y(order_, 0.0);
  for (int i = 0; i < order_; ++i) {
    double s = 0.0;
    for (int j = 0; j <= i; ++j) {
      const double v = data_[static_cast<std::size_t>(i) * (i + 1) / 2 + j];
      s += v * x[j];
      if (i != j) y[j] += v * x[i];
    }
    y[i] += s;
  }
  return y;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// Householder reduction to tridiagonal form. `v` holds the symmetric
// matrix row-major on entry; on exit it holds the accumulated orthogonal
// transform when accumulate=true. Diagonal ends up in d, subdiagonal in e.
void tred2(std::vector<double>& v, int n, std::vector<double>& d, std::vector<double>& e,
           bool accumulate) {
  auto V = [&](int r, int c) -> double& { return v[static_cast<std::size_t>(r) * n + c]; };

  for (int j = 0; j < n; ++j) d[j] = V(n - 1, j);

  for (int i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (int k = 0; k < i; ++k) scale += std::fabs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (int j = 0; j < i; ++j) {
        d[j] = V(i - 1, j);
        V(i, j) = 0.0;
        V(j, i) = 0.0;
      }
    } else {
      for (int k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (int j = 0; j < i; ++j) e[j] = 0.0;

      for (int j = 0; j < i; ++j) {
        f = d[j];
        V(j, i) = f;
        g = e[j] + V(j, j) * f;
        for (int k = j + 1; k <= i - 1; ++k) {
          g += V(k, j) * d[k];
          e[k] += V(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (int j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (int j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (int j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (int k = j; k <= i - 1; ++k) V(k, j) -= (f * e[k] + g * d[k]);
        d[j] = V(i - 1, j);
        V(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  if (accumulate) {
    for (int i = 0; i < n - 1; ++i) {
      V(n - 1, i) = V(i, i);
      V(i, i) = 1.0;
      const double h = d[i + 1];
      if (h != 0.0) {
        for (int k = 0; k <= i; ++k) d[k] = V(k, i + 1) / h;
        for (int j = 0; j <= i; ++j) {
          double g = 0.0;
          for (int k = 0; k <= i; ++k) g += V(k, i + 1) * V(k, j);
          for (int k = 0; k <= i; ++k) V(k, j) -= g * d[k];
        }
      }
      for (int k = 0; k <= i; ++k) V(k, i + 1) = 0.0;
    }
    for (int j = 0; j < n; ++j) {
      d[j] = V(n - 1, j);
      V(n - 1, j) = 0.0;
    }
    V(n - 1, n - 1) = 1.0;
  } else {
    for (int j = 0; j < n; ++j) d[j] = V(j, j);
  }
  e[0] = 0.0;
}

// Implicit-shift QL iteration on the tridiagonal (d, e); accumulates the
// rotations into v when accumulate=true.
void tql2(std::vector<double>& v, int n, std::vector<double>& d, std::vector<double>& e,
          bool accumulate) {
  auto V = [&](int r, int c) -> double& { return v[static_cast<std::size_t>(r) * n + c]; };

  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();

  for (int l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::fabs(d[l]) + std::fabs(e[l]));
    int m = l;
    while (m < n) {
      if (std::fabs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 60)
          throw NumericError("symmetric QL iteration failed to converge");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (int i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0;
        double c2 = c, c3 = c;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (int i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          if (accumulate) {
            for (int k = 0; k < n; ++k) {
              h = V(k, i + 1);
              V(k, i + 1) = s * V(k, i) + c * h;
              V(k, i) = c * V(k, i) - s * h;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::fabs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }

  // sort ascending, carrying eigenvectors along
  for (int i = 0; i < n - 1; ++i) {
    int k = i;
    double p = d[i];
    for (int j = i + 1; j < n; ++j) {
      if (d[j] < p) {
        k = j;
        p = d[j];
      }
    }
    if (k != i) {
      d[k] = d[i];
      d[i] = p;
      if (accumulate) {
        for (int j = 0; j < n; ++j) std::swap(V(j, i), V(j, k));
      }
    }
  }
}

void eig_impl(const SymMatrix& a, std::vector<double>& d, std::vector<double>& work,
              bool accumulate) {
  if (!all_finite(a.packed())) throw NumericError("eig_sym: non-finite input");
  const int n = a.order();
  d.assign(n, 0.0);
  std::vector<double> e(n, 0.0);
  work.assign(static_cast<std::size_t>(n) * n, 0.0);
  Mat dense = a.to_dense();
  std::copy(dense.data(), dense.data() + static_cast<std::size_t>(n) * n, work.begin());
  if (n == 0) return;
  if (n == 1) {
    d[0] = work[0];
    work[0] = 1.0;
    return;
  }
  tred2(work, n, d, e, accumulate);
  tql2(work, n, d, e, accumulate);
}

}  // namespace

EigResult eig_sym(const SymMatrix& a) {
  EigResult r;
  std::vector<double> work;
  eig_impl(a, r.values, work, true);
  const int n = a.order();
  r.vectors = Mat(n, n);
  std::copy(work.begin(), work.end(), r.vectors.data());
  return r;
}

Vec eig_sym_values(const SymMatrix& a) {
  Vec d;
  std::vector<double> work;
  eig_impl(a, d, work, false);
  return d;
}

double min_eigenvalue(const SymMatrix& a) {
  Vec d = eig_sym_values(a);
  return d.empty() ? 0.0 : d.front();
}

double max_eigenvalue(const SymMatrix& a) {
  Vec d = eig_sym_values(a);
  return d.empty() ? 0.0 : d.back();
}

double clamp_eigenvalue(double lambda, double lambda_max) {
  if (lambda < kEigenClampRel * std::max(lambda_max, 0.0)) return 0.0;
  return lambda;
}

double Cholesky::cond_estimate() const {
  if (!ok || min_pivot <= 0.0) return std::numeric_limits<double>::infinity();
  const double r = max_pivot / min_pivot;
  return r * r;
}

Vec Cholesky::solve(const Vec& b) const {
  Vec x = b;
  solve_in_place(x);
  return x;
}

void Cholesky::solve_in_place(Vec& b) const {
  const int n = lower.rows();
  // forward: L y = b
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    const double* lrow = lower.row(i);
    for (int j = 0; j < i; ++j) s -= lrow[j] * b[j];
    b[i] = s / lrow[i];
  }
  // backward: L^T x = y
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= lower(j, i) * b[j];
    b[i] = s / lower(i, i);
  }
}

Cholesky cholesky_dense(const Mat& a) {
  Cholesky res;
  const int n = a.rows();
  res.lower = Mat(n, n);
  res.min_pivot = std::numeric_limits<double>::infinity();
  res.max_pivot = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a(i, j);
      const double* li = res.lower.row(i);
      const double* lj = res.lower.row(j);
      for (int k = 0; k < j; ++k) s -= li[k] * lj[k];
      if (i == j) {
        if (!(s > 0.0) || !std::isfinite(s)) {
          res.ok = false;
          return res;
        }
        const double piv = std::sqrt(s);
        res.lower(i, i) = piv;
        res.min_pivot = std::min(res.min_pivot, piv);
        res.max_pivot = std::max(res.max_pivot, piv);
      } else {
        res.lower(i, j) = s / res.lower(j, j);
      }
    }
  }
  res.ok = true;
  return res;
}

Cholesky cholesky(const SymMatrix& a) { return cholesky_dense(a.to_dense()); }

bool is_pd_shifted(const SymMatrix& a, double shift) {
  Mat dense = a.to_dense();
  for (int i = 0; i < dense.rows(); ++i) dense(i, i) -= shift;
  return cholesky_dense(dense).ok;
}

Vec solve_spd(const SymMatrix& a, const Vec& b) {
  Cholesky f = cholesky(a);
  if (!f.ok) throw NumericError("SPD solve: factorization failed");
  return f.solve(b);
}

Mat inverse_spd(const SymMatrix& a) {
  Cholesky f = cholesky(a);
  if (!f.ok) throw NumericError("SPD inverse: factorization failed");
  const int n = a.order();
  Mat inv(n, n);
  Vec col(n, 0.0);
  for (int j = 0; j < n; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    col[j] = 1.0;
    f.solve_in_place(col);
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  // symmetrize away roundoff
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      const double v = 0.5 * (inv(i, j) + inv(j, i));
      inv(i, j) = v;
      inv(j, i) = v;
    }
  return inv;
}

double trace_inverse_spd(const SymMatrix& a) {
  Cholesky f = cholesky(a);
  if (!f.ok) throw NumericError("trace of inverse: factorization failed");
  const int n = a.order();
  // Tr(A^-1) = sum of squared entries of L^-1
  Mat linv(n, n);
  for (int j = 0; j < n; ++j) {
    linv(j, j) = 1.0 / f.lower(j, j);
    for (int i = j + 1; i < n; ++i) {
      double s = 0.0;
      for (int k = j; k < i; ++k) s -= f.lower(i, k) * linv(k, j);
      linv(i, j) = s / f.lower(i, i);
    }
  }
  double tr = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) tr += linv(i, j) * linv(i, j);
  return tr;
}

SymMatrix sqrt_psd(const SymMatrix& a) {
  EigResult eig = eig_sym(a);
  const int n = a.order();
  const double lmax = n > 0 ? std::max(eig.values.back(), 0.0) : 0.0;
  Vec root(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double lam = eig.values[i];
    if (lam < 0.0) {
      if (lam < -1e-9 * std::max(lmax, 1e-300))
        throw NumericError("sqrt_psd: matrix is significantly indefinite");
      lam = 0.0;
    }
    root[i] = std::sqrt(lam);
  }
  // Q sqrt(Lambda) Q^T
  Mat scaled = eig.vectors;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scaled(i, j) *= root[j];
  Mat full = matmul(scaled, transpose(eig.vectors));
  SymMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) out.at(i, j) = 0.5 * (full(i, j) + full(j, i));
  return out;
}

}  // namespace copplace::linalg

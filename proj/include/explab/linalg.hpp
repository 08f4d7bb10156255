#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "explab/errors.hpp"

namespace explab {

using Vector = std::vector<double>;

// Dense row-major matrix. Everything in this project is small (d <= a few
// hundred), so a flat std::vector is the whole story.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix scaled_identity(std::size_t n, double value) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = value;
    return m;
  }
};

inline bool all_finite(const Vector& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline bool all_finite(const Matrix& m) {
  for (double x : m.data)
    if (!std::isfinite(x)) return false;
  return true;
}

inline double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols != x.size()) throw DimensionError("matvec: shape mismatch");
  Vector y(a.rows, 0.0);
  const double* row = a.data.data();
  for (std::size_t i = 0; i < a.rows; ++i, row += a.cols) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw DimensionError("matmul: shape mismatch");
  Matrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

// Cholesky factorization A = L L^T of a symmetric positive definite matrix.
// Only the lower triangle of A is read. A non-positive pivot means the input
// was not SPD; in this codebase that always signals corrupted state upstream,
// so it throws rather than degrading.
class Cholesky {
 public:
  explicit Cholesky(const Matrix& a) : lower_(a.rows, a.cols) {
    if (a.rows != a.cols) throw DimensionError("cholesky: matrix not square");
    if (!all_finite(a)) throw InvalidInputError("cholesky: non-finite entries");
    const std::size_t n = a.rows;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double s = a(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= lower_(i, k) * lower_(j, k);
        if (i == j) {
          if (s <= 0.0) throw NotSpdError("cholesky: non-positive pivot at row " + std::to_string(i));
          lower_(i, i) = std::sqrt(s);
        } else {
          lower_(i, j) = s / lower_(j, j);
        }
      }
    }
  }

  // Solves A x = b via forward then back substitution.
  Vector solve(const Vector& b) const {
    const std::size_t n = lower_.rows;
    if (b.size() != n) throw DimensionError("cholesky solve: rhs size mismatch");
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[i];
      for (std::size_t k = 0; k < i; ++k) s -= lower_(i, k) * y[k];
      y[i] = s / lower_(i, i);
    }
    Vector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
      double s = y[ii];
      for (std::size_t k = ii + 1; k < n; ++k) s -= lower_(k, ii) * x[k];
      x[ii] = s / lower_(ii, ii);
    }
    return x;
  }

  // Solves L^T x = z (used for sampling from N(mu, A^{-1})).
  Vector solve_transposed(const Vector& z) const {
    const std::size_t n = lower_.rows;
    if (z.size() != n) throw DimensionError("cholesky solve_transposed: rhs size mismatch");
    Vector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
      double s = z[ii];
      for (std::size_t k = ii + 1; k < n; ++k) s -= lower_(k, ii) * x[k];
      x[ii] = s / lower_(ii, ii);
    }
    return x;
  }

  Matrix inverse() const {
    const std::size_t n = lower_.rows;
    Matrix inv(n, n);
    Vector e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      e[j] = 1.0;
      Vector col = solve(e);
      e[j] = 0.0;
      for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
  }

  const Matrix& lower() const { return lower_; }

 private:
  Matrix lower_;
};

inline Vector spd_solve(const Matrix& a, const Vector& b) {
  if (!all_finite(b)) throw InvalidInputError("spd_solve: non-finite rhs");
  return Cholesky(a).solve(b);
}

inline Matrix spd_inverse(const Matrix& a) { return Cholesky(a).inverse(); }

// Ridge regression: w = (Phi^T Phi + lambda I)^{-1} Phi^T targets.
// Zero rows are fine and return the zero vector of length Phi.cols.
inline Vector ridge_solve(const Matrix& phi, const Vector& targets, double lambda) {
  if (phi.rows != targets.size()) throw DimensionError("ridge_solve: row count mismatch");
  if (!(lambda > 0.0)) throw InvalidInputError("ridge_solve: lambda must be positive");
  if (!all_finite(phi) || !all_finite(targets)) throw InvalidInputError("ridge_solve: non-finite input");
  const std::size_t d = phi.cols;
  Matrix gram = Matrix::scaled_identity(d, lambda);
  Vector rhs(d, 0.0);
  for (std::size_t r = 0; r < phi.rows; ++r) {
    const double* row = phi.data.data() + r * d;
    for (std::size_t i = 0; i < d; ++i) {
      rhs[i] += row[i] * targets[r];
      for (std::size_t j = 0; j <= i; ++j) gram(i, j) += row[i] * row[j];
    }
  }
  // Mirror the accumulated lower triangle for readers; Cholesky only uses it.
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) gram(i, j) = gram(j, i);
  return Cholesky(gram).solve(rhs);
}

// Sherman-Morrison update of an inverse after a rank-one observation:
// (A + phi phi^T)^{-1} from A^{-1}. The denominator 1 + phi^T A^{-1} phi is
// positive whenever A^{-1} is SPD; anything else is a degenerate call.
inline Matrix rank1_inverse_update(const Matrix& ainv, const Vector& phi) {
  if (ainv.rows != ainv.cols || ainv.rows != phi.size())
    throw DimensionError("rank1_inverse_update: shape mismatch");
  if (!all_finite(ainv) || !all_finite(phi))
    throw InvalidInputError("rank1_inverse_update: non-finite input");
  const Vector u = matvec(ainv, phi);
  const double denom = 1.0 + dot(phi, u);
  if (!(denom > 0.0)) throw DegeneracyError("rank1_inverse_update: non-positive denominator");
  const std::size_t n = ainv.rows;
  Matrix out = ainv;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) -= u[i] * u[j] / denom;
  return out;
}

// phi^T A^{-1} phi, clamped at zero against rounding. Strictly positive for
// nonzero phi when A^{-1} is SPD.
inline double quad_form(const Matrix& ainv, const Vector& phi) {
  if (ainv.rows != ainv.cols || ainv.rows != phi.size()) throw DimensionError("quad_form: shape mismatch");
  if (!all_finite(ainv) || !all_finite(phi)) throw InvalidInputError("quad_form: non-finite input");
  const double q = dot(phi, matvec(ainv, phi));
  return q < 0.0 ? 0.0 : q;
}

}  // namespace explab

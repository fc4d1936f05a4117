#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "core/symmfunc.hpp"

namespace hesslab {

/// Dense symmetric matrix stored as its upper triangle, so (i,j) and (j,i)
/// are the same storage slot.
class SymMatrix {
public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : n_(n), packed_(n * (n + 1) / 2, 0.0) {}

  static SymMatrix identity(std::size_t n);
  static SymMatrix diagonal(std::span<const double> d);
  static SymMatrix diagonal(std::initializer_list<double> d) {
    return diagonal(std::span<const double>(d.begin(), d.size()));
  }
  /// Row-major n x n input. Rejects asymmetry beyond 1e-10 relative; otherwise
  /// stores the symmetric part.
  static SymMatrix from_dense(std::span<const double> rowmajor, std::size_t n);
  static SymMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t dim() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return packed_[slot(i, j)]; }
  void set(std::size_t i, std::size_t j, double v) { packed_[slot(i, j)] = v; }
  void add(std::size_t i, std::size_t j, double v) { packed_[slot(i, j)] += v; }

  std::vector<double> dense() const;
  double frobenius() const;

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator*=(double s);
  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) { return a + (-1.0) * b; }

  /// Q^T W Q for a row-major n x n matrix Q.
  SymMatrix congruence(std::span<const double> q) const;

private:
  std::size_t slot(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return i * n_ - i * (i + 1) / 2 + j;
  }

  std::size_t n_ = 0;
  std::vector<double> packed_;
};

/// Frobenius inner product <A, B> = sum_ij a_ij b_ij.
double frobenius_inner(const SymMatrix& a, const SymMatrix& b);

/// Eigenvalues in descending order; row p of `frame` is the unit eigenvector
/// for lambda[p], with its first non-negligible component positive.
struct EigenSystem {
  EigenvalueVector lambda;
  std::vector<double> frame;

  double vec(std::size_t p, std::size_t i) const { return frame[p * lambda.size() + i]; }
  SymMatrix reconstruct() const;
};

inline constexpr int kJacobiMaxSweeps = 50;

/// Cyclic Jacobi with fixed (p, q) sweep order. Works for n >= 1; writes
/// eigenvalues (descending) and eigenvectors as rows. Throws a numerical
/// error if the off-diagonal mass has not vanished after kJacobiMaxSweeps.
void jacobi_eigen(std::span<const double> rowmajor, std::size_t n, std::span<double> values,
                  std::span<double> vectors);

EigenSystem eigen_decompose(const SymMatrix& w);

/// sigma_k of the spectrum of W.
double F_value(const SymMatrix& w, int k);

/// dF/dw_ij = sum_p sigma_{k-1}(lambda|p) v_p v_p^T.
SymMatrix F_gradient_matrix(const SymMatrix& w, int k);
SymMatrix F_gradient_matrix(const EigenSystem& eig, int k);

/// Relative eigenvalue separation below which the divided difference
/// (f_p - f_q)/(lambda_p - lambda_q) is replaced by its analytic limit.
inline constexpr double kTieTolerance = 1e-9;

/// d^2/dt^2 F(W + tA) at t = 0 in the eigenframe of W:
///   sum_{p,q} f_pq a_pp a_qq + 2 sum_{p<q} (f_p - f_q)/(lambda_p - lambda_q) a_pq^2.
double F_second_quadratic_form(const SymMatrix& w, int k, const SymMatrix& a);

/// Sum of the absolute values of the terms of F_second_quadratic_form; the
/// natural scale against which its rounding error is measured.
double F_second_quadratic_form_scale(const SymMatrix& w, int k, const SymMatrix& a);

} // namespace hesslab

#include "core/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "core/error.hpp"

namespace hesslab {

SymMatrix SymMatrix::identity(std::size_t n) {
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m.set(i, i, d[i]);
  return m;
}

SymMatrix SymMatrix::from_dense(std::span<const double> a, std::size_t n) {
  require(a.size() == n * n, ErrorKind::argument, "SymMatrix::from_dense: size mismatch");
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double x = a[i * n + j], y = a[j * n + i];
      require(std::isfinite(x) && std::isfinite(y), ErrorKind::argument,
              "SymMatrix::from_dense: non-finite entry");
      require(std::abs(x - y) <= 1e-10 * (1.0 + std::abs(x) + std::abs(y)), ErrorKind::argument,
              "SymMatrix::from_dense: matrix is not symmetric");
      m.set(i, j, 0.5 * (x + y));
    }
  }
  return m;
}

SymMatrix SymMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  std::vector<double> a;
  a.reserve(n * n);
  for (const auto& r : rows) {
    require(r.size() == n, ErrorKind::argument, "SymMatrix::from_rows: matrix is not square");
    a.insert(a.end(), r.begin(), r.end());
  }
  return from_dense(a, n);
}

std::vector<double> SymMatrix::dense() const {
  std::vector<double> a(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) a[i * n_ + j] = (*this)(i, j);
  return a;
}

double SymMatrix::frobenius() const { return std::sqrt(frobenius_inner(*this, *this)); }

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  require(o.n_ == n_, ErrorKind::argument, "SymMatrix: dimension mismatch");
  for (std::size_t i = 0; i < packed_.size(); ++i) packed_[i] += o.packed_[i];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  for (double& x : packed_) x *= s;
  return *this;
}

SymMatrix SymMatrix::congruence(std::span<const double> q) const {
  require(q.size() == n_ * n_, ErrorKind::argument, "SymMatrix::congruence: size mismatch");
  const auto a = dense();
  std::vector<double> aq(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t l = 0; l < n_; ++l) aq[i * n_ + j] += a[i * n_ + l] * q[l * n_ + j];
  SymMatrix out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < n_; ++l) s += q[l * n_ + i] * aq[l * n_ + j];
      out.set(i, j, s);
    }
  return out;
}

double frobenius_inner(const SymMatrix& a, const SymMatrix& b) {
  require(a.dim() == b.dim(), ErrorKind::argument, "frobenius_inner: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    s += a(i, i) * b(i, i);
    for (std::size_t j = i + 1; j < a.dim(); ++j) s += 2.0 * a(i, j) * b(i, j);
  }
  return s;
}

SymMatrix EigenSystem::reconstruct() const {
  const std::size_t n = lambda.size();
  SymMatrix w(n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) w.add(i, j, lambda[p] * vec(p, i) * vec(p, j));
  return w;
}

void jacobi_eigen(std::span<const double> rowmajor, std::size_t n, std::span<double> values,
                  std::span<double> vectors) {
  require(n >= 1 && n <= kMaxDim, ErrorKind::argument, "jacobi_eigen: unsupported dimension");
  require(rowmajor.size() == n * n && values.size() == n && vectors.size() == n * n,
          ErrorKind::argument, "jacobi_eigen: buffer size mismatch");

  std::array<double, kMaxDim * kMaxDim> a;
  std::array<double, kMaxDim * kMaxDim> v{};
  std::copy(rowmajor.begin(), rowmajor.end(), a.begin());
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  auto V = [&](std::size_t i, std::size_t j) -> double& { return v[i * n + j]; };

  for (int sweep = 0;; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::abs(A(p, q));
    if (off == 0.0) break;
    if (sweep == kJacobiMaxSweeps)
      fail(ErrorKind::numerical, "jacobi_eigen: no convergence after " +
                                     std::to_string(kJacobiMaxSweeps) + " sweeps");

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        const double g = 100.0 * std::abs(apq);
        // Once the sweep is past the initial phase, drop entries below the
        // rounding level of both diagonal entries.
        if (sweep > 3 && std::abs(A(p, p)) + g == std::abs(A(p, p)) &&
            std::abs(A(q, q)) + g == std::abs(A(q, q))) {
          A(p, q) = A(q, p) = 0.0;
          continue;
        }
        if (apq == 0.0) continue;

        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = A(r, p), arq = A(r, q);
          A(r, p) = A(p, r) = c * arp - s * arq;
          A(r, q) = A(q, r) = s * arp + c * arq;
        }
        A(p, p) -= t * apq;
        A(q, q) += t * apq;
        A(p, q) = A(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = V(r, p), vrq = V(r, q);
          V(r, p) = c * vrp - s * vrq;
          V(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::array<std::size_t, kMaxDim> order;
  std::iota(order.begin(), order.begin() + n, std::size_t{0});
  std::stable_sort(order.begin(), order.begin() + n,
                   [&](std::size_t x, std::size_t y) { return A(x, x) > A(y, y); });
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t col = order[p];
    values[p] = A(col, col);
    double sign = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(V(i, col)) > 1e-12) {
        sign = V(i, col) > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) vectors[p * n + i] = sign * V(i, col);
  }
}

EigenSystem eigen_decompose(const SymMatrix& w) {
  const std::size_t n = w.dim();
  require(n >= 2, ErrorKind::argument, "eigen_decompose: need n >= 2");
  const auto a = w.dense();
  std::vector<double> values(n), frame(n * n);
  jacobi_eigen(a, n, values, frame);
  return EigenSystem{EigenvalueVector(std::move(values)), std::move(frame)};
}

double F_value(const SymMatrix& w, int k) {
  require(k >= 1 && static_cast<std::size_t>(k) <= w.dim(), ErrorKind::argument,
          "F_value: need 1 <= k <= n");
  return sigma(eigen_decompose(w).lambda, k);
}

SymMatrix F_gradient_matrix(const EigenSystem& eig, int k) {
  const std::size_t n = eig.lambda.size();
  const auto f = sigma_gradient(eig.lambda, k);
  SymMatrix g(n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) g.add(i, j, f[p] * eig.vec(p, i) * eig.vec(p, j));
  return g;
}

SymMatrix F_gradient_matrix(const SymMatrix& w, int k) {
  require(k >= 1 && static_cast<std::size_t>(k) <= w.dim(), ErrorKind::argument,
          "F_gradient_matrix: need 1 <= k <= n");
  return F_gradient_matrix(eigen_decompose(w), k);
}

namespace {

struct SecondFormTerms {
  double value = 0.0;
  double scale = 0.0;
};

SecondFormTerms second_form_terms(const SymMatrix& w, int k, const SymMatrix& a) {
  const std::size_t n = w.dim();
  require(k >= 1 && static_cast<std::size_t>(k) <= n, ErrorKind::argument,
          "F_second_quadratic_form: need 1 <= k <= n");
  require(a.dim() == n, ErrorKind::argument, "F_second_quadratic_form: dimension mismatch");
  if (k < 2) return {}; // sigma_1 is linear in W

  const auto eig = eigen_decompose(w);
  // rows of the frame are eigenvectors, so frame * A * frame^T is A in the eigenframe.
  std::vector<double> frame_t(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) frame_t[i * n + j] = eig.frame[j * n + i];
  const SymMatrix at = a.congruence(frame_t);

  const auto& lam = eig.lambda;
  const auto f1 = sigma_gradient(lam, k);
  const auto f2 = sigma_hessian(lam, k);

  SecondFormTerms out;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      const double term = f2[p * n + q] * at(p, p) * at(q, q);
      out.value += term;
      out.scale += std::abs(term);
    }
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q) {
      const double gap = lam[p] - lam[q];
      double quotient;
      if (std::abs(gap) < kTieTolerance * std::max(1.0, std::abs(lam[p]))) {
        // sigma_{k-1}(l|p) - sigma_{k-1}(l|q) = (l_q - l_p) sigma_{k-2}(l|pq)
        quotient = -f2[p * n + q];
      } else {
        quotient = (f1[p] - f1[q]) / gap;
      }
      const double term = 2.0 * quotient * at(p, q) * at(p, q);
      out.value += term;
      out.scale += std::abs(term);
    }
  return out;
}

} // namespace

double F_second_quadratic_form(const SymMatrix& w, int k, const SymMatrix& a) {
  return second_form_terms(w, k, a).value;
}

double F_second_quadratic_form_scale(const SymMatrix& w, int k, const SymMatrix& a) {
  return second_form_terms(w, k, a).scale;
}

} // namespace hesslab

#include "afem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "afem/errors.hpp"

namespace afem {

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  const auto b = col.begin() + row_ptr[i];
  const auto e = col.begin() + row_ptr[i + 1];
  const auto it = std::lower_bound(b, e, static_cast<std::int32_t>(j));
  if (it == e || *it != static_cast<std::int32_t>(j)) return 0.0;
  return val[static_cast<std::size_t>(it - col.begin())];
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  kernels::spmv(view(), x, y);
}

double CsrMatrix::asymmetry() const {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (auto k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      const auto j = static_cast<std::size_t>(col[static_cast<std::size_t>(k)]);
      m = std::max(m, std::abs(val[static_cast<std::size_t>(k)] - at(j, i)));
    }
  }
  return m;
}

CsrMatrix from_triplets(std::size_t n, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row < 0 || t.col < 0 || static_cast<std::size_t>(t.row) >= n || static_cast<std::size_t>(t.col) >= n) {
      throw InputError("matrix entry (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                       ") out of range");
    }
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m;
  m.n = n;
  m.row_ptr.assign(n + 1, 0);
  m.col.reserve(triplets.size());
  m.val.reserve(triplets.size());
  std::int32_t last_row = -1;
  std::int32_t last_col = -1;
  for (const auto& t : triplets) {
    if (t.row == last_row && t.col == last_col) {
      m.val.back() += t.val;
      continue;
    }
    m.col.push_back(t.col);
    m.val.push_back(t.val);
    ++m.row_ptr[static_cast<std::size_t>(t.row) + 1];
    last_row = t.row;
    last_col = t.col;
  }
  for (std::size_t i = 0; i < n; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  return m;
}

CsrMatrix submatrix(const CsrMatrix& a, std::span<const int> keep) {
  std::vector<std::int32_t> map(a.n, -1);
  for (std::size_t k = 0; k < keep.size(); ++k) map[static_cast<std::size_t>(keep[k])] = static_cast<std::int32_t>(k);
  CsrMatrix s;
  s.n = keep.size();
  s.row_ptr.assign(s.n + 1, 0);
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto i = static_cast<std::size_t>(keep[k]);
    for (auto p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
      const auto j = map[static_cast<std::size_t>(a.col[static_cast<std::size_t>(p)])];
      if (j < 0) continue;
      s.col.push_back(j);
      s.val.push_back(a.val[static_cast<std::size_t>(p)]);
    }
    s.row_ptr[k + 1] = static_cast<std::int32_t>(s.col.size());
  }
  return s;
}

CgStats conjugate_gradient(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
                           const CgOptions& options) {
  const std::size_t n = a.n;
  CgStats stats;
  stats.min_curvature = std::numeric_limits<double>::infinity();
  if (n == 0) return stats;
  const auto& k = kernels::active();
  const double bnorm = std::sqrt(k.dot(b.data(), b.data(), n));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return stats;
  }
  std::vector<double> inv_diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a.at(i, i);
    if (!(d > 0.0)) throw SolverError("non-positive diagonal entry in row " + std::to_string(i), 1.0);
    inv_diag[i] = 1.0 / d;
  }
  std::vector<double> r(n), z(n), p(n), q(n);
  k.spmv(a.row_ptr.data(), a.col.data(), a.val.data(), x.data(), q.data(), n);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  double rnorm = std::sqrt(k.dot(r.data(), r.data(), n));
  const double target = options.rel_tol * bnorm;
  const std::size_t max_it = options.max_iterations ? options.max_iterations : 20 * n;
  k.hadamard(inv_diag.data(), r.data(), z.data(), n);
  p = z;
  double rz = k.dot(r.data(), z.data(), n);
  std::size_t it = 0;
  while (rnorm > target) {
    if (it >= max_it) {
      throw SolverError("conjugate gradients did not converge in " + std::to_string(max_it) + " iterations",
                        rnorm / bnorm);
    }
    k.spmv(a.row_ptr.data(), a.col.data(), a.val.data(), p.data(), q.data(), n);
    const double pq = k.dot(p.data(), q.data(), n);
    const double pp = k.dot(p.data(), p.data(), n);
    if (!(pq > 0.0)) throw SolverError("conjugate gradient breakdown (matrix not positive definite)", rnorm / bnorm);
    stats.min_curvature = std::min(stats.min_curvature, pq / pp);
    const double alpha = rz / pq;
    k.axpy(alpha, p.data(), x.data(), n);
    k.axpy(-alpha, q.data(), r.data(), n);
    rnorm = std::sqrt(k.dot(r.data(), r.data(), n));
    k.hadamard(inv_diag.data(), r.data(), z.data(), n);
    const double rz_new = k.dot(r.data(), z.data(), n);
    k.xpay(z.data(), rz_new / rz, p.data(), n);
    rz = rz_new;
    ++it;
  }
  stats.iterations = it;
  // report the true residual, not the recursively updated one
  k.spmv(a.row_ptr.data(), a.col.data(), a.val.data(), x.data(), q.data(), n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += (b[i] - q[i]) * (b[i] - q[i]);
  stats.residual = std::sqrt(s) / bnorm;
  return stats;
}

}  // namespace afem

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "afem/kernels.hpp"

namespace afem {

/// Square matrix in compressed sparse row form with sorted, unique columns.
struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::int32_t> row_ptr{0};
  std::vector<std::int32_t> col;
  std::vector<double> val;

  kernels::CsrView view() const { return {row_ptr, col, val}; }
  /// Entry (i, j), zero when not stored.
  double at(std::size_t i, std::size_t j) const;
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// max |a_ij - a_ji|
  double asymmetry() const;
};

struct Triplet {
  std::int32_t row;
  std::int32_t col;
  double val;
};

/// Sums duplicates. Triplets are consumed in order, so the result is
/// deterministic for a fixed input sequence.
CsrMatrix from_triplets(std::size_t n, std::vector<Triplet> triplets);

/// Principal submatrix on the given (sorted) index set.
CsrMatrix submatrix(const CsrMatrix& a, std::span<const int> keep);

struct CgOptions {
  double rel_tol = 1e-12;
  /// 0 selects 20 * n.
  std::size_t max_iterations = 0;
};

struct CgStats {
  std::size_t iterations = 0;
  double residual = 0.0;  // ||b - A x|| / ||b||, 0 for b = 0
  double min_curvature = 0.0;  // min p^T A p / p^T p over the iteration
};

/// Jacobi-preconditioned conjugate gradients for a symmetric positive definite
/// matrix. `x` holds the initial guess on entry. Throws SolverError on
/// breakdown or when the iteration limit is reached.
CgStats conjugate_gradient(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
                           const CgOptions& options = {});

}  // namespace afem

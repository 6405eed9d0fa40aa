#pragma once

// Data-parallel inner loops used by the solver and the quadrature reductions.
//
// Every kernel has a portable scalar reference implementation. Vectorized
// variants (AVX2+FMA on x86-64, NEON on AArch64) are compiled into separate
// translation units and selected once at startup from the CPU features. The
// variants differ from the reference only in floating-point summation order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace afem::kernels {

/// Compressed sparse row view. `row_ptr` has n_rows + 1 entries.
struct CsrView {
  std::span<const std::int32_t> row_ptr;
  std::span<const std::int32_t> col;
  std::span<const double> val;
};

struct KernelTable {
  std::string_view name;
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y = x + a * y
  void (*xpay)(const double* x, double a, double* y, std::size_t n);
  // z = x .* y
  void (*hadamard)(const double* x, const double* y, double* z, std::size_t n);
  // y = A x
  void (*spmv)(const std::int32_t* row_ptr, const std::int32_t* col, const double* val,
               const double* x, double* y, std::size_t n_rows);
  // sum_i w_i * x_i
  double (*weighted_sum)(const double* w, const double* x, std::size_t n);
  // sum_i w_i * (x_i - c)^2
  double (*weighted_sq_dev)(const double* w, const double* x, double c, std::size_t n);
};

enum class Isa { scalar, avx2, neon };

const KernelTable& scalar_table();
/// Null when the variant was not compiled for this target.
const KernelTable* avx2_table();
const KernelTable* neon_table();

bool cpu_supports(Isa isa);

/// Table used by the library. Chosen on first use from the CPU features; the
/// environment variable AFEM2D_SIMD=scalar|avx2|neon|auto overrides it.
const KernelTable& active();

/// Force a particular variant (tests, reproducibility). Returns false and leaves
/// the selection unchanged when the variant is unavailable on this machine.
bool select(Isa isa);

// Convenience wrappers over active().
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void xpay(std::span<const double> x, double a, std::span<double> y);
void hadamard(std::span<const double> x, std::span<const double> y, std::span<double> z);
void spmv(const CsrView& a, std::span<const double> x, std::span<double> y);
double weighted_sum(std::span<const double> w, std::span<const double> x);
double weighted_sq_dev(std::span<const double> w, std::span<const double> x, double c);

}  // namespace afem::kernels

#include "afem/kernels.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string>

namespace afem::kernels {

#if !defined(AFEM_HAVE_AVX2)
const KernelTable* avx2_table() { return nullptr; }
#endif
#if !defined(AFEM_HAVE_NEON)
const KernelTable* neon_table() { return nullptr; }
#endif

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(AFEM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(AFEM_HAVE_NEON)
      return true;  // mandatory on AArch64
#else
      return false;
#endif
  }
  return false;
}

namespace {

const KernelTable* table_for(Isa isa) {
  if (!cpu_supports(isa)) return nullptr;
  switch (isa) {
    case Isa::scalar:
      return &scalar_table();
    case Isa::avx2:
      return avx2_table();
    case Isa::neon:
      return neon_table();
  }
  return nullptr;
}

const KernelTable* detect() {
  if (const char* env = std::getenv("AFEM2D_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return &scalar_table();
    if (v == "avx2") {
      if (auto* t = table_for(Isa::avx2)) return t;
    }
    if (v == "neon") {
      if (auto* t = table_for(Isa::neon)) return t;
    }
  }
  if (auto* t = table_for(Isa::avx2)) return t;
  if (auto* t = table_for(Isa::neon)) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> s{detect()};
  return s;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_relaxed); }

bool select(Isa isa) {
  const KernelTable* t = table_for(isa);
  if (t == nullptr) return false;
  slot().store(t, std::memory_order_relaxed);
  return true;
}

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return active().dot(x.data(), y.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(a, x.data(), y.data(), x.size());
}

void xpay(std::span<const double> x, double a, std::span<double> y) {
  assert(x.size() == y.size());
  active().xpay(x.data(), a, y.data(), x.size());
}

void hadamard(std::span<const double> x, std::span<const double> y, std::span<double> z) {
  assert(x.size() == y.size() && y.size() == z.size());
  active().hadamard(x.data(), y.data(), z.data(), x.size());
}

void spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
  assert(a.row_ptr.size() == y.size() + 1);
  active().spmv(a.row_ptr.data(), a.col.data(), a.val.data(), x.data(), y.data(), y.size());
}

double weighted_sum(std::span<const double> w, std::span<const double> x) {
  assert(w.size() == x.size());
  return active().weighted_sum(w.data(), x.data(), w.size());
}

double weighted_sq_dev(std::span<const double> w, std::span<const double> x, double c) {
  assert(w.size() == x.size());
  return active().weighted_sq_dev(w.data(), x.data(), c, w.size());
}

}  // namespace afem::kernels

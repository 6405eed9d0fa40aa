#include <arm_neon.h>

#include "afem/kernels.hpp"

namespace afem::kernels {
namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void xpay_neon(const double* x, double a, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(x + i), va, vld1q_f64(y + i)));
  for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

void hadamard_neon(const double* x, const double* y, double* z, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(z + i, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  for (; i < n; ++i) z[i] = x[i] * y[i];
}

void spmv_neon(const std::int32_t* row_ptr, const std::int32_t* col, const double* val, const double* x,
               double* y, std::size_t n_rows) {
  for (std::size_t r = 0; r < n_rows; ++r) {
    std::int32_t k = row_ptr[r];
    const std::int32_t end = row_ptr[r + 1];
    float64x2_t acc = vdupq_n_f64(0.0);
    for (; k + 2 <= end; k += 2) {
      const double xv[2] = {x[col[k]], x[col[k + 1]]};
      acc = vfmaq_f64(acc, vld1q_f64(val + k), vld1q_f64(xv));
    }
    double s = vaddvq_f64(acc);
    for (; k < end; ++k) s += val[k] * x[col[k]];
    y[r] = s;
  }
}

double weighted_sum_neon(const double* w, const double* x, std::size_t n) { return dot_neon(w, x, n); }

double weighted_sq_dev_neon(const double* w, const double* x, double c, std::size_t n) {
  const float64x2_t vc = vdupq_n_f64(c);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(x + i), vc);
    acc = vfmaq_f64(acc, vmulq_f64(vld1q_f64(w + i), d), d);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = x[i] - c;
    s += w[i] * d * d;
  }
  return s;
}

constexpr KernelTable kNeon{
    "neon", dot_neon, axpy_neon, xpay_neon, hadamard_neon, spmv_neon, weighted_sum_neon, weighted_sq_dev_neon,
};

}  // namespace

const KernelTable* neon_table() { return &kNeon; }

}  // namespace afem::kernels

#include "afem/kernels.hpp"

namespace afem::kernels {
namespace {

double dot_ref(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_ref(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpay_ref(const double* x, double a, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * y[i];
}

void hadamard_ref(const double* x, const double* y, double* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = x[i] * y[i];
}

void spmv_ref(const std::int32_t* row_ptr, const std::int32_t* col, const double* val,
              const double* x, double* y, std::size_t n_rows) {
  for (std::size_t r = 0; r < n_rows; ++r) {
    double s = 0.0;
    for (std::int32_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k] * x[col[k]];
    y[r] = s;
  }
}

double weighted_sum_ref(const double* w, const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * x[i];
  return s;
}

double weighted_sq_dev_ref(const double* w, const double* x, double c, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - c;
    s += w[i] * d * d;
  }
  return s;
}

constexpr KernelTable kScalar{
    "scalar", dot_ref, axpy_ref, xpay_ref, hadamard_ref, spmv_ref, weighted_sum_ref, weighted_sq_dev_ref,
};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace afem::kernels

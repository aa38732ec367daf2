#include <arm_neon.h>

#include <algorithm>

#include "heterolab/kernels.hpp"

namespace heterolab::kernels {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline void axpy_inline(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  axpy_inline(alpha, x, y, n);
}

void gemm_nn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n) {
  std::fill(c, c + m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) axpy_inline(a[i * k + p], b + p * n, c + i * n, n);
  }
}

void gemm_tn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n) {
  std::fill(c, c + k * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) axpy_inline(a[i * k + p], b + i * n, c + p * n, n);
  }
}

void gemm_nt(const double* a, const double* b, double* c, std::size_t m,
             std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) c[i * k + j] = dot(a + i * n, b + j * n, n);
  }
}

void spmm(const CsrView& s, const double* x, double* y, std::size_t width) {
  for (std::size_t r = 0; r < s.rows; ++r) {
    double* yr = y + r * width;
    std::fill(yr, yr + width, 0.0);
    for (auto e = s.offsets[r]; e < s.offsets[r + 1]; ++e) {
      axpy_inline(s.vals[e], x + std::size_t{s.cols[e]} * width, yr, width);
    }
  }
}

}  // namespace

const KernelTable* neon_table() {
  static constexpr KernelTable table{Isa::kNeon, dot,     axpy, gemm_nn,
                                     gemm_tn,    gemm_nt, spmm};
  return &table;
}

}  // namespace heterolab::kernels

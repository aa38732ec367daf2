#include <algorithm>

#include "heterolab/kernels.hpp"

namespace heterolab::kernels {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemm_nn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n) {
  std::fill(c, c + m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    for (std::size_t p = 0; p < k; ++p) axpy(a[i * k + p], b + p * n, ci, n);
  }
}

void gemm_tn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n) {
  std::fill(c, c + k * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double* bi = b + i * n;
    for (std::size_t p = 0; p < k; ++p) axpy(a[i * k + p], bi, c + p * n, n);
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
      axpy(s.vals[e], x + std::size_t{s.cols[e]} * width, yr, width);
    }
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static constexpr KernelTable table{Isa::kScalar, dot,     axpy, gemm_nn,
                                     gemm_tn,      gemm_nt, spmm};
  return table;
}

}  // namespace heterolab::kernels

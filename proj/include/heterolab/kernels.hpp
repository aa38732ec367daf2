#pragma once

// Dense and sparse inner loops used by metrics, nn and theory.
//
// Every kernel has a scalar reference implementation plus optional AVX2
// (x86-64) and NEON (aarch64) variants. The variant is picked once at
// startup from CPU capabilities and can be overridden with the
// HETEROLAB_ISA environment variable ("scalar", "avx2", "neon") or
// set_active_isa(). Variants agree to rounding, not bit-for-bit: the SIMD
// reductions use a different summation order and fused multiply-add.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace heterolab::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

// Read-only view of a CSR matrix with explicit values.
struct CsrView {
  std::size_t rows = 0;
  std::span<const std::uint64_t> offsets;  // rows + 1 entries
  std::span<const std::uint32_t> cols;
  std::span<const double> vals;
};

struct KernelTable {
  Isa isa;
  // sum_k a[k] * b[k]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[k] += alpha * x[k]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // C(m x n) = A(m x k) * B(k x n)
  void (*gemm_nn)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n);
  // C(k x n) = A(m x k)^T * B(m x n)
  void (*gemm_tn)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n);
  // C(m x k) = A(m x n) * B(k x n)^T
  void (*gemm_nt)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t n, std::size_t k);
  // Y(rows x width) = S * X(cols x width) for CSR S
  void (*spmm)(const CsrView& s, const double* x, double* y, std::size_t width);
};

const KernelTable& scalar_table();
// nullptr when the variant was not compiled in.
const KernelTable* avx2_table();
const KernelTable* neon_table();

bool isa_supported(Isa isa);

// The table every caller goes through.
const KernelTable& active();
Isa active_isa();
// Throws ValidationError when the variant is not compiled in or the CPU
// lacks the instructions.
void set_active_isa(Isa isa);

// RAII override, mainly for tests.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa) : previous_(active_isa()) { set_active_isa(isa); }
  ~ScopedIsa() { set_active_isa(previous_); }
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

}  // namespace heterolab::kernels

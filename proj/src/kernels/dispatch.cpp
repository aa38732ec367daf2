#include <atomic>
#include <cstdlib>
#include <string>

#include "heterolab/error.hpp"
#include "heterolab/kernels.hpp"

namespace heterolab::kernels {

#ifndef HETEROLAB_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif
#ifndef HETEROLAB_HAVE_NEON
const KernelTable* neon_table() { return nullptr; }
#endif

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(HETEROLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
      // Advanced SIMD is mandatory on aarch64.
      return neon_table() != nullptr;
  }
  return false;
}

namespace {

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return &scalar_table();
    case Isa::kAvx2: return avx2_table();
    case Isa::kNeon: return neon_table();
  }
  return nullptr;
}

const KernelTable* pick_default() {
  if (const char* env = std::getenv("HETEROLAB_ISA")) {
    const std::string want(env);
    for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
      if (want == isa_name(isa) && isa_supported(isa)) return table_for(isa);
    }
  }
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (isa_supported(isa)) return table_for(isa);
  }
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{pick_default()};
  return table;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

Isa active_isa() { return active().isa; }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw ValidationError("kernel variant '" + std::string(isa_name(isa)) +
                          "' is not available on this machine");
  }
  current().store(table_for(isa), std::memory_order_release);
}

}  // namespace heterolab::kernels

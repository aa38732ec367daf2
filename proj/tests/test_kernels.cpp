#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "heterolab/error.hpp"
#include "heterolab/kernels.hpp"
#include "heterolab/rng.hpp"

using namespace heterolab;
using namespace heterolab::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

void expect_close(const std::vector<double>& a, const std::vector<double>& b, double scale) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12 * scale) << i;
}

std::vector<const KernelTable*> variants() {
  std::vector<const KernelTable*> out;
  if (isa_supported(Isa::kAvx2)) out.push_back(avx2_table());
  if (isa_supported(Isa::kNeon)) out.push_back(neon_table());
  return out;
}

}  // namespace

TEST(Kernels, ScalarAlwaysAvailable) {
  EXPECT_TRUE(isa_supported(Isa::kScalar));
  ScopedIsa s(Isa::kScalar);
  EXPECT_EQ(active_isa(), Isa::kScalar);
}

TEST(Kernels, UnsupportedIsaThrows) {
  for (Isa isa : {Isa::kAvx2, Isa::kNeon})
    if (!isa_supported(isa)) EXPECT_THROW(set_active_isa(isa), ValidationError);
}

TEST(Kernels, ScalarGemmMatchesNaive) {
  Rng rng(RngSeed{1, 1});
  const std::size_t m = 5, k = 7, n = 3;
  auto a = random_vec(m * k, rng), b = random_vec(k * n, rng);
  std::vector<double> c(m * n), ref(m * n, 0.0);
  scalar_table().gemm_nn(a.data(), b.data(), c.data(), m, k, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = 0; p < k; ++p) ref[i * n + j] += a[i * k + p] * b[p * n + j];
  expect_close(c, ref, 10.0);
}

TEST(Kernels, SimdVariantsMatchScalar) {
  const auto tables = variants();
  if (tables.empty()) GTEST_SKIP() << "no SIMD variant on this machine";
  const KernelTable& s = scalar_table();
  Rng rng(RngSeed{2, 2});
  for (const KernelTable* t : tables) {
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 16u, 33u, 257u}) {
      auto x = random_vec(n, rng), y = random_vec(n, rng);
      EXPECT_NEAR(t->dot(x.data(), y.data(), n), s.dot(x.data(), y.data(), n),
                  1e-12 * (1.0 + n));
      auto y1 = y, y2 = y;
      t->axpy(0.37, x.data(), y1.data(), n);
      s.axpy(0.37, x.data(), y2.data(), n);
      expect_close(y1, y2, 1.0);
    }
    for (auto [m, k, n] : {std::tuple{1u, 1u, 1u}, {3u, 5u, 7u}, {16u, 9u, 13u}, {31u, 17u, 64u}}) {
      auto a = random_vec(m * k, rng), b = random_vec(k * n, rng);
      std::vector<double> c1(m * n), c2(m * n);
      t->gemm_nn(a.data(), b.data(), c1.data(), m, k, n);
      s.gemm_nn(a.data(), b.data(), c2.data(), m, k, n);
      expect_close(c1, c2, 1.0 + k);

      auto bt = random_vec(m * n, rng);
      std::vector<double> d1(k * n), d2(k * n);
      t->gemm_tn(a.data(), bt.data(), d1.data(), m, k, n);
      s.gemm_tn(a.data(), bt.data(), d2.data(), m, k, n);
      expect_close(d1, d2, 1.0 + m);

      auto bn = random_vec(n * k, rng);
      std::vector<double> e1(m * n), e2(m * n);
      t->gemm_nt(a.data(), bn.data(), e1.data(), m, k, n);
      s.gemm_nt(a.data(), bn.data(), e2.data(), m, k, n);
      expect_close(e1, e2, 1.0 + k);
    }
    // Random sparse matrix.
    const std::size_t rows = 40, cols = 30;
    std::vector<std::uint64_t> off{0};
    std::vector<std::uint32_t> idx;
    std::vector<double> val;
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::uint32_t c = 0; c < cols; ++c)
        if (rng.bernoulli(0.2)) idx.push_back(c), val.push_back(rng.normal());
      off.push_back(idx.size());
    }
    CsrView view{rows, off, idx, val};
    for (std::size_t width : {1u, 4u, 5u, 17u}) {
      auto x = random_vec(cols * width, rng);
      std::vector<double> y1(rows * width), y2(rows * width);
      t->spmm(view, x.data(), y1.data(), width);
      s.spmm(view, x.data(), y2.data(), width);
      expect_close(y1, y2, 10.0);
    }
  }
}

/* Copyright 2026 The Coop Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "coop/kernels.hpp"
#include "testing.hpp"

namespace coop::kernels {
namespace {

// Restores automatic dispatch after each test.
class KernelTest : public ::testing::Test {
 protected:
  void TearDown() override { reset_isa(); }
};

std::vector<Isa> vector_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::kAvx2, Isa::kNeon})
    if (isa_available(isa)) out.push_back(isa);
  return out;
}

void iou_with(Isa isa, const BoundingBox& a, BoxColumns cols, std::span<double> out) {
  switch (isa) {
    case Isa::kScalar:
      iou_one_to_many_ref(a, cols, out);
      return;
#if defined(COOP_HAVE_AVX2)
    case Isa::kAvx2:
      iou_one_to_many_avx2(a, cols, out);
      return;
#endif
#if defined(COOP_HAVE_NEON)
    case Isa::kNeon:
      iou_one_to_many_neon(a, cols, out);
      return;
#endif
    default:
      FAIL() << "unavailable";
  }
}

void counts_with(Isa isa, std::span<const double> s, std::span<const std::uint8_t> p,
                 std::span<const double> t, std::span<std::uint64_t> a,
                 std::span<std::uint64_t> pa) {
  switch (isa) {
    case Isa::kScalar:
      threshold_counts_ref(s, p, t, a, pa);
      return;
#if defined(COOP_HAVE_AVX2)
    case Isa::kAvx2:
      threshold_counts_avx2(s, p, t, a, pa);
      return;
#endif
#if defined(COOP_HAVE_NEON)
    case Isa::kNeon:
      threshold_counts_neon(s, p, t, a, pa);
      return;
#endif
    default:
      FAIL() << "unavailable";
  }
}

bool same_bits(double a, double b) {
  return std::memcmp(&a, &b, sizeof a) == 0;
}

TEST_F(KernelTest, ScalarAlwaysAvailable) {
  EXPECT_TRUE(isa_available(Isa::kScalar));
  force_isa(Isa::kScalar);
  EXPECT_EQ(active_isa(), Isa::kScalar);
  EXPECT_STREQ(isa_name(Isa::kScalar), "scalar");
}

TEST_F(KernelTest, ForcingUnavailableIsaThrows) {
  for (Isa isa : {Isa::kAvx2, Isa::kNeon})
    if (!isa_available(isa)) {
      EXPECT_THROW(force_isa(isa), std::invalid_argument);
    }
}

TEST_F(KernelTest, ReferenceIouMatchesDefinition) {
  std::mt19937_64 rng(1);
  std::vector<BoundingBox> boxes;
  for (int i = 0; i < 37; ++i) boxes.push_back(testing::random_box(rng, 20));
  const BoxTable table(boxes);
  std::vector<double> out(boxes.size());
  const BoundingBox a = testing::random_box(rng, 20);
  iou_one_to_many_ref(a, table.columns(), out);
  for (std::size_t i = 0; i < boxes.size(); ++i)
    EXPECT_DOUBLE_EQ(out[i], testing::ref_iou(a, boxes[i]));
}

// Vector lanes must reproduce the scalar reference bit for bit, including
// tails shorter than a vector, degenerate and touching boxes.
TEST_F(KernelTest, IouVariantsBitIdenticalToReference) {
  std::mt19937_64 rng(2);
  for (Isa isa : vector_isas()) {
    for (std::size_t n = 0; n < 67; ++n) {
      std::vector<BoundingBox> boxes;
      for (std::size_t i = 0; i < n; ++i) {
        auto b = testing::random_box(rng, 10);
        if (i % 9 == 3) b.x_max = b.x_min;              // zero width
        if (i % 11 == 5) b = {0, 0, 2, 2};              // identical to a below
        if (i % 13 == 7) b = {2, 0, 4, 2};              // touching edge
        boxes.push_back(b);
      }
      const BoxTable table(boxes);
      const BoundingBox a = n % 2 ? BoundingBox{0, 0, 2, 2} : testing::random_box(rng, 10);
      std::vector<double> ref(n), vec(n);
      iou_one_to_many_ref(a, table.columns(), ref);
      iou_with(isa, a, table.columns(), vec);
      for (std::size_t i = 0; i < n; ++i)
        ASSERT_TRUE(same_bits(ref[i], vec[i]))
            << isa_name(isa) << " n=" << n << " i=" << i << " " << ref[i] << " vs " << vec[i];
    }
  }
}

TEST_F(KernelTest, DispatchedIouMatchesReference) {
  std::mt19937_64 rng(4);
  std::vector<BoundingBox> boxes;
  for (int i = 0; i < 101; ++i) boxes.push_back(testing::random_box(rng, 10));
  const BoxTable table(boxes);
  std::vector<double> ref(boxes.size()), got(boxes.size());
  iou_one_to_many_ref(boxes[0], table.columns(), ref);
  iou_one_to_many(boxes[0], table.columns(), got);
  for (std::size_t i = 0; i < ref.size(); ++i) ASSERT_TRUE(same_bits(ref[i], got[i]));
}

TEST_F(KernelTest, ThresholdCountsReference) {
  const std::vector<double> scores{0.9, 0.5, 0.5, 0.1,
                                   std::numeric_limits<double>::quiet_NaN()};
  const std::vector<std::uint8_t> pos{1, 0, 1, 1, 1};
  const std::vector<double> thr{0.0, 0.5, 0.6, 1.0};
  std::vector<std::uint64_t> above(thr.size()), pa(thr.size());
  threshold_counts_ref(scores, pos, thr, above, pa);
  EXPECT_EQ(above, (std::vector<std::uint64_t>{4, 3, 1, 0}));
  EXPECT_EQ(pa, (std::vector<std::uint64_t>{3, 2, 1, 0}));
}

TEST_F(KernelTest, ThresholdCountVariantsMatchReference) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> coarse(0, 1000);
  std::vector<double> grid;
  for (int i = 0; i <= 1000; ++i) grid.push_back(i / 1000.0);
  for (Isa isa : vector_isas()) {
    for (std::size_t n = 0; n < 75; ++n) {
      std::vector<double> s(n);
      std::vector<std::uint8_t> p(n);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = coarse(rng) / 1000.0;  // lands exactly on grid points
        p[i] = static_cast<std::uint8_t>(rng() % 3 == 0 ? 0 : 1 + rng() % 200);
      }
      if (n > 4) s[n / 2] = std::numeric_limits<double>::quiet_NaN();
      std::vector<std::uint64_t> a1(grid.size()), p1(grid.size()), a2(grid.size()),
          p2(grid.size());
      threshold_counts_ref(s, p, grid, a1, p1);
      counts_with(isa, s, p, grid, a2, p2);
      ASSERT_EQ(a1, a2) << isa_name(isa) << " n=" << n;
      ASSERT_EQ(p1, p2) << isa_name(isa) << " n=" << n;
    }
  }
}

TEST_F(KernelTest, ForcedScalarDispatchUsesReference) {
  force_isa(Isa::kScalar);
  const std::vector<double> s{0.3, 0.7};
  const std::vector<std::uint8_t> p{1, 0};
  const std::vector<double> t{0.5};
  std::vector<std::uint64_t> a(1), pa(1);
  threshold_counts(s, p, t, a, pa);
  EXPECT_EQ(a[0], 1u);
  EXPECT_EQ(pa[0], 0u);
}

}  // namespace
}  // namespace coop::kernels

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "rsi/morton.hpp"

namespace rsi::morton {
namespace {

// Bit-by-bit scatter, the reference for the mask-based encoder.
std::uint64_t encode_loop(const QuantizedPoint& q) {
  std::uint64_t code = 0;
  for (int bit = 0; bit < kBitsPerAxis; ++bit) {
    code |= static_cast<std::uint64_t>((q.x >> bit) & 1u) << (3 * bit);
    code |= static_cast<std::uint64_t>((q.y >> bit) & 1u) << (3 * bit + 1);
    code |= static_cast<std::uint64_t>((q.z >> bit) & 1u) << (3 * bit + 2);
  }
  return code;
}

QuantizedPoint random_point(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> d(0, kGridMax);
  return {d(rng), d(rng), d(rng)};
}

Mesh single_triangle(const Vec3& a, const Vec3& b, const Vec3& c) {
  Mesh m;
  m.vertices.resize(3, 3);
  m.vertices.row(0) = a.transpose();
  m.vertices.row(1) = b.transpose();
  m.vertices.row(2) = c.transpose();
  m.triangles.resize(1, 3);
  m.triangles << 0, 1, 2;
  return m;
}

TEST(Centroid, Examples) {
  EXPECT_EQ(triangle_centroid(single_triangle({0, 0, 0}, {3, 0, 0}, {0, 3, 0}), 0), Vec3(1, 1, 0));
  EXPECT_EQ(triangle_centroid(single_triangle({1, 2, 3}, {1, 2, 3}, {1, 2, 3}), 0), Vec3(1, 2, 3));
  EXPECT_EQ(triangle_centroid(single_triangle({0, 0, 0}, {1, 1, 1}, {2, 2, 2}), 0), Vec3(1, 1, 1));
}

TEST(Quantize, Endpoints) {
  const SupportInterval s{Vec3(-1, 0, 2), Vec3(3, 1, 5)};
  EXPECT_EQ(quantize(s.min, s), (QuantizedPoint{0, 0, 0}));
  EXPECT_EQ(quantize(s.max, s), (QuantizedPoint{kGridMax, kGridMax, kGridMax}));
}

TEST(Quantize, MidpointOfUnitRange) {
  const SupportInterval s{Vec3(0, 0, 0), Vec3(1, 1, 1)};
  // floor(0.5 * (2^21 - 1)) = floor(1048575.5)
  EXPECT_EQ(quantize(Vec3(0.5f, 0, 0), s).x, 1048575u);
}

TEST(Quantize, ZeroExtentAxisMapsToZero) {
  const SupportInterval s{Vec3(0, 4, 0), Vec3(1, 4, 1)};
  EXPECT_EQ(quantize(Vec3(1, 4, 1), s), (QuantizedPoint{kGridMax, 0, kGridMax}));
}

TEST(Quantize, MonotoneAndIdempotentOnGrid) {
  const SupportInterval s{Vec3(0, 0, 0), Vec3(static_cast<float>(kGridMax), 1, 1)};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> d(0, static_cast<float>(kGridMax));
  for (int i = 0; i < 10000; ++i) {
    float a = d(rng), b = d(rng);
    if (a > b) std::swap(a, b);
    EXPECT_LE(quantize(Vec3(a, 0, 0), s).x, quantize(Vec3(b, 0, 0), s).x);
    // Integer-valued coordinates sit exactly on grid levels.
    const float level = std::floor(a);
    EXPECT_EQ(quantize(Vec3(level, 0, 0), s).x, static_cast<std::uint32_t>(level));
  }
}

TEST(Encode, Convention) {
  EXPECT_EQ(encode({0, 0, 0}), 0u);
  EXPECT_EQ(encode({1, 0, 0}), 1u);
  EXPECT_EQ(encode({0, 1, 0}), 2u);
  EXPECT_EQ(encode({0, 0, 1}), 4u);
  EXPECT_EQ(encode({kGridMax, kGridMax, kGridMax}), (std::uint64_t{1} << 63) - 1);
  EXPECT_EQ(encode_loop({kGridMax, kGridMax, kGridMax}), (std::uint64_t{1} << 63) - 1);
}

TEST(Encode, MatchesLoopScatterAndRoundTrips) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100000; ++i) {
    const QuantizedPoint q = random_point(rng);
    const std::uint64_t code = encode(q);
    ASSERT_EQ(code, encode_loop(q));
    ASSERT_LT(code, std::uint64_t{1} << 63);
    ASSERT_EQ(decode(code), q);
  }
}

TEST(Encode, AxisMonotone) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 100000; ++i) {
    QuantizedPoint lo = random_point(rng);
    QuantizedPoint hi = lo;
    std::uint32_t* axis_lo = i % 3 == 0 ? &lo.x : i % 3 == 1 ? &lo.y : &lo.z;
    std::uint32_t* axis_hi = i % 3 == 0 ? &hi.x : i % 3 == 1 ? &hi.y : &hi.z;
    if (*axis_lo == kGridMax) --*axis_lo;
    std::uniform_int_distribution<std::uint32_t> d(*axis_lo + 1, kGridMax);
    *axis_hi = d(rng);
    ASSERT_LT(encode(lo), encode(hi));
  }
}

TEST(SortKeys, Examples) {
  std::vector<MortonKey> keys{{5, 0}, {1, 1}, {3, 2}};
  sort_keys(keys);
  EXPECT_EQ(keys[0].index, 1u);
  EXPECT_EQ(keys[1].index, 2u);
  EXPECT_EQ(keys[2].index, 0u);

  std::vector<MortonKey> ties{{7, 4}, {7, 2}};
  sort_keys(ties);
  EXPECT_EQ(ties[0].index, 2u);
  EXPECT_EQ(ties[1].index, 4u);
}

TEST(SortKeys, MatchesComparisonSortAndIsPermutation) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::uint64_t> code(0, 1000);  // plenty of duplicates
  std::vector<MortonKey> keys(10000);
  for (std::uint32_t i = 0; i < keys.size(); ++i) keys[i] = {code(rng), i};
  std::shuffle(keys.begin(), keys.end(), rng);

  std::vector<MortonKey> expected = keys;
  std::stable_sort(expected.begin(), expected.end(), [](const MortonKey& a, const MortonKey& b) {
    return a.code < b.code || (a.code == b.code && a.index < b.index);
  });
  sort_keys(keys);
  EXPECT_EQ(keys, expected);

  std::vector<std::uint32_t> indices;
  for (const MortonKey& k : keys) indices.push_back(k.index);
  std::sort(indices.begin(), indices.end());
  for (std::uint32_t i = 0; i < indices.size(); ++i) ASSERT_EQ(indices[i], i);
}

}  // namespace
}  // namespace rsi::morton

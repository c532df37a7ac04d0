#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rsi/geometry.hpp"
#include "rsi/mesh.hpp"

namespace rsi::morton {

inline constexpr int kBitsPerAxis = 21;
inline constexpr std::uint32_t kGridMax = (1u << kBitsPerAxis) - 1;

struct QuantizedPoint {
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  std::uint32_t z = 0;

  bool operator==(const QuantizedPoint&) const = default;
};

struct MortonKey {
  std::uint64_t code = 0;
  std::uint32_t index = 0;  // original triangle (or segment) index

  bool operator==(const MortonKey&) const = default;
};

// Lexicographic on (code, index).
inline bool operator<(const MortonKey& a, const MortonKey& b) {
  return a.code != b.code ? a.code < b.code : a.index < b.index;
}

// Componentwise bounds of a point cloud.
struct SupportInterval {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
};

Vec3 triangle_centroid(const Mesh& mesh, Eigen::Index triangle);

std::vector<Vec3> triangle_centroids(const Mesh& mesh);

// Empty input yields a zero interval.
SupportInterval support_of(std::span<const Vec3> points);

/// floor((p - min) / (max - min) * (2^21 - 1)) per axis, clamped to the grid.
/// An axis with zero extent maps to 0.
QuantizedPoint quantize(const Vec3& p, const SupportInterval& support);

/// Interleaves the low 21 bits of each axis as ...zyxzyx, x in the least
/// significant position of every 3-bit group.
std::uint64_t encode(const QuantizedPoint& q);

QuantizedPoint decode(std::uint64_t code);

// Ascending by (code, index).
void sort_keys(std::vector<MortonKey>& keys);

/// Centroid -> support -> quantize -> encode for every triangle, unsorted.
std::vector<MortonKey> triangle_keys(const Mesh& mesh);

}  // namespace rsi::morton

#include "rsi/morton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rsi::morton {

namespace {

std::uint64_t spread_bits(std::uint32_t value) {
  std::uint64_t x = value & kGridMax;
  x = (x | x << 32) & 0x1f00000000ffffULL;
  x = (x | x << 16) & 0x1f0000ff0000ffULL;
  x = (x | x << 8) & 0x100f00f00f00f00fULL;
  x = (x | x << 4) & 0x10c30c30c30c30c3ULL;
  x = (x | x << 2) & 0x1249249249249249ULL;
  return x;
}

std::uint32_t compact_bits(std::uint64_t code) {
  std::uint64_t x = code & 0x1249249249249249ULL;
  x = (x ^ (x >> 2)) & 0x10c30c30c30c30c3ULL;
  x = (x ^ (x >> 4)) & 0x100f00f00f00f00fULL;
  x = (x ^ (x >> 8)) & 0x1f0000ff0000ffULL;
  x = (x ^ (x >> 16)) & 0x1f00000000ffffULL;
  x = (x ^ (x >> 32)) & 0x1fffffULL;
  return static_cast<std::uint32_t>(x);
}

std::uint32_t quantize_axis(float value, float lo, float hi) {
  const double extent = static_cast<double>(hi) - static_cast<double>(lo);
  if (!(extent > 0.0)) return 0;
  const double scaled =
      (static_cast<double>(value) - static_cast<double>(lo)) / extent * static_cast<double>(kGridMax);
  const double level = std::floor(scaled);
  if (level <= 0.0) return 0;
  if (level >= static_cast<double>(kGridMax)) return kGridMax;
  return static_cast<std::uint32_t>(level);
}

}  // namespace

Vec3 triangle_centroid(const Mesh& mesh, Eigen::Index triangle) {
  return (mesh.corner(triangle, 0) + mesh.corner(triangle, 1) + mesh.corner(triangle, 2)) / 3.0f;
}

std::vector<Vec3> triangle_centroids(const Mesh& mesh) {
  std::vector<Vec3> centroids(static_cast<std::size_t>(mesh.triangle_count()));
  for (Eigen::Index j = 0; j < mesh.triangle_count(); ++j) {
    centroids[static_cast<std::size_t>(j)] = triangle_centroid(mesh, j);
  }
  return centroids;
}

SupportInterval support_of(std::span<const Vec3> points) {
  if (points.empty()) return {};
  SupportInterval s{points.front(), points.front()};
  for (const Vec3& p : points) {
    s.min = s.min.cwiseMin(p);
    s.max = s.max.cwiseMax(p);
  }
  return s;
}

QuantizedPoint quantize(const Vec3& p, const SupportInterval& support) {
  return {quantize_axis(p.x(), support.min.x(), support.max.x()),
          quantize_axis(p.y(), support.min.y(), support.max.y()),
          quantize_axis(p.z(), support.min.z(), support.max.z())};
}

std::uint64_t encode(const QuantizedPoint& q) {
  return spread_bits(q.x) | (spread_bits(q.y) << 1) | (spread_bits(q.z) << 2);
}

QuantizedPoint decode(std::uint64_t code) {
  return {compact_bits(code), compact_bits(code >> 1), compact_bits(code >> 2)};
}

void sort_keys(std::vector<MortonKey>& keys) { std::sort(keys.begin(), keys.end()); }

std::vector<MortonKey> triangle_keys(const Mesh& mesh) {
  const std::vector<Vec3> centroids = triangle_centroids(mesh);
  const SupportInterval support = support_of(centroids);
  std::vector<MortonKey> keys(centroids.size());
  for (std::size_t j = 0; j < centroids.size(); ++j) {
    keys[j] = {encode(quantize(centroids[j], support)), static_cast<std::uint32_t>(j)};
  }
  return keys;
}

}  // namespace rsi::morton

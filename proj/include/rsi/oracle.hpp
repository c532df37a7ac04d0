#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "rsi/engine.hpp"
#include "rsi/mesh.hpp"

namespace rsi::oracle {

/// Segment/triangle test written independently of Möller-Trumbore: intersect
/// the supporting plane, then classify the point with edge cross-product signs.
/// Double precision throughout; degenerate triangles and segments parallel to
/// the plane miss.
struct PlaneHit {
  bool hit = false;
  double t = 0;
  Vector3<double> point = Vector3<double>::Zero();
};

PlaneHit plane_sign_intersect(const Vec3& start, const Vec3& end, const Vec3& a, const Vec3& b,
                              const Vec3& c);

/// Exact test over every pair, no box screening. Same result conventions as
/// run_batch (nearest hit, ties to the lower triangle id).
ResultSet oracle_intersect(const Mesh& mesh, const SegmentBatch& segments, QueryMode mode);

struct SyntheticScene {
  Mesh mesh;
  SegmentBatch segments;
  std::vector<std::int32_t> expectedCrossings;  // 0/1 per segment, known by construction
};

/// Height-field surface of exactly `num_triangles` triangles over a grid, with
/// `round(crossing_fraction * num_rays)` vertical segments piercing chosen
/// triangle interiors (each barycentric weight >= kInteriorMargin) and the rest
/// lying wholly above or below the surface. Deterministic in `seed`.
SyntheticScene generate_scene(std::size_t num_triangles, std::size_t num_rays,
                              double crossing_fraction, std::uint64_t seed);

inline constexpr double kInteriorMargin = 1e-2;

/// Closed axis-aligned cube [lo, hi]^3 as 12 outward-wound triangles.
Mesh make_cube(float lo = -1.0f, float hi = 1.0f);

/// Emits the four input files into `dir` plus `expected_crossings_i32`.
void write_scene(const SyntheticScene& scene, const std::filesystem::path& dir);

inline constexpr const char* kExpectedFile = "expected_crossings_i32";

}  // namespace rsi::oracle

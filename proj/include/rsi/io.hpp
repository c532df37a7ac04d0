#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rsi/engine.hpp"
#include "rsi/mesh.hpp"

namespace rsi::io {

// All files are flat little-endian records with no header.
inline constexpr const char* kVerticesFile = "vertices_f32";
inline constexpr const char* kTrianglesFile = "triangles_i32";
inline constexpr const char* kRayFromFile = "rayFrom_f32";
inline constexpr const char* kRayToFile = "rayTo_f32";

inline constexpr const char* kCrossingFile = "intersect_results_i32";
inline constexpr const char* kCountsFile = "intercept_counts_i32";
inline constexpr const char* kRaysFile = "intersecting_rays_i32";
inline constexpr const char* kDistancesFile = "distances_f32";
inline constexpr const char* kTrianglesHitFile = "intersecting_triangles_i32";
inline constexpr const char* kPointsFile = "intersecting_points_f32";

struct InputFileSet {
  std::filesystem::path vertices;
  std::filesystem::path triangles;
  std::filesystem::path rayFrom;
  std::filesystem::path rayTo;

  static InputFileSet in_directory(const std::filesystem::path& dir);
};

Points3f read_vertices(const std::filesystem::path& path);

// Every index is checked against [0, vertex_count).
TriangleIndices read_triangles(const std::filesystem::path& path, Eigen::Index vertex_count);

SegmentBatch read_segments(const std::filesystem::path& from, const std::filesystem::path& to);

Mesh read_mesh(const InputFileSet& files);

std::vector<std::int32_t> read_int32s(const std::filesystem::path& path);
std::vector<float> read_float32s(const std::filesystem::path& path);

void write_int32s(const std::filesystem::path& path, std::span<const std::int32_t> values);
void write_float32s(const std::filesystem::path& path, std::span<const float> values);
void write_points(const std::filesystem::path& path, const Points3f& points);
void write_triangles(const std::filesystem::path& path, const TriangleIndices& triangles);

void write_inputs(const Mesh& mesh, const SegmentBatch& segments, const InputFileSet& files);

/// Writes the mode's result files into `dir` (created if missing) and returns
/// their paths.
std::vector<std::filesystem::path> write_results(const ResultSet& results,
                                                 const std::filesystem::path& dir);

// Inverse of write_results.
ResultSet read_results(QueryMode mode, const std::filesystem::path& dir);

}  // namespace rsi::io

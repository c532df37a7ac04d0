#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "rsi/errors.hpp"
#include "rsi/geometry.hpp"

namespace rsi {

// Row-major N x 3 storage matches the on-disk record layout byte for byte.
using Points3f = Eigen::Matrix<float, Eigen::Dynamic, 3, Eigen::RowMajor>;
using TriangleIndices = Eigen::Matrix<std::int32_t, Eigen::Dynamic, 3, Eigen::RowMajor>;

struct Mesh {
  Points3f vertices;
  TriangleIndices triangles;

  Eigen::Index vertex_count() const { return vertices.rows(); }
  Eigen::Index triangle_count() const { return triangles.rows(); }

  Vec3 vertex(Eigen::Index i) const { return vertices.row(i).transpose(); }
  Vec3 corner(Eigen::Index triangle, int k) const { return vertex(triangles(triangle, k)); }

  Aabb triangle_bounds(Eigen::Index triangle) const {
    return triangle_aabb(corner(triangle, 0), corner(triangle, 1), corner(triangle, 2));
  }
};

struct SegmentBatch {
  Points3f starts;
  Points3f ends;

  Eigen::Index size() const { return starts.rows(); }
  Vec3 start(Eigen::Index i) const { return starts.row(i).transpose(); }
  Vec3 end(Eigen::Index i) const { return ends.row(i).transpose(); }
};

inline void validate_mesh(const Mesh& mesh) {
  if (!mesh.vertices.allFinite()) throw ValidationError("mesh vertices contain non-finite values");
  const Eigen::Index nv = mesh.vertex_count();
  for (Eigen::Index j = 0; j < mesh.triangle_count(); ++j) {
    for (int k = 0; k < 3; ++k) {
      const std::int32_t idx = mesh.triangles(j, k);
      if (idx < 0 || idx >= nv) {
        throw ValidationError("triangle " + std::to_string(j) + " references vertex " +
                              std::to_string(idx) + " outside [0, " + std::to_string(nv) + ")");
      }
    }
  }
}

inline void validate_segments(const SegmentBatch& segments) {
  if (segments.starts.rows() != segments.ends.rows()) {
    throw ValidationError("segment start and end arrays differ in length");
  }
  if (!segments.starts.allFinite() || !segments.ends.allFinite()) {
    throw ValidationError("segment endpoints contain non-finite values");
  }
}

}  // namespace rsi

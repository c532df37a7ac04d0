#pragma once

#include <cmath>
#include <type_traits>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace rsi {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

using Vec3 = Vector3<float>;

/// Axis-aligned box stored as componentwise lower and upper corners.
template <typename Scalar>
struct AlignedBox {
  Vector3<Scalar> min = Vector3<Scalar>::Zero();
  Vector3<Scalar> max = Vector3<Scalar>::Zero();

  static AlignedBox from_corners(const Vector3<Scalar>& a, const Vector3<Scalar>& b) {
    return {a.cwiseMin(b), a.cwiseMax(b)};
  }

  bool valid() const { return (min.array() <= max.array()).all(); }

  void extend(const Vector3<Scalar>& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }

  void extend(const AlignedBox& other) {
    min = min.cwiseMin(other.min);
    max = max.cwiseMax(other.max);
  }

  bool operator==(const AlignedBox& other) const { return min == other.min && max == other.max; }
};

using Aabb = AlignedBox<float>;

template <typename Scalar>
AlignedBox<Scalar> merged(const AlignedBox<Scalar>& a, const AlignedBox<Scalar>& b) {
  return {a.min.cwiseMin(b.min), a.max.cwiseMax(b.max)};
}

template <typename Scalar>
AlignedBox<Scalar> segment_aabb(const Vector3<Scalar>& start, const Vector3<Scalar>& end) {
  return AlignedBox<Scalar>::from_corners(start, end);
}

template <typename Scalar>
AlignedBox<Scalar> triangle_aabb(const Vector3<Scalar>& a, const Vector3<Scalar>& b,
                                 const Vector3<Scalar>& c) {
  return {a.cwiseMin(b).cwiseMin(c), a.cwiseMax(b).cwiseMax(c)};
}

// Closed intervals: boxes sharing only a face, edge or corner overlap.
template <typename Scalar>
inline bool aabb_overlap(const AlignedBox<Scalar>& a, const AlignedBox<Scalar>& b) {
  return a.min.x() <= b.max.x() && b.min.x() <= a.max.x() &&  //
         a.min.y() <= b.max.y() && b.min.y() <= a.max.y() &&  //
         a.min.z() <= b.max.z() && b.min.z() <= a.max.z();
}

template <typename Scalar>
struct HitRecord {
  bool hit = false;
  Scalar t = 0;  // segment parameter: point = start + t * (end - start)
  Scalar u = 0;  // barycentric weight of vertex b
  Scalar v = 0;  // barycentric weight of vertex c
  Vector3<Scalar> point = Vector3<Scalar>::Zero();
};

using Hit = HitRecord<float>;

namespace tolerance {
inline constexpr double kDeterminant = 1e-9;
inline constexpr double kBarycentric = 1e-7;
}  // namespace tolerance

/// Möller-Trumbore test of the closed segment [start, end] against triangle (a, b, c).
///
/// Arithmetic runs in double regardless of Scalar. Parallel or coplanar segments
/// and zero-area triangles give |det| below tolerance::kDeterminant and report a
/// miss. Points within tolerance::kBarycentric of an edge count as hits, so a
/// segment through a shared edge hits both neighbours.
template <typename Scalar>
HitRecord<Scalar> intersect_segment_triangle(const Vector3<Scalar>& start,
                                             const Vector3<Scalar>& end,
                                             const Vector3<Scalar>& a,
                                             const Vector3<Scalar>& b,
                                             const Vector3<Scalar>& c) {
  using Real = std::common_type_t<Scalar, double>;
  using V = Vector3<Real>;

  HitRecord<Scalar> record;
  const V origin = start.template cast<Real>();
  const V dir = end.template cast<Real>() - origin;
  const V va = a.template cast<Real>();
  const V e1 = b.template cast<Real>() - va;
  const V e2 = c.template cast<Real>() - va;

  const V p = dir.cross(e2);
  const Real det = e1.dot(p);
  if (std::abs(det) < tolerance::kDeterminant) return record;
  const Real inv_det = Real(1) / det;

  const V s = origin - va;
  const Real u = s.dot(p) * inv_det;
  if (u < -tolerance::kBarycentric || u > Real(1) + tolerance::kBarycentric) return record;

  const V q = s.cross(e1);
  const Real v = dir.dot(q) * inv_det;
  if (v < -tolerance::kBarycentric || u + v > Real(1) + tolerance::kBarycentric) return record;

  const Real t = e2.dot(q) * inv_det;
  if (t < Real(0) || t > Real(1)) return record;

  record.hit = true;
  record.t = static_cast<Scalar>(t);
  record.u = static_cast<Scalar>(u);
  record.v = static_cast<Scalar>(v);
  record.point = (origin + t * dir).template cast<Scalar>();
  return record;
}

}  // namespace rsi

#include "rsi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rsi/errors.hpp"
#include "rsi/io.hpp"
#include "rsi/parallel.hpp"

namespace rsi::oracle {

namespace {

using V3 = Vector3<double>;

V3 to_double(const Vec3& p) { return p.cast<double>(); }

}  // namespace

PlaneHit plane_sign_intersect(const Vec3& start, const Vec3& end, const Vec3& a, const Vec3& b,
                              const Vec3& c) {
  PlaneHit out;
  const V3 p0 = to_double(start), p1 = to_double(end);
  const V3 va = to_double(a), vb = to_double(b), vc = to_double(c);
  const V3 normal = (vb - va).cross(vc - va);
  if (normal.squaredNorm() == 0.0) return out;

  // Signed heights of the endpoints above the plane.
  const double h0 = normal.dot(p0 - va);
  const double h1 = normal.dot(p1 - va);
  if ((h0 > 0 && h1 > 0) || (h0 < 0 && h1 < 0) || h0 == h1) return out;

  const double t = h0 / (h0 - h1);
  const V3 p = p0 + t * (p1 - p0);
  const double s0 = normal.dot((vb - va).cross(p - va));
  const double s1 = normal.dot((vc - vb).cross(p - vb));
  const double s2 = normal.dot((va - vc).cross(p - vc));
  if (s0 < 0 || s1 < 0 || s2 < 0) return out;

  out.hit = true;
  out.t = t;
  out.point = p;
  return out;
}

ResultSet oracle_intersect(const Mesh& mesh, const SegmentBatch& segments, QueryMode mode) {
  const auto n_rays = static_cast<std::size_t>(segments.size());
  const Eigen::Index n_tri = mesh.triangle_count();

  std::vector<std::int32_t> hits(n_rays, 0);
  std::vector<std::int32_t> nearest(n_rays, -1);
  std::vector<PlaneHit> nearest_hit(n_rays);
  parallel_chunks(n_rays, resolve_worker_count(0), 64,
                  [&](unsigned, std::size_t begin, std::size_t end) {
                    for (std::size_t i = begin; i < end; ++i) {
                      const auto r = static_cast<Eigen::Index>(i);
                      for (Eigen::Index j = 0; j < n_tri; ++j) {
                        const PlaneHit h =
                            plane_sign_intersect(segments.start(r), segments.end(r),
                                                 mesh.corner(j, 0), mesh.corner(j, 1),
                                                 mesh.corner(j, 2));
                        if (!h.hit) continue;
                        ++hits[i];
                        if (nearest[i] < 0 || h.t < nearest_hit[i].t) {
                          nearest[i] = static_cast<std::int32_t>(j);
                          nearest_hit[i] = h;
                        }
                      }
                    }
                  });

  ResultSet out;
  out.mode = mode;
  switch (mode) {
    case QueryMode::boolean:
      out.crossing.resize(n_rays);
      std::transform(hits.begin(), hits.end(), out.crossing.begin(),
                     [](std::int32_t c) { return c > 0 ? 1 : 0; });
      break;
    case QueryMode::count: out.counts = std::move(hits); break;
    case QueryMode::barycentric: {
      BarycentricHits& bh = out.barycentric;
      std::vector<std::size_t> crossing;
      for (std::size_t i = 0; i < n_rays; ++i) {
        if (nearest[i] >= 0) crossing.push_back(i);
      }
      bh.points.resize(static_cast<Eigen::Index>(crossing.size()), 3);
      for (std::size_t k = 0; k < crossing.size(); ++k) {
        const std::size_t i = crossing[k];
        const V3& p = nearest_hit[i].point;
        bh.rays.push_back(static_cast<std::int32_t>(i));
        bh.triangles.push_back(nearest[i]);
        bh.distances.push_back(
            static_cast<float>((p - to_double(segments.start(static_cast<Eigen::Index>(i)))).norm()));
        bh.points.row(static_cast<Eigen::Index>(k)) = p.cast<float>().transpose();
      }
      break;
    }
  }
  return out;
}

SyntheticScene generate_scene(std::size_t num_triangles, std::size_t num_rays,
                              double crossing_fraction, std::uint64_t seed) {
  if (!(crossing_fraction >= 0.0 && crossing_fraction <= 1.0)) {
    throw ValidationError("crossing fraction must lie in [0, 1]");
  }
  if (num_triangles == 0 && crossing_fraction > 0.0 && num_rays > 0) {
    throw ValidationError("crossing segments need at least one triangle");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  SyntheticScene scene;

  // Grid of unit cells, two triangles each, truncated to the exact count.
  const std::size_t cells_needed = (num_triangles + 1) / 2;
  const auto nx = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(cells_needed)))));
  const std::size_t ny = std::max<std::size_t>(1, (cells_needed + nx - 1) / nx);

  double phase[4];
  for (double& p : phase) p = uniform(0.0, 2.0 * std::numbers::pi);
  const double wave_x = uniform(0.05, 0.2);
  const double wave_y = uniform(0.05, 0.2);

  scene.mesh.vertices.resize(static_cast<Eigen::Index>((nx + 1) * (ny + 1)), 3);
  for (std::size_t iy = 0; iy <= ny; ++iy) {
    for (std::size_t ix = 0; ix <= nx; ++ix) {
      const bool interior = ix > 0 && ix < nx && iy > 0 && iy < ny;
      const double x = static_cast<double>(ix) + (interior ? uniform(-0.2, 0.2) : 0.0);
      const double y = static_cast<double>(iy) + (interior ? uniform(-0.2, 0.2) : 0.0);
      const double z = 2.0 * std::sin(wave_x * x + phase[0]) * std::cos(wave_y * y + phase[1]) +
                       0.5 * std::sin(0.7 * x + phase[2]) * std::sin(0.5 * y + phase[3]) +
                       uniform(-0.05, 0.05);
      scene.mesh.vertices.row(static_cast<Eigen::Index>(iy * (nx + 1) + ix)) =
          Vec3(static_cast<float>(x), static_cast<float>(y), static_cast<float>(z)).transpose();
    }
  }

  scene.mesh.triangles.resize(static_cast<Eigen::Index>(num_triangles), 3);
  for (std::size_t j = 0; j < num_triangles; ++j) {
    const std::size_t cell = j / 2;
    const std::size_t ix = cell % nx, iy = cell / nx;
    const auto v = [&](std::size_t dx, std::size_t dy) {
      return static_cast<std::int32_t>((iy + dy) * (nx + 1) + ix + dx);
    };
    if (j % 2 == 0) {
      scene.mesh.triangles.row(static_cast<Eigen::Index>(j)) << v(0, 0), v(1, 0), v(1, 1);
    } else {
      scene.mesh.triangles.row(static_cast<Eigen::Index>(j)) << v(0, 0), v(1, 1), v(0, 1);
    }
  }

  float z_lo = 0, z_hi = 0;
  if (num_triangles > 0) {
    z_lo = scene.mesh.vertices.col(2).minCoeff();
    z_hi = scene.mesh.vertices.col(2).maxCoeff();
  }

  const auto n_cross = static_cast<std::size_t>(std::llround(crossing_fraction * static_cast<double>(num_rays)));
  scene.expectedCrossings.assign(num_rays, 0);
  std::fill_n(scene.expectedCrossings.begin(), n_cross, 1);
  std::shuffle(scene.expectedCrossings.begin(), scene.expectedCrossings.end(), rng);

  scene.segments.starts.resize(static_cast<Eigen::Index>(num_rays), 3);
  scene.segments.ends.resize(static_cast<Eigen::Index>(num_rays), 3);
  std::uniform_int_distribution<std::size_t> pick_triangle(0, num_triangles > 0 ? num_triangles - 1 : 0);
  const double span_x = static_cast<double>(nx), span_y = static_cast<double>(ny);

  for (std::size_t i = 0; i < num_rays; ++i) {
    Vector3<double> p, q;
    if (scene.expectedCrossings[i]) {
      const auto tri = static_cast<Eigen::Index>(pick_triangle(rng));
      double w0, w1, w2;
      do {
        w1 = unit(rng);
        w2 = unit(rng);
        w0 = 1.0 - w1 - w2;
      } while (w0 < kInteriorMargin || w1 < kInteriorMargin || w2 < kInteriorMargin);
      const Vector3<double> hit = w0 * scene.mesh.corner(tri, 0).cast<double>() +
                                  w1 * scene.mesh.corner(tri, 1).cast<double>() +
                                  w2 * scene.mesh.corner(tri, 2).cast<double>();
      p = {hit.x(), hit.y(), z_hi + uniform(0.1, 2.0)};
      q = {hit.x(), hit.y(), z_lo - uniform(0.1, 2.0)};
      if (unit(rng) < 0.5) std::swap(p, q);
    } else {
      const bool above = unit(rng) < 0.5;
      const double x = uniform(-0.1 * span_x, 1.1 * span_x);
      const double y = uniform(-0.1 * span_y, 1.1 * span_y);
      const double z0 = above ? z_hi + uniform(0.05, 3.0) : z_lo - uniform(0.05, 3.0);
      const double z1 = above ? z_hi + uniform(0.05, 3.0) : z_lo - uniform(0.05, 3.0);
      p = {x, y, z0};
      q = {x + uniform(-3.0, 3.0), y + uniform(-3.0, 3.0), z1};
    }
    const auto row = static_cast<Eigen::Index>(i);
    scene.segments.starts.row(row) = p.cast<float>().transpose();
    scene.segments.ends.row(row) = q.cast<float>().transpose();
  }
  return scene;
}

Mesh make_cube(float lo, float hi) {
  Mesh cube;
  cube.vertices.resize(8, 3);
  for (int k = 0; k < 8; ++k) {
    cube.vertices.row(k) << ((k & 1) ? hi : lo), ((k & 2) ? hi : lo), ((k & 4) ? hi : lo);
  }
  cube.triangles.resize(12, 3);
  cube.triangles << 0, 2, 1,  1, 2, 3,   // z = lo
                    4, 5, 6,  5, 7, 6,   // z = hi
                    0, 1, 4,  1, 5, 4,   // y = lo
                    2, 6, 3,  3, 6, 7,   // y = hi
                    0, 4, 2,  2, 4, 6,   // x = lo
                    1, 3, 5,  3, 7, 5;   // x = hi
  return cube;
}

void write_scene(const SyntheticScene& scene, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string());
  io::write_inputs(scene.mesh, scene.segments, io::InputFileSet::in_directory(dir));
  io::write_int32s(dir / kExpectedFile, scene.expectedCrossings);
}

}  // namespace rsi::oracle

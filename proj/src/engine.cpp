#include "rsi/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <numeric>

#include "rsi/errors.hpp"
#include "rsi/morton.hpp"
#include "rsi/parallel.hpp"

namespace rsi {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

constexpr std::size_t kQueryGrain = 256;

// Per-segment outcomes written by workers into disjoint slots, then packed
// into a ResultSet in segment order.
class Outcomes {
 public:
  Outcomes(QueryMode mode, std::size_t n) : mode_(mode) {
    switch (mode) {
      case QueryMode::boolean: crossing_.assign(n, 0); break;
      case QueryMode::count: counts_.assign(n, 0); break;
      case QueryMode::barycentric:
        triangle_.assign(n, -1);
        point_.resize(n);
        break;
    }
  }

  void record(std::size_t i, const QueryResult& r) {
    switch (mode_) {
      case QueryMode::boolean: crossing_[i] = r.crossed ? 1 : 0; break;
      case QueryMode::count: counts_[i] = static_cast<std::int32_t>(r.count); break;
      case QueryMode::barycentric:
        if (r.triangle >= 0) {
          triangle_[i] = r.triangle;
          point_[i] = r.nearest.point;
        }
        break;
    }
  }

  ResultSet finish(const SegmentBatch& segments) && {
    ResultSet out;
    out.mode = mode_;
    out.crossing = std::move(crossing_);
    out.counts = std::move(counts_);
    if (mode_ == QueryMode::barycentric) {
      BarycentricHits& hits = out.barycentric;
      const auto n_hits =
          static_cast<Eigen::Index>(std::count_if(triangle_.begin(), triangle_.end(),
                                                  [](std::int32_t t) { return t >= 0; }));
      hits.points.resize(n_hits, 3);
      hits.rays.reserve(static_cast<std::size_t>(n_hits));
      hits.distances.reserve(static_cast<std::size_t>(n_hits));
      hits.triangles.reserve(static_cast<std::size_t>(n_hits));
      Eigen::Index row = 0;
      for (std::size_t i = 0; i < triangle_.size(); ++i) {
        if (triangle_[i] < 0) continue;
        const auto seg = static_cast<Eigen::Index>(i);
        hits.rays.push_back(static_cast<std::int32_t>(i));
        hits.triangles.push_back(triangle_[i]);
        hits.distances.push_back(static_cast<float>(
            (point_[i].cast<double>() - segments.start(seg).cast<double>()).norm()));
        hits.points.row(row++) = point_[i].transpose();
      }
    }
    return out;
  }

 private:
  QueryMode mode_;
  std::vector<std::int32_t> crossing_;
  std::vector<std::int32_t> counts_;
  std::vector<std::int32_t> triangle_;
  std::vector<Vec3> point_;
};

void check_inputs(const Mesh& mesh, const SegmentBatch& segments) {
  validate_mesh(mesh);
  validate_segments(segments);
}

bool closer(const Hit& hit, std::int32_t id, const QueryResult& best) {
  return best.triangle < 0 || hit.t < best.nearest.t ||
         (hit.t == best.nearest.t && id < best.triangle);
}

}  // namespace

std::string_view to_string(QueryMode mode) {
  switch (mode) {
    case QueryMode::boolean: return "boolean";
    case QueryMode::barycentric: return "barycentric";
    case QueryMode::count: return "intercept_count";
  }
  return "unknown";
}

ResultSet ResultSet::empty(QueryMode mode, std::size_t segments) {
  ResultSet r;
  r.mode = mode;
  if (mode == QueryMode::boolean) r.crossing.assign(segments, 0);
  if (mode == QueryMode::count) r.counts.assign(segments, 0);
  return r;
}

std::size_t ResultSet::crossing_count() const {
  switch (mode) {
    case QueryMode::boolean:
      return static_cast<std::size_t>(std::count(crossing.begin(), crossing.end(), 1));
    case QueryMode::count:
      return static_cast<std::size_t>(
          std::count_if(counts.begin(), counts.end(), [](std::int32_t c) { return c > 0; }));
    case QueryMode::barycentric: return barycentric.size();
  }
  return 0;
}

std::vector<Aabb> compute_segment_boxes(const SegmentBatch& segments) {
  std::vector<Aabb> boxes(static_cast<std::size_t>(segments.size()));
  for (Eigen::Index i = 0; i < segments.size(); ++i) {
    boxes[static_cast<std::size_t>(i)] = segment_aabb(segments.start(i), segments.end(i));
  }
  return boxes;
}

std::vector<std::uint32_t> segment_morton_order(const SegmentBatch& segments) {
  const auto n = static_cast<std::size_t>(segments.size());
  std::vector<Vec3> midpoints(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    midpoints[i] = (segments.start(row) + segments.end(row)) * 0.5f;
  }
  const morton::SupportInterval support = morton::support_of(midpoints);
  std::vector<morton::MortonKey> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    keys[i] = {morton::encode(morton::quantize(midpoints[i], support)),
               static_cast<std::uint32_t>(i)};
  }
  morton::sort_keys(keys);
  std::vector<std::uint32_t> order(n);
  std::transform(keys.begin(), keys.end(), order.begin(),
                 [](const morton::MortonKey& k) { return k.index; });
  return order;
}

SortedSegments sort_segments_by_morton(const SegmentBatch& segments) {
  SortedSegments out;
  out.order = segment_morton_order(segments);
  const auto n = static_cast<Eigen::Index>(out.order.size());
  out.batch.starts.resize(n, 3);
  out.batch.ends.resize(n, 3);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto src = static_cast<Eigen::Index>(out.order[static_cast<std::size_t>(k)]);
    out.batch.starts.row(k) = segments.starts.row(src);
    out.batch.ends.row(k) = segments.ends.row(src);
  }
  return out;
}

ResultSet run_batch(const Mesh& mesh, const SegmentBatch& segments, const EngineConfig& config,
                    PhaseTimings* timings) {
  check_inputs(mesh, segments);
  PhaseTimings local;
  PhaseTimings& t = timings ? *timings : local;
  t = PhaseTimings{};

  const auto n_rays = static_cast<std::size_t>(segments.size());
  const unsigned workers = resolve_worker_count(config.workerCount);

  auto start = Clock::now();
  const std::vector<Aabb> boxes = compute_segment_boxes(segments);
  t.boxes = elapsed_ms(start);

  if (mesh.triangle_count() == 0 || n_rays == 0) return ResultSet::empty(config.mode, n_rays);

  start = Clock::now();
  const std::vector<Vec3> centroids = morton::triangle_centroids(mesh);
  const morton::SupportInterval support = morton::support_of(centroids);
  std::vector<morton::QuantizedPoint> grid(centroids.size());
  for (std::size_t j = 0; j < centroids.size(); ++j) grid[j] = morton::quantize(centroids[j], support);
  t.quantize = elapsed_ms(start);

  start = Clock::now();
  std::vector<morton::MortonKey> keys(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    keys[j] = {morton::encode(grid[j]), static_cast<std::uint32_t>(j)};
  }
  t.encode = elapsed_ms(start);

  start = Clock::now();
  morton::sort_keys(keys);
  t.sort = elapsed_ms(start);

  start = Clock::now();
  BvhTree tree = reset_bvh(mesh, keys);
  t.reset = elapsed_ms(start);

  start = Clock::now();
  construct_bvh(tree, keys, workers);
  t.construct = elapsed_ms(start);

  std::vector<std::uint32_t> order;
  if (config.sortRays) {
    start = Clock::now();
    order = segment_morton_order(segments);
    t.raySort = elapsed_ms(start);
  }

  start = Clock::now();
  Outcomes outcomes(config.mode, n_rays);
  std::vector<QueryScratch> scratch;
  scratch.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) scratch.emplace_back(config.maxCollisions, config.maxStack);

  std::atomic<std::size_t> overflow_at{StackOverflowError::kUnknownSegment};
  parallel_chunks(n_rays, workers, kQueryGrain,
                  [&](unsigned worker, std::size_t begin, std::size_t end) {
                    QueryScratch& own = scratch[worker];
                    for (std::size_t k = begin; k < end; ++k) {
                      const std::size_t i = order.empty() ? k : order[k];
                      const auto row = static_cast<Eigen::Index>(i);
                      try {
                        outcomes.record(i, find_collisions(mesh, segments.start(row),
                                                           segments.end(row), boxes[i], tree,
                                                           own, config.mode));
                      } catch (const StackOverflowError&) {
                        std::size_t seen = overflow_at.load();
                        while (i < seen && !overflow_at.compare_exchange_weak(seen, i)) {
                        }
                      }
                    }
                  });
  t.query = elapsed_ms(start);

  if (overflow_at.load() != StackOverflowError::kUnknownSegment) {
    throw StackOverflowError(config.maxStack, overflow_at.load());
  }
  return std::move(outcomes).finish(segments);
}

ResultSet run_baseline_allpairs(const Mesh& mesh, const SegmentBatch& segments,
                                const EngineConfig& config) {
  check_inputs(mesh, segments);
  const auto n_rays = static_cast<std::size_t>(segments.size());
  const auto n_tri = static_cast<std::size_t>(mesh.triangle_count());
  if (n_tri == 0 || n_rays == 0) return ResultSet::empty(config.mode, n_rays);

  // Structure-of-arrays triangle boxes for a tight screening loop.
  std::vector<float> lo_x(n_tri), lo_y(n_tri), lo_z(n_tri), hi_x(n_tri), hi_y(n_tri), hi_z(n_tri);
  for (std::size_t j = 0; j < n_tri; ++j) {
    const Aabb b = mesh.triangle_bounds(static_cast<Eigen::Index>(j));
    lo_x[j] = b.min.x(), lo_y[j] = b.min.y(), lo_z[j] = b.min.z();
    hi_x[j] = b.max.x(), hi_y[j] = b.max.y(), hi_z[j] = b.max.z();
  }
  const std::vector<Aabb> boxes = compute_segment_boxes(segments);

  Outcomes outcomes(config.mode, n_rays);
  const unsigned workers = resolve_worker_count(config.workerCount);
  parallel_chunks(n_rays, workers, kQueryGrain, [&](unsigned, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const Vec3 start = segments.start(row);
      const Vec3 stop = segments.end(row);
      const Aabb& q = boxes[i];
      QueryResult result;
      for (std::size_t j = 0; j < n_tri; ++j) {
        const bool overlap = (lo_x[j] <= q.max.x()) & (q.min.x() <= hi_x[j]) &
                             (lo_y[j] <= q.max.y()) & (q.min.y() <= hi_y[j]) &
                             (lo_z[j] <= q.max.z()) & (q.min.z() <= hi_z[j]);
        if (!overlap) continue;
        const auto tri = static_cast<Eigen::Index>(j);
        const Hit hit = intersect_segment_triangle(start, stop, mesh.corner(tri, 0),
                                                   mesh.corner(tri, 1), mesh.corner(tri, 2));
        if (!hit.hit) continue;
        result.crossed = true;
        ++result.count;
        if (config.mode == QueryMode::boolean) break;
        const auto id = static_cast<std::int32_t>(j);
        if (config.mode == QueryMode::barycentric && closer(hit, id, result)) {
          result.nearest = hit;
          result.triangle = id;
        }
      }
      outcomes.record(i, result);
    }
  });
  return std::move(outcomes).finish(segments);
}

}  // namespace rsi

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "rsi/geometry.hpp"
#include "rsi/lbvh.hpp"
#include "rsi/mesh.hpp"

namespace rsi {

std::string_view to_string(QueryMode mode);

struct EngineConfig {
  QueryMode mode = QueryMode::boolean;
  bool sortRays = false;
  unsigned workerCount = 0;  // 0 resolves to the hardware thread count
  std::size_t maxCollisions = kMaxCollisions;
  std::size_t maxStack = kMaxStack;
};

// Nearest hit per crossing segment, ascending by segment index.
struct BarycentricHits {
  std::vector<std::int32_t> rays;
  std::vector<float> distances;
  std::vector<std::int32_t> triangles;
  Points3f points;

  std::size_t size() const { return rays.size(); }
};

struct ResultSet {
  QueryMode mode = QueryMode::boolean;
  std::vector<std::int32_t> crossing;  // boolean mode: 0/1 per segment
  std::vector<std::int32_t> counts;    // count mode: exact hits per segment
  BarycentricHits barycentric;         // barycentric mode

  static ResultSet empty(QueryMode mode, std::size_t segments);

  // Number of segments reported as crossing, whatever the mode.
  std::size_t crossing_count() const;
};

// Wall time per pipeline phase, milliseconds.
struct PhaseTimings {
  double boxes = 0;
  double quantize = 0;
  double encode = 0;
  double sort = 0;
  double reset = 0;
  double construct = 0;
  double query = 0;
  double raySort = 0;

  double total() const { return boxes + quantize + encode + sort + reset + construct + query + raySort; }
};

std::vector<Aabb> compute_segment_boxes(const SegmentBatch& segments);

struct SortedSegments {
  SegmentBatch batch;
  std::vector<std::uint32_t> order;  // order[k] = original index of the k-th sorted segment
};

/// Morton order of segment midpoints, quantized against the midpoint support.
std::vector<std::uint32_t> segment_morton_order(const SegmentBatch& segments);

SortedSegments sort_segments_by_morton(const SegmentBatch& segments);

/// LBVH-accelerated batch query. Results are identical to running
/// find_collisions on every segment independently, for any worker count and
/// with or without segment sorting.
ResultSet run_batch(const Mesh& mesh, const SegmentBatch& segments, const EngineConfig& config,
                    PhaseTimings* timings = nullptr);

/// Box prescreen plus exact test over every segment/triangle pair. O(N_t * N_r).
ResultSet run_baseline_allpairs(const Mesh& mesh, const SegmentBatch& segments,
                                const EngineConfig& config);

}  // namespace rsi

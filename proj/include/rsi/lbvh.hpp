#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rsi/geometry.hpp"
#include "rsi/mesh.hpp"
#include "rsi/morton.hpp"

namespace rsi {

inline constexpr std::size_t kMaxCollisions = 32;
inline constexpr std::size_t kMaxStack = 64;

// Largest triangle count whose leaf indices fit a NodeRef.
inline constexpr std::size_t kMaxTriangles = (std::size_t{1} << 31) - 1;

inline constexpr std::int32_t kInternalTriangleId = -1;
inline constexpr std::int32_t kRootTriangleId = -2;

/// Tagged reference to either an internal node or a leaf, or the empty marker.
class NodeRef {
 public:
  constexpr NodeRef() = default;

  static constexpr NodeRef empty() { return NodeRef{}; }
  static constexpr NodeRef internal(std::uint32_t index) { return NodeRef{index}; }
  static constexpr NodeRef leaf(std::uint32_t index) { return NodeRef{index | kLeafBit}; }

  constexpr bool is_empty() const { return bits_ == kEmpty; }
  constexpr bool is_leaf() const { return !is_empty() && (bits_ & kLeafBit) != 0; }
  constexpr bool is_internal() const { return (bits_ & kLeafBit) == 0; }
  constexpr std::uint32_t index() const { return bits_ & ~kLeafBit; }

  constexpr bool operator==(const NodeRef&) const = default;

 private:
  static constexpr std::uint32_t kLeafBit = 1u << 31;
  static constexpr std::uint32_t kEmpty = std::numeric_limits<std::uint32_t>::max();

  constexpr explicit NodeRef(std::uint32_t bits) : bits_(bits) {}

  std::uint32_t bits_ = kEmpty;
};

struct BvhNode {
  Aabb bounds;
  NodeRef childLeft;
  NodeRef childRight;
  std::int32_t triangleId = kInternalTriangleId;  // >= 0 leaf, -1 internal, -2 root
  std::int32_t visitCounter = 0;                  // children reported during construction
  std::int32_t rangeLeft = 0;                     // leaf-index range of the subtree
  std::int32_t rangeRight = 0;
};

/// Binary radix tree over Morton-sorted triangles.
///
/// Internal storage keeps N_t slots: the N_t - 1 internal nodes plus a final
/// slot whose left child is the root. For a single triangle the root is the
/// leaf itself and there are no internal nodes.
class BvhTree {
 public:
  BvhTree() = default;

  std::size_t triangle_count() const { return leaves_.size(); }
  std::size_t internal_count() const { return leaves_.empty() ? 0 : leaves_.size() - 1; }
  bool empty() const { return leaves_.empty(); }

  NodeRef root() const { return slots_.empty() ? NodeRef::empty() : slots_.back().childLeft; }

  const BvhNode& node(NodeRef ref) const {
    assert(!ref.is_empty());
    return ref.is_leaf() ? leaves_[ref.index()] : slots_[ref.index()];
  }

  std::span<const BvhNode> internal_nodes() const {
    return std::span<const BvhNode>(slots_).first(internal_count());
  }
  std::span<const BvhNode> leaf_nodes() const { return leaves_; }
  const BvhNode& root_slot() const { return slots_.back(); }

  // Leaf position -> original triangle index.
  std::span<const std::uint32_t> sorted_triangle_ids() const { return sorted_ids_; }

 private:
  friend BvhTree reset_bvh(const Mesh&, std::span<const morton::MortonKey>);
  friend void construct_bvh(BvhTree&, std::span<const morton::MortonKey>, unsigned);

  std::vector<BvhNode> slots_;
  std::vector<BvhNode> leaves_;
  std::vector<std::uint32_t> sorted_ids_;
};

/// Allocates the node arrays and initialises every leaf from its triangle.
/// `sorted_keys` must be ascending by (code, index) and cover every triangle once.
BvhTree reset_bvh(const Mesh& mesh, std::span<const morton::MortonKey> sorted_keys);

/// Bottom-up single-pass construction. Each leaf climbs toward the root; the
/// first child to reach a parent stops, the second computes the parent's range
/// and bounds. Runs on `workers` threads; the resulting tree does not depend on
/// the worker count or schedule.
void construct_bvh(BvhTree& tree, std::span<const morton::MortonKey> sorted_keys,
                   unsigned workers = 1);

BvhTree build_bvh(const Mesh& mesh, std::span<const morton::MortonKey> sorted_keys,
                  unsigned workers = 1);

/// Fixed-capacity candidate list filled by traverse().
class CollisionBuffer {
 public:
  explicit CollisionBuffer(std::size_t capacity = kMaxCollisions);

  // Returns true once fewer than two free slots remain.
  bool insert(std::uint32_t triangle_id) {
    assert(count_ < hits_.size());
    hits_[count_++] = triangle_id;
    return count_ >= hits_.size() - 1;
  }

  void clear() { count_ = 0; }
  std::size_t size() const { return count_; }
  std::size_t capacity() const { return hits_.size(); }
  std::span<const std::uint32_t> hits() const { return std::span(hits_).first(count_); }

 private:
  std::vector<std::uint32_t> hits_;
  std::size_t count_ = 0;
};

/// Postponed-node stack with the empty marker permanently at the bottom.
class TraversalStack {
 public:
  explicit TraversalStack(std::size_t capacity = kMaxStack);

  void reset() {
    slots_[0] = NodeRef::empty();
    top_ = 1;
  }

  void push(NodeRef ref);  // throws StackOverflowError when full
  NodeRef pop() { return top_ == 0 ? NodeRef::empty() : slots_[--top_]; }

  std::size_t depth() const { return top_; }
  std::size_t capacity() const { return slots_.size(); }

 private:
  std::vector<NodeRef> slots_;
  std::size_t top_ = 1;
};

/// Expands `resume` and its overlapping descendants, appending the triangle ids
/// of overlapping leaves to `buffer`. Stops when the stack is exhausted (returns
/// the empty marker) or when the buffer nears capacity (returns the next node to
/// expand). The caller clears the buffer between calls; stack contents persist.
NodeRef traverse(const BvhTree& tree, const Aabb& query, NodeRef resume, TraversalStack& stack,
                 CollisionBuffer& buffer);

enum class QueryMode { boolean, barycentric, count };

struct QueryResult {
  bool crossed = false;
  std::uint32_t count = 0;         // exact hits (count mode)
  std::int32_t triangle = -1;      // nearest hit (barycentric mode)
  Hit nearest;
};

// Per-executor scratch, allocated once and reused across queries.
struct QueryScratch {
  QueryScratch(std::size_t max_collisions = kMaxCollisions, std::size_t max_stack = kMaxStack)
      : stack(max_stack), buffer(max_collisions) {}

  TraversalStack stack;
  CollisionBuffer buffer;
};

/// Alternates coarse traversal and exact tests for one segment.
///
/// boolean: stops at the first confirmed crossing.
/// barycentric: keeps the minimum-t hit, ties going to the lower triangle id.
/// count: counts every exact hit.
QueryResult find_collisions(const Mesh& mesh, const Vec3& start, const Vec3& end,
                            const Aabb& segment_box, const BvhTree& tree, QueryScratch& scratch,
                            QueryMode mode);

}  // namespace rsi

#include "rsi/lbvh.hpp"

#include <atomic>
#include <string>
#include <utility>

#include "rsi/errors.hpp"
#include "rsi/parallel.hpp"

namespace rsi {

namespace {

// Distance between adjacent composite keys (code, index). Compared
// lexicographically, which orders by the highest differing bit of the
// 95-bit concatenation.
struct KeyDistance {
  std::uint64_t code;
  std::uint32_t index;

  bool operator<(const KeyDistance& other) const {
    return code != other.code ? code < other.code : index < other.index;
  }
};

KeyDistance key_distance(std::span<const morton::MortonKey> keys, std::size_t i) {
  return {keys[i].code ^ keys[i + 1].code, keys[i].index ^ keys[i + 1].index};
}

constexpr std::size_t kConstructGrain = 1024;

}  // namespace

BvhTree reset_bvh(const Mesh& mesh, std::span<const morton::MortonKey> sorted_keys) {
  const auto n = static_cast<std::size_t>(mesh.triangle_count());
  if (n == 0) throw ValidationError("cannot build a BVH over an empty mesh");
  if (n > kMaxTriangles) {
    throw CapacityError("mesh has " + std::to_string(n) + " triangles; at most " +
                        std::to_string(kMaxTriangles) + " are supported");
  }
  if (sorted_keys.size() != n) {
    throw ValidationError("expected one Morton key per triangle");
  }

  BvhTree tree;
  tree.slots_.assign(n, BvhNode{});
  tree.leaves_.resize(n);
  tree.sorted_ids_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t id = sorted_keys[i].index;
    if (id >= n) throw ValidationError("Morton key references triangle out of range");
    BvhNode& leaf = tree.leaves_[i];
    leaf.bounds = mesh.triangle_bounds(id);
    leaf.triangleId = static_cast<std::int32_t>(id);
    leaf.rangeLeft = leaf.rangeRight = static_cast<std::int32_t>(i);
    tree.sorted_ids_[i] = id;
  }
  BvhNode& sentinel = tree.slots_.back();
  sentinel.rangeLeft = 0;
  sentinel.rangeRight = static_cast<std::int32_t>(n - 1);
  return tree;
}

void construct_bvh(BvhTree& tree, std::span<const morton::MortonKey> sorted_keys,
                   unsigned workers) {
  const std::size_t n = tree.leaves_.size();
  if (n == 0) return;
  std::vector<BvhNode>& slots = tree.slots_;
  const std::vector<BvhNode>& leaves = tree.leaves_;
  const std::size_t last = n - 1;

  auto climb = [&](std::size_t leaf) {
    NodeRef current = NodeRef::leaf(static_cast<std::uint32_t>(leaf));
    std::size_t left = leaf;
    std::size_t right = leaf;
    for (;;) {
      // The parent is the split next to the more similar neighbour. A node
      // spanning every leaf lands in the final slot, as its left child.
      std::size_t parent;
      if (left == 0 ||
          (right != last && key_distance(sorted_keys, right) < key_distance(sorted_keys, left - 1))) {
        parent = right;
        slots[parent].childLeft = current;
        slots[parent].rangeLeft = static_cast<std::int32_t>(left);
      } else {
        parent = left - 1;
        slots[parent].childRight = current;
        slots[parent].rangeRight = static_cast<std::int32_t>(right);
      }
      if (parent == last) return;

      std::atomic_ref<std::int32_t> counter(slots[parent].visitCounter);
      if (counter.fetch_add(1, std::memory_order_acq_rel) == 0) return;

      BvhNode& node = slots[parent];
      left = static_cast<std::size_t>(node.rangeLeft);
      right = static_cast<std::size_t>(node.rangeRight);
      const BvhNode& a = node.childLeft.is_leaf() ? leaves[node.childLeft.index()]
                                                  : slots[node.childLeft.index()];
      const BvhNode& b = node.childRight.is_leaf() ? leaves[node.childRight.index()]
                                                   : slots[node.childRight.index()];
      node.bounds = merged(a.bounds, b.bounds);
      node.triangleId = (left == 0 && right == last) ? kRootTriangleId : kInternalTriangleId;
      current = NodeRef::internal(static_cast<std::uint32_t>(parent));
    }
  };

  parallel_chunks(n, workers, kConstructGrain, [&](unsigned, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) climb(i);
  });

  BvhNode& sentinel = slots.back();
  if (!sentinel.childLeft.is_empty()) sentinel.bounds = tree.node(sentinel.childLeft).bounds;
}

BvhTree build_bvh(const Mesh& mesh, std::span<const morton::MortonKey> sorted_keys,
                  unsigned workers) {
  BvhTree tree = reset_bvh(mesh, sorted_keys);
  construct_bvh(tree, sorted_keys, workers);
  return tree;
}

CollisionBuffer::CollisionBuffer(std::size_t capacity) : hits_(capacity) {
  if (capacity < 2) throw ValidationError("collision buffer needs room for at least two entries");
}

TraversalStack::TraversalStack(std::size_t capacity) : slots_(capacity) {
  if (capacity < 2) throw ValidationError("traversal stack needs at least two slots");
  reset();
}

void TraversalStack::push(NodeRef ref) {
  if (top_ >= slots_.size()) throw StackOverflowError(slots_.size());
  slots_[top_++] = ref;
}

NodeRef traverse(const BvhTree& tree, const Aabb& query, NodeRef node, TraversalStack& stack,
                 CollisionBuffer& buffer) {
  if (node.is_empty()) return node;

  // Only reachable when the whole tree is one leaf.
  if (node.is_leaf()) {
    const BvhNode& leaf = tree.node(node);
    if (aabb_overlap(query, leaf.bounds)) buffer.insert(static_cast<std::uint32_t>(leaf.triangleId));
    return stack.pop();
  }

  bool full = false;
  do {
    const BvhNode& current = tree.node(node);
    const NodeRef left = current.childLeft;
    const NodeRef right = current.childRight;
    const BvhNode& left_node = tree.node(left);
    const BvhNode& right_node = tree.node(right);
    const bool overlap_left = aabb_overlap(query, left_node.bounds);
    const bool overlap_right = aabb_overlap(query, right_node.bounds);

    if (overlap_left && left.is_leaf()) {
      full = buffer.insert(static_cast<std::uint32_t>(left_node.triangleId));
    }
    if (overlap_right && right.is_leaf()) {
      full |= buffer.insert(static_cast<std::uint32_t>(right_node.triangleId));
    }

    const bool descend_left = overlap_left && left.is_internal();
    const bool descend_right = overlap_right && right.is_internal();
    if (!descend_left && !descend_right) {
      node = stack.pop();
    } else {
      node = descend_left ? left : right;
      if (descend_left && descend_right) stack.push(right);
    }
  } while (!node.is_empty() && !full);
  return node;
}

QueryResult find_collisions(const Mesh& mesh, const Vec3& start, const Vec3& end,
                            const Aabb& segment_box, const BvhTree& tree, QueryScratch& scratch,
                            QueryMode mode) {
  QueryResult result;
  if (tree.empty()) return result;

  scratch.stack.reset();
  NodeRef next = tree.root();
  do {
    scratch.buffer.clear();
    next = traverse(tree, segment_box, next, scratch.stack, scratch.buffer);

    for (const std::uint32_t id : scratch.buffer.hits()) {
      const auto tri = static_cast<Eigen::Index>(id);
      const Hit hit =
          intersect_segment_triangle(start, end, mesh.corner(tri, 0), mesh.corner(tri, 1),
                                     mesh.corner(tri, 2));
      if (!hit.hit) continue;
      result.crossed = true;
      ++result.count;
      if (mode == QueryMode::boolean) return result;
      if (mode == QueryMode::barycentric) {
        const auto sid = static_cast<std::int32_t>(id);
        if (result.triangle < 0 || hit.t < result.nearest.t ||
            (hit.t == result.nearest.t && sid < result.triangle)) {
          result.nearest = hit;
          result.triangle = sid;
        }
      }
    }
  } while (!next.is_empty());
  return result;
}

}  // namespace rsi

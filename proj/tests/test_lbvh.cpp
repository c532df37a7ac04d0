#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "rsi/errors.hpp"
#include "rsi/lbvh.hpp"
#include "rsi/oracle.hpp"
#include "support/bvh_checks.hpp"

namespace rsi {
namespace {

using testing::brute_force_overlaps;
using testing::build_for;
using testing::check_structure;
using testing::enumerate_candidates;
using testing::random_mesh;

Aabb mesh_bounds(const Mesh& m) {
  Aabb b = m.triangle_bounds(0);
  for (Eigen::Index j = 1; j < m.triangle_count(); ++j) b.extend(m.triangle_bounds(j));
  return b;
}

// Unit square in z = 0 split along its diagonal.
Mesh unit_square() {
  Mesh m;
  m.vertices.resize(4, 3);
  m.vertices << 0, 0, 0,  1, 0, 0,  1, 1, 0,  0, 1, 0;
  m.triangles.resize(2, 3);
  m.triangles << 0, 1, 2,  0, 2, 3;
  return m;
}

// Small triangles centred at x = 0, 1, ..., n-1 along the x axis.
Mesh triangles_on_line(int n) {
  Mesh m;
  m.vertices.resize(3 * n, 3);
  m.triangles.resize(n, 3);
  for (int j = 0; j < n; ++j) {
    const float x = static_cast<float>(j);
    m.vertices.row(3 * j) << x - 0.1f, 0, 0;
    m.vertices.row(3 * j + 1) << x + 0.1f, 0, 0;
    m.vertices.row(3 * j + 2) << x, 0.1f, 0;
    m.triangles.row(j) << 3 * j, 3 * j + 1, 3 * j + 2;
  }
  return m;
}

TEST(BuildBvh, SingleTriangleRootIsLeaf) {
  std::mt19937_64 rng(1);
  const Mesh m = random_mesh(1, rng);
  const BvhTree tree = build_for(m);
  EXPECT_EQ(tree.internal_count(), 0u);
  EXPECT_EQ(tree.root(), NodeRef::leaf(0));
  EXPECT_EQ(check_structure(m, tree), "");
}

TEST(BuildBvh, TwoTrianglesOneInternalNode) {
  const Mesh m = unit_square();
  const BvhTree tree = build_for(m);
  ASSERT_EQ(tree.internal_count(), 1u);
  const BvhNode& root = tree.node(tree.root());
  EXPECT_EQ(root.bounds, merged(m.triangle_bounds(0), m.triangle_bounds(1)));
  EXPECT_EQ(root.rangeLeft, 0);
  EXPECT_EQ(root.rangeRight, 1);
  EXPECT_EQ(root.triangleId, kRootTriangleId);
  EXPECT_EQ(check_structure(m, tree), "");
}

TEST(BuildBvh, LineOfEightFollowsMortonOrder) {
  const Mesh m = triangles_on_line(8);
  std::vector<morton::MortonKey> keys = morton::triangle_keys(m);
  morton::sort_keys(keys);
  for (std::size_t i = 1; i < keys.size(); ++i) ASSERT_LT(keys[i - 1].code, keys[i].code);

  const BvhTree tree = build_bvh(m, keys);
  EXPECT_EQ(check_structure(m, tree), "");
  EXPECT_EQ(tree.node(tree.root()).bounds, mesh_bounds(m));

  const std::vector<std::uint32_t> in_order = testing::leaves_in_order(tree);
  ASSERT_EQ(in_order.size(), 8u);
  for (std::uint32_t i = 0; i < 8; ++i) {
    EXPECT_EQ(in_order[i], i);
    EXPECT_EQ(tree.leaf_nodes()[i].triangleId, static_cast<std::int32_t>(keys[i].index));
  }
}

TEST(BuildBvh, RandomMeshesAreStructurallyValid) {
  std::mt19937_64 rng(99);
  for (std::size_t n : {1u, 2u, 3u, 5u, 7u, 8u, 31u, 100u, 1000u}) {
    for (int rep = 0; rep < 5; ++rep) {
      const Mesh m = random_mesh(n, rng);
      EXPECT_EQ(check_structure(m, build_for(m)), "") << "N_t = " << n;
    }
  }
}

TEST(BuildBvh, DuplicateMortonCodesStillValid) {
  // Every triangle identical: all codes collide, order falls to the index tiebreak.
  Mesh m;
  m.vertices.resize(3, 3);
  m.vertices << 0, 0, 0,  1, 0, 0,  0, 1, 0;
  m.triangles.resize(64, 3);
  for (int j = 0; j < 64; ++j) m.triangles.row(j) << 0, 1, 2;
  const BvhTree tree = build_for(m);
  EXPECT_EQ(check_structure(m, tree), "");
  for (std::uint32_t i = 0; i < 64; ++i) EXPECT_EQ(tree.sorted_triangle_ids()[i], i);
}

TEST(BuildBvh, FlatMeshIsLegal) {
  const oracle::SyntheticScene scene = oracle::generate_scene(50, 0, 0.0, 4);
  Mesh flat = scene.mesh;
  flat.vertices.col(2).setZero();
  EXPECT_EQ(check_structure(flat, build_for(flat)), "");
}

TEST(BuildBvh, ParallelMatchesSequentialBitwise) {
  std::mt19937_64 rng(17);
  const Mesh m = random_mesh(5000, rng);
  const BvhTree seq = build_for(m, 1);
  const BvhTree par = build_for(m, 4);
  ASSERT_EQ(seq.internal_count(), par.internal_count());
  const auto same = [](const BvhNode& a, const BvhNode& b) {
    return a.bounds == b.bounds && a.childLeft == b.childLeft && a.childRight == b.childRight &&
           a.triangleId == b.triangleId && a.visitCounter == b.visitCounter &&
           a.rangeLeft == b.rangeLeft && a.rangeRight == b.rangeRight;
  };
  for (std::size_t i = 0; i < seq.internal_count(); ++i) {
    ASSERT_TRUE(same(seq.internal_nodes()[i], par.internal_nodes()[i])) << "internal " << i;
  }
  for (std::size_t i = 0; i < seq.triangle_count(); ++i) {
    ASSERT_TRUE(same(seq.leaf_nodes()[i], par.leaf_nodes()[i])) << "leaf " << i;
  }
  EXPECT_EQ(seq.root(), par.root());
}

TEST(BuildBvh, RejectsEmptyMeshAndMismatchedKeys) {
  EXPECT_THROW(build_bvh(Mesh{}, {}), ValidationError);
  const Mesh m = unit_square();
  std::vector<morton::MortonKey> keys{{0, 0}};
  EXPECT_THROW(build_bvh(m, keys), ValidationError);
}

TEST(CollisionBuffer, InsertReportsNearlyFull) {
  CollisionBuffer buffer(32);
  EXPECT_FALSE(buffer.insert(7));
  EXPECT_EQ(buffer.size(), 1u);

  buffer.clear();
  for (std::uint32_t i = 0; i < 5; ++i) buffer.insert(i);
  EXPECT_FALSE(buffer.insert(5));  // count 5 -> 6

  buffer.clear();
  for (std::uint32_t i = 0; i < 30; ++i) buffer.insert(i);
  EXPECT_TRUE(buffer.insert(30));  // count 30 -> 31 = MAX - 1
  EXPECT_EQ(buffer.size(), 31u);
}

TEST(CollisionBuffer, RejectsCapacityBelowTwo) { EXPECT_THROW(CollisionBuffer(1), ValidationError); }

TEST(Traverse, DisjointQueryFindsNothing) {
  std::mt19937_64 rng(2);
  const Mesh m = random_mesh(50, rng);
  const BvhTree tree = build_for(m);
  TraversalStack stack;
  CollisionBuffer buffer;
  const Aabb far{Vec3(100, 100, 100), Vec3(101, 101, 101)};
  EXPECT_TRUE(traverse(tree, far, tree.root(), stack, buffer).is_empty());
  EXPECT_EQ(buffer.size(), 0u);
}

TEST(Traverse, SmallMeshFitsInOneCall) {
  std::mt19937_64 rng(3);
  const Mesh m = random_mesh(3, rng);
  const BvhTree tree = build_for(m);
  TraversalStack stack;
  CollisionBuffer buffer(32);
  EXPECT_TRUE(traverse(tree, mesh_bounds(m), tree.root(), stack, buffer).is_empty());
  std::vector<std::uint32_t> ids(buffer.hits().begin(), buffer.hits().end());
  std::sort(ids.begin(), ids.end());
  EXPECT_EQ(ids, (std::vector<std::uint32_t>{0, 1, 2}));
}

TEST(Traverse, ResumesUntilEveryCandidateSeenOnce) {
  std::mt19937_64 rng(4);
  const Mesh m = random_mesh(100, rng);
  const BvhTree tree = build_for(m);
  const Aabb everything = mesh_bounds(m);

  TraversalStack stack;
  CollisionBuffer buffer(32);
  const NodeRef resume = traverse(tree, everything, tree.root(), stack, buffer);
  EXPECT_FALSE(resume.is_empty());
  EXPECT_GE(buffer.size(), 31u);
  EXPECT_LE(buffer.size(), 32u);

  std::size_t batches = 0;
  std::vector<std::uint32_t> all = enumerate_candidates(tree, everything, 32, &batches);
  EXPECT_GE(batches, 4u);
  std::sort(all.begin(), all.end());
  EXPECT_EQ(all, brute_force_overlaps(m, everything));
}

TEST(Traverse, NoDuplicatesAcrossResumptionsForRandomQueries) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> c(-12, 12), s(0, 8);
  for (int rep = 0; rep < 50; ++rep) {
    const Mesh m = random_mesh(300, rng);
    const BvhTree tree = build_for(m);
    for (int q = 0; q < 20; ++q) {
      const Vec3 lo(c(rng), c(rng), c(rng));
      const Aabb query{lo, Vec3(lo + Vec3(s(rng), s(rng), s(rng)))};
      for (std::size_t cap : {2u, 3u, 4u, 32u}) {
        std::vector<std::uint32_t> got = enumerate_candidates(tree, query, cap);
        std::sort(got.begin(), got.end());
        ASSERT_TRUE(std::adjacent_find(got.begin(), got.end()) == got.end()) << "duplicate id";
        ASSERT_EQ(got, brute_force_overlaps(m, query));
      }
    }
  }
}

TEST(Traverse, StackOverflowIsReported) {
  std::mt19937_64 rng(6);
  const Mesh m = random_mesh(200, rng);
  const BvhTree tree = build_for(m);
  TraversalStack stack(2);
  CollisionBuffer buffer(1024);
  EXPECT_THROW(traverse(tree, mesh_bounds(m), tree.root(), stack, buffer), StackOverflowError);
}

TEST(FindCollisions, FarSegmentMisses) {
  const Mesh m = unit_square();
  const BvhTree tree = build_for(m);
  QueryScratch scratch;
  const Vec3 s(10, 10, -1), e(10, 10, 1);
  for (QueryMode mode : {QueryMode::boolean, QueryMode::barycentric, QueryMode::count}) {
    const QueryResult r = find_collisions(m, s, e, segment_aabb(s, e), tree, scratch, mode);
    EXPECT_FALSE(r.crossed);
    EXPECT_EQ(r.count, 0u);
    EXPECT_EQ(r.triangle, -1);
  }
}

TEST(FindCollisions, VerticalSegmentThroughFirstTriangle) {
  const Mesh m = unit_square();
  const BvhTree tree = build_for(m);
  QueryScratch scratch;
  // (0.75, 0.25) is inside triangle 0 = (0,0,0),(1,0,0),(1,1,0).
  const Vec3 s(0.75f, 0.25f, -2), e(0.75f, 0.25f, 2);
  const Aabb box = segment_aabb(s, e);
  EXPECT_TRUE(find_collisions(m, s, e, box, tree, scratch, QueryMode::boolean).crossed);

  const QueryResult bary = find_collisions(m, s, e, box, tree, scratch, QueryMode::barycentric);
  ASSERT_TRUE(bary.crossed);
  EXPECT_EQ(bary.triangle, 0);
  EXPECT_NEAR(bary.nearest.t, 0.5f, 1e-6);
  EXPECT_LT((bary.nearest.point - Vec3(0.75f, 0.25f, 0)).norm(), 1e-6f);

  EXPECT_EQ(find_collisions(m, s, e, box, tree, scratch, QueryMode::count).count, 1u);
}

TEST(FindCollisions, CubeParityMatchesBruteForce) {
  const Mesh cube = oracle::make_cube();
  const BvhTree tree = build_for(cube);
  QueryScratch scratch;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<float> inside(-0.9f, 0.9f), outside(3, 6);

  const auto brute_count = [&](const Vec3& s, const Vec3& e) {
    std::uint32_t c = 0;
    for (Eigen::Index j = 0; j < 12; ++j) {
      c += intersect_segment_triangle(s, e, cube.corner(j, 0), cube.corner(j, 1), cube.corner(j, 2)).hit;
    }
    return c;
  };

  const Vec3 centre(0.01f, 0.02f, 0.03f), far(5.3f, 4.7f, 6.1f);
  const std::uint32_t from_centre =
      find_collisions(cube, centre, far, segment_aabb(centre, far), tree, scratch, QueryMode::count).count;
  EXPECT_EQ(from_centre, brute_count(centre, far));
  EXPECT_EQ(from_centre % 2, 1u);

  for (int i = 0; i < 200; ++i) {
    const Vec3 p(inside(rng), inside(rng), inside(rng));
    const Vec3 q(outside(rng), outside(rng), outside(rng));
    const std::uint32_t c =
        find_collisions(cube, p, q, segment_aabb(p, q), tree, scratch, QueryMode::count).count;
    EXPECT_EQ(c, brute_count(p, q));
    EXPECT_EQ(c % 2, 1u);

    const Vec3 r(-outside(rng), outside(rng), -outside(rng));
    const std::uint32_t c_out =
        find_collisions(cube, q, r, segment_aabb(q, r), tree, scratch, QueryMode::count).count;
    EXPECT_EQ(c_out, brute_count(q, r));
    EXPECT_EQ(c_out % 2, 0u);
  }
}

TEST(FindCollisions, ModesAgreeOnRandomMeshes) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<float> c(-12, 12);
  for (int rep = 0; rep < 20; ++rep) {
    const Mesh m = random_mesh(400, rng, 10.0f, 2.0f);
    const BvhTree tree = build_for(m);
    QueryScratch scratch(4, 64);
    for (int q = 0; q < 200; ++q) {
      const Vec3 s(c(rng), c(rng), c(rng)), e(c(rng), c(rng), c(rng));
      const Aabb box = segment_aabb(s, e);
      const QueryResult b = find_collisions(m, s, e, box, tree, scratch, QueryMode::boolean);
      const QueryResult n = find_collisions(m, s, e, box, tree, scratch, QueryMode::count);
      const QueryResult y = find_collisions(m, s, e, box, tree, scratch, QueryMode::barycentric);
      ASSERT_EQ(b.crossed, n.count >= 1);
      ASSERT_EQ(b.crossed, y.triangle >= 0);
      if (y.triangle >= 0) {
        const Hit h = intersect_segment_triangle(s, e, m.corner(y.triangle, 0),
                                                 m.corner(y.triangle, 1), m.corner(y.triangle, 2));
        ASSERT_TRUE(h.hit);
        // No registered hit is nearer than the reported one.
        for (Eigen::Index j = 0; j < m.triangle_count(); ++j) {
          const Hit other = intersect_segment_triangle(s, e, m.corner(j, 0), m.corner(j, 1), m.corner(j, 2));
          if (other.hit) ASSERT_GE(other.t, y.nearest.t);
        }
      }
    }
  }
}

}  // namespace
}  // namespace rsi

#include "rsi/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <system_error>

#include "rsi/errors.hpp"

namespace rsi::io {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kRecordBytes = 12;

std::vector<char> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::vector<char> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw IoError("failed reading " + path.string());
  return bytes;
}

void require_multiple(const fs::path& path, std::size_t bytes, std::size_t unit) {
  if (bytes % unit != 0) {
    throw ValidationError(path.string() + ": length " + std::to_string(bytes) +
                          " bytes is not a multiple of " + std::to_string(unit));
  }
}

template <typename T>
void decode_le(const char* src, std::size_t count, T* dst) {
  static_assert(sizeof(T) == 4);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(dst, src, count * sizeof(T));
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      std::uint32_t raw = 0;
      for (int b = 0; b < 4; ++b) {
        raw |= static_cast<std::uint32_t>(static_cast<unsigned char>(src[i * 4 + b])) << (8 * b);
      }
      std::memcpy(dst + i, &raw, 4);
    }
  }
}

template <typename T>
void write_le(const fs::path& path, const T* data, std::size_t count) {
  static_assert(sizeof(T) == 4);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      std::uint32_t raw = 0;
      std::memcpy(&raw, data + i, 4);
      char bytes[4];
      for (int b = 0; b < 4; ++b) bytes[b] = static_cast<char>((raw >> (8 * b)) & 0xff);
      out.write(bytes, 4);
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

template <typename T>
std::vector<T> read_flat(const fs::path& path, std::size_t unit) {
  const std::vector<char> bytes = slurp(path);
  require_multiple(path, bytes.size(), unit);
  std::vector<T> values(bytes.size() / sizeof(T));
  decode_le(bytes.data(), values.size(), values.data());
  return values;
}

Points3f read_records(const fs::path& path) {
  const std::vector<char> bytes = slurp(path);
  require_multiple(path, bytes.size(), kRecordBytes);
  Points3f points(static_cast<Eigen::Index>(bytes.size() / kRecordBytes), 3);
  decode_le(bytes.data(), static_cast<std::size_t>(points.size()), points.data());
  return points;
}

void require_finite(const fs::path& path, const Points3f& points) {
  if (!points.allFinite()) throw ValidationError(path.string() + ": contains non-finite values");
}

}  // namespace

InputFileSet InputFileSet::in_directory(const fs::path& dir) {
  return {dir / kVerticesFile, dir / kTrianglesFile, dir / kRayFromFile, dir / kRayToFile};
}

Points3f read_vertices(const fs::path& path) {
  Points3f vertices = read_records(path);
  require_finite(path, vertices);
  return vertices;
}

TriangleIndices read_triangles(const fs::path& path, Eigen::Index vertex_count) {
  const std::vector<char> bytes = slurp(path);
  require_multiple(path, bytes.size(), kRecordBytes);
  TriangleIndices triangles(static_cast<Eigen::Index>(bytes.size() / kRecordBytes), 3);
  decode_le(bytes.data(), static_cast<std::size_t>(triangles.size()), triangles.data());
  for (Eigen::Index j = 0; j < triangles.rows(); ++j) {
    for (int k = 0; k < 3; ++k) {
      const std::int32_t idx = triangles(j, k);
      if (idx < 0 || idx >= vertex_count) {
        throw ValidationError(path.string() + ": triangle " + std::to_string(j) +
                              " references vertex " + std::to_string(idx) + " outside [0, " +
                              std::to_string(vertex_count) + ")");
      }
    }
  }
  return triangles;
}

SegmentBatch read_segments(const fs::path& from, const fs::path& to) {
  SegmentBatch batch{read_records(from), read_records(to)};
  if (batch.starts.rows() != batch.ends.rows()) {
    throw ValidationError(from.string() + " and " + to.string() + " hold " +
                          std::to_string(batch.starts.rows()) + " and " +
                          std::to_string(batch.ends.rows()) + " points respectively");
  }
  require_finite(from, batch.starts);
  require_finite(to, batch.ends);
  return batch;
}

Mesh read_mesh(const InputFileSet& files) {
  Mesh mesh;
  mesh.vertices = read_vertices(files.vertices);
  mesh.triangles = read_triangles(files.triangles, mesh.vertices.rows());
  return mesh;
}

std::vector<std::int32_t> read_int32s(const fs::path& path) {
  return read_flat<std::int32_t>(path, sizeof(std::int32_t));
}

std::vector<float> read_float32s(const fs::path& path) { return read_flat<float>(path, sizeof(float)); }

void write_int32s(const fs::path& path, std::span<const std::int32_t> values) {
  write_le(path, values.data(), values.size());
}

void write_float32s(const fs::path& path, std::span<const float> values) {
  write_le(path, values.data(), values.size());
}

void write_points(const fs::path& path, const Points3f& points) {
  write_le(path, points.data(), static_cast<std::size_t>(points.size()));
}

void write_triangles(const fs::path& path, const TriangleIndices& triangles) {
  write_le(path, triangles.data(), static_cast<std::size_t>(triangles.size()));
}

void write_inputs(const Mesh& mesh, const SegmentBatch& segments, const InputFileSet& files) {
  write_points(files.vertices, mesh.vertices);
  write_triangles(files.triangles, mesh.triangles);
  write_points(files.rayFrom, segments.starts);
  write_points(files.rayTo, segments.ends);
}

std::vector<fs::path> write_results(const ResultSet& results, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string());
  }
  std::vector<fs::path> written;
  switch (results.mode) {
    case QueryMode::boolean:
      written.push_back(dir / kCrossingFile);
      write_int32s(written.back(), results.crossing);
      break;
    case QueryMode::count:
      written.push_back(dir / kCountsFile);
      write_int32s(written.back(), results.counts);
      break;
    case QueryMode::barycentric: {
      const BarycentricHits& hits = results.barycentric;
      written = {dir / kRaysFile, dir / kDistancesFile, dir / kTrianglesHitFile, dir / kPointsFile};
      write_int32s(written[0], hits.rays);
      write_float32s(written[1], hits.distances);
      write_int32s(written[2], hits.triangles);
      write_points(written[3], hits.points);
      break;
    }
  }
  return written;
}

ResultSet read_results(QueryMode mode, const fs::path& dir) {
  ResultSet out;
  out.mode = mode;
  switch (mode) {
    case QueryMode::boolean: out.crossing = read_int32s(dir / kCrossingFile); break;
    case QueryMode::count: out.counts = read_int32s(dir / kCountsFile); break;
    case QueryMode::barycentric: {
      BarycentricHits& hits = out.barycentric;
      hits.rays = read_int32s(dir / kRaysFile);
      hits.distances = read_float32s(dir / kDistancesFile);
      hits.triangles = read_int32s(dir / kTrianglesHitFile);
      hits.points = read_records(dir / kPointsFile);
      const std::size_t n = hits.rays.size();
      if (hits.distances.size() != n || hits.triangles.size() != n ||
          static_cast<std::size_t>(hits.points.rows()) != n) {
        throw ValidationError(dir.string() + ": barycentric result files disagree in length");
      }
      break;
    }
  }
  return out;
}

}  // namespace rsi::io

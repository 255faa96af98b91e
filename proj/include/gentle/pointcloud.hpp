#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "gentle/errors.hpp"
#include "gentle/geometry.hpp"
#include "gentle/rng.hpp"

namespace gentle {

enum class PointLabel : std::uint8_t {
  kGripper = 0,
  kObject = 1,
  kTactileLeft = 2,
  kTactileRight = 3,
};

// Unordered 3D point set. `labels` is either empty or one tag per point.
struct PointCloud {
  std::vector<Vec3> points;
  std::string frame = "world";
  std::vector<PointLabel> labels;

  std::size_t size() const { return points.size(); }
  bool labeled() const { return !labels.empty(); }

  void push(const Vec3& p) { points.push_back(p); }
  void push(const Vec3& p, PointLabel l) {
    points.push_back(p);
    labels.push_back(l);
  }
};

// Keeps points inside the union of boxes, preserving order and labels.
inline PointCloud crop(const PointCloud& pc, const std::vector<Aabb>& boxes) {
  PointCloud out;
  out.frame = pc.frame;
  for (std::size_t i = 0; i < pc.points.size(); ++i) {
    const Vec3& p = pc.points[i];
    for (const Aabb& b : boxes) {
      if (b.contains(p)) {
        if (pc.labeled())
          out.push(p, pc.labels[i]);
        else
          out.push(p);
        break;
      }
    }
  }
  return out;
}

inline PointCloud transform_cloud(const PointCloud& pc, const Pose& t) {
  PointCloud out = pc;
  for (Vec3& p : out.points) p = t.apply(p);
  return out;
}

// Greedy farthest-point selection from a given start index. Ties on the
// max-min distance pick the lowest candidate index, so the index sequence is
// fully determined by (points, k, start).
inline std::vector<std::size_t> fps_indices_from(const std::vector<Vec3>& pts,
                                                 std::size_t k,
                                                 std::size_t start) {
  std::vector<std::size_t> picked;
  const std::size_t n = pts.size();
  if (n == 0 || k == 0) return picked;
  picked.reserve(k);
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::size_t current = start < n ? start : 0;
  picked.push_back(current);
  while (picked.size() < k) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = norm2(pts[i] - pts[current]);
      if (d < dist[i]) dist[i] = d;
      if (dist[i] > best_d) {
        best_d = dist[i];
        best = i;
      }
    }
    picked.push_back(best);
    current = best;
  }
  return picked;
}

// Downsamples to exactly k points. N <= k pads by repeating the last point
// (zeros when the cloud is empty) so downstream tensor shapes stay fixed.
// The start index is a seeded uniform draw; record the seed for replay.
inline PointCloud farthest_point_sample(const PointCloud& pc, std::size_t k,
                                        std::uint64_t seed) {
  PointCloud out;
  out.frame = pc.frame;
  const std::size_t n = pc.points.size();
  if (k == 0) return out;
  if (n <= k) {
    out = pc;
    while (out.points.size() < k) {
      if (n == 0) {
        out.push(Vec3{});
        if (pc.labeled()) out.labels.push_back(PointLabel::kObject);
      } else {
        if (pc.labeled())
          out.push(out.points.back(), out.labels.back());
        else
          out.push(out.points.back());
      }
    }
    return out;
  }
  Rng rng(seed);
  const std::size_t start = static_cast<std::size_t>(rng.uniform_index(n));
  const std::vector<std::size_t> idx = fps_indices_from(pc.points, k, start);
  out.points.reserve(k);
  for (std::size_t i : idx) {
    if (pc.labeled())
      out.push(pc.points[i], pc.labels[i]);
    else
      out.push(pc.points[i]);
  }
  return out;
}

// FPS with an explicit start index (used where the start must not depend on
// a seed, e.g. tactile grids).
inline PointCloud farthest_point_sample_from(const PointCloud& pc,
                                             std::size_t k, std::size_t start) {
  PointCloud out;
  out.frame = pc.frame;
  const std::size_t n = pc.points.size();
  if (k == 0) return out;
  if (n <= k) return farthest_point_sample(pc, k, 0);
  const std::vector<std::size_t> idx = fps_indices_from(pc.points, k, start);
  for (std::size_t i : idx) {
    if (pc.labeled())
      out.push(pc.points[i], pc.labels[i]);
    else
      out.push(pc.points[i]);
  }
  return out;
}

}  // namespace gentle

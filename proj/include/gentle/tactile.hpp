#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gentle/geometry.hpp"
#include "gentle/pointcloud.hpp"

namespace gentle::tactile {

inline constexpr std::size_t kTactilePoints = 128;

enum class PadSide : std::uint8_t { kLeft = 0, kRight = 1 };

// Per-pad penetration field. The pad frame sits at the center of the sensing
// face: u, v span the face, +z is the outward normal (toward the object).
// Cell (r, c) is centered at u = (r + 0.5) * du - half_u, v likewise.
struct ContactState {
  PadSide pad = PadSide::kLeft;
  int rows = 8;
  int cols = 6;
  double cell_du = 0.003;  // m, cell pitch along u
  double cell_dv = 0.003;  // m, cell pitch along v
  std::vector<double> penetration;  // rows*cols depths, row-major, >= 0
  Pose pad_pose;  // pad frame -> world

  ContactState() : penetration(static_cast<std::size_t>(rows * cols), 0.0) {}
  ContactState(PadSide side, int r, int c, double du, double dv)
      : pad(side), rows(r), cols(c), cell_du(du), cell_dv(dv),
        penetration(static_cast<std::size_t>(r * c), 0.0) {}

  double& at(int r, int c) { return penetration[static_cast<std::size_t>(r * cols + c)]; }
  double at(int r, int c) const { return penetration[static_cast<std::size_t>(r * cols + c)]; }

  double half_u() const { return 0.5 * cell_du * rows; }
  double half_v() const { return 0.5 * cell_dv * cols; }
  double cell_area() const { return cell_du * cell_dv; }
  double pad_area() const { return cell_area() * rows * cols; }

  double u_of(int r) const { return (r + 0.5) * cell_du - half_u(); }
  double v_of(int c) const { return (c + 0.5) * cell_dv - half_v(); }

  bool in_contact() const {
    for (double d : penetration)
      if (d > 0.0) return true;
    return false;
  }
};

// normal force (N, >= 0), in-plane shear (N), torque about the pad normal (N*m)
struct ForceReading {
  double normal = 0.0;
  double shear_u = 0.0;
  double shear_v = 0.0;
  double torque = 0.0;

  double shear_magnitude() const { return std::hypot(shear_u, shear_v); }
  double total_magnitude() const { return std::hypot(normal, shear_magnitude()); }
};

struct TactileParams {
  double k_n = 1000.0;  // N/m
  double k_t = 500.0;   // N/m
};

// Area-weighted mean penetration; the effective spring compression d in
// F_n = k_n * d. Summation is row-major, which the contact-law tests rely on.
inline double effective_depth(const ContactState& c) {
  double sum = 0.0;
  for (int r = 0; r < c.rows; ++r)
    for (int col = 0; col < c.cols; ++col) sum += c.at(r, col) * c.cell_area();
  return sum / c.pad_area();
}

// Decomposes the penetration field into normal force, friction-cone-clamped
// shear, and torque about the pad normal. Per-cell shear is distributed in
// proportion to each cell's penetration share, so the torque is the moment of
// the total shear applied at the pressure centroid.
inline ForceReading decompose_forces(const ContactState& c, double disp_u,
                                     double disp_v, double friction,
                                     const TactileParams& params = {}) {
  ForceReading f;
  f.normal = params.k_n * effective_depth(c);
  if (f.normal <= 0.0) return f;

  double su = params.k_t * disp_u;
  double sv = params.k_t * disp_v;
  const double mag = std::hypot(su, sv);
  const double cone = friction * f.normal;
  if (mag > cone && mag > 0.0) {
    su *= cone / mag;
    sv *= cone / mag;
  }
  f.shear_u = su;
  f.shear_v = sv;

  // Pressure centroid in the pad plane.
  double wsum = 0.0, cu = 0.0, cv = 0.0;
  for (int r = 0; r < c.rows; ++r) {
    for (int col = 0; col < c.cols; ++col) {
      const double w = c.at(r, col);
      wsum += w;
      cu += w * c.u_of(r);
      cv += w * c.v_of(col);
    }
  }
  if (wsum > 0.0) {
    cu /= wsum;
    cv /= wsum;
    f.torque = cu * f.shear_v - cv * f.shear_u;  // (r x F) . z
  }
  return f;
}

// Dense sensing surface before downsampling: a half-pitch lattice over the
// cell centers. Even lattice positions are the cell centers at their exact
// depths; odd positions interpolate the neighboring centers. An 8x6 grid
// yields a 15x11 = 165 point surface. Points sit at (u, v, -d) in the pad
// frame, so deeper contact only pushes them further along -z.
inline PointCloud tactile_surface(const ContactState& c,
                                  std::vector<std::size_t>* center_indices = nullptr) {
  PointCloud out;
  out.frame = "pad";
  const int li = 2 * c.rows - 1, lj = 2 * c.cols - 1;
  out.points.reserve(static_cast<std::size_t>(li * lj));
  const PointLabel label =
      c.pad == PadSide::kLeft ? PointLabel::kTactileLeft : PointLabel::kTactileRight;
  auto depth_at = [&](int i, int j) {
    const int r = i / 2, col = j / 2;
    if (i % 2 == 0 && j % 2 == 0) return c.at(r, col);
    if (i % 2 == 1 && j % 2 == 0) return 0.5 * (c.at(r, col) + c.at(r + 1, col));
    if (i % 2 == 0 && j % 2 == 1) return 0.5 * (c.at(r, col) + c.at(r, col + 1));
    return 0.25 * (c.at(r, col) + c.at(r + 1, col) + c.at(r, col + 1) +
                   c.at(r + 1, col + 1));
  };
  for (int i = 0; i < li; ++i) {
    for (int j = 0; j < lj; ++j) {
      const double u = (0.5 + 0.5 * i) * c.cell_du - c.half_u();
      const double v = (0.5 + 0.5 * j) * c.cell_dv - c.half_v();
      if (center_indices && i % 2 == 0 && j % 2 == 0)
        center_indices->push_back(out.points.size());
      out.push(Vec3{u, v, -depth_at(i, j)}, label);
    }
  }
  return out;
}

// Greedy farthest-point continuation from an already-picked seed set.
inline std::vector<std::size_t> fps_indices_seeded(
    const std::vector<Vec3>& pts, std::size_t k,
    const std::vector<std::size_t>& seeds) {
  std::vector<std::size_t> picked = seeds;
  const std::size_t n = pts.size();
  if (picked.size() >= k || n == 0) {
    picked.resize(std::min(picked.size(), k));
    return picked;
  }
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  for (std::size_t s : seeds)
    for (std::size_t i = 0; i < n; ++i)
      dist[i] = std::min(dist[i], norm2(pts[i] - pts[s]));
  while (picked.size() < std::min(k, n)) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (dist[i] > best_d) {
        best_d = dist[i];
        best = i;
      }
    }
    picked.push_back(best);
    for (std::size_t i = 0; i < n; ++i)
      dist[i] = std::min(dist[i], norm2(pts[i] - pts[best]));
  }
  return picked;
}

// Tactile point cloud in world frame, exactly kTactilePoints points.
// Every cell center is always reported; farthest-point selection over the
// fixed (u, v) lattice fills the rest. Selection therefore never depends on
// penetration: growing contact moves points along -z only, it cannot swap
// which surface samples appear.
inline PointCloud tactile_cloud(const ContactState& c) {
  std::vector<std::size_t> centers;
  PointCloud surface = tactile_surface(c, &centers);
  PointCloud picked;
  picked.frame = surface.frame;
  if (surface.points.size() <= kTactilePoints) {
    picked = surface;
    while (picked.points.size() < kTactilePoints && !picked.points.empty())
      picked.push(picked.points.back(), picked.labels.back());
  } else {
    std::vector<Vec3> planar(surface.points.size());
    for (std::size_t i = 0; i < surface.points.size(); ++i)
      planar[i] = Vec3{surface.points[i].x, surface.points[i].y, 0.0};
    const std::vector<std::size_t> idx =
        fps_indices_seeded(planar, kTactilePoints, centers);
    for (std::size_t i : idx) picked.push(surface.points[i], surface.labels[i]);
  }
  PointCloud world = transform_cloud(picked, c.pad_pose);
  world.frame = "world";
  return world;
}

// Mean over both pads of the total force magnitude, restricted to timesteps
// where at least one pad reports positive normal force. 0 when never in
// contact.
inline double average_contact_force(
    const std::vector<std::pair<ForceReading, ForceReading>>& readings) {
  double sum = 0.0;
  std::size_t steps = 0;
  for (const auto& [left, right] : readings) {
    if (left.normal > 0.0 || right.normal > 0.0) {
      sum += 0.5 * (left.total_magnitude() + right.total_magnitude());
      ++steps;
    }
  }
  return steps == 0 ? 0.0 : sum / static_cast<double>(steps);
}

}  // namespace gentle::tactile

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gentle/errors.hpp"
#include "gentle/geometry.hpp"
#include "gentle/pointcloud.hpp"
#include "gentle/rng.hpp"
#include "gentle/tactile.hpp"

namespace gentle::sim {

inline constexpr double kGravity = 9.81;

enum class ShapeKind { kBox, kCylinder, kSphere };

struct Shape {
  ShapeKind kind = ShapeKind::kBox;
  Vec3 half;            // box half extents
  double radius = 0.0;  // cylinder / sphere
  double half_height = 0.0;  // cylinder, axis along body z

  static Shape box(const Vec3& he) { return {ShapeKind::kBox, he, 0, 0}; }
  static Shape cylinder(double r, double hh) { return {ShapeKind::kCylinder, {}, r, hh}; }
  static Shape sphere(double r) { return {ShapeKind::kSphere, {}, r, 0}; }

  // Vertical extent in body frame assuming an upright pose.
  double upright_half_z() const {
    switch (kind) {
      case ShapeKind::kBox: return half.z;
      case ShapeKind::kCylinder: return half_height;
      case ShapeKind::kSphere: return radius;
    }
    return 0.0;
  }
  double bounding_radius() const {
    switch (kind) {
      case ShapeKind::kBox: return norm(half);
      case ShapeKind::kCylinder: return std::hypot(radius, half_height);
      case ShapeKind::kSphere: return radius;
    }
    return 0.0;
  }
  double surface_area() const {
    switch (kind) {
      case ShapeKind::kBox:
        return 8.0 * (half.x * half.y + half.y * half.z + half.x * half.z);
      case ShapeKind::kCylinder:
        return 2.0 * 3.14159265358979323846 * radius *
               (2.0 * half_height + radius);
      case ShapeKind::kSphere:
        return 4.0 * 3.14159265358979323846 * radius * radius;
    }
    return 0.0;
  }
};

enum class BodyKind { kFree, kFixed, kArticulated };
enum class JointType { kPrismatic, kRevolute };

struct Joint {
  JointType type = JointType::kPrismatic;
  Vec3 axis{0, 1, 0};   // in base frame
  Vec3 anchor{};        // revolute: hinge point in base frame
  double lo = 0.0;
  double hi = 0.0;
  double pos = 0.0;
  double resistance = 0.6;  // N opposing motion through an attached handle
};

struct Body {
  std::string id;
  Shape shape;
  Pose pose;        // current world pose
  Pose base_pose;   // pose at joint position 0 / weld parent frame anchor
  double mass = 0.1;
  double friction = 0.6;
  BodyKind kind = BodyKind::kFree;
  Joint joint;                 // used when kind == kArticulated
  std::string welded_to;       // pose follows parent when set
  Pose weld_offset;
  bool graspable = false;
  bool visual = true;
  // Containers hold loose bodies; interior box is in the body frame.
  bool is_container = false;
  Aabb interior;
  // Ball-in-cup style containment.
  std::string contained_by;
  Vec3 contain_offset;
  // Randomization bookkeeping.
  bool randomized = false;
  Pose nominal_pose;
  double nominal_mass = 0.1;
  double nominal_friction = 0.6;
};

// 7-dim relative command in the TCP frame.
struct Action {
  double dx = 0, dy = 0, dz = 0;   // m
  double rx = 0, ry = 0, rz = 0;   // rad
  double grip = 0;                 // m, gripper width delta

  double operator[](int i) const {
    switch (i) {
      case 0: return dx; case 1: return dy; case 2: return dz;
      case 3: return rx; case 4: return ry; case 5: return rz;
      default: return grip;
    }
  }
  double& operator[](int i) {
    switch (i) {
      case 0: return dx; case 1: return dy; case 2: return dz;
      case 3: return rx; case 4: return ry; case 5: return rz;
      default: return grip;
    }
  }
  static constexpr int kDim = 7;
  bool finite() const {
    for (int i = 0; i < kDim; ++i)
      if (!std::isfinite((*this)[i])) return false;
    return true;
  }
};

struct GripperGeom {
  double w_max = 0.08;
  double pad_half_u = 0.012;   // along TCP y
  double pad_half_v = 0.009;   // along TCP z
  double pad_thickness = 0.004;
  int grid_rows = 8;  // cells along u
  int grid_cols = 6;  // cells along v
};

struct RobotState {
  Pose tcp;
  double gripper_width = 0.08;
  std::optional<std::string> attached_body;
};

struct WorldConfig {
  double dt = 1.0 / 28.0;
  double max_step_translation = 0.01;  // m per component per step
  double max_step_rotation = 0.05;     // rad per component per step
  double max_step_gripper = 0.005;     // m per step
  double contact_kn = 1000.0;          // N/m
  double contact_kt = 500.0;           // N/m
  double attach_threshold = 0.2;       // N per pad
  double release_margin = 0.002;       // m beyond grasped extent
  double pos_jitter_xy = 0.02;         // randomization half-ranges
  double yaw_jitter = 0.3;
  double mass_lo = 0.03, mass_hi = 0.05;
  double friction_lo = 0.4, friction_hi = 0.8;
  std::uint64_t seed = 0;
  GripperGeom gripper;
  Aabb workspace{{-0.35, -0.35, 0.012}, {0.35, 0.35, 0.45}};
  std::size_t visual_points = 256;
  std::size_t raw_surface_points = 1024;

  void validate() const {
    if (dt <= 0) throw config_error("dt must be positive");
    if (contact_kn <= 0 || contact_kt <= 0)
      throw config_error("contact stiffnesses must be positive");
    if (max_step_translation <= 0 || max_step_rotation <= 0 ||
        max_step_gripper <= 0)
      throw config_error("per-step action bounds must be positive");
    if (mass_lo > mass_hi || friction_lo > friction_hi)
      throw config_error("randomization ranges must be well ordered");
    if (mass_lo <= 0) throw config_error("mass must stay positive");
    if (friction_lo < 0) throw config_error("friction must be non-negative");
    if (pos_jitter_xy < 0 || yaw_jitter < 0)
      throw config_error("jitter ranges must be non-negative");
  }
};

enum class Task { kObjectStack, kOpenPlace, kCabinetPlace, kPourBall };

inline const char* task_name(Task t) {
  switch (t) {
    case Task::kObjectStack: return "OS";
    case Task::kOpenPlace: return "OP";
    case Task::kCabinetPlace: return "CP";
    case Task::kPourBall: return "PB";
  }
  return "?";
}

inline Task task_from_name(const std::string& s) {
  if (s == "OS") return Task::kObjectStack;
  if (s == "OP") return Task::kOpenPlace;
  if (s == "CP") return Task::kCabinetPlace;
  if (s == "PB") return Task::kPourBall;
  throw config_error("unknown task: " + s);
}

struct StepResult {
  RobotState robot;
  std::vector<Body> bodies;
  tactile::ContactState contact_left, contact_right;
  tactile::ForceReading force_left, force_right;
  bool success = false;
  std::map<std::string, double> info;
};

struct Observation {
  RobotState robot;
  std::map<std::string, Pose> body_poses;
  PointCloud visual;
  tactile::ContactState contact_left, contact_right;
  PointCloud tactile_left, tactile_right;
  tactile::ForceReading force_left, force_right;
};

namespace detail {

// Line (o + t*d, d unit) vs shape in the shape's local frame.
// Returns the [t0, t1] overlap interval when the line hits the shape.
inline bool line_box(const Vec3& o, const Vec3& d, const Vec3& he, double& t0,
                     double& t1) {
  t0 = -1e30;
  t1 = 1e30;
  for (int i = 0; i < 3; ++i) {
    const double oi = o[i], di = d[i], hi = he[i];
    if (std::abs(di) < 1e-12) {
      if (oi < -hi || oi > hi) return false;
      continue;
    }
    double a = (-hi - oi) / di;
    double b = (hi - oi) / di;
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return false;
  }
  return true;
}

inline bool line_sphere(const Vec3& o, const Vec3& d, double r, double& t0,
                        double& t1) {
  const double b = dot(o, d);
  const double c = dot(o, o) - r * r;
  const double disc = b * b - c;
  if (disc < 0.0) return false;
  const double s = std::sqrt(disc);
  t0 = -b - s;
  t1 = -b + s;
  return true;
}

inline bool line_cylinder(const Vec3& o, const Vec3& d, double r, double hh,
                          double& t0, double& t1) {
  // Lateral surface.
  const double a = d.x * d.x + d.y * d.y;
  double lat0 = -1e30, lat1 = 1e30;
  if (a < 1e-14) {
    if (o.x * o.x + o.y * o.y > r * r) return false;
  } else {
    const double b = o.x * d.x + o.y * d.y;
    const double c = o.x * o.x + o.y * o.y - r * r;
    const double disc = b * b - a * c;
    if (disc < 0.0) return false;
    const double s = std::sqrt(disc);
    lat0 = (-b - s) / a;
    lat1 = (-b + s) / a;
  }
  // Cap slab.
  double z0 = -1e30, z1 = 1e30;
  if (std::abs(d.z) < 1e-12) {
    if (o.z < -hh || o.z > hh) return false;
  } else {
    z0 = (-hh - o.z) / d.z;
    z1 = (hh - o.z) / d.z;
    if (z0 > z1) std::swap(z0, z1);
  }
  t0 = std::max(lat0, z0);
  t1 = std::min(lat1, z1);
  return t0 <= t1;
}

inline bool line_shape(const Shape& s, const Vec3& o, const Vec3& d, double& t0,
                       double& t1) {
  switch (s.kind) {
    case ShapeKind::kBox: return line_box(o, d, s.half, t0, t1);
    case ShapeKind::kSphere: return line_sphere(o, d, s.radius, t0, t1);
    case ShapeKind::kCylinder:
      return line_cylinder(o, d, s.radius, s.half_height, t0, t1);
  }
  return false;
}

}  // namespace detail

class World;
using SuccessFn = bool (*)(const World&);

struct SceneSpec {
  Task task = Task::kObjectStack;
  SuccessFn success = nullptr;
  std::vector<std::string> relevant_bodies;  // cropped into the visual cloud
  std::string primary_object;                // the manipulated loose body
  bool pour_rule = false;
  std::string pour_cup, pour_ball, pour_bowl;
  double pour_tilt = 1.0471975511965976;  // 60 deg
};

// Deterministic quasi-static manipulation world. Free bodies move only
// through grasping or the drop rule; articulated fixtures move when pulled
// through an attached handle; gravity appears as support snapping plus the
// friction limit on lifting.
class World {
 public:
  World(WorldConfig cfg, SceneSpec scene) : cfg_(cfg), scene_(scene) {
    cfg_.validate();
  }

  const WorldConfig& config() const { return cfg_; }
  const SceneSpec& scene() const { return scene_; }
  Task task() const { return scene_.task; }
  std::uint64_t episode_seed() const { return episode_seed_; }

  std::vector<Body>& bodies() { return bodies_; }
  const std::vector<Body>& bodies() const { return bodies_; }

  Body& body(const std::string& id) {
    for (Body& b : bodies_)
      if (b.id == id) return b;
    throw config_error("no body named " + id);
  }
  const Body& body(const std::string& id) const {
    return const_cast<World*>(this)->body(id);
  }
  bool has_body(const std::string& id) const {
    for (const Body& b : bodies_)
      if (b.id == id) return true;
    return false;
  }

  RobotState& robot() { return robot_; }
  const RobotState& robot() const { return robot_; }

  bool terminated() const { return terminated_; }
  bool success() const { return success_latched_; }
  int step_count() const { return step_count_; }
  double time() const { return step_count_ * cfg_.dt; }

  double initial_height(const std::string& id) const {
    auto it = initial_heights_.find(id);
    return it == initial_heights_.end() ? 0.0 : it->second;
  }

  // Lift of a body relative to its episode-start height.
  double height_gain(const std::string& id) const {
    return body(id).pose.position.z - initial_height(id);
  }

  const tactile::ContactState& contact(tactile::PadSide side) const {
    return side == tactile::PadSide::kLeft ? contact_left_ : contact_right_;
  }
  const tactile::ForceReading& force(tactile::PadSide side) const {
    return side == tactile::PadSide::kLeft ? force_left_ : force_right_;
  }
  double max_pad_force() const {
    return std::max(force_left_.total_magnitude(), force_right_.total_magnitude());
  }

  void set_initial_robot(const Pose& tcp, double width) {
    robot_.tcp = tcp;
    robot_.gripper_width = width;
    start_tcp_ = tcp;
    start_width_ = width;
  }

  // Finishes construction: derives articulated/welded poses, records
  // initial heights, computes the rest contact state.
  void finalize(std::uint64_t episode_seed) {
    episode_seed_ = episode_seed;
    update_derived_poses();
    initial_heights_.clear();
    for (const Body& b : bodies_) initial_heights_[b.id] = b.pose.position.z;
    update_contacts();
  }

  void reset_flags() {
    success_latched_ = false;
    terminated_ = false;
    step_count_ = 0;
    robot_.attached_body.reset();
    robot_.tcp = start_tcp_;
    robot_.gripper_width = start_width_;
  }

  Action clamp_action(const Action& a) const {
    Action c;
    const double mt = cfg_.max_step_translation;
    const double mr = cfg_.max_step_rotation;
    const double mg = cfg_.max_step_gripper;
    c.dx = std::clamp(a.dx, -mt, mt);
    c.dy = std::clamp(a.dy, -mt, mt);
    c.dz = std::clamp(a.dz, -mt, mt);
    c.rx = std::clamp(a.rx, -mr, mr);
    c.ry = std::clamp(a.ry, -mr, mr);
    c.rz = std::clamp(a.rz, -mr, mr);
    c.grip = std::clamp(a.grip, -mg, mg);
    return c;
  }

  StepResult step(const Action& raw) {
    if (terminated_) throw episode_finished();
    if (!raw.finite()) throw config_error("action must be finite");
    const Action a = clamp_action(raw);

    // Integrate the TCP in its own frame.
    Pose& tcp = robot_.tcp;
    Vec3 delta = rotate(tcp.orientation, Vec3{a.dx, a.dy, a.dz});
    Vec3 new_pos = tcp.position + delta;
    new_pos.x = std::clamp(new_pos.x, cfg_.workspace.min.x, cfg_.workspace.max.x);
    new_pos.y = std::clamp(new_pos.y, cfg_.workspace.min.y, cfg_.workspace.max.y);
    new_pos.z = std::clamp(new_pos.z, cfg_.workspace.min.z, cfg_.workspace.max.z);
    const Vec3 applied_delta = new_pos - tcp.position;
    tcp.position = new_pos;
    Quat dq = quat_from_axis_angle({1, 0, 0}, a.rx) *
              quat_from_axis_angle({0, 1, 0}, a.ry) *
              quat_from_axis_angle({0, 0, 1}, a.rz);
    tcp.orientation = normalized(tcp.orientation * dq);
    robot_.gripper_width =
        std::clamp(robot_.gripper_width + a.grip, 0.0, cfg_.gripper.w_max);

    propagate_attachment(applied_delta, dq);
    update_derived_poses();
    apply_drop_rule();
    update_contacts();
    update_attachment();
    if (scene_.pour_rule) apply_pour_rule();

    if (scene_.success && !success_latched_ && scene_.success(*this)) {
      success_latched_ = true;
      terminated_ = true;
    }
    ++step_count_;
    return make_result();
  }

  StepResult make_result() const {
    StepResult r;
    r.robot = robot_;
    r.bodies = bodies_;
    r.contact_left = contact_left_;
    r.contact_right = contact_right_;
    r.force_left = force_left_;
    r.force_right = force_right_;
    r.success = success_latched_;
    r.info["time"] = time();
    r.info["peak_pad_force"] = max_pad_force();
    r.info["force_left"] = force_left_.total_magnitude();
    r.info["force_right"] = force_right_.total_magnitude();
    for (const Body& b : bodies_)
      if (b.kind == BodyKind::kArticulated)
        r.info["joint_" + b.id] = b.joint.pos;
    return r;
  }

  // Full observation with point clouds; pure for a fixed step count.
  Observation observe() const {
    Observation obs;
    obs.robot = robot_;
    for (const Body& b : bodies_) obs.body_poses[b.id] = b.pose;
    obs.contact_left = contact_left_;
    obs.contact_right = contact_right_;
    obs.force_left = force_left_;
    obs.force_right = force_right_;
    obs.tactile_left = tactile::tactile_cloud(contact_left_);
    obs.tactile_right = tactile::tactile_cloud(contact_right_);
    obs.visual = visual_cloud();
    return obs;
  }

  Pose pad_pose(tactile::PadSide side) const {
    const double w = robot_.gripper_width;
    if (side == tactile::PadSide::kLeft) {
      // Pad frame: u -> tcp y, v -> tcp z, outward normal z -> tcp +x.
      const Quat q{0.5, 0.5, 0.5, 0.5};
      return compose(robot_.tcp, Pose{Vec3{-0.5 * w, 0, 0}, q});
    }
    // Right pad: u -> -tcp y, v -> tcp z, outward normal z -> tcp -x.
    const Quat q{0.5, -0.5, 0.5, -0.5};
    return compose(robot_.tcp, Pose{Vec3{0.5 * w, 0, 0}, q});
  }

  // Support height under a body center: table, fixture tops, container
  // interiors. Used by the drop rule.
  double support_height(const Body& moving) const {
    const Vec3 p = moving.pose.position;
    double best = 0.0;  // table
    for (const Body& s : bodies_) {
      if (s.id == moving.id) continue;
      if (s.kind == BodyKind::kFree && s.id != moving.id &&
          s.contained_by.empty() && !s.is_container)
        continue;  // loose bodies do not stack on each other here
      if (s.is_container) {
        const Vec3 local = inverse(s.pose).apply(p);
        if (local.x >= s.interior.min.x && local.x <= s.interior.max.x &&
            local.y >= s.interior.min.y && local.y <= s.interior.max.y) {
          const double interior_bottom =
              s.pose.apply(Vec3{local.x, local.y, s.interior.min.z}).z;
          const double rim = s.pose.position.z + s.shape.upright_half_z();
          if (p.z < rim + 0.04) best = std::max(best, interior_bottom);
          continue;
        }
      }
      if (s.kind == BodyKind::kFixed || s.kind == BodyKind::kArticulated) {
        const double top = s.pose.position.z + s.shape.upright_half_z();
        const double rx = s.shape.kind == ShapeKind::kBox ? s.shape.half.x
                                                          : s.shape.radius;
        const double ry = s.shape.kind == ShapeKind::kBox ? s.shape.half.y
                                                          : s.shape.radius;
        if (std::abs(p.x - s.pose.position.x) <= rx &&
            std::abs(p.y - s.pose.position.y) <= ry &&
            p.z + 1e-9 >= top - 1e-4) {
          best = std::max(best, top);
        }
      }
    }
    return best;
  }

  PointCloud visual_cloud() const {
    Rng rng = Rng::substream(episode_seed_ ^ 0x76697375616cULL,
                             static_cast<std::uint64_t>(step_count_));
    return visual_cloud_with(rng);
  }

 private:
  friend struct WorldAccess;

  void propagate_attachment(const Vec3& applied_delta, const Quat& dq) {
    if (!robot_.attached_body) return;
    Body& b = body(*robot_.attached_body);
    if (b.kind == BodyKind::kFree) {
      Pose proposed = compose(robot_.tcp, grasp_offset_);
      // Friction limit on lifting: a grasp that cannot carry the weight
      // slides instead of raising the body.
      const double capacity =
          b.friction * (force_left_.normal + force_right_.normal);
      const double needed = b.mass * kGravity;
      if (capacity + 1e-12 < needed) {
        const double old_z = b.pose.position.z;
        if (proposed.position.z > old_z) {
          slip_accum_ += proposed.position.z - old_z;
          proposed.position.z = old_z;
          // Keep the stored offset consistent with the slipped pose.
          grasp_offset_ = compose(inverse(robot_.tcp), proposed);
          if (slip_accum_ > 2.0 * cfg_.gripper.pad_half_v) {
            release();
            return;
          }
        }
      }
      b.pose = proposed;
    } else {
      // Handle on an articulated fixture (directly or through a weld):
      // project the commanded translation onto the joint tangent.
      Body* fixture = &b;
      if (!b.welded_to.empty()) fixture = &body(b.welded_to);
      if (fixture->kind != BodyKind::kArticulated) return;
      Joint& j = fixture->joint;
      double dpos = 0.0;
      if (j.type == JointType::kPrismatic) {
        const Vec3 axis_w = rotate(fixture->base_pose.orientation, j.axis);
        dpos = dot(applied_delta, axis_w);
      } else {
        const Vec3 axis_w = rotate(fixture->base_pose.orientation, j.axis);
        const Vec3 anchor_w = fixture->base_pose.apply(j.anchor);
        const Vec3 r = b.pose.position - anchor_w;
        const Vec3 r_perp = r - axis_w * dot(r, axis_w);
        const double arm = norm(r_perp);
        if (arm > 1e-6) {
          const Vec3 tangent = cross(axis_w, r_perp) / arm;
          dpos = dot(applied_delta, tangent) / arm;
        }
      }
      // Pulling through the handle needs enough grip to beat the joint
      // resistance, otherwise the handle slides between the pads.
      const double capacity =
          b.friction * (force_left_.normal + force_right_.normal);
      if (capacity < j.resistance) dpos = 0.0;
      j.pos = std::clamp(j.pos + dpos, j.lo, j.hi);
      (void)dq;
    }
  }

  void update_derived_poses() {
    for (Body& b : bodies_) {
      if (b.kind == BodyKind::kArticulated) {
        const Joint& j = b.joint;
        if (j.type == JointType::kPrismatic) {
          b.pose.position =
              b.base_pose.position + rotate(b.base_pose.orientation, j.axis * j.pos);
          b.pose.orientation = b.base_pose.orientation;
        } else {
          const Quat r = quat_from_axis_angle(j.axis, j.pos);
          Pose local;
          local.position = j.anchor - rotate(r, j.anchor);
          local.orientation = r;
          b.pose = compose(b.base_pose, local);
        }
      }
    }
    for (Body& b : bodies_) {
      if (!b.welded_to.empty()) b.pose = compose(body(b.welded_to).pose, b.weld_offset);
    }
    for (Body& b : bodies_) {
      if (!b.contained_by.empty())
        b.pose = Pose{body(b.contained_by).pose.apply(b.contain_offset), Quat{}};
    }
    // The gripper stays glued to an attached fixture handle.
    if (robot_.attached_body) {
      const Body& b = body(*robot_.attached_body);
      if (b.kind != BodyKind::kFree)
        robot_.tcp = compose(b.pose, inverse(grasp_offset_));
    }
  }

  void apply_drop_rule() {
    for (Body& b : bodies_) {
      if (b.kind != BodyKind::kFree || !b.contained_by.empty()) continue;
      if (robot_.attached_body && *robot_.attached_body == b.id) continue;
      const double support = support_height(b);
      const double bottom = b.pose.position.z - b.shape.upright_half_z();
      if (std::abs(bottom - support) > 1e-12)
        b.pose.position.z = support + b.shape.upright_half_z();
    }
  }

  void update_contacts() {
    contact_left_ = pad_contact(tactile::PadSide::kLeft);
    contact_right_ = pad_contact(tactile::PadSide::kRight);
    force_left_ = pad_force(contact_left_, dominant_left_);
    force_right_ = pad_force(contact_right_, dominant_right_);
  }

  tactile::ContactState pad_contact(tactile::PadSide side) {
    const GripperGeom& g = cfg_.gripper;
    tactile::ContactState c(side, g.grid_rows, g.grid_cols,
                            2.0 * g.pad_half_u / g.grid_rows,
                            2.0 * g.pad_half_v / g.grid_cols);
    c.pad_pose = pad_pose(side);
    std::string& dominant =
        side == tactile::PadSide::kLeft ? dominant_left_ : dominant_right_;
    dominant.clear();
    double best_depth = 0.0;
    const Pose inv_pad = inverse(c.pad_pose);
    for (const Body& b : bodies_) {
      if (!b.graspable) continue;
      // Quick reject on distance.
      const double reach = b.shape.bounding_radius() + 0.05;
      if (norm(b.pose.position - c.pad_pose.position) > reach) continue;
      const Pose body_in_pad = compose(inv_pad, b.pose);
      const Pose pad_in_body = inverse(body_in_pad);
      double body_sum = 0.0;
      std::vector<double> depths(c.penetration.size(), 0.0);
      for (int r = 0; r < c.rows; ++r) {
        for (int col = 0; col < c.cols; ++col) {
          const Vec3 o = pad_in_body.apply(Vec3{c.u_of(r), c.v_of(col), 0.0});
          const Vec3 d = rotate(pad_in_body.orientation, Vec3{0, 0, 1});
          double t0, t1;
          if (!detail::line_shape(b.shape, o, d, t0, t1)) continue;
          // Body crossing below the face plane (t0 < 0) penetrates the gel.
          if (t1 < t0 || t0 >= 0.0) continue;
          const double depth =
              std::min(-t0, 2.0 * cfg_.gripper.pad_thickness);
          depths[static_cast<std::size_t>(r * c.cols + col)] = depth;
          body_sum += depth;
        }
      }
      if (body_sum > best_depth) {
        best_depth = body_sum;
        dominant = b.id;
        c.penetration = depths;
      }
    }
    return c;
  }

  tactile::ForceReading pad_force(const tactile::ContactState& c,
                                  const std::string& dominant) {
    tactile::TactileParams params{cfg_.contact_kn, cfg_.contact_kt};
    double disp_u = 0.0, disp_v = 0.0;
    double friction = 0.6;
    if (!dominant.empty()) {
      const Body& b = body(dominant);
      friction = b.friction;
      if (robot_.attached_body && *robot_.attached_body == dominant) {
        Vec3 load;  // force the body exerts tangentially on the pads
        if (b.kind == BodyKind::kFree) {
          load = Vec3{0, 0, -b.mass * kGravity * 0.5};
        } else {
          const Body* fixture = &b;
          if (!b.welded_to.empty()) fixture = &body(b.welded_to);
          if (fixture->kind == BodyKind::kArticulated) {
            const Vec3 axis_w =
                rotate(fixture->base_pose.orientation, fixture->joint.axis);
            load = axis_w * (-0.5 * fixture->joint.resistance);
          }
        }
        const Quat inv = conjugate(c.pad_pose.orientation);
        const Vec3 local = rotate(inv, load);
        disp_u = local.x / cfg_.contact_kt;
        disp_v = local.y / cfg_.contact_kt;
      }
    }
    return tactile::decompose_forces(c, disp_u, disp_v, friction, params);
  }

  void update_attachment() {
    if (robot_.attached_body) {
      const Body& b = body(*robot_.attached_body);
      const bool both_in_contact =
          dominant_left_ == b.id && dominant_right_ == b.id &&
          force_left_.normal > 0.0 && force_right_.normal > 0.0;
      if (robot_.gripper_width >= release_width_ || !both_in_contact) release();
      return;
    }
    if (dominant_left_.empty() || dominant_left_ != dominant_right_) return;
    if (force_left_.normal < cfg_.attach_threshold ||
        force_right_.normal < cfg_.attach_threshold)
      return;
    const Body& b = body(dominant_left_);
    robot_.attached_body = b.id;
    grasp_offset_ = compose(inverse(robot_.tcp), b.pose);
    const double extent = robot_.gripper_width +
                          tactile::effective_depth(contact_left_) +
                          tactile::effective_depth(contact_right_);
    release_width_ = std::min(extent + cfg_.release_margin, cfg_.gripper.w_max);
    slip_accum_ = 0.0;
  }

  void release() {
    robot_.attached_body.reset();
    slip_accum_ = 0.0;
    // Dropped bodies settle immediately.
    apply_drop_rule();
  }

  void apply_pour_rule() {
    if (!has_body(scene_.pour_ball)) return;
    Body& ball = body(scene_.pour_ball);
    if (ball.contained_by != scene_.pour_cup) return;
    const Body& cup = body(scene_.pour_cup);
    const Body& bowl = body(scene_.pour_bowl);
    const Vec3 up = rotate(cup.pose.orientation, Vec3{0, 0, 1});
    const double tilt = std::acos(std::clamp(up.z, -1.0, 1.0));
    if (tilt <= scene_.pour_tilt) return;
    const Vec3 mouth = cup.pose.apply(Vec3{0, 0, cup.shape.half_height});
    const double bowl_top = bowl.pose.position.z + bowl.shape.upright_half_z();
    const bool over_bowl =
        std::hypot(mouth.x - bowl.pose.position.x,
                   mouth.y - bowl.pose.position.y) <= bowl.shape.radius &&
        mouth.z > bowl_top - 0.01;
    ball.contained_by.clear();
    if (over_bowl) {
      const double bottom = bowl.pose.apply(Vec3{0, 0, bowl.interior.min.z}).z;
      ball.pose = Pose{Vec3{bowl.pose.position.x, bowl.pose.position.y,
                            bottom + ball.shape.radius},
                       Quat{}};
    } else {
      ball.pose = Pose{Vec3{mouth.x, mouth.y, 0.0}, Quat{}};
      ball.pose.position.z = support_height(ball) + ball.shape.radius;
    }
  }

  PointCloud visual_cloud_with(Rng& rng) const;

  WorldConfig cfg_;
  SceneSpec scene_;
  std::vector<Body> bodies_;
  RobotState robot_;
  Pose start_tcp_;
  double start_width_ = 0.08;
  Pose grasp_offset_;
  double release_width_ = 1.0;
  double slip_accum_ = 0.0;
  std::string dominant_left_, dominant_right_;
  tactile::ContactState contact_left_, contact_right_;
  tactile::ForceReading force_left_, force_right_;
  std::map<std::string, double> initial_heights_;
  bool success_latched_ = false;
  bool terminated_ = false;
  int step_count_ = 0;
  std::uint64_t episode_seed_ = 0;
};

namespace detail {

inline Vec3 sample_on_shape(const Shape& s, Rng& rng) {
  switch (s.kind) {
    case ShapeKind::kBox: {
      const Vec3& h = s.half;
      const double ax = h.y * h.z, ay = h.x * h.z, az = h.x * h.y;
      const double total = 2.0 * (ax + ay + az);
      double pick = rng.uniform(0.0, total);
      const double u = rng.uniform(-1.0, 1.0), v = rng.uniform(-1.0, 1.0);
      if (pick < 2.0 * ax) {
        const double sign = pick < ax ? 1.0 : -1.0;
        return {sign * h.x, u * h.y, v * h.z};
      }
      pick -= 2.0 * ax;
      if (pick < 2.0 * ay) {
        const double sign = pick < ay ? 1.0 : -1.0;
        return {u * h.x, sign * h.y, v * h.z};
      }
      pick -= 2.0 * ay;
      const double sign = pick < az ? 1.0 : -1.0;
      return {u * h.x, v * h.y, sign * h.z};
    }
    case ShapeKind::kSphere: {
      const double z = rng.uniform(-1.0, 1.0);
      const double phi = rng.uniform(0.0, 6.283185307179586);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      return Vec3{r * std::cos(phi), r * std::sin(phi), z} * s.radius;
    }
    case ShapeKind::kCylinder: {
      const double pi = 3.14159265358979323846;
      const double lateral = 2.0 * pi * s.radius * 2.0 * s.half_height;
      const double caps = 2.0 * pi * s.radius * s.radius;
      if (rng.uniform(0.0, lateral + caps) < lateral) {
        const double phi = rng.uniform(0.0, 2.0 * pi);
        return {s.radius * std::cos(phi), s.radius * std::sin(phi),
                rng.uniform(-s.half_height, s.half_height)};
      }
      const double phi = rng.uniform(0.0, 2.0 * pi);
      const double r = s.radius * std::sqrt(rng.uniform01());
      const double z = rng.uniform01() < 0.5 ? s.half_height : -s.half_height;
      return {r * std::cos(phi), r * std::sin(phi), z};
    }
  }
  return {};
}

}  // namespace detail

inline PointCloud World::visual_cloud_with(Rng& rng) const {
  struct Part {
    Shape shape;
    Pose pose;
    PointLabel label;
  };
  std::vector<Part> parts;
  const GripperGeom& g = cfg_.gripper;
  const double w = robot_.gripper_width;
  // Finger pads and a palm bar make up the gripper silhouette.
  const Shape pad_shape =
      Shape::box({0.5 * g.pad_thickness, g.pad_half_u, g.pad_half_v});
  parts.push_back({pad_shape,
                   compose(robot_.tcp, Pose::from_translation(
                                           {-0.5 * w - 0.5 * g.pad_thickness, 0, 0})),
                   PointLabel::kGripper});
  parts.push_back({pad_shape,
                   compose(robot_.tcp, Pose::from_translation(
                                           {0.5 * w + 0.5 * g.pad_thickness, 0, 0})),
                   PointLabel::kGripper});
  parts.push_back({Shape::box({0.5 * g.w_max + g.pad_thickness, g.pad_half_u, 0.008}),
                   compose(robot_.tcp,
                           Pose::from_translation({0, 0, g.pad_half_v + 0.008})),
                   PointLabel::kGripper});
  for (const std::string& id : scene_.relevant_bodies) {
    const Body& b = body(id);
    if (!b.visual) continue;
    parts.push_back({b.shape, b.pose, PointLabel::kObject});
  }

  double total_area = 0.0;
  for (const Part& p : parts) total_area += p.shape.surface_area();
  PointCloud raw;
  raw.frame = "world";
  for (const Part& p : parts) {
    const double frac = total_area > 0 ? p.shape.surface_area() / total_area : 0.0;
    const std::size_t n = std::max<std::size_t>(
        32, static_cast<std::size_t>(frac * cfg_.raw_surface_points));
    for (std::size_t i = 0; i < n; ++i)
      raw.push(p.pose.apply(detail::sample_on_shape(p.shape, rng)), p.label);
  }

  // Retain only the gripper and the task-relevant bodies.
  std::vector<Aabb> keep;
  const Vec3 tp = robot_.tcp.position;
  const double gr = 0.5 * g.w_max + g.pad_thickness + 0.03;
  keep.push_back(Aabb{{tp.x - gr, tp.y - gr, tp.z - gr},
                      {tp.x + gr, tp.y + gr, tp.z + gr}});
  for (const std::string& id : scene_.relevant_bodies) {
    const Body& b = body(id);
    const double r = b.shape.bounding_radius() + 0.02;
    const Vec3 c = b.pose.position;
    keep.push_back(Aabb{{c.x - r, c.y - r, c.z - r}, {c.x + r, c.y + r, c.z + r}});
  }
  const PointCloud cropped = crop(raw, keep);
  return farthest_point_sample(cropped, cfg_.visual_points, rng.next_u64());
}

}  // namespace gentle::sim

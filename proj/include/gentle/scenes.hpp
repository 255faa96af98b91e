#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "gentle/sim.hpp"

namespace gentle::sim {

// Success predicates latch inside World::step once they first hold.
namespace predicates {

// Block resting on the platform top, centered within 1 cm, gripper released.
inline bool object_stack(const World& w) {
  const Body& block = w.body("block");
  const Body& platform = w.body("platform");
  if (w.robot().attached_body) return false;
  const double top = platform.pose.position.z + platform.shape.half.z;
  const double dx = block.pose.position.x - platform.pose.position.x;
  const double dy = block.pose.position.y - platform.pose.position.y;
  const double bottom = block.pose.position.z - block.shape.half.z;
  return std::hypot(dx, dy) <= 0.01 && std::abs(bottom - top) <= 0.005;
}

inline bool inside_container(const Body& item, const Body& container) {
  const Vec3 local = inverse(container.pose).apply(item.pose.position);
  return container.interior.contains(local);
}

inline bool open_place(const World& w) {
  const Body& lid = w.body("lid");
  const double travel = (lid.joint.pos - lid.joint.lo) / (lid.joint.hi - lid.joint.lo);
  if (travel < 0.8) return false;
  if (w.robot().attached_body && *w.robot().attached_body == "item") return false;
  return inside_container(w.body("item"), w.body("box_base"));
}

inline bool cabinet_place(const World& w) {
  const Body& drawer = w.body("drawer");
  const double travel =
      (drawer.joint.pos - drawer.joint.lo) / (drawer.joint.hi - drawer.joint.lo);
  if (travel < 0.8) return false;
  if (w.robot().attached_body && *w.robot().attached_body == "item") return false;
  return inside_container(w.body("item"), drawer);
}

inline bool pour_ball(const World& w) {
  const Body& ball = w.body("ball");
  if (ball.contained_by == "cup") return false;
  return inside_container(ball, w.body("bowl"));
}

}  // namespace predicates

namespace detail_scenes {

inline Body make_free(const std::string& id, const Shape& shape, const Pose& pose,
                      double mass, double friction) {
  Body b;
  b.id = id;
  b.shape = shape;
  b.pose = b.base_pose = b.nominal_pose = pose;
  b.mass = b.nominal_mass = mass;
  b.friction = b.nominal_friction = friction;
  b.kind = BodyKind::kFree;
  b.graspable = true;
  b.randomized = true;
  return b;
}

inline Body make_fixed(const std::string& id, const Shape& shape, const Pose& pose) {
  Body b;
  b.id = id;
  b.shape = shape;
  b.pose = b.base_pose = b.nominal_pose = pose;
  b.kind = BodyKind::kFixed;
  b.graspable = false;
  return b;
}

}  // namespace detail_scenes

// Re-samples pose, mass, and friction of the randomized bodies uniformly
// within the configured ranges. Zero-width ranges reproduce the nominals.
inline void randomize(World& w, std::uint64_t seed) {
  const WorldConfig& cfg = w.config();
  Rng rng = Rng::substream(seed, 0x72616e64ULL);
  for (Body& b : w.bodies()) {
    if (!b.randomized) continue;
    Pose p = b.nominal_pose;
    p.position.x += rng.uniform(-cfg.pos_jitter_xy, cfg.pos_jitter_xy);
    p.position.y += rng.uniform(-cfg.pos_jitter_xy, cfg.pos_jitter_xy);
    const double yaw = rng.uniform(-cfg.yaw_jitter, cfg.yaw_jitter);
    p.orientation = normalized(quat_from_axis_angle({0, 0, 1}, yaw) * p.orientation);
    b.pose = b.base_pose = p;
    b.mass = rng.uniform(cfg.mass_lo, cfg.mass_hi);
    b.friction = rng.uniform(cfg.friction_lo, cfg.friction_hi);
  }
  w.finalize(seed);
  w.reset_flags();
}

// Builds one of the four benchmark scenes at its nominal layout, then applies
// domain randomization from cfg.seed.
inline World build_scene(Task task, const WorldConfig& cfg) {
  using detail_scenes::make_fixed;
  using detail_scenes::make_free;
  cfg.validate();
  SceneSpec spec;
  spec.task = task;
  std::optional<World> out;

  switch (task) {
    case Task::kObjectStack: {
      spec.success = &predicates::object_stack;
      spec.relevant_bodies = {"block", "platform"};
      spec.primary_object = "block";
      out.emplace(cfg, spec);
      out->bodies().push_back(make_free(
          "block", Shape::box({0.02, 0.02, 0.02}),
          Pose::from_translation({-0.06, -0.08, 0.02}), 0.04, 0.6));
      out->bodies().push_back(make_fixed(
          "platform", Shape::box({0.045, 0.045, 0.03}),
          Pose::from_translation({0.10, 0.06, 0.03})));
      out->set_initial_robot(
          Pose::from_translation({-0.06, -0.08, 0.16}), cfg.gripper.w_max);
      break;
    }
    case Task::kOpenPlace: {
      spec.success = &predicates::open_place;
      spec.relevant_bodies = {"box_base", "lid", "lid_handle", "item"};
      spec.primary_object = "item";
      out.emplace(cfg, spec);
      Body base = make_fixed("box_base", Shape::box({0.05, 0.05, 0.03}),
                             Pose::from_translation({0.10, 0.10, 0.03}));
      base.is_container = true;
      base.interior = Aabb{{-0.04, -0.04, -0.025}, {0.04, 0.04, 0.05}};
      out->bodies().push_back(base);

      Body lid;
      lid.id = "lid";
      lid.shape = Shape::box({0.05, 0.05, 0.004});
      lid.base_pose = Pose::from_translation({0.10, 0.10, 0.064});
      lid.pose = lid.nominal_pose = lid.base_pose;
      lid.kind = BodyKind::kArticulated;
      lid.joint.type = JointType::kRevolute;
      lid.joint.axis = Vec3{-1, 0, 0};       // opening lifts the front edge
      lid.joint.anchor = Vec3{0, 0.05, -0.004};  // rear bottom edge
      lid.joint.lo = 0.0;
      lid.joint.hi = 1.9;
      lid.joint.resistance = 0.4;
      lid.graspable = false;
      out->bodies().push_back(lid);

      Body handle;
      handle.id = "lid_handle";
      handle.shape = Shape::box({0.008, 0.012, 0.008});
      handle.kind = BodyKind::kFixed;
      handle.welded_to = "lid";
      handle.weld_offset = Pose::from_translation({0, -0.046, 0.012});
      handle.graspable = true;
      handle.friction = handle.nominal_friction = 0.8;
      out->bodies().push_back(handle);

      out->bodies().push_back(make_free(
          "item", Shape::box({0.015, 0.015, 0.015}),
          Pose::from_translation({-0.08, -0.02, 0.015}), 0.03, 0.6));
      out->set_initial_robot(
          Pose::from_translation({0.10, 0.054, 0.14}), cfg.gripper.w_max);
      break;
    }
    case Task::kCabinetPlace: {
      spec.success = &predicates::cabinet_place;
      spec.relevant_bodies = {"drawer", "drawer_handle", "item"};
      spec.primary_object = "item";
      out.emplace(cfg, spec);
      out->bodies().push_back(make_fixed(
          "cabinet", Shape::box({0.07, 0.02, 0.06}),
          Pose::from_translation({0.12, 0.30, 0.06})));

      Body drawer;
      drawer.id = "drawer";
      drawer.shape = Shape::box({0.06, 0.08, 0.035});
      drawer.base_pose = Pose::from_translation({0.12, 0.19, 0.04});
      drawer.pose = drawer.nominal_pose = drawer.base_pose;
      drawer.kind = BodyKind::kArticulated;
      drawer.joint.type = JointType::kPrismatic;
      drawer.joint.axis = Vec3{0, -1, 0};  // slides out toward the robot
      drawer.joint.lo = 0.0;
      drawer.joint.hi = 0.12;
      drawer.joint.pos = 0.0;  // closed at reset
      drawer.joint.resistance = 0.6;
      drawer.is_container = true;
      drawer.interior = Aabb{{-0.05, -0.07, -0.025}, {0.05, 0.07, 0.06}};
      drawer.graspable = false;
      out->bodies().push_back(drawer);

      Body handle;
      handle.id = "drawer_handle";
      handle.shape = Shape::box({0.012, 0.008, 0.008});
      handle.kind = BodyKind::kFixed;
      handle.welded_to = "drawer";
      handle.weld_offset = Pose::from_translation({0, -0.088, 0.0});
      handle.graspable = true;
      handle.friction = handle.nominal_friction = 0.8;
      out->bodies().push_back(handle);

      out->bodies().push_back(make_free(
          "item", Shape::box({0.015, 0.015, 0.015}),
          Pose::from_translation({-0.10, 0.02, 0.015}), 0.03, 0.6));
      out->set_initial_robot(
          Pose::from_translation({0.12, 0.102, 0.12}), cfg.gripper.w_max);
      break;
    }
    case Task::kPourBall: {
      spec.success = &predicates::pour_ball;
      spec.relevant_bodies = {"cup", "ball", "bowl"};
      spec.primary_object = "cup";
      spec.pour_rule = true;
      spec.pour_cup = "cup";
      spec.pour_ball = "ball";
      spec.pour_bowl = "bowl";
      out.emplace(cfg, spec);
      Body cup = make_free("cup", Shape::cylinder(0.025, 0.045),
                           Pose::from_translation({-0.08, -0.05, 0.045}), 0.04,
                           0.7);
      cup.is_container = true;
      cup.interior = Aabb{{-0.02, -0.02, -0.04}, {0.02, 0.02, 0.045}};
      out->bodies().push_back(cup);

      Body ball;
      ball.id = "ball";
      ball.shape = Shape::sphere(0.012);
      ball.kind = BodyKind::kFree;
      ball.graspable = false;
      ball.mass = ball.nominal_mass = 0.005;
      ball.contained_by = "cup";
      ball.contain_offset = Vec3{0, 0, -0.03};
      out->bodies().push_back(ball);

      Body bowl = make_fixed("bowl", Shape::cylinder(0.055, 0.02),
                             Pose::from_translation({0.10, -0.02, 0.02}));
      bowl.is_container = true;
      bowl.interior = Aabb{{-0.045, -0.045, -0.015}, {0.045, 0.045, 0.05}};
      out->bodies().push_back(bowl);

      out->set_initial_robot(
          Pose::from_translation({-0.08, -0.05, 0.16}), cfg.gripper.w_max);
      break;
    }
  }

  World world = std::move(*out);
  world.finalize(cfg.seed);
  randomize(world, cfg.seed);
  return world;
}

}  // namespace gentle::sim

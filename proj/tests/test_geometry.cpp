#include <catch2/catch_amalgamated.hpp>

#include "gentle/geometry.hpp"
#include "gentle/rng.hpp"

using namespace gentle;

namespace {

Pose random_pose(Rng& rng) {
  Quat q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
  return Pose{Vec3{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)},
              normalized(q)};
}

double pose_distance(const Pose& a, const Pose& b) {
  const double dp = norm(a.position - b.position);
  const Quat dq = conjugate(a.orientation) * b.orientation;
  return dp + std::min(quat_angle(dq), quat_angle(Quat{-dq.w, -dq.x, -dq.y, -dq.z}));
}

}  // namespace

TEST_CASE("compose with identity returns the operand") {
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    const Pose p = random_pose(rng);
    REQUIRE(pose_distance(compose(Pose::identity(), p), p) < 1e-12);
    REQUIRE(pose_distance(compose(p, Pose::identity()), p) < 1e-12);
  }
}

TEST_CASE("compose with inverse yields identity") {
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    const Pose p = random_pose(rng);
    REQUIRE(pose_distance(compose(p, inverse(p)), Pose::identity()) < 1e-9);
    REQUIRE(pose_distance(compose(inverse(p), p), Pose::identity()) < 1e-9);
  }
}

TEST_CASE("pure translations add positions") {
  const Pose a = Pose::from_translation({1, 0, 0});
  const Pose b = Pose::from_translation({0, 2, 0});
  const Pose c = compose(a, b);
  REQUIRE(c.position.x == Catch::Approx(1.0));
  REQUIRE(c.position.y == Catch::Approx(2.0));
  REQUIRE(c.position.z == Catch::Approx(0.0));
}

TEST_CASE("compose is associative over random triples") {
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    const Pose a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
    REQUIRE(pose_distance(compose(compose(a, b), c), compose(a, compose(b, c))) <
            1e-9);
  }
}

TEST_CASE("composition keeps quaternions unit norm") {
  Rng rng(14);
  Pose acc = Pose::identity();
  for (int i = 0; i < 500; ++i) {
    acc = compose(acc, random_pose(rng));
    REQUIRE(std::abs(norm(acc.orientation) - 1.0) < 1e-9);
  }
}

TEST_CASE("quarter-turn rotation about z maps x to y") {
  const Quat q = quat_from_axis_angle({0, 0, 1}, 1.5707963267948966);
  const Vec3 v = rotate(q, {1, 0, 0});
  REQUIRE(std::abs(v.x) < 1e-9);
  REQUIRE(std::abs(v.y - 1.0) < 1e-9);
  REQUIRE(std::abs(v.z) < 1e-9);
}

TEST_CASE("aabb containment and inflation") {
  const Aabb box{{0, 0, 0}, {1, 1, 1}};
  REQUIRE(box.valid());
  REQUIRE(box.contains({0.5, 0.5, 0.5}));
  REQUIRE_FALSE(box.contains({1.5, 0.5, 0.5}));
  REQUIRE(box.inflated(0.6).contains({1.5, 0.5, 0.5}));
}

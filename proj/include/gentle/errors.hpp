#pragma once

#include <stdexcept>
#include <string>

namespace gentle {

// Error taxonomy shared across the library. Each failure class gets its own
// type so callers (and the CLI exit-code mapping) can dispatch on it.

struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct episode_finished : std::runtime_error {
  episode_finished() : std::runtime_error("episode already terminated") {}
};

struct unknown_skill : std::runtime_error {
  explicit unknown_skill(const std::string& name)
      : std::runtime_error("unknown skill: " + name) {}
};

struct shape_mismatch : std::runtime_error {
  explicit shape_mismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct io_error : std::runtime_error {
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct version_mismatch : std::runtime_error {
  explicit version_mismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct checksum_mismatch : std::runtime_error {
  explicit checksum_mismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct missing_artifact : std::runtime_error {
  explicit missing_artifact(const std::string& msg) : std::runtime_error(msg) {}
};

struct empty_dataset : std::runtime_error {
  explicit empty_dataset(const std::string& msg) : std::runtime_error(msg) {}
};

struct empty_library : std::runtime_error {
  explicit empty_library(const std::string& msg) : std::runtime_error(msg) {}
};

// Planner reply could not be turned into a plan. `token` carries the
// offending fragment when one can be pinpointed.
struct plan_parse_error : std::runtime_error {
  std::string token;
  plan_parse_error(const std::string& msg, std::string offending = "")
      : std::runtime_error(msg), token(std::move(offending)) {}
};

struct transport_error : std::runtime_error {
  explicit transport_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gentle

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace hodge3d {

using Vec3 = Eigen::Vector3d;
using Index = std::int32_t;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}

  /// Pipeline stage that failed, e.g. "build_complex" or "project_curl".
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Malformed or inconsistent input (meshes, fields, parameters).
class InputError : public Error {
 public:
  using Error::Error;
};

/// An iterative solve missed its tolerance.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace hodge3d

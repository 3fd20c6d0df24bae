#pragma once

#include <stdexcept>
#include <string>

namespace gbplan {

/// Malformed or inconsistent caller input (bad geometry, negative gaps, ...).
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Query outside the parameter domain of a lane path (s beyond [0, length],
/// projection past an endpoint, curvature singularity).
class OutOfDomain : public std::out_of_range {
 public:
  explicit OutOfDomain(const std::string& msg) : std::out_of_range(msg) {}
};

/// Lateral offset outside the configured corridor around a lane centerline.
class OffCorridor : public std::out_of_range {
 public:
  explicit OffCorridor(const std::string& msg) : std::out_of_range(msg) {}
};

}  // namespace gbplan

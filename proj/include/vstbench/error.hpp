#pragma once

#include <stdexcept>
#include <string>

namespace vstbench {

// Malformed input: bad configuration, schema violation, invalid argument.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A pipeline stage could not produce a result from valid input.
class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vstbench

namespace vstbench {

// Geometric precondition violated (point behind camera, non-positive depth,
// degenerate homography).
class GeometryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace vstbench

#pragma once

#include <stdexcept>
#include <string>

namespace chcrit {

// Descent produced non-finite values that no admissible step size cures.
// image_index identifies the offending string image, -1 outside a string run.
struct BlowUpError : std::runtime_error {
  explicit BlowUpError(const std::string& msg, int image = -1)
      : std::runtime_error(msg), image_index(image) {}
  int image_index;
};

// The energy profile of a string has no interior maximum above both endpoints.
struct NoSaddleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace chcrit

#pragma once

#include <stdexcept>
#include <string>

namespace ies {

// Base class for every error raised by the library. Messages are meant to be
// shown to a user as-is.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ies

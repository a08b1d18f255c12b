#pragma once

#include <stdexcept>
#include <string>

namespace vfl {

// Precondition violation on an in-memory input.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Projection was asked for a point with non-positive depth.
class BehindCameraError : public InputError {
 public:
  explicit BehindCameraError(const std::string& what) : InputError(what) {}
};

// A metric was requested over an empty evaluation set.
class EmptyEvaluationError : public InputError {
 public:
  explicit EmptyEvaluationError(const std::string& what) : InputError(what) {}
};

// Hole filling got a frame with no valid pixel to propagate from.
class UnfillableFrameError : public InputError {
 public:
  explicit UnfillableFrameError(const std::string& what) : InputError(what) {}
};

// File-level failure; kind() distinguishes the failure mode.
class IoError : public std::runtime_error {
 public:
  enum class Kind { unreadable, unwritable, bad_bit_depth, dimension_mismatch };

  IoError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace vfl

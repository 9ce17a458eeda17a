#pragma once

#include <stdexcept>
#include <string>

namespace sfrd {

enum class ErrorCode {
  invalid_argument,
  out_of_hull,
  degenerate_input,
  unsupported_joint,
  divergence,
  empty_hand,
  empty_crop,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Precondition or shape violation by the caller.
struct ContractError : Error {
  explicit ContractError(const std::string& what)
      : Error(ErrorCode::invalid_argument, what) {}
};

// Plane coordinate outside the convex hull of pixel centers; callers must
// clamp or reject upstream, the encoder never guesses.
struct OutOfHullError : Error {
  explicit OutOfHullError(const std::string& what)
      : Error(ErrorCode::out_of_hull, what) {}
};

struct DegenerateInputError : Error {
  explicit DegenerateInputError(const std::string& what)
      : Error(ErrorCode::degenerate_input, what) {}
};

// Heatmap support lies entirely off the hand mask; the depth decoder has no
// valid pixels to average.
struct UnsupportedJointError : Error {
  explicit UnsupportedJointError(const std::string& what)
      : Error(ErrorCode::unsupported_joint, what) {}
};

struct DivergenceError : Error {
  explicit DivergenceError(const std::string& what)
      : Error(ErrorCode::divergence, what) {}
};

struct EmptyHandError : Error {
  explicit EmptyHandError(const std::string& what)
      : Error(ErrorCode::empty_hand, what) {}
};

struct EmptyCropError : Error {
  explicit EmptyCropError(const std::string& what)
      : Error(ErrorCode::empty_crop, what) {}
};

}  // namespace sfrd

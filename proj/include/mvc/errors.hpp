#pragma once

#include <stdexcept>
#include <string>

namespace mvc {

// Base class for all toolkit errors. Subcommands map these to exit code 1.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularCamera : Error {
  explicit SingularCamera(const std::string& msg) : Error(msg) {}
};

struct BehindCamera : Error {
  explicit BehindCamera(const std::string& msg) : Error(msg) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

struct TooFewCameras : Error {
  explicit TooFewCameras(const std::string& msg) : Error(msg) {}
};

struct DegenerateConfiguration : Error {
  explicit DegenerateConfiguration(const std::string& msg) : Error(msg) {}
};

struct EmptySupport : Error {
  explicit EmptySupport(const std::string& msg) : Error(msg) {}
};

struct InvalidSpec : Error {
  explicit InvalidSpec(const std::string& msg) : Error(msg) {}
};

struct DegenerateBox : Error {
  explicit DegenerateBox(const std::string& msg) : Error(msg) {}
};

struct InvertedBox : Error {
  explicit InvertedBox(const std::string& msg) : Error(msg) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

struct LengthMismatch : Error {
  explicit LengthMismatch(const std::string& msg) : Error(msg) {}
};

struct EmptyInput : Error {
  explicit EmptyInput(const std::string& msg) : Error(msg) {}
};

struct InvalidConfig : Error {
  explicit InvalidConfig(const std::string& msg) : Error(msg) {}
};

struct NonFiniteValue : Error {
  explicit NonFiniteValue(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace mvc

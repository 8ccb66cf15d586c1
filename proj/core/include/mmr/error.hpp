#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace mmr {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (empty cloud, k > n, mismatched basis, ...).
class InvalidInput : public Error {
public:
  using Error::Error;
};

/// Point or center geometry cannot support injective RBF moments
/// (fewer than 4 points, or all points in one plane).
class DegenerateGeometry : public Error {
public:
  using Error::Error;
};

/// The objective or its gradient became non-finite. Carries the last finite iterate.
class NumericalFailure : public Error {
public:
  NumericalFailure(const std::string& what, Eigen::VectorXd last_x, double last_f, int iteration)
      : Error(what), last_x_(std::move(last_x)), last_f_(last_f), iteration_(iteration) {}

  const Eigen::VectorXd& last_x() const noexcept { return last_x_; }
  double last_f() const noexcept { return last_f_; }
  int iteration() const noexcept { return iteration_; }

private:
  Eigen::VectorXd last_x_;
  double last_f_;
  int iteration_;
};

/// Filesystem level failure (cannot open, cannot write).
class IoError : public Error {
public:
  IoError(const std::string& what, std::string path) : Error(what + ": " + path), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

/// Malformed or truncated file content.
class CorruptFile : public Error {
public:
  CorruptFile(const std::string& what, std::uint64_t byte_offset)
      : Error(what + " (at byte offset " + std::to_string(byte_offset) + ")"), offset_(byte_offset) {}
  std::uint64_t byte_offset() const noexcept { return offset_; }

private:
  std::uint64_t offset_;
};

/// Well-formed file that uses a format or layout this library does not read.
class UnsupportedFormat : public Error {
public:
  using Error::Error;
};

}  // namespace mmr

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qclink {

/// Malformed binary or CSV input data. Carries the byte offset of the
/// first offending record when known.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg, int64_t byte_offset = -1)
      : std::runtime_error(msg), byte_offset_(byte_offset) {}

  int64_t byte_offset() const { return byte_offset_; }

 private:
  int64_t byte_offset_;
};

/// Invalid configuration file. path() is the JSON pointer of the
/// offending key when known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg, std::string path = "")
      : std::runtime_error(msg), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace qclink

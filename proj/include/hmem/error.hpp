#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hmem {

enum class ErrorCode {
  invalid_argument,
  not_found,
  backend_error,
  extraction_error,
  io_error,
  corrupt_data,
  config_error,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Backend transport failures are the only errors a caller may retry verbatim.
  bool retryable() const noexcept { return code_ == ErrorCode::backend_error; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message)
      : Error(ErrorCode::invalid_argument, message) {}
};

class NotFound : public Error {
 public:
  explicit NotFound(const std::string& message)
      : Error(ErrorCode::not_found, message) {}
};

class BackendError : public Error {
 public:
  explicit BackendError(const std::string& message)
      : Error(ErrorCode::backend_error, message) {}
};

class ExtractionError : public Error {
 public:
  explicit ExtractionError(const std::string& message)
      : Error(ErrorCode::extraction_error, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message)
      : Error(ErrorCode::io_error, message) {}
};

class CorruptData : public Error {
 public:
  CorruptData(const std::string& message, std::size_t position = 0)
      : Error(ErrorCode::corrupt_data, message), position_(position) {}

  // Byte offset of the first invalid record.
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string key_path, const std::string& message)
      : Error(ErrorCode::config_error, key_path + ": " + message),
        key_path_(std::move(key_path)) {}

  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

}  // namespace hmem

#ifndef PLANESDF_ERRORS_HPP
#define PLANESDF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace planesdf {

// File could not be read or its contents do not parse.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& path, long line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        path_(path), line_(line) {}
  const std::string& path() const { return path_; }
  long line() const { return line_; }

private:
  std::string path_;
  long line_;
};

class IoError : public std::runtime_error {
public:
  IoError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

// A caller violated a documented precondition.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad key or value in a pipeline configuration.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error("config key '" + key + "': " + what), key_(key) {}
  const std::string& key() const { return key_; }

private:
  std::string key_;
};

// Requested volume exceeds the voxel budget.
class SizeError : public std::runtime_error {
public:
  SizeError(std::size_t required, std::size_t allowed)
      : std::runtime_error("volume requires " + std::to_string(required) +
                           " voxels, budget is " + std::to_string(allowed)),
        required_(required), allowed_(allowed) {}
  std::size_t required() const { return required_; }
  std::size_t allowed() const { return allowed_; }

private:
  std::size_t required_;
  std::size_t allowed_;
};

// An internal invariant failed; indicates a bug, not bad input.
class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace planesdf

#endif  // PLANESDF_ERRORS_HPP

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace miner {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument or violated precondition of an operation.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Unreadable or malformed input file. `line` is 1-based, 0 when not applicable.
class InputError : public Error {
 public:
  InputError(const std::string& path, std::size_t line, const std::string& what)
      : Error(format(path, line, what)), path_(path), line_(line) {}

  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }

 private:
  static std::string format(const std::string& path, std::size_t line,
                            const std::string& what) {
    std::string out = path;
    if (line > 0) out += ":" + std::to_string(line);
    return out + ": " + what;
  }

  std::string path_;
  std::size_t line_;
};

}  // namespace miner

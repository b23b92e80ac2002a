#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace augkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor/image extents disagree with what an operation requires.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Numeric argument outside its documented domain.
class InvalidParameterError : public Error {
 public:
  using Error::Error;
};

// Non-finite or otherwise unusable coordinate.
class InvalidCoordinateError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Text input rejected; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what), line_(0) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class UnknownCategoryError : public Error {
 public:
  using Error::Error;
};

// Masking removed all probability mass.
class DegenerateMaskError : public Error {
 public:
  using Error::Error;
};

}  // namespace augkit

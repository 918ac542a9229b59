#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pf {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateSegment : public Error {
 public:
  using Error::Error;
};

class InsufficientConstraints : public Error {
 public:
  InsufficientConstraints(std::size_t have, std::size_t need)
      : Error("insufficient constraints: need >= " + std::to_string(need) +
              ", have " + std::to_string(have)),
        have_(have),
        need_(need) {}

  std::size_t have() const noexcept { return have_; }
  std::size_t need() const noexcept { return need_; }

 private:
  std::size_t have_;
  std::size_t need_;
};

class InconsistentDirections : public Error {
 public:
  using Error::Error;
};

class DegenerateConfiguration : public Error {
 public:
  using Error::Error;
};

class DegenerateConstraint : public Error {
 public:
  using Error::Error;
};

// Scene-oracle errors.
class BehindCamera : public Error {
 public:
  using Error::Error;
};

class DegenerateDirection : public Error {
 public:
  using Error::Error;
};

class NoShadow : public Error {
 public:
  using Error::Error;
};

class DegenerateLight : public Error {
 public:
  using Error::Error;
};

class InvalidSceneSpec : public Error {
 public:
  using Error::Error;
};

// Document errors.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Raised when a document does not follow the schema. `field()` is the JSON
/// path of the offending member, e.g. `line_groups[1].id`.
class SchemaError : public Error {
 public:
  SchemaError(std::string field, const std::string& why)
      : Error(field + ": " + why), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& why)
      : Error(field + ": " + why), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace pf

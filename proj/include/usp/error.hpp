#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace usp {

// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed instance/weights/LP text. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0,
             std::string field = {})
      : Error(format(message, line, field)),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string format(const std::string& message, std::size_t line,
                            const std::string& field) {
    std::string out = "parse error";
    if (line > 0) out += " at line " + std::to_string(line);
    if (!field.empty()) out += " (field '" + field + "')";
    return out + ": " + message;
  }

  std::size_t line_;
  std::string field_;
};

class GenerationInfeasible : public Error {
 public:
  using Error::Error;
};

// A demand has two or more shortest paths under the given weights.
class NonUniqueRouting : public Error {
 public:
  explicit NonUniqueRouting(std::size_t demand, const std::string& label)
      : Error("non-unique: demand " + label), demand_(demand) {}
  std::size_t demand() const noexcept { return demand_; }

 private:
  std::size_t demand_;
};

class UnreachableDemand : public Error {
 public:
  explicit UnreachableDemand(std::size_t demand, const std::string& label)
      : Error("unreachable: demand " + label), demand_(demand) {}
  std::size_t demand() const noexcept { return demand_; }

 private:
  std::size_t demand_;
};

// A routing or forest that breaks the structural preconditions of an
// operation (conservation, sub-path optimality, malformed trees).
class MalformedRouting : public Error {
 public:
  using Error::Error;
};

// A guard refused to run because the work would be too large.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

}  // namespace usp

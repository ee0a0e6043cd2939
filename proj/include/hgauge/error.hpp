#ifndef HGAUGE_ERROR_HPP
#define HGAUGE_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hgauge {

// Base of every error the library throws. The CLI maps subclasses to exit
// codes, so keep the hierarchy flat.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad gauge strings, bad JSON, bad parameters.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A table gauge queried outside its range, or a node deeper than a tree's
// working truncation.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class NotInTree : public Error {
 public:
  using Error::Error;
};

// Enumeration or materialization over budget.
class ResourceExceeded : public Error {
 public:
  ResourceExceeded(const std::string& what, std::size_t requested)
      : Error(what), requested_(requested) {}
  std::size_t requested() const { return requested_; }

 private:
  std::size_t requested_;
};

// The Frostman comparison fails on every tail of the truncation.
class ConditionFailed : public Error {
 public:
  ConditionFailed(const std::string& what, int worst_level)
      : Error(what), worst_level_(worst_level) {}
  int worst_level() const { return worst_level_; }

 private:
  int worst_level_;
};

// A configuration that cannot be run: too few schedule levels for the
// requested stages, no eligible level left for a stage.
class Infeasible : public Error {
 public:
  Infeasible(const std::string& what, int max_feasible)
      : Error(what), max_feasible_(max_feasible) {}
  int max_feasible() const { return max_feasible_; }

 private:
  int max_feasible_;
};

// A game stage found no eligible forced level for its requirement.
class DepthExhausted : public Error {
 public:
  DepthExhausted(const std::string& what, std::size_t requirement) : Error(what), requirement_(requirement) {}
  std::size_t requirement() const { return requirement_; }

 private:
  std::size_t requirement_;
};

}  // namespace hgauge

#endif  // HGAUGE_ERROR_HPP

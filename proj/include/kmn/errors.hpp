#ifndef KMN_ERRORS_HPP
#define KMN_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kmn {

/// Base class of every error raised by the library. `code()` is a short
/// machine-readable tag used by the command-line front end.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain", what) {}
};

/// A negative power of u was requested at a node where |u| vanishes.
class SingularNodeError : public Error {
 public:
  SingularNodeError(std::size_t node, const std::string& what)
      : Error("singular-node", what + " (node " + std::to_string(node) + ")"), node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

class UnsupportedLawError : public Error {
 public:
  explicit UnsupportedLawError(const std::string& what) : Error("unsupported-law", what) {}
};

class BlowUpError : public Error {
 public:
  BlowUpError(long step, double time, const std::string& what)
      : Error("blow-up", what + " (step " + std::to_string(step) + ")"), step_(step), time_(time) {}
  long step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  long step_;
  double time_;
};

/// Analytic derivatives requested exactly on a compacton support edge.
class EdgeError : public Error {
 public:
  explicit EdgeError(const std::string& what) : Error("edge", what) {}
};

class NoSolutionError : public Error {
 public:
  explicit NoSolutionError(const std::string& what) : Error("no-solution", what) {}
};

class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& what) : Error("divergence", what) {}
};

class OutOfBranchError : public Error {
 public:
  explicit OutOfBranchError(const std::string& what) : Error("out-of-branch", what) {}
};

/// An ODE state reached a point where v^p is undefined for the requested p.
class SingularityError : public Error {
 public:
  SingularityError(double location, const std::string& what)
      : Error("singularity", what + " at " + std::to_string(location)), location_(location) {}
  double location() const noexcept { return location_; }

 private:
  double location_;
};

class ExtrapolationError : public Error {
 public:
  explicit ExtrapolationError(const std::string& what) : Error("extrapolation", what) {}
};

/// Initial data that violates the first integral it is meant to lie on.
class InconsistencyError : public Error {
 public:
  InconsistencyError(double defect, const std::string& what)
      : Error("inconsistent", what), defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

/// The characteristic relation could not be bracketed (past first breaking).
class PreBreakingError : public Error {
 public:
  explicit PreBreakingError(const std::string& what) : Error("pre-breaking", what) {}
};

class BlowUpTimeError : public Error {
 public:
  explicit BlowUpTimeError(const std::string& what) : Error("blow-up-time", what) {}
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("parse", line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace kmn

#endif  // KMN_ERRORS_HPP

#ifndef VEM_ERRORS_HPP
#define VEM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace vem {

struct InvalidGeometry : std::runtime_error {
  explicit InvalidGeometry(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidArgument : std::invalid_argument {
  explicit InvalidArgument(const std::string& msg) : std::invalid_argument(msg) {}
};

struct TriangulationFailure : std::runtime_error {
  explicit TriangulationFailure(const std::string& msg) : std::runtime_error(msg) {}
};

struct CompatibilityError : std::runtime_error {
  explicit CompatibilityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SolverFailure : std::runtime_error {
  explicit SolverFailure(const std::string& msg) : std::runtime_error(msg) {}
};

struct ContinuityError : std::runtime_error {
  explicit ContinuityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DecompositionError : std::runtime_error {
  explicit DecompositionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConditioningError : std::runtime_error {
  explicit ConditioningError(const std::string& msg) : std::runtime_error(msg) {}
};

struct AssemblyError : std::runtime_error {
  explicit AssemblyError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ExpansionError : std::runtime_error {
  explicit ExpansionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DeflationError : std::runtime_error {
  explicit DeflationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace vem

#endif

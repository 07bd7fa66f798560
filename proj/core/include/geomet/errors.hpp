#pragma once

#include <stdexcept>
#include <string>

namespace geomet {

/// File access or file format problem.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Well-formed input that cannot be processed (empty intersection,
/// dimension mismatch, constant correlation input, infeasible matrices).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure inside the optimizer (failed retraction, line search
/// stuck at the initial point, eigendecomposition breakdown).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace geomet

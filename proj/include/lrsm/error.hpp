#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrsm {

// Exception hierarchy. The C API maps each leaf onto a status code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Precondition or shape violation in a caller-supplied argument.
class ArgumentError : public Error {
public:
  using Error::Error;
};

// Iterative procedure failed to converge or produced a non-finite value.
class NumericError : public Error {
public:
  NumericError(const std::string& what, std::size_t iterations = 0)
      : Error(what), iterations_(iterations) {}
  std::size_t iterations() const noexcept { return iterations_; }

private:
  std::size_t iterations_;
};

// Markov chain is not ergodic (reducible or periodic).
class StructureError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

[[noreturn]] void throw_argument(const std::string& what);

}  // namespace lrsm

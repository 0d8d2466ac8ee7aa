#pragma once

#include <stdexcept>
#include <string>

namespace rgg {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition was violated by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// An operation that needs at least one element received none.
class EmptyInput : public Error {
 public:
  using Error::Error;
};

/// Input is valid but exceeds the size an exact algorithm accepts.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A requested combinatorial object does not exist in the given graph.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// A monotone property never holds, not even on the complete graph.
class UnsatisfiableProperty : public Error {
 public:
  using Error::Error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

}  // namespace rgg

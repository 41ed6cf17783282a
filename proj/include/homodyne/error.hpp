#pragma once

#include <stdexcept>
#include <string>

namespace homodyne {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (η ∉ [0,1], R < 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input data cannot support the requested estimate: too few samples, zero variance, empty input.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A dataset, report, or factor file is malformed or carries an unsupported version.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require_domain(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace detail
}  // namespace homodyne

#pragma once

#include <stdexcept>
#include <string>

namespace msqn {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes or vector lengths do not agree.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// λ = 0 Procrustes solve requested on data without full column rank.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

/// The r×r core of the inverse formula is numerically singular.
class SingularCore : public Error {
 public:
  using Error::Error;
};

/// Small inner system of a multisecant or preconditioned update is singular.
class SingularInnerMatrix : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

/// Malformed dataset or configuration input.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace msqn

#pragma once

#include <stdexcept>
#include <string>

namespace ulsim {

// Base for every error the simulator raises on a violated contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class EncodeError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class AmbiguousError : public Error {
 public:
  using Error::Error;
};

class NotObservedError : public Error {
 public:
  using Error::Error;
};

class IllConditionedError : public Error {
 public:
  using Error::Error;
};

class EmptyProfileError : public Error {
 public:
  using Error::Error;
};

class InconclusiveError : public Error {
 public:
  using Error::Error;
};

}  // namespace ulsim

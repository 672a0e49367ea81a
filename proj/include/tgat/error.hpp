#pragma once

#include <stdexcept>
#include <string>

namespace tgat {

// Each category maps onto one CLI exit code (see tools/tgat.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

// Violated call contract (non-scalar loss, consumed tape, empty graph, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input data (recording/archive/checkpoint contents).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace tgat

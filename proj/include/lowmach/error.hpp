#pragma once

#include <stdexcept>
#include <string>

namespace lowmach {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs that violate a precondition: wrong parity, wrong geometry, bad sizes.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParityError : public InputError {
 public:
  using InputError::InputError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Data failing a solvability condition (Neumann compatibility and friends).
class IncompatibleDataError : public Error {
 public:
  IncompatibleDataError(const std::string& what, double defect)
      : Error(what), defect_(defect) {}
  double defect() const { return defect_; }

 private:
  double defect_;
};

// Failures of a numerical process on admissible input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, double ratio)
      : NumericalError(what), ratio_(ratio) {}
  double ratio() const { return ratio_; }

 private:
  double ratio_;
};

class NonFiniteError : public NumericalError {
 public:
  NonFiniteError(const std::string& what, std::string field)
      : NumericalError(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class DegenerateMapError : public NumericalError {
 public:
  DegenerateMapError(const std::string& what, int node)
      : NumericalError(what), node_(node) {}
  int node() const { return node_; }

 private:
  int node_;
};

class CflError : public NumericalError {
 public:
  CflError(const std::string& what, double time)
      : NumericalError(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

// A 1D characteristic map losing invertibility before the requested time.
class HorizonError : public NumericalError {
 public:
  HorizonError(const std::string& what, double critical_time)
      : NumericalError(what), critical_time_(critical_time) {}
  double critical_time() const { return critical_time_; }

 private:
  double critical_time_;
};

}  // namespace lowmach

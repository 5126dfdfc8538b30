#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace qclip {

using cplx = std::complex<double>;
using index_t = std::size_t;

// Base class for all contract violations raised by the library.  CLI maps
// these to exit code 1 (validation) while NumericFailure maps to exit code 2.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidOperator : public Error {
  public:
    using Error::Error;
};

class DimensionMismatch : public Error {
  public:
    using Error::Error;
};

class UnboundParameter : public Error {
  public:
    using Error::Error;
};

class InvalidPovm : public Error {
  public:
    using Error::Error;
};

class OutcomeLimitExceeded : public Error {
  public:
    using Error::Error;
};

class UseProductBound : public Error {
  public:
    using Error::Error;
};

class UnsupportedEncoding : public Error {
  public:
    using Error::Error;
};

class UnsupportedGateParam : public Error {
  public:
    using Error::Error;
};

class InvalidConfig : public Error {
  public:
    using Error::Error;
};

class EmptyInput : public Error {
  public:
    using Error::Error;
};

// An internal check failed (solver did not converge, witness did not
// reproduce its bound, ...).  Distinct from input validation on purpose.
class NumericFailure : public Error {
  public:
    using Error::Error;
};

}  // namespace qclip

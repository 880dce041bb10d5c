#pragma once

#include <stdexcept>
#include <string>

namespace corrstates {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Calendar gap or duplicate date in an input panel.
class GapError : public Error {
 public:
  using Error::Error;
};

/// Malformed cell, header, or value domain violation in an input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

class DuplicateRegionError : public Error {
 public:
  using Error::Error;
};

/// Date outside the panel range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values where finite reals are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Invalid filter or ensemble specification.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// Epoch plan that cannot fit the series.
class PlanError : public Error {
 public:
  using Error::Error;
};

/// A region with zero variance inside an epoch.
class DegenerateSeriesError : public Error {
 public:
  using Error::Error;
};

/// Dimension mismatch between matrices or vectors.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid cluster count.
class KError : public Error {
 public:
  using Error::Error;
};

/// Diagnostics requested on a degenerate partition.
class DiagnosticsError : public Error {
 public:
  using Error::Error;
};

}  // namespace corrstates

#pragma once

#include <stdexcept>
#include <string>

namespace hippo {

// Base class for failures raised by the storage and index layers. Argument
// validation failures use std::invalid_argument / std::out_of_range instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// open/read/write/fsync failed.
class IoError : public Error {
 public:
  using Error::Error;
};

// Bytes on disk (or handed to a decoder) do not follow the expected layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

// The index no longer describes the table it was built for.
class StaleIndexError : public Error {
 public:
  using Error::Error;
};

// A tuple or slot referenced by id does not exist or is already dead.
class TupleNotFound : public Error {
 public:
  using Error::Error;
};

// An index answer disagreed with the reference scan.
class CorrectnessError : public Error {
 public:
  using Error::Error;
};

}  // namespace hippo

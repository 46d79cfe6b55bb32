#pragma once

#include <stdexcept>
#include <string>

namespace reform {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Input text could not be parsed (XML, qrels lines, JSON).
class ParseError : public Error {
  public:
    using Error::Error;
};

/// Input parsed but violates a data-model invariant.
class IngestError : public Error {
  public:
    using Error::Error;
};

/// Canonical JSON carries a schema version this build does not read.
class UnsupportedVersionError : public Error {
  public:
    using Error::Error;
};

/// A document-based computation was requested on a corpus without a docstore.
class MissingDocstoreError : public Error {
  public:
    using Error::Error;
};

class EmptyInputError : public Error {
  public:
    using Error::Error;
};

/// Invalid or unsupported synthetic generator spec.
class SpecError : public Error {
  public:
    using Error::Error;
};

}  // namespace reform

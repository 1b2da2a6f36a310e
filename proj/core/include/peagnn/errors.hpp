#pragma once

#include <stdexcept>
#include <string>

namespace peagnn {

// Base class for every error the engine raises on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor / matrix shapes do not line up.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Index outside the addressed range (gather ids, edge coordinates, node ids).
class IndexError : public Error {
public:
    using Error::Error;
};

// Numeric domain violation (ln of non-positive input and friends).
class DomainError : public Error {
public:
    using Error::Error;
};

// A documented precondition of an operation was violated by the caller.
class ContractError : public Error {
public:
    using Error::Error;
};

// Raw data could not be read or parsed; message carries file and line.
class IngestError : public Error {
public:
    using Error::Error;
};

// A sampling procedure has no eligible candidates.
class SamplingError : public Error {
public:
    using Error::Error;
};

// Run configuration is inconsistent or incomplete.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Training hit a non-recoverable numeric state (NaN gradient / loss).
class TrainAbort : public Error {
public:
    using Error::Error;
};

}  // namespace peagnn

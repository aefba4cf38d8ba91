#pragma once

#include <stdexcept>
#include <string>

namespace voxcrf {

// Invalid parameters or configuration (bad sigma, unknown mode, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed, missing or inconsistent data (files, dims, labels, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public DataError {
public:
    using DataError::DataError;
};

class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Raised by the exact oracle when the configuration space is too large.
class EnumerationRefused : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace voxcrf

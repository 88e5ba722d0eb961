#pragma once

#include <stdexcept>
#include <string>

namespace sievelab {

// Bad parameters: violated preconditions, malformed input files.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Memory budget, work budget or 64-bit overflow exceeded.
class ResourceLimit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A quantity was requested beyond the bound the sieve tables cover.
class OutOfTable : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// The requested ratio has a zero denominator.
class DegenerateInput : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace sievelab

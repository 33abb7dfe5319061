#pragma once

#include <stdexcept>
#include <string>

namespace attrpref {

// Error taxonomy maps onto CLI exit statuses:
//   UsageError/ConfigError/InputError/CapabilityError -> 2
//   ProvenanceError                                   -> 3
//   NumericError/TransportError/IoError               -> 4
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct InputError : Error {
    using Error::Error;
};

struct CapabilityError : Error {
    using Error::Error;
};

struct DimensionError : ConfigError {
    using ConfigError::ConfigError;
};

struct ProvenanceError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

struct TransportError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

inline int exit_status_for(const Error& e) {
    if (dynamic_cast<const ProvenanceError*>(&e) != nullptr) return 3;
    if (dynamic_cast<const UsageError*>(&e) != nullptr ||
        dynamic_cast<const ConfigError*>(&e) != nullptr ||
        dynamic_cast<const InputError*>(&e) != nullptr ||
        dynamic_cast<const CapabilityError*>(&e) != nullptr) {
        return 2;
    }
    return 4;
}

}  // namespace attrpref

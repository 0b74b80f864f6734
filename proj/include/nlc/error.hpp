#pragma once

#include <stdexcept>
#include <string>

namespace nlc {

// Base of every library error. Modules derive one subclass per failure
// category so callers can catch precisely.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A resource file (lexicon, model, grammar, config, ...) failed to load or
// validate for a reason that has no more specific class.
class ResourceError : public Error {
public:
    using Error::Error;
};

}  // namespace nlc

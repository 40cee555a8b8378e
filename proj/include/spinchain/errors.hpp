#pragma once
#include <stdexcept>
#include <string>

namespace spinchain {

// Error taxonomy. The CLI maps spec_error -> exit 2 and numeric_error
// (plus resource/factorization trouble) -> exit 3.
struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct contract_violation : std::logic_error {
    using std::logic_error::logic_error;
};

struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration / specification problems; carries the offending key path
// when one exists so the CLI can print it.
struct spec_error : std::invalid_argument {
    explicit spec_error(const std::string& what, std::string key = {})
        : std::invalid_argument(key.empty() ? what : what + " [key: " + key + "]"),
          key_path(std::move(key)) {}
    std::string key_path;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace spinchain

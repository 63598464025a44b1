#pragma once

#include <stdexcept>
#include <string>

namespace heraldsim {

// Error classes map 1:1 onto the CLI exit codes (config=2, data=3, numeric=4).

class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace heraldsim

#pragma once

#include <stdexcept>
#include <string>

namespace steincf {

// Parameter outside its documented domain (bad theta, alpha, grid, ...).
class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

// Operation requires data the caller did not supply (missing derivative,
// constant table entry, ...).
class capability_error : public std::logic_error {
public:
    explicit capability_error(const std::string& what) : std::logic_error(what) {}
};

// Quadrature or iteration failed to reach the requested tolerance.
class numeric_error : public std::runtime_error {
public:
    numeric_error(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved error " + std::to_string(achieved) + ")"),
          achieved_error(achieved) {}
    double achieved_error;
};

// A validity precondition of a bound fails; carries the violated threshold.
class infeasibility_error : public std::runtime_error {
public:
    infeasibility_error(const std::string& what, double threshold_value)
        : std::runtime_error(what + " (threshold " + std::to_string(threshold_value) + ")"),
          threshold(threshold_value) {}
    double threshold;
};

// A resource cap (sieve size, table size) would be exceeded; carries the size needed.
class resource_error : public std::runtime_error {
public:
    resource_error(const std::string& what, double required_value)
        : std::runtime_error(what + " (required " + std::to_string(required_value) + ")"),
          required(required_value) {}
    double required;
};

inline void require_domain(bool ok, const std::string& msg) {
    if (!ok) throw domain_error(msg);
}

}  // namespace steincf

#pragma once

#include <stdexcept>
#include <string>

namespace rdm {

// Error taxonomy shared by the library and the command line tool. Domain and
// precondition failures describe bad inputs (exit code 2), numeric failures a
// computation that did not converge or overflowed (exit code 3), resource
// failures a size or budget cap (exit code 4).

struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// A violated model hypothesis. Messages name the hypothesis being relied on,
// e.g. the single-site reflection symmetry (H1) or corner-positive weights (H2).
struct precondition_error : domain_error {
    explicit precondition_error(const std::string& what) : domain_error(what) {}
};

struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace rdm

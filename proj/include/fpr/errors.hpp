#pragma once

#include <stdexcept>
#include <string>

namespace fpr {

struct unsupported_reuse_factor : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct invalid_partition : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct singularity_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct insufficient_antennas : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct degenerate_unbounded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct checksum_mismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct no_feasible_point : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fpr

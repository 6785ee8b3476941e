#pragma once

#include <stdexcept>
#include <string>

namespace qes {

/// Base class for all input-validation failures raised by this library.
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct non_normalized_error : validation_error {
    using validation_error::validation_error;
};

struct negative_coefficient_error : validation_error {
    using validation_error::validation_error;
};

struct dimension_order_error : validation_error {
    using validation_error::validation_error;
};

struct length_mismatch_error : validation_error {
    using validation_error::validation_error;
};

struct index_out_of_range_error : validation_error {
    using validation_error::validation_error;
};

/// Requested outcome set has zero probability; callers must skip it.
struct zero_probability_set_error : validation_error {
    using validation_error::validation_error;
};

struct empty_support_error : validation_error {
    using validation_error::validation_error;
};

/// No further MC stage is meaningful (support collapsed to one basis vector).
struct exhausted_stages_error : validation_error {
    using validation_error::validation_error;
};

/// Orthonormal completion of the MC unitary failed (numerical degeneracy).
struct completion_failure_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct invalid_policy_error : validation_error {
    using validation_error::validation_error;
};

struct zero_success_probability_error : validation_error {
    using validation_error::validation_error;
};

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace qes

#pragma once

#include <stdexcept>

namespace lshfed {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor / codec
struct shape_mismatch : error { using error::error; };
struct length_mismatch : error { using error::error; };
struct overflow_error : error { using error::error; };
struct unknown_shape : error { using error::error; };

// Filtering
struct empty_candidates : error { using error::error; };

// Masking
struct group_too_small : error { using error::error; };
struct incomplete_group : error { using error::error; };

// Election
struct empty_pool : error { using error::error; };
struct count_exceeds_pool : error { using error::error; };
struct insufficient_pool : error { using error::error; };

// Learner
struct empty_shard : error { using error::error; };
struct insufficient_data : error { using error::error; };

// Protocol / CLI
struct no_candidates : error { using error::error; };
struct unknown_payload : error { using error::error; };
struct config_error : error { using error::error; };

} // namespace lshfed

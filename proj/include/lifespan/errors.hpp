#pragma once

#include <stdexcept>
#include <string>

namespace lifespan {

// Domain-specific failure modes. Each maps to one contract violation of the
// library surface; callers catch the specific type or the shared base.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// p = (1,...,1): the exponent matrix is singular and alpha is undefined.
struct SingularSystem : Error {
    using Error::Error;
};

// Operation invoked outside its domain of definition (e.g. P/Q sequences for k=1).
struct DomainError : Error {
    using Error::Error;
};

// alpha_max <= n/2 where a strictly supercritical exponent is required.
struct NotSupercritical : Error {
    using Error::Error;
};

// The composite exponential-weight constant requires lambda_tilde > 0.
struct ZeroLambda : Error {
    using Error::Error;
};

// Initial value below the blow-up threshold: the minorant gives no conclusion.
struct BelowThreshold : Error {
    explicit BelowThreshold(double threshold_)
        : Error("initial value does not exceed blow-up threshold " + std::to_string(threshold_)),
          threshold(threshold_) {}
    double threshold;
};

// Root solve failed because the data curve vanishes identically.
struct NoRoot : Error {
    using Error::Error;
};

// Adaptive step size underflowed before reaching the horizon or escape.
struct ToleranceFailure : Error {
    using Error::Error;
};

// Fewer samples than a fit or derivative check needs.
struct InsufficientData : Error {
    using Error::Error;
};

// Eigenfunction profiles are provided for n in {1,2,3} only.
struct UnsupportedDimension : Error {
    using Error::Error;
};

// Too few mesh nodes inside the integration radius.
struct MeshTooCoarse : Error {
    using Error::Error;
};

// The explicit part of the scheme forced dt below the representable budget.
struct StabilityFailure : Error {
    using Error::Error;
};

// Malformed configuration file or missing key.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace lifespan

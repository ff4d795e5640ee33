#pragma once

#include <stdexcept>
#include <string>

namespace mec {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// exact arithmetic
struct MalformedNumber : Error { using Error::Error; };
struct DivisionByZero : Error { using Error::Error; };
struct NotSquare : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

// distributions and couplings
struct NonPositiveEntry : Error { using Error::Error; };
struct SumNotOne : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct MarginalMismatch : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct SumMismatch : Error { using Error::Error; };
struct TooLarge : Error { using Error::Error; };

// support graph
struct NotForest : Error { using Error::Error; };
struct NotATree : Error { using Error::Error; };
struct NotTwoMarginal : Error { using Error::Error; };

// enumeration
struct OutOfBounds : Error { using Error::Error; };
struct RankOutOfRange : Error { using Error::Error; };
struct SizeMismatch : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };

// entropy
struct AlphaIsOne : Error { using Error::Error; };
struct NonFiniteResult : Error { using Error::Error; };
struct EmptySet : Error { using Error::Error; };

// local optimization
struct StepLimitExceeded : Error { using Error::Error; };

} // namespace mec

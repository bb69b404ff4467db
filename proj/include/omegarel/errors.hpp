#pragma once

#include <stdexcept>
#include <string>

namespace omegarel {

/// Base class for every error raised by the engine. Catching this (or
/// std::runtime_error) is enough to map any library failure to a CLI
/// input-error exit.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Lattice / flavor construction.
struct UnknownLatticeKind : Error { using Error::Error; };
struct LatticeValidationError : Error { using Error::Error; };
struct UnknownOpName : Error { using Error::Error; };
struct FlavorValidationError : Error { using Error::Error; };
struct DistributivityViolation : Error { using Error::Error; };
struct CarrierError : Error { using Error::Error; };

// Relation algebra.
struct LatticeMismatch : Error { using Error::Error; };
struct DomainMismatch : Error { using Error::Error; };
struct DuplicateAttribute : Error { using Error::Error; };
struct SignatureMismatch : Error { using Error::Error; };
struct NotASuperset : Error { using Error::Error; };
struct UnknownAttribute : Error { using Error::Error; };
struct ArityMismatch : Error { using Error::Error; };

// Similarities and kernels.
struct NotReflexive : Error { using Error::Error; };
struct NotSymmetric : Error { using Error::Error; };
struct BadKernel : Error { using Error::Error; };

// Diagrams, limits, colimits.
struct GraphError : Error { using Error::Error; };
struct UnknownVertex : Error { using Error::Error; };
struct DanglingVertexObject : Error { using Error::Error; };
struct InconsistentLattice : Error { using Error::Error; };
struct LegMissing : Error { using Error::Error; };
struct NonIdempotentPlus : Error { using Error::Error; };
struct NonCrispArrow : Error { using Error::Error; };

// Queries and descriptions.
struct NotAHomomorphism : Error { using Error::Error; };
struct NotInjective : Error { using Error::Error; };
struct ColumnMismatch : Error { using Error::Error; };

// Networks.
struct NetworkError : Error { using Error::Error; };
struct UnclassifiableNeuron : Error { using Error::Error; };
struct EmptyGrid : Error { using Error::Error; };

// File parsing.
struct ParseError : Error { using Error::Error; };

} // namespace omegarel

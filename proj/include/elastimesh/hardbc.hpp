#pragma once

#include "elastimesh/geometry.hpp"
#include "elastimesh/meshcore.hpp"

namespace elastimesh {

enum class HardBcRule {
    /// Interior nodes move by the inverse-squared-distance average of the boundary corrections.
    inverse_distance,
    /// Symbol-by-symbol reading: one global shift, the negated error-weighted mean correction.
    literal,
};

inline constexpr double hardbc_coincidence = 1e-14;

/// Snaps boundary nodes onto the domain curves and spreads the corrections inward.
/// Output provenance is pinn_hardbc.
StructuredMesh apply_hard_bc(const StructuredMesh& mesh, const DomainSpec& domain,
                             HardBcRule rule = HardBcRule::inverse_distance);

/// Largest distance between a boundary node and its curve sample.
double boundary_max_deviation(const StructuredMesh& mesh, const DomainSpec& domain);

}  // namespace elastimesh

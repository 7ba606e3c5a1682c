#pragma once

#include "elastimesh/geometry.hpp"
#include "elastimesh/meshcore.hpp"

namespace elastimesh {

/// Corner tolerance a domain must meet before a mesh is generated on it.
inline constexpr double tfi_corner_tolerance = 1e-6;

/// Bilinear Coons patch of the four boundary curves sampled at xi = i/(ni-1),
/// eta = j/(nj-1). Boundary nodes are the curve samples themselves.
StructuredMesh tfi_generate(const DomainSpec& domain, std::size_t ni, std::size_t nj);

}  // namespace elastimesh

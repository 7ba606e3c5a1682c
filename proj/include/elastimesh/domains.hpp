#pragma once

#include "elastimesh/geometry.hpp"

#include <map>
#include <string>
#include <vector>

namespace elastimesh::domains {

DomainSpec unit_square();

/// Quarter annulus in the first quadrant. xi runs radially, eta along the arcs.
DomainSpec quarter_annulus(double r0 = 1.0, double r1 = 2.0);

/// Channel of the given length and unit height whose walls carry a sine wave.
DomainSpec wavy_channel(double amplitude = 0.1, double waves = 2.0, double length = 2.0);

/// Unit-height duct whose centerline rises by `offset` over `length` along a cosine ramp.
DomainSpec s_duct(double offset = 1.0, double length = 3.0);

/// L-shaped region; the re-entrant corner lies on the north polyline.
DomainSpec polyline_l();

/// Builds a named preset. Unknown names or parameters throw InvalidArgument.
DomainSpec make_preset(const std::string& name, const std::map<std::string, double>& params);

std::vector<std::string> preset_names();

}  // namespace elastimesh::domains

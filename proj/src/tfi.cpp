#include "elastimesh/tfi.hpp"

#include "elastimesh/errors.hpp"

#include <sstream>

namespace elastimesh {

StructuredMesh tfi_generate(const DomainSpec& d, std::size_t ni, std::size_t nj) {
    const CompGrid g(ni, nj);
    const auto corners = check_corner_compatibility(d, tfi_corner_tolerance);
    if (!corners.pass) {
        std::ostringstream msg;
        msg << "domain corners do not meet (gaps";
        for (double gap : corners.gaps) msg << ' ' << gap;
        msg << ")";
        throw GeometryError(msg.str());
    }

    const auto south = sample_curve(d.south, ni);
    const auto north = sample_curve(d.north, ni);
    const auto west = sample_curve(d.west, nj);
    const auto east = sample_curve(d.east, nj);
    const Point2 c00 = south.front(), c10 = south.back();
    const Point2 c01 = north.front(), c11 = north.back();

    std::vector<Point2> coords(ni * nj);
    for (std::size_t j = 0; j < nj; ++j) {
        const double eta = g.eta(j);
        for (std::size_t i = 0; i < ni; ++i) {
            const double xi = g.xi(i);
            const Point2 u = (1.0 - xi) * west[j] + xi * east[j];
            const Point2 v = (1.0 - eta) * south[i] + eta * north[i];
            const Point2 uv = (1.0 - xi) * (1.0 - eta) * c00 + xi * (1.0 - eta) * c10 +
                              (1.0 - xi) * eta * c01 + xi * eta * c11;
            coords[j * ni + i] = u + v - uv;
        }
    }

    // The blend reproduces the boundary in exact arithmetic; store the samples
    // themselves so boundary nodes carry no rounding.
    StructuredMesh mesh(ni, nj, std::move(coords), Provenance::tfi);
    for (const auto& b : boundary_nodes(d, g)) mesh(b.slot.i, b.slot.j) = b.target;
    return mesh;
}

}  // namespace elastimesh

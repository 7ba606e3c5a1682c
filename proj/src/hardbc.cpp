#include "elastimesh/hardbc.hpp"

#include <cmath>

namespace elastimesh {

StructuredMesh apply_hard_bc(const StructuredMesh& mesh, const DomainSpec& domain, HardBcRule rule) {
    const CompGrid grid(mesh.ni(), mesh.nj());
    const auto nodes = boundary_nodes(domain, grid);

    std::vector<Point2> delta;
    delta.reserve(nodes.size());
    for (const auto& b : nodes) delta.push_back(b.target - mesh(b.slot.i, b.slot.j));

    StructuredMesh out = mesh;
    out.set_provenance(Provenance::pinn_hardbc);
    for (const auto& b : nodes) out(b.slot.i, b.slot.j) = b.target;

    Point2 shift{};
    if (rule == HardBcRule::literal) {
        double total = 0.0;
        for (const auto& d : delta) total += dot(d, d);
        if (total > 0.0)
            for (const auto& d : delta) shift = shift - (dot(d, d) / total) * d;
    }

    for (std::size_t j = 1; j + 1 < mesh.nj(); ++j) {
        for (std::size_t i = 1; i + 1 < mesh.ni(); ++i) {
            const Point2 p = mesh(i, j);
            if (rule == HardBcRule::literal) {
                out(i, j) = p + shift;
                continue;
            }
            Point2 num{};
            double den = 0.0;
            for (std::size_t k = 0; k < nodes.size(); ++k) {
                const double d = distance(p, nodes[k].target);
                if (d < hardbc_coincidence) {
                    num = delta[k];
                    den = 1.0;
                    break;
                }
                const double w = 1.0 / (d * d);
                num = num + w * delta[k];
                den += w;
            }
            out(i, j) = p + (1.0 / den) * num;
        }
    }
    return out;
}

double boundary_max_deviation(const StructuredMesh& mesh, const DomainSpec& domain) {
    double worst = 0.0;
    for (const auto& b : boundary_nodes(domain, CompGrid(mesh.ni(), mesh.nj())))
        worst = std::max(worst, distance(mesh(b.slot.i, b.slot.j), b.target));
    return worst;
}

}  // namespace elastimesh

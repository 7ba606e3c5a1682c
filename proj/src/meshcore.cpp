#include "elastimesh/meshcore.hpp"

#include "elastimesh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace elastimesh {

CompGrid::CompGrid(std::size_t ni, std::size_t nj) : ni_(ni), nj_(nj) {
    if (ni < 2 || nj < 2)
        throw InvalidArgument("computational grid needs ni, nj >= 2 (got " + std::to_string(ni) +
                              "x" + std::to_string(nj) + ")");
}

double CompGrid::xi(std::size_t i) const {
    return i + 1 == ni_ ? 1.0 : static_cast<double>(i) / static_cast<double>(ni_ - 1);
}

double CompGrid::eta(std::size_t j) const {
    return j + 1 == nj_ ? 1.0 : static_cast<double>(j) / static_cast<double>(nj_ - 1);
}

CompGrid uniform_comp_grid(std::size_t ni, std::size_t nj) { return CompGrid(ni, nj); }

const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::tfi: return "tfi";
        case Provenance::pinn: return "pinn";
        case Provenance::pinn_hardbc: return "pinn+hardbc";
    }
    return "?";
}

StructuredMesh::StructuredMesh(std::size_t ni, std::size_t nj, std::vector<Point2> coords,
                               Provenance provenance)
    : ni_(ni), nj_(nj), coords_(std::move(coords)), provenance_(provenance) {
    if (ni < 2 || nj < 2) throw InvalidArgument("mesh needs ni, nj >= 2");
    if (coords_.size() != ni * nj)
        throw InvalidArgument("mesh has " + std::to_string(coords_.size()) + " nodes, expected " +
                              std::to_string(ni * nj));
    for (const auto& p : coords_)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw NumericError("mesh contains a non-finite coordinate");
}

std::array<Point2, 4> StructuredMesh::cell(std::size_t i, std::size_t j) const {
    return {(*this)(i, j), (*this)(i + 1, j), (*this)(i + 1, j + 1), (*this)(i, j + 1)};
}

double quad_signed_area(const std::array<Point2, 4>& q) {
    double a = 0.0;
    for (std::size_t k = 0; k < 4; ++k) a += cross(q[k], q[(k + 1) % 4]);
    return 0.5 * a;
}

namespace {

constexpr double rad_to_deg = 180.0 / std::numbers::pi;

// Edge cross product at vertex k: (next - v) x (prev - v) is positive at a
// convex vertex of a counter-clockwise quad.
double vertex_turn(const std::array<Point2, 4>& q, std::size_t k) {
    const Point2 v = q[k];
    return cross(q[(k + 1) % 4] - v, q[(k + 3) % 4] - v);
}

}  // namespace

std::array<double, 4> quad_angles(const std::array<Point2, 4>& q) {
    const double area = quad_signed_area(q);
    const double orient = area < 0.0 ? -1.0 : 1.0;
    std::array<double, 4> out{};
    for (std::size_t k = 0; k < 4; ++k) {
        const Point2 a = q[(k + 1) % 4] - q[k];
        const Point2 b = q[(k + 3) % 4] - q[k];
        const double c = std::clamp(dot(a, b) / (norm(a) * norm(b)), -1.0, 1.0);
        double angle = std::acos(c) * rad_to_deg;
        if (orient * vertex_turn(q, k) < 0.0) angle = 360.0 - angle;
        out[k] = angle;
    }
    return out;
}

bool quad_inverted(const std::array<Point2, 4>& q) {
    if (quad_signed_area(q) <= 0.0) return true;
    for (std::size_t k = 0; k < 4; ++k)
        if (vertex_turn(q, k) < 0.0) return true;
    return false;
}

std::vector<std::array<double, 4>> included_angles(const StructuredMesh& m) {
    std::vector<std::array<double, 4>> out;
    out.reserve(m.cell_count());
    for (std::size_t j = 0; j + 1 < m.nj(); ++j)
        for (std::size_t i = 0; i + 1 < m.ni(); ++i) {
            const auto q = m.cell(i, j);
            for (std::size_t k = 0; k < 4; ++k)
                if (q[k] == q[(k + 1) % 4]) throw DegenerateCell(i, j);
            out.push_back(quad_angles(q));
        }
    return out;
}

std::vector<double> cell_areas(const StructuredMesh& m) {
    std::vector<double> out;
    out.reserve(m.cell_count());
    for (std::size_t j = 0; j + 1 < m.nj(); ++j)
        for (std::size_t i = 0; i + 1 < m.ni(); ++i) out.push_back(quad_signed_area(m.cell(i, j)));
    return out;
}

QualityReport quality_report(const StructuredMesh& m, double elapsed) {
    const auto angles = included_angles(m);
    const auto areas = cell_areas(m);
    QualityReport r;
    r.generation_time = elapsed;
    double sum_min = 0.0, sum_max = 0.0, sum_area = 0.0;
    std::size_t c = 0;
    for (std::size_t j = 0; j + 1 < m.nj(); ++j)
        for (std::size_t i = 0; i + 1 < m.ni(); ++i, ++c) {
            const auto& a = angles[c];
            sum_min += *std::min_element(a.begin(), a.end());
            sum_max += *std::max_element(a.begin(), a.end());
            sum_area += std::abs(areas[c]);
            if (quad_inverted(m.cell(i, j))) ++r.inverted_cells;
        }
    const double n = static_cast<double>(angles.size());
    r.avg_min_angle = sum_min / n;
    r.avg_max_angle = sum_max / n;
    r.avg_cell_area = sum_area / n;
    return r;
}

std::vector<BoundarySlot> boundary_layout(const CompGrid& g) {
    const std::size_t ni = g.ni(), nj = g.nj();
    std::vector<BoundarySlot> out;
    out.reserve(2 * (ni + nj) - 4);
    for (std::size_t i = 0; i < ni; ++i) out.push_back({i, 0, Side::south, g.xi(i)});
    for (std::size_t j = 1; j < nj; ++j) out.push_back({ni - 1, j, Side::east, g.eta(j)});
    for (std::size_t i = 0; i + 1 < ni; ++i) out.push_back({i, nj - 1, Side::north, g.xi(i)});
    for (std::size_t j = 1; j + 1 < nj; ++j) out.push_back({0, j, Side::west, g.eta(j)});
    return out;
}

std::vector<BoundaryNode> boundary_nodes(const DomainSpec& d, const CompGrid& g) {
    std::vector<BoundaryNode> out;
    for (const auto& s : boundary_layout(g)) out.push_back({s, d.curve(s.side)(s.t)});
    return out;
}

}  // namespace elastimesh

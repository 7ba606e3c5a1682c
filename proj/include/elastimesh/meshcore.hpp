#pragma once

#include "elastimesh/geometry.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace elastimesh {

/// Uniform lattice on the computational unit square. Node (i,j) has index j*ni + i.
class CompGrid {
public:
    CompGrid(std::size_t ni, std::size_t nj);

    std::size_t ni() const noexcept { return ni_; }
    std::size_t nj() const noexcept { return nj_; }
    std::size_t size() const noexcept { return ni_ * nj_; }

    double xi(std::size_t i) const;
    double eta(std::size_t j) const;
    Point2 node(std::size_t i, std::size_t j) const { return {xi(i), eta(j)}; }
    double d_xi() const noexcept { return 1.0 / static_cast<double>(ni_ - 1); }
    double d_eta() const noexcept { return 1.0 / static_cast<double>(nj_ - 1); }

private:
    std::size_t ni_;
    std::size_t nj_;
};

CompGrid uniform_comp_grid(std::size_t ni, std::size_t nj);

enum class Provenance { tfi, pinn, pinn_hardbc };

const char* provenance_name(Provenance p);

class StructuredMesh {
public:
    StructuredMesh(std::size_t ni, std::size_t nj, std::vector<Point2> coords,
                   Provenance provenance = Provenance::tfi);

    std::size_t ni() const noexcept { return ni_; }
    std::size_t nj() const noexcept { return nj_; }
    std::size_t size() const noexcept { return coords_.size(); }
    std::size_t cell_count() const noexcept { return (ni_ - 1) * (nj_ - 1); }
    Provenance provenance() const noexcept { return provenance_; }
    void set_provenance(Provenance p) noexcept { provenance_ = p; }

    std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * ni_ + i; }
    const Point2& operator()(std::size_t i, std::size_t j) const { return coords_[index(i, j)]; }
    Point2& operator()(std::size_t i, std::size_t j) { return coords_[index(i, j)]; }

    const std::vector<Point2>& coords() const noexcept { return coords_; }

    /// Nodes (i,j),(i+1,j),(i+1,j+1),(i,j+1).
    std::array<Point2, 4> cell(std::size_t i, std::size_t j) const;

    friend bool operator==(const StructuredMesh&, const StructuredMesh&) = default;

private:
    std::size_t ni_;
    std::size_t nj_;
    std::vector<Point2> coords_;
    Provenance provenance_;
};

struct QualityReport {
    double avg_min_angle = 0.0;
    double avg_max_angle = 0.0;
    double avg_cell_area = 0.0;
    std::size_t inverted_cells = 0;
    double generation_time = 0.0;
};

/// Interior angles (degrees) of a quad given in topological order.
std::array<double, 4> quad_angles(const std::array<Point2, 4>& quad);
double quad_signed_area(const std::array<Point2, 4>& quad);
bool quad_inverted(const std::array<Point2, 4>& quad);

/// Per-cell interior angles, cell (i,j) at index j*(ni-1) + i.
std::vector<std::array<double, 4>> included_angles(const StructuredMesh& mesh);
std::vector<double> cell_areas(const StructuredMesh& mesh);
QualityReport quality_report(const StructuredMesh& mesh, double elapsed_seconds);

void write_vtk(const StructuredMesh& mesh, std::ostream& out);
void export_vtk(const StructuredMesh& mesh, const std::string& path);

void write_mesh_csv(const StructuredMesh& mesh, std::ostream& out);
void export_csv(const StructuredMesh& mesh, const std::string& path);
StructuredMesh read_mesh_csv(std::istream& in, const std::string& source);
StructuredMesh import_mesh_csv(const std::string& path);

/// Position of one boundary grid node on its curve.
///
/// Boundary nodes are listed south, east, north, west; each corner belongs to
/// the first side in that order that reaches it.
struct BoundarySlot {
    std::size_t i = 0;
    std::size_t j = 0;
    Side side = Side::south;
    double t = 0.0;
};

/// 2(ni+nj)-4 slots covering every boundary node exactly once.
std::vector<BoundarySlot> boundary_layout(const CompGrid& grid);

struct BoundaryNode {
    BoundarySlot slot;
    Point2 target{};
};

/// Boundary layout with the exact curve sample of every slot.
std::vector<BoundaryNode> boundary_nodes(const DomainSpec& domain, const CompGrid& grid);

/// Shortest decimal form with 17 significant digits at most; round-trips exactly.
std::string format_double(double v);

}  // namespace elastimesh

#pragma once

#include "elastimesh/errors.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace elastimesh {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Coefficients of a kernel-regression fit of one boundary curve.
///
/// The curve is a least-squares cubic in the chord-length parameter t plus
/// an RBF expansion of the residual.
struct KernelFit {
    std::vector<double> centers;   ///< normalized chord-length parameter of each input point
    std::vector<double> coeff_x;   ///< expansion coefficients, x residual
    std::vector<double> coeff_y;   ///< expansion coefficients, y residual
    double kernel_width = 0.15;
    std::array<Point2, 4> trend{}; ///< cubic trend, coefficients of 1, t, t^2, t^3
    Point2 first{};
    Point2 last{};
    Point2 snap_start{};           ///< endpoint correction blended in near t = 0
    Point2 snap_end{};             ///< endpoint correction blended in near t = 1

    /// Fitted curve before endpoint snapping.
    Point2 raw(double t) const;
    /// Fitted curve with endpoint snapping applied.
    Point2 operator()(double t) const;
};

/// Parametric map t in [0,1] -> (x,y).
///
/// Cheap to copy; the evaluator and point data are shared and immutable.
class BoundaryCurve {
public:
    enum class Kind { analytic, polyline, fitted };

    static BoundaryCurve analytic(std::function<Point2(double)> f);
    static BoundaryCurve segment(Point2 from, Point2 to);
    /// Circular arc from angle theta0 to theta1 (radians).
    static BoundaryCurve arc(Point2 center, double radius, double theta0, double theta1);
    /// Piecewise-linear curve parameterized by normalized chord length.
    static BoundaryCurve polyline(std::vector<Point2> points);
    static BoundaryCurve fitted(KernelFit fit, std::vector<Point2> source);

    Point2 operator()(double t) const { return eval_(t); }

    Kind kind() const noexcept { return kind_; }
    /// Empty for analytic curves.
    std::span<const Point2> source_points() const noexcept;
    /// Parameter value of every source point (polyline and fitted kinds).
    std::span<const double> source_parameters() const noexcept;
    /// Null unless kind() == fitted.
    const KernelFit* fit() const noexcept { return fit_.get(); }

private:
    Kind kind_ = Kind::analytic;
    std::function<Point2(double)> eval_;
    std::shared_ptr<const std::vector<Point2>> points_;
    std::shared_ptr<const std::vector<double>> params_;
    std::shared_ptr<const KernelFit> fit_;
};

enum class Side { south = 0, east = 1, north = 2, west = 3 };

inline constexpr std::array<Side, 4> all_sides{Side::south, Side::east, Side::north, Side::west};

const char* side_name(Side s);

/// Four boundary curves of a logically rectangular domain.
///
/// Orientation: south and north run in +xi, west and east run in +eta, so
/// south(0)=west(0), south(1)=east(0), north(0)=west(1), north(1)=east(1).
struct DomainSpec {
    BoundaryCurve south;
    BoundaryCurve east;
    BoundaryCurve north;
    BoundaryCurve west;
    std::array<std::string, 4> names{"south", "east", "north", "west"};

    const BoundaryCurve& curve(Side s) const;
};

struct CornerReport {
    /// Gaps at the (xi,eta) corners (0,0), (1,0), (1,1), (0,1).
    std::array<double, 4> gaps{};
    bool pass = false;
};

CornerReport check_corner_compatibility(const DomainSpec& domain, double corner_tol);

/// Samples curve(k/(n-1)) for k = 0..n-1.
std::vector<Point2> sample_curve(const BoundaryCurve& curve, std::size_t n);

/// Normalized cumulative chord length of an ordered point list.
std::vector<double> chord_parameters(std::span<const Point2> points);

struct FitOptions {
    double kernel_width = 0.15;
    double regularization = 1e-6;
    double epsilon = 0.0;
    std::size_t max_sweeps = 20000;
    double gap_tolerance = 1e-8;
};

/// Fits x(t) and y(t) with RBF-kernel epsilon-insensitive regression.
///
/// epsilon == 0 solves the kernel ridge system directly; epsilon > 0 runs
/// cyclic coordinate descent on the dual with box constraint 1/regularization.
/// The result passes exactly through the first and last input points.
BoundaryCurve fit_boundary_curve(std::span<const Point2> points, const FitOptions& options = {});

BoundaryCurve fit_boundary_curve(std::span<const Point2> points, double kernel_width,
                                 double regularization, double epsilon);

/// Reads `x,y` rows; a non-numeric first line is treated as a header.
std::vector<Point2> read_points_csv(const std::string& path);

/// Area enclosed by the domain boundary, from a dense polygonal sampling.
double domain_area(const DomainSpec& domain, std::size_t samples_per_curve = 512);

struct BoundingBox {
    Point2 lo{};
    Point2 hi{};

    Point2 center() const { return 0.5 * (lo + hi); }
    Point2 extent() const { return hi - lo; }
};

BoundingBox bounding_box(const DomainSpec& domain, std::size_t samples_per_curve = 512);

}  // namespace elastimesh

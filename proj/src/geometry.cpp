#include "elastimesh/geometry.hpp"

#include "elastimesh/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numbers>
#include <sstream>

namespace elastimesh {

BoundaryCurve BoundaryCurve::analytic(std::function<Point2(double)> f) {
    if (!f) throw InvalidArgument("analytic curve needs an evaluator");
    BoundaryCurve c;
    c.kind_ = Kind::analytic;
    c.eval_ = std::move(f);
    return c;
}

BoundaryCurve BoundaryCurve::segment(Point2 from, Point2 to) {
    return analytic([from, to](double t) {
        if (t == 1.0) return to;
        return Point2{from.x + t * (to.x - from.x), from.y + t * (to.y - from.y)};
    });
}

BoundaryCurve BoundaryCurve::arc(Point2 center, double radius, double theta0, double theta1) {
    if (!(radius > 0.0)) throw InvalidArgument("arc radius must be positive");
    return analytic([=](double t) {
        const double th = theta0 + t * (theta1 - theta0);
        return Point2{center.x + radius * std::cos(th), center.y + radius * std::sin(th)};
    });
}

BoundaryCurve BoundaryCurve::polyline(std::vector<Point2> points) {
    if (points.size() < 2) throw InvalidArgument("polyline needs at least 2 points");
    auto params = chord_parameters(points);
    BoundaryCurve c;
    c.kind_ = Kind::polyline;
    c.points_ = std::make_shared<const std::vector<Point2>>(std::move(points));
    c.params_ = std::make_shared<const std::vector<double>>(std::move(params));
    c.eval_ = [pts = c.points_, ts = c.params_](double t) {
        const auto& p = *pts;
        const auto& s = *ts;
        if (t <= 0.0) return p.front();
        if (t >= 1.0) return p.back();
        // Segment k spans [s[k], s[k+1]); t == s[k] lands on p[k] exactly.
        const auto it = std::upper_bound(s.begin(), s.end(), t);
        const std::size_t k = static_cast<std::size_t>(it - s.begin()) - 1;
        const double len = s[k + 1] - s[k];
        if (len <= 0.0) return p[k];
        const double u = (t - s[k]) / len;
        return Point2{p[k].x + u * (p[k + 1].x - p[k].x), p[k].y + u * (p[k + 1].y - p[k].y)};
    };
    return c;
}

BoundaryCurve BoundaryCurve::fitted(KernelFit fit, std::vector<Point2> source) {
    BoundaryCurve c;
    c.kind_ = Kind::fitted;
    c.params_ = std::make_shared<const std::vector<double>>(fit.centers);
    c.points_ = std::make_shared<const std::vector<Point2>>(std::move(source));
    c.fit_ = std::make_shared<const KernelFit>(std::move(fit));
    c.eval_ = [f = c.fit_](double t) { return (*f)(t); };
    return c;
}

std::span<const Point2> BoundaryCurve::source_points() const noexcept {
    if (!points_) return {};
    return *points_;
}

std::span<const double> BoundaryCurve::source_parameters() const noexcept {
    if (!params_) return {};
    return *params_;
}

const char* side_name(Side s) {
    switch (s) {
        case Side::south: return "south";
        case Side::east: return "east";
        case Side::north: return "north";
        case Side::west: return "west";
    }
    return "?";
}

const BoundaryCurve& DomainSpec::curve(Side s) const {
    switch (s) {
        case Side::south: return south;
        case Side::east: return east;
        case Side::north: return north;
        case Side::west: return west;
    }
    throw InvalidArgument("bad side");
}

CornerReport check_corner_compatibility(const DomainSpec& d, double corner_tol) {
    CornerReport r;
    r.gaps[0] = distance(d.south(0.0), d.west(0.0));
    r.gaps[1] = distance(d.south(1.0), d.east(0.0));
    r.gaps[2] = distance(d.east(1.0), d.north(1.0));
    r.gaps[3] = distance(d.north(0.0), d.west(1.0));
    r.pass = std::all_of(r.gaps.begin(), r.gaps.end(), [&](double g) { return g <= corner_tol; });
    return r;
}

std::vector<Point2> sample_curve(const BoundaryCurve& curve, std::size_t n) {
    if (n < 2) throw InvalidArgument("sample_curve: n must be >= 2");
    std::vector<Point2> out;
    out.reserve(n);
    const double h = 1.0 / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = (k + 1 == n) ? 1.0 : static_cast<double>(k) * h;
        out.push_back(curve(t));
    }
    return out;
}

std::vector<double> chord_parameters(std::span<const Point2> points) {
    std::vector<double> t(points.size(), 0.0);
    for (std::size_t k = 1; k < points.size(); ++k)
        t[k] = t[k - 1] + distance(points[k - 1], points[k]);
    const double total = t.empty() ? 0.0 : t.back();
    if (total > 0.0) {
        for (auto& v : t) v /= total;
        t.back() = 1.0;
    }
    return t;
}

namespace {

bool parse_double(std::string_view s, double& out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::vector<Point2> read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open point file");
    std::vector<Point2> pts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto comma = line.find(',');
        Point2 p;
        const bool ok = comma != std::string::npos &&
                        parse_double(std::string_view(line).substr(0, comma), p.x) &&
                        parse_double(std::string_view(line).substr(comma + 1), p.y);
        if (!ok) {
            if (pts.empty() && lineno == 1) continue;  // header
            throw ParseError(path, lineno, "expected `x,y`");
        }
        pts.push_back(p);
    }
    return pts;
}

double domain_area(const DomainSpec& d, std::size_t n) {
    // Counter-clockwise walk: south, east, north reversed, west reversed.
    std::vector<Point2> poly;
    auto append = [&](const BoundaryCurve& c, bool reverse) {
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double t = static_cast<double>(k) / static_cast<double>(n - 1);
            poly.push_back(c(reverse ? 1.0 - t : t));
        }
    };
    append(d.south, false);
    append(d.east, false);
    append(d.north, true);
    append(d.west, true);
    double a = 0.0;
    for (std::size_t k = 0; k < poly.size(); ++k)
        a += cross(poly[k], poly[(k + 1) % poly.size()]);
    return 0.5 * a;
}

BoundingBox bounding_box(const DomainSpec& d, std::size_t n) {
    BoundingBox b{{INFINITY, INFINITY}, {-INFINITY, -INFINITY}};
    for (Side s : all_sides) {
        const auto& c = d.curve(s);
        auto include = [&](Point2 p) {
            b.lo.x = std::min(b.lo.x, p.x);
            b.lo.y = std::min(b.lo.y, p.y);
            b.hi.x = std::max(b.hi.x, p.x);
            b.hi.y = std::max(b.hi.y, p.y);
        };
        for (const auto& p : sample_curve(c, n)) include(p);
        for (const auto& p : c.source_points()) include(p);
    }
    return b;
}

}  // namespace elastimesh

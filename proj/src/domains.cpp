#include "elastimesh/domains.hpp"

#include "elastimesh/errors.hpp"

#include <numbers>
#include <set>

namespace elastimesh::domains {

namespace {

constexpr double pi = std::numbers::pi;

// West and east close the domain between the end points of south and north.
DomainSpec close_with_segments(BoundaryCurve south, BoundaryCurve north) {
    DomainSpec d;
    d.west = BoundaryCurve::segment(south(0.0), north(0.0));
    d.east = BoundaryCurve::segment(south(1.0), north(1.0));
    d.south = std::move(south);
    d.north = std::move(north);
    return d;
}

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
    const auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

void check_keys(const std::string& preset, const std::map<std::string, double>& p,
                std::set<std::string> allowed) {
    for (const auto& [k, v] : p)
        if (!allowed.count(k))
            throw InvalidArgument("preset " + preset + ": unknown parameter `" + k + "`");
}

}  // namespace

DomainSpec unit_square() {
    DomainSpec d;
    d.south = BoundaryCurve::segment({0, 0}, {1, 0});
    d.east = BoundaryCurve::segment({1, 0}, {1, 1});
    d.north = BoundaryCurve::segment({0, 1}, {1, 1});
    d.west = BoundaryCurve::segment({0, 0}, {0, 1});
    return d;
}

DomainSpec quarter_annulus(double r0, double r1) {
    if (!(r0 > 0.0 && r1 > r0)) throw InvalidArgument("quarter_annulus: need 0 < r0 < r1");
    DomainSpec d;
    d.south = BoundaryCurve::segment({r0, 0}, {r1, 0});
    d.east = BoundaryCurve::arc({0, 0}, r1, 0.0, 0.5 * pi);
    d.north = BoundaryCurve::segment({0, r0}, {0, r1});
    d.west = BoundaryCurve::arc({0, 0}, r0, 0.0, 0.5 * pi);
    d.names = {"axis_x", "outer_arc", "axis_y", "inner_arc"};
    return d;
}

DomainSpec wavy_channel(double amplitude, double waves, double length) {
    if (!(length > 0.0)) throw InvalidArgument("wavy_channel: length must be positive");
    if (!(std::abs(amplitude) < 0.5)) throw InvalidArgument("wavy_channel: |amplitude| must be < 0.5");
    auto wall = [=](double base) {
        return BoundaryCurve::analytic([=](double t) {
            return Point2{length * t, base + amplitude * std::sin(2.0 * pi * waves * t)};
        });
    };
    return close_with_segments(wall(0.0), wall(1.0));
}

DomainSpec s_duct(double offset, double length) {
    if (!(length > 0.0)) throw InvalidArgument("s_duct: length must be positive");
    auto wall = [=](double base) {
        return BoundaryCurve::analytic([=](double t) {
            return Point2{length * t, base + 0.5 * offset * (1.0 - std::cos(pi * t))};
        });
    };
    return close_with_segments(wall(0.0), wall(1.0));
}

DomainSpec polyline_l() {
    DomainSpec d;
    d.south = BoundaryCurve::segment({0, 0}, {2, 0});
    d.east = BoundaryCurve::segment({2, 0}, {2, 1});
    d.north = BoundaryCurve::polyline({{0, 2}, {1, 2}, {1, 1}, {2, 1}});
    d.west = BoundaryCurve::segment({0, 0}, {0, 2});
    return d;
}

DomainSpec make_preset(const std::string& name, const std::map<std::string, double>& p) {
    if (name == "unit_square") {
        check_keys(name, p, {});
        return unit_square();
    }
    if (name == "quarter_annulus") {
        check_keys(name, p, {"r0", "r1"});
        return quarter_annulus(param(p, "r0", 1.0), param(p, "r1", 2.0));
    }
    if (name == "wavy_channel") {
        check_keys(name, p, {"amplitude", "waves", "length"});
        return wavy_channel(param(p, "amplitude", 0.1), param(p, "waves", 2.0),
                            param(p, "length", 2.0));
    }
    if (name == "s_duct") {
        check_keys(name, p, {"offset", "length"});
        return s_duct(param(p, "offset", 1.0), param(p, "length", 3.0));
    }
    if (name == "polyline_L") {
        check_keys(name, p, {});
        return polyline_l();
    }
    throw InvalidArgument("unknown domain preset `" + name + "`");
}

std::vector<std::string> preset_names() {
    return {"unit_square", "quarter_annulus", "wavy_channel", "s_duct", "polyline_L"};
}

}  // namespace elastimesh::domains

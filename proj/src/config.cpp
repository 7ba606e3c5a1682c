// JSON experiment configuration.
//
// {
//   "domain": {"preset": "quarter_annulus", "params": {"r0": 1, "r1": 2}}
//          or {"curves": {"south": {...}, "east": {...}, "north": {...}, "west": {...}}},
//   "grid": {"ni": 21, "nj": 21},
//   "method": "tfi" | "pinn" | "pinn+hardbc",
//   "profile": "desk" | "paper",
//   "train": {TrainConfig fields},
//   "hardbc": "inverse_distance" | "literal",
//   "compare_methods": ["tfi", "pinn"],
//   "output_dir": "out"
// }
//
// A curve is {"type": "segment", "from": [x,y], "to": [x,y]},
// {"type": "arc", "center": [x,y], "radius": r, "theta0": a, "theta1": b},
// {"type": "polyline", "points": [[x,y], ...]} or
// {"type": "points", "file": "f.csv", "fit": "polyline" | "svr",
//  "kernel_width": .., "regularization": .., "epsilon": ..}.

#include "elastimesh/config.hpp"

#include "elastimesh/domains.hpp"
#include "elastimesh/tfi.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace elastimesh {

using nlohmann::json;

const char* method_name(Method m) {
    switch (m) {
        case Method::tfi: return "tfi";
        case Method::pinn: return "pinn";
        case Method::pinn_hardbc: return "pinn+hardbc";
    }
    return "?";
}

std::optional<Method> parse_method(std::string_view name) {
    for (auto m : {Method::tfi, Method::pinn, Method::pinn_hardbc})
        if (name == method_name(m)) return m;
    return std::nullopt;
}

namespace {

namespace fs = std::filesystem;

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

    const std::string& path() const { return path_; }
    const json& raw() const { return j_; }

    std::string child_path(const std::string& key) const { return path_ + "/" + key; }

    bool has(const std::string& key) const { return j_.contains(key); }

    Reader at(const std::string& key) const {
        if (!j_.contains(key)) throw ConfigError(child_path(key), "missing");
        return {j_.at(key), child_path(key)};
    }

    Reader object(const std::string& key) const {
        Reader r = at(key);
        if (!r.j_.is_object()) throw ConfigError(r.path_, "must be an object");
        return r;
    }

    double number(const std::string& key) const {
        Reader r = at(key);
        if (!r.j_.is_number()) throw ConfigError(r.path_, "must be a number");
        const double v = r.j_.get<double>();
        if (!std::isfinite(v)) throw ConfigError(r.path_, "must be finite");
        return v;
    }

    std::uint64_t count(const std::string& key) const {
        Reader r = at(key);
        if (!r.j_.is_number_integer() || r.j_.get<long long>() < 0)
            throw ConfigError(r.path_, "must be a non-negative integer");
        return r.j_.get<std::uint64_t>();
    }

    std::string text(const std::string& key) const {
        Reader r = at(key);
        if (!r.j_.is_string()) throw ConfigError(r.path_, "must be a string");
        return r.j_.get<std::string>();
    }

    Point2 point(const std::string& key) const { return at(key).as_point(); }

    Point2 as_point() const {
        if (!j_.is_array() || j_.size() != 2 || !j_[0].is_number() || !j_[1].is_number())
            throw ConfigError(path_, "must be a pair [x, y]");
        return {j_[0].get<double>(), j_[1].get<double>()};
    }

    void only(std::initializer_list<const char*> keys) const {
        for (const auto& [k, v] : j_.items()) {
            bool ok = false;
            for (const char* a : keys) ok = ok || k == a;
            if (!ok) throw ConfigError(child_path(k), "unknown field");
        }
    }

private:
    const json& j_;
    std::string path_;
};

std::string resolve(const std::string& base, const std::string& p) {
    const fs::path path(p);
    if (path.is_absolute() || base.empty()) return path.string();
    return (fs::path(base) / path).string();
}

BoundaryCurve parse_curve(const Reader& c, const std::string& base) {
    if (!c.raw().is_object()) throw ConfigError(c.path(), "must be an object");
    const std::string type = c.text("type");
    if (type == "segment") {
        c.only({"type", "from", "to"});
        return BoundaryCurve::segment(c.point("from"), c.point("to"));
    }
    if (type == "arc") {
        c.only({"type", "center", "radius", "theta0", "theta1"});
        const double r = c.number("radius");
        if (!(r > 0.0)) throw ConfigError(c.child_path("radius"), "must be positive");
        return BoundaryCurve::arc(c.point("center"), r, c.number("theta0"), c.number("theta1"));
    }
    if (type == "polyline") {
        c.only({"type", "points"});
        const Reader pts = c.at("points");
        if (!pts.raw().is_array() || pts.raw().size() < 2)
            throw ConfigError(pts.path(), "needs at least 2 points");
        std::vector<Point2> v;
        for (std::size_t k = 0; k < pts.raw().size(); ++k)
            v.push_back(Reader(pts.raw()[k], pts.path() + "/" + std::to_string(k)).as_point());
        try {
            return BoundaryCurve::polyline(std::move(v));
        } catch (const Error& e) {
            throw ConfigError(pts.path(), e.what());
        }
    }
    if (type == "points") {
        c.only({"type", "file", "fit", "kernel_width", "regularization", "epsilon"});
        const std::string file = resolve(base, c.text("file"));
        std::vector<Point2> pts;
        try {
            pts = read_points_csv(file);
        } catch (const Error& e) {
            throw ConfigError(c.child_path("file"), e.what());
        }
        const std::string fit = c.has("fit") ? c.text("fit") : "svr";
        try {
            if (fit == "polyline") return BoundaryCurve::polyline(std::move(pts));
            if (fit != "svr") throw ConfigError(c.child_path("fit"), "expected polyline or svr");
            FitOptions o;
            if (c.has("kernel_width")) o.kernel_width = c.number("kernel_width");
            if (c.has("regularization")) o.regularization = c.number("regularization");
            if (c.has("epsilon")) o.epsilon = c.number("epsilon");
            return fit_boundary_curve(pts, o);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(c.child_path("file"), e.what());
        }
    }
    throw ConfigError(c.child_path("type"), "unknown curve type `" + type + "`");
}

void parse_domain(const Reader& d, const std::string& base, RunConfig& rc) {
    if (d.has("preset")) {
        d.only({"preset", "params"});
        const std::string name = d.text("preset");
        std::map<std::string, double> params;
        if (d.has("params")) {
            const Reader p = d.object("params");
            for (const auto& [k, v] : p.raw().items()) params[k] = p.number(k);
        }
        try {
            rc.domain = domains::make_preset(name, params);
        } catch (const Error& e) {
            throw ConfigError(d.child_path("preset"), e.what());
        }
        rc.model_label = name;
        return;
    }
    d.only({"curves", "label"});
    const Reader curves = d.object("curves");
    curves.only({"south", "east", "north", "west"});
    rc.domain.south = parse_curve(curves.at("south"), base);
    rc.domain.east = parse_curve(curves.at("east"), base);
    rc.domain.north = parse_curve(curves.at("north"), base);
    rc.domain.west = parse_curve(curves.at("west"), base);
    rc.model_label = d.has("label") ? d.text("label") : "custom";
}

template <class E, class Parse>
E parse_enum(const Reader& r, const std::string& key, Parse parse, const char* expected) {
    const std::string s = r.text(key);
    const auto v = parse(s);
    if (!v) throw ConfigError(r.child_path(key), "expected one of " + std::string(expected));
    return *v;
}

void parse_train(const Reader& t, TrainConfig& c) {
    t.only({"epochs", "lr0", "decay", "decay_every", "optimizer", "beta1", "beta2", "adam_eps",
            "lame", "governing", "laplace_form", "reference_area", "interior_weight", "seed",
            "depth", "width", "activation", "box_margin", "history_stride", "engine", "threads"});
    if (t.has("epochs")) c.epochs = t.count("epochs");
    if (t.has("lr0")) c.lr0 = t.number("lr0");
    if (t.has("decay")) c.decay = t.number("decay");
    if (t.has("decay_every")) c.decay_every = t.count("decay_every");
    if (t.has("optimizer"))
        c.optimizer = parse_enum<Optimizer>(
            t, "optimizer",
            [](const std::string& s) -> std::optional<Optimizer> {
                if (s == "adam") return Optimizer::adam;
                if (s == "sgd") return Optimizer::sgd;
                return std::nullopt;
            },
            "adam, sgd");
    if (t.has("beta1")) c.beta1 = t.number("beta1");
    if (t.has("beta2")) c.beta2 = t.number("beta2");
    if (t.has("adam_eps")) c.adam_eps = t.number("adam_eps");
    if (t.has("lame")) {
        const Reader l = t.object("lame");
        l.only({"lambda", "mu"});
        if (l.has("lambda")) c.lame.lambda = l.number("lambda");
        if (l.has("mu")) c.lame.mu = l.number("mu");
    }
    if (t.has("governing"))
        c.governing = parse_enum<Governing>(
            t, "governing", [](const std::string& s) { return parse_governing(s); },
            "navier_lame, laplace, hyperbolic, monge_ampere");
    if (t.has("laplace_form"))
        c.laplace_form = parse_enum<LaplaceForm>(
            t, "laplace_form",
            [](const std::string& s) -> std::optional<LaplaceForm> {
                if (s == "winslow") return LaplaceForm::winslow;
                if (s == "literal") return LaplaceForm::literal;
                return std::nullopt;
            },
            "winslow, literal");
    if (t.has("reference_area")) c.reference_area = t.number("reference_area");
    if (t.has("interior_weight")) c.interior_weight = t.number("interior_weight");
    if (t.has("seed")) c.seed = t.count("seed");
    if (t.has("depth")) c.depth = t.count("depth");
    if (t.has("width")) c.width = t.count("width");
    if (t.has("activation"))
        c.activation = parse_enum<Activation>(
            t, "activation", [](const std::string& s) { return parse_activation(s); },
            "tanh, sigmoid, relu, leakyrelu, elu, selu");
    if (t.has("box_margin")) c.box_margin = t.number("box_margin");
    if (t.has("history_stride")) c.history_stride = t.count("history_stride");
    if (t.has("engine"))
        c.engine = parse_enum<GradientEngine>(
            t, "engine",
            [](const std::string& s) -> std::optional<GradientEngine> {
                if (s == "fused") return GradientEngine::fused;
                if (s == "tape") return GradientEngine::tape;
                return std::nullopt;
            },
            "fused, tape");
    if (t.has("threads")) c.threads = t.count("threads");
    if (c.epochs < 1) throw ConfigError(t.child_path("epochs"), "must be at least 1");
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir,
                       const ConfigOverrides& ov) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("/", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("/", "config must be a JSON object");
    const Reader root(doc, "");
    root.only({"domain", "grid", "method", "profile", "train", "hardbc", "compare_methods",
               "output_dir"});

    RunConfig rc;
    rc.profile = root.has("profile") ? root.text("profile") : "desk";
    if (ov.profile) rc.profile = *ov.profile;
    if (rc.profile == "desk")
        rc.train = TrainConfig::desk_profile();
    else if (rc.profile == "paper")
        rc.train = TrainConfig::paper_profile();
    else
        throw ConfigError("/profile", "expected desk or paper");

    parse_domain(root.object("domain"), base_dir, rc);

    if (root.has("train")) parse_train(root.object("train"), rc.train);
    rc.ni = rc.train.ni;
    rc.nj = rc.train.nj;
    if (root.has("grid")) {
        const Reader g = root.object("grid");
        g.only({"ni", "nj"});
        rc.ni = g.count("ni");
        rc.nj = g.count("nj");
        if (rc.ni < 3) throw ConfigError(g.child_path("ni"), "must be at least 3");
        if (rc.nj < 3) throw ConfigError(g.child_path("nj"), "must be at least 3");
        rc.train.ni = rc.ni;
        rc.train.nj = rc.nj;
    }
    if (root.has("method"))
        rc.method = parse_enum<Method>(
            root, "method", [](const std::string& s) { return parse_method(s); },
            "tfi, pinn, pinn+hardbc");
    if (root.has("hardbc"))
        rc.hardbc_rule = parse_enum<HardBcRule>(
            root, "hardbc",
            [](const std::string& s) -> std::optional<HardBcRule> {
                if (s == "inverse_distance") return HardBcRule::inverse_distance;
                if (s == "literal") return HardBcRule::literal;
                return std::nullopt;
            },
            "inverse_distance, literal");
    if (root.has("compare_methods")) {
        const Reader cm = root.at("compare_methods");
        if (!cm.raw().is_array() || cm.raw().empty())
            throw ConfigError(cm.path(), "must be a non-empty array");
        rc.compare_methods.clear();
        for (std::size_t k = 0; k < cm.raw().size(); ++k) {
            const auto& v = cm.raw()[k];
            const auto m = v.is_string() ? parse_method(v.get<std::string>()) : std::nullopt;
            if (!m) throw ConfigError(cm.path() + "/" + std::to_string(k), "unknown method");
            rc.compare_methods.push_back(*m);
        }
    }
    rc.output_dir = resolve(base_dir, root.has("output_dir") ? root.text("output_dir") : "out");

    if (ov.seed) rc.train.seed = *ov.seed;
    if (ov.threads) rc.train.threads = *ov.threads;

    try {
        validate(rc.train);
    } catch (const InvalidArgument& e) {
        throw ConfigError("/train", e.what());
    }
    const auto corners = check_corner_compatibility(rc.domain, tfi_corner_tolerance);
    if (!corners.pass) {
        static constexpr const char* names[4] = {"SW", "SE", "NE", "NW"};
        std::string msg = "curves do not meet at corner";
        for (std::size_t k = 0; k < 4; ++k)
            if (corners.gaps[k] > tfi_corner_tolerance)
                msg += std::string(" ") + names[k] + " (gap " + format_double(corners.gaps[k]) + ")";
        throw ConfigError("/domain", msg);
    }
    return rc;
}

RunConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path, "cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), fs::path(path).parent_path().string(), overrides);
}

}  // namespace elastimesh

#include "elastimesh/network.hpp"

#include "elastimesh/meshcore.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace elastimesh {

NetShape::HiddenOffsets NetShape::hidden(std::size_t layer) const {
    std::size_t pos = 0;
    for (std::size_t k = 0; k < layer; ++k) pos += 2 * width * (fan_in(k) + 1);
    const std::size_t fi = fan_in(layer);
    HiddenOffsets o{};
    o.fan_in = fi;
    o.w = pos;
    o.b = o.w + width * fi;
    o.v = o.b + width;
    o.c = o.v + width * fi;
    return o;
}

std::size_t NetShape::output_weights() const {
    if (depth == 0) return 0;
    const auto last = hidden(depth - 1);
    return last.c + width;
}

namespace {

// Uniform in [-bound, bound) from raw 64-bit draws; independent of the
// standard library's distribution implementation.
double uniform_sym(std::mt19937_64& rng, double bound) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return (2.0 * u - 1.0) * bound;
}

void check_shape(std::size_t depth, std::size_t width) {
    if (depth < 1 || width < 1) throw InvalidArgument("network needs depth >= 1 and width >= 1");
}

}  // namespace

PinnModel zero_model(std::size_t depth, std::size_t width, Activation activation) {
    check_shape(depth, width);
    PinnModel m;
    m.shape = {depth, width, activation};
    m.params.assign(m.shape.param_count(), 0.0);
    return m;
}

PinnModel init_model(std::size_t depth, std::size_t width, Activation activation,
                     std::uint64_t seed) {
    PinnModel m = zero_model(depth, width, activation);
    std::mt19937_64 rng(seed);
    auto& p = m.params;
    for (std::size_t layer = 0; layer < depth; ++layer) {
        const auto o = m.shape.hidden(layer);
        const double bound = std::sqrt(6.0 / static_cast<double>(o.fan_in + width));
        for (std::size_t k = 0; k < width * o.fan_in; ++k) p[o.w + k] = uniform_sym(rng, bound);
        for (std::size_t k = 0; k < width * o.fan_in; ++k) p[o.v + k] = uniform_sym(rng, bound);
        for (std::size_t k = 0; k < width; ++k) p[o.c + k] = gate_bias_init;
    }
    const double bound = std::sqrt(6.0 / static_cast<double>(width + network_outputs));
    const std::size_t wo = m.shape.output_weights();
    for (std::size_t k = 0; k < network_outputs * width; ++k) p[wo + k] = uniform_sym(rng, bound);
    return m;
}

void validate(const PinnModel& m) {
    if (m.shape.depth < 1 || m.shape.width < 1) throw InvalidArgument("model has an empty layer");
    if (m.params.size() != m.shape.param_count())
        throw InvalidArgument("model has " + std::to_string(m.params.size()) +
                              " parameters, shape needs " + std::to_string(m.shape.param_count()));
    for (double v : m.params)
        if (!std::isfinite(v)) throw NumericError("model has a non-finite parameter");
}

Point2 forward(const PinnModel& m, double xi, double eta) {
    const auto r = forward_generic<double, double>(m.shape, m.params, m.box, xi, eta);
    return {r[0], r[1]};
}

Jet evaluate_jet(const PinnModel& m, double xi, double eta) {
    return evaluate_jet_generic<double>(m.shape, std::span<const double>(m.params), m.box, xi, eta);
}

std::array<std::array<ad::HyperDual<double>, 2>, 3> jet_passes(const PinnModel& m, double xi,
                                                               double eta) {
    using H = ad::HyperDual<double>;
    auto pass = [&](double a_xi, double a_eta, double b_xi, double b_eta) {
        return forward_generic<H, double>(m.shape, m.params, m.box, H(xi, a_xi, b_xi, 0.0),
                                          H(eta, a_eta, b_eta, 0.0));
    };
    return {pass(1, 0, 1, 0), pass(0, 1, 0, 1), pass(1, 0, 0, 1)};
}

// Checkpoint format (text, one token group per line):
//   elastimesh-model 1
//   shape <depth> <width> <activation>
//   box <lo.x> <lo.y> <hi.x> <hi.y>
//   params <count>
//   <one value per line, shortest round-trip decimal>
void save_model(const PinnModel& m, const std::string& path) {
    validate(m);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    out << "elastimesh-model 1\n";
    out << "shape " << m.shape.depth << ' ' << m.shape.width << ' '
        << activation_name(m.shape.activation) << '\n';
    out << "box " << format_double(m.box.lo.x) << ' ' << format_double(m.box.lo.y) << ' '
        << format_double(m.box.hi.x) << ' ' << format_double(m.box.hi.y) << '\n';
    out << "params " << m.params.size() << '\n';
    for (double v : m.params) out << format_double(v) << '\n';
    if (!out) throw IoError(path, "write failed");
}

namespace {

double parse_value(const std::string& tok, const std::string& path, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError(path, line, "bad number `" + tok + "`");
    return v;
}

}  // namespace

PinnModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open model file");
    std::string line;
    std::size_t lineno = 0;
    auto next = [&](const char* what) {
        if (!std::getline(in, line)) throw ParseError(path, lineno + 1, std::string("missing ") + what);
        ++lineno;
        return std::istringstream(line);
    };

    {
        auto s = next("magic");
        std::string magic;
        int version = 0;
        s >> magic >> version;
        if (magic != "elastimesh-model" || version != 1)
            throw ParseError(path, lineno, "not an elastimesh model (version 1)");
    }
    PinnModel m;
    {
        auto s = next("shape");
        std::string tag, act;
        s >> tag >> m.shape.depth >> m.shape.width >> act;
        const auto a = parse_activation(act);
        if (tag != "shape" || !s || !a) throw ParseError(path, lineno, "bad shape line");
        m.shape.activation = *a;
    }
    {
        auto s = next("box");
        std::string tag, a, b, c, d;
        s >> tag >> a >> b >> c >> d;
        if (tag != "box" || !s) throw ParseError(path, lineno, "bad box line");
        m.box = {{parse_value(a, path, lineno), parse_value(b, path, lineno)},
                 {parse_value(c, path, lineno), parse_value(d, path, lineno)}};
    }
    std::size_t count = 0;
    {
        auto s = next("params");
        std::string tag;
        s >> tag >> count;
        if (tag != "params" || !s) throw ParseError(path, lineno, "bad params line");
    }
    if (m.shape.depth < 1 || m.shape.width < 1 || count != m.shape.param_count())
        throw ParseError(path, lineno, "parameter count does not match shape");
    m.params.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        next("parameter value");
        m.params.push_back(parse_value(line, path, lineno));
    }
    return m;
}

}  // namespace elastimesh

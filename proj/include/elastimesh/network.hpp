#pragma once

// The learned map (xi, eta) -> (x, y).
//
// Input augmentation (6 features), then `depth` gated hidden layers
//   u' = sigmoid(V u + c) * act(W u + b)        (elementwise)
// and a sigmoid output layer rescaled affinely to the model's output box.

#include "elastimesh/activation.hpp"
#include "elastimesh/errors.hpp"
#include "elastimesh/geometry.hpp"
#include "elastimesh/hyperdual.hpp"
#include "elastimesh/jet.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace elastimesh {

inline constexpr std::size_t augmented_inputs = 6;
inline constexpr std::size_t network_outputs = 2;

/// Pole-avoiding shift applied before tan/cot: [0,1] -> [0.1, 0.9].
template <class S>
S augment_shift(const S& z) {
    return 0.8 * z + 0.1;
}

/// [xi, eta, tan s(xi), tan s(eta), cot s(xi), cot s(eta)].
template <class S>
std::array<S, augmented_inputs> augment(const S& xi, const S& eta) {
    using std::tan;
    using ad::tan;
    const double p = static_cast<double>(ad::primal(xi));
    const double q = static_cast<double>(ad::primal(eta));
    if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0))
        throw InvalidArgument("augment: (xi, eta) must lie in [0,1]^2");
    const S sx = augment_shift(xi);
    const S se = augment_shift(eta);
    if constexpr (std::is_floating_point_v<S>) {
        return {xi, eta, tan(sx), tan(se), S(1) / tan(sx), S(1) / tan(se)};
    } else {
        return {xi, eta, tan(sx), tan(se), ad::cot(sx), ad::cot(se)};
    }
}

/// Layer sizes and the layout of the flat parameter vector.
///
/// Hidden layer k stores W (width x fan_in, row-major), b, V (same shape as W), c;
/// the output layer stores Wo (2 x width) and bo.
struct NetShape {
    std::size_t depth = 8;
    std::size_t width = 50;
    Activation activation = Activation::tanh;

    struct HiddenOffsets {
        std::size_t fan_in, w, b, v, c;
    };

    std::size_t fan_in(std::size_t layer) const { return layer == 0 ? augmented_inputs : width; }
    HiddenOffsets hidden(std::size_t layer) const;
    std::size_t output_weights() const;
    std::size_t output_bias() const { return output_weights() + network_outputs * width; }
    std::size_t param_count() const { return output_bias() + network_outputs; }
};

/// Network parameters plus the physical box the unit outputs are mapped to.
struct PinnModel {
    NetShape shape;
    std::vector<double> params;
    BoundingBox box{{0.0, 0.0}, {1.0, 1.0}};

    friend bool operator==(const PinnModel& a, const PinnModel& b) {
        return a.shape.depth == b.shape.depth && a.shape.width == b.shape.width &&
               a.shape.activation == b.shape.activation && a.params == b.params &&
               a.box.lo == b.box.lo && a.box.hi == b.box.hi;
    }
};

/// Glorot-uniform W and V, zero b, c = 2 (gates start mostly open).
PinnModel init_model(std::size_t depth, std::size_t width, Activation activation,
                     std::uint64_t seed);

/// Model with every parameter zero: outputs the box center everywhere.
PinnModel zero_model(std::size_t depth, std::size_t width, Activation activation);

inline constexpr double gate_bias_init = 2.0;

/// Checks the parameter vector against the shape.
void validate(const PinnModel& model);

namespace detail {

template <class S>
bool finite(const S& s) {
    if constexpr (std::is_floating_point_v<S>)
        return std::isfinite(s);
    else if constexpr (requires { s.d12; })
        return ad::all_finite(s);
    else
        return std::isfinite(ad::primal(s));
}

}  // namespace detail

/// Forward map for any scalar algebra S (double, long double, HyperDual<P>)
/// with parameters of type P. Returns physical (x, y).
template <class S, class P>
std::array<S, 2> forward_generic(const NetShape& shape, std::span<const P> params,
                                 const BoundingBox& box, const S& xi, const S& eta) {
    if (params.size() != shape.param_count())
        throw InvalidArgument("forward: parameter vector has wrong size");
    using ad::activate;
    const auto in = augment(xi, eta);
    std::vector<S> u(in.begin(), in.end());
    std::vector<S> next(shape.width);

    for (std::size_t layer = 0; layer < shape.depth; ++layer) {
        const auto off = shape.hidden(layer);
        for (std::size_t r = 0; r < shape.width; ++r) {
            S zh = S(params[off.b + r]);
            S zg = S(params[off.c + r]);
            for (std::size_t k = 0; k < off.fan_in; ++k) {
                zh = zh + params[off.w + r * off.fan_in + k] * u[k];
                zg = zg + params[off.v + r * off.fan_in + k] * u[k];
            }
            S h, g;
            if constexpr (std::is_floating_point_v<S>) {
                h = activation_derivative(shape.activation, 0, zh);
                g = activation_derivative(Activation::sigmoid, 0, zg);
            } else {
                h = activate(shape.activation, zh);
                g = activate(Activation::sigmoid, zg);
            }
            next[r] = g * h;
            if (!detail::finite(next[r]))
                throw NumericError("non-finite value in hidden layer " + std::to_string(layer));
        }
        u.assign(next.begin(), next.end());
    }

    const std::size_t wo = shape.output_weights();
    const std::size_t bo = shape.output_bias();
    const double lo[2] = {box.lo.x, box.lo.y};
    const double span[2] = {box.hi.x - box.lo.x, box.hi.y - box.lo.y};
    std::array<S, 2> out;
    for (std::size_t r = 0; r < network_outputs; ++r) {
        S z = S(params[bo + r]);
        for (std::size_t k = 0; k < shape.width; ++k) z = z + params[wo + r * shape.width + k] * u[k];
        S o;
        if constexpr (std::is_floating_point_v<S>)
            o = activation_derivative(Activation::sigmoid, 0, z);
        else
            o = activate(Activation::sigmoid, z);
        out[r] = lo[r] + span[r] * o;
        if (!detail::finite(out[r])) throw NumericError("non-finite value in output layer");
    }
    return out;
}

/// Physical (x, y) at (xi, eta).
Point2 forward(const PinnModel& model, double xi, double eta);

/// Second-order jet via three hyper-dual passes with seed pairs
/// (xi,xi), (eta,eta) and (xi,eta), for any parameter scalar P.
template <class P>
SecondOrderJet<P> evaluate_jet_generic(const NetShape& shape, std::span<const P> params,
                                       const BoundingBox& box, double xi, double eta) {
    using H = ad::HyperDual<P>;
    auto pass = [&](double a_xi, double a_eta, double b_xi, double b_eta) {
        return forward_generic<H, P>(shape, params, box, H(P(xi), P(a_xi), P(b_xi), P(0.0)),
                                     H(P(eta), P(a_eta), P(b_eta), P(0.0)));
    };
    const auto pxx = pass(1, 0, 1, 0);
    const auto pee = pass(0, 1, 0, 1);
    const auto pxe = pass(1, 0, 0, 1);
    SecondOrderJet<P> j;
    j.x = pxe[0].re;
    j.y = pxe[1].re;
    j.x_xi = pxe[0].d1;
    j.x_eta = pxe[0].d2;
    j.y_xi = pxe[1].d1;
    j.y_eta = pxe[1].d2;
    j.x_xixi = pxx[0].d12;
    j.y_xixi = pxx[1].d12;
    j.x_etaeta = pee[0].d12;
    j.y_etaeta = pee[1].d12;
    j.x_xieta = pxe[0].d12;
    j.y_xieta = pxe[1].d12;
    return j;
}

/// Jet of a trained model at (xi, eta).
Jet evaluate_jet(const PinnModel& model, double xi, double eta);

/// The three passes individually, for consistency checks: {xi-xi, eta-eta, xi-eta}.
std::array<std::array<ad::HyperDual<double>, 2>, 3> jet_passes(const PinnModel& model, double xi,
                                                               double eta);

void save_model(const PinnModel& model, const std::string& path);
PinnModel load_model(const std::string& path);

}  // namespace elastimesh

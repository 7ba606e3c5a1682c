#pragma once

#include <cmath>
#include <concepts>
#include <optional>
#include <string>
#include <string_view>

namespace elastimesh {

enum class Activation { tanh, sigmoid, relu, leakyrelu, elu, selu };

inline constexpr double leaky_slope = 0.01;
inline constexpr double selu_scale = 1.0507009873554804934193349852946;
inline constexpr double selu_alpha = 1.6732632423543772848170429916717;

const char* activation_name(Activation a);
std::optional<Activation> parse_activation(std::string_view name);

/// order-th derivative (0..3) of the activation at x.
///
/// The piecewise activations use the right-hand branch at x == 0.
template <std::floating_point F>
F activation_derivative(Activation kind, int order, F x) {
    switch (kind) {
        case Activation::tanh: {
            const F t = std::tanh(x);
            const F d1 = F(1) - t * t;
            if (order == 0) return t;
            if (order == 1) return d1;
            const F d2 = F(-2) * t * d1;
            if (order == 2) return d2;
            return F(-2) * (d1 * d1 + t * d2);
        }
        case Activation::sigmoid: {
            const F s = x >= F(0) ? F(1) / (F(1) + std::exp(-x))
                                  : std::exp(x) / (F(1) + std::exp(x));
            const F d1 = s * (F(1) - s);
            if (order == 0) return s;
            if (order == 1) return d1;
            const F d2 = d1 * (F(1) - F(2) * s);
            if (order == 2) return d2;
            return d2 * (F(1) - F(2) * s) - F(2) * d1 * d1;
        }
        case Activation::relu:
            if (order == 0) return x > F(0) ? x : F(0);
            if (order == 1) return x > F(0) ? F(1) : F(0);
            return F(0);
        case Activation::leakyrelu:
            if (order == 0) return x > F(0) ? x : F(leaky_slope) * x;
            if (order == 1) return x > F(0) ? F(1) : F(leaky_slope);
            return F(0);
        case Activation::elu:
            if (x > F(0)) return order == 0 ? x : (order == 1 ? F(1) : F(0));
            return order == 0 ? std::expm1(x) : std::exp(x);
        case Activation::selu:
            if (x > F(0))
                return order == 0 ? F(selu_scale) * x : (order == 1 ? F(selu_scale) : F(0));
            return order == 0 ? F(selu_scale * selu_alpha) * std::expm1(x)
                              : F(selu_scale * selu_alpha) * std::exp(x);
    }
    return F(0);
}

}  // namespace elastimesh

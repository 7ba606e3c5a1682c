#pragma once

#include <array>
#include <cstddef>

namespace elastimesh {

/// Values and all first/second partials of (x,y) with respect to (xi,eta) at one point.
/// The mixed partial is stored once; the map is C2 so x_xi_eta == x_eta_xi.
template <class T>
struct SecondOrderJet {
    T x{}, y{};
    T x_xi{}, x_eta{}, y_xi{}, y_eta{};
    T x_xixi{}, x_etaeta{}, x_xieta{};
    T y_xixi{}, y_etaeta{}, y_xieta{};

    static constexpr std::size_t size = 12;

    /// Fixed field order: x, y, x_xi, x_eta, y_xi, y_eta, x_xixi, x_etaeta,
    /// x_xieta, y_xixi, y_etaeta, y_xieta.
    std::array<T, size> to_array() const {
        return {x, y, x_xi, x_eta, y_xi, y_eta, x_xixi, x_etaeta, x_xieta, y_xixi, y_etaeta, y_xieta};
    }

    static SecondOrderJet from_array(const std::array<T, size>& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8], a[9], a[10], a[11]};
    }
};

using Jet = SecondOrderJet<double>;

/// Jet of the identity map x = xi, y = eta at (xi, eta).
inline Jet identity_jet(double xi, double eta) {
    Jet j;
    j.x = xi;
    j.y = eta;
    j.x_xi = 1.0;
    j.y_eta = 1.0;
    return j;
}

}  // namespace elastimesh

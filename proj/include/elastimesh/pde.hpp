#pragma once

// Governing-equation residuals on a second-order jet. All templates accept
// double or ad::Var so the same code feeds diagnostics and gradients.

#include "elastimesh/errors.hpp"
#include "elastimesh/jet.hpp"

#include <optional>
#include <string_view>
#include <utility>

namespace elastimesh {

struct LameConstants {
    double lambda = 1.0;
    double mu = 0.35;
};

/// Throws InvalidArgument unless mu > 0 and lambda + mu > 0.
void validate(const LameConstants& k);

enum class Governing { navier_lame, laplace, hyperbolic, monge_ampere };

/// Which metric cross term the Laplace residual uses.
enum class LaplaceForm {
    winslow,  ///< g12 = x_xi x_eta + y_xi y_eta
    literal,  ///< x_xi x_eta + y_xi x_eta, as printed in the source formula
};

const char* governing_name(Governing g);
std::optional<Governing> parse_governing(std::string_view name);

template <class T>
using Residual = std::pair<T, T>;

/// Navier-Lame operator written on the (xi, eta) lattice.
template <class T>
Residual<T> navier_lame_residual(const SecondOrderJet<T>& j, const LameConstants& k) {
    const T r1 = k.lambda * (j.x_xixi + j.y_xieta) +
                 k.mu * (2.0 * j.x_xixi + j.x_etaeta + j.y_xieta);
    const T r2 = k.mu * (j.x_xieta + j.y_xixi + 2.0 * j.y_etaeta) +
                 k.lambda * (j.x_xieta + j.y_etaeta);
    return {r1, r2};
}

/// Winslow (inverse Laplace) grid equations.
template <class T>
Residual<T> laplace_residual(const SecondOrderJet<T>& j, LaplaceForm form = LaplaceForm::winslow) {
    const T g11 = j.x_xi * j.x_xi + j.y_xi * j.y_xi;
    const T g22 = j.x_eta * j.x_eta + j.y_eta * j.y_eta;
    const T g12 = form == LaplaceForm::winslow ? j.x_xi * j.x_eta + j.y_xi * j.y_eta
                                               : j.x_xi * j.x_eta + j.y_xi * j.x_eta;
    const T r1 = j.x_xixi * g22 - 2.0 * j.x_xieta * g12 + j.x_etaeta * g11;
    const T r2 = j.y_xixi * g22 - 2.0 * j.y_xieta * g12 + j.y_etaeta * g11;
    return {r1, r2};
}

/// Orthogonality and cell-area conditions; S is the target Jacobian.
template <class T>
Residual<T> hyperbolic_residual(const SecondOrderJet<T>& j, double reference_area) {
    const T r1 = j.x_xi * j.x_eta + j.y_xi * j.y_eta;
    const T r2 = j.x_xi * j.y_eta - j.y_xi * j.x_eta - reference_area;
    return {r1, r2};
}

template <class T>
Residual<T> monge_ampere_residual(const SecondOrderJet<T>& j) {
    const T r1 = j.x_xixi * j.x_etaeta - j.x_xieta * j.x_xieta - j.x_xi * j.x_xi + j.x_eta * j.x_eta;
    const T r2 = j.y_xixi * j.y_etaeta - j.y_xieta * j.y_xieta - j.y_xi * j.y_xi + j.y_eta * j.y_eta;
    return {r1, r2};
}

/// Everything a residual selection needs.
struct ResidualSettings {
    Governing governing = Governing::navier_lame;
    LameConstants lame{};
    double reference_area = 1.0;
    LaplaceForm laplace_form = LaplaceForm::winslow;
};

template <class T>
Residual<T> governing_residual(const SecondOrderJet<T>& j, const ResidualSettings& s) {
    switch (s.governing) {
        case Governing::navier_lame: return navier_lame_residual(j, s.lame);
        case Governing::laplace: return laplace_residual(j, s.laplace_form);
        case Governing::hyperbolic: return hyperbolic_residual(j, s.reference_area);
        case Governing::monge_ampere: return monge_ampere_residual(j);
    }
    throw InvalidArgument("unknown governing equation");
}

}  // namespace elastimesh

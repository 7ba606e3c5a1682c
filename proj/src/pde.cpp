#include "elastimesh/pde.hpp"

#include <cmath>

namespace elastimesh {

void validate(const LameConstants& k) {
    if (!std::isfinite(k.lambda) || !std::isfinite(k.mu))
        throw InvalidArgument("Lame constants must be finite");
    if (!(k.mu > 0.0)) throw InvalidArgument("Lame constant mu must be positive");
    if (!(k.lambda + k.mu > 0.0)) throw InvalidArgument("Lame constants need lambda + mu > 0");
}

const char* governing_name(Governing g) {
    switch (g) {
        case Governing::navier_lame: return "navier_lame";
        case Governing::laplace: return "laplace";
        case Governing::hyperbolic: return "hyperbolic";
        case Governing::monge_ampere: return "monge_ampere";
    }
    return "?";
}

std::optional<Governing> parse_governing(std::string_view name) {
    for (auto g : {Governing::navier_lame, Governing::laplace, Governing::hyperbolic,
                   Governing::monge_ampere})
        if (name == governing_name(g)) return g;
    return std::nullopt;
}

}  // namespace elastimesh

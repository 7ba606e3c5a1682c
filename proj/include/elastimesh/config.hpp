#pragma once

#include "elastimesh/geometry.hpp"
#include "elastimesh/hardbc.hpp"
#include "elastimesh/training.hpp"

#include <optional>
#include <string>
#include <vector>

namespace elastimesh {

enum class Method { tfi, pinn, pinn_hardbc };

const char* method_name(Method m);
std::optional<Method> parse_method(std::string_view name);

/// One experiment, as read from a JSON config document.
struct RunConfig {
    DomainSpec domain;
    std::string model_label;  ///< preset name, or "custom"
    std::size_t ni = 21;
    std::size_t nj = 21;
    Method method = Method::tfi;
    TrainConfig train = TrainConfig::desk_profile();
    std::string profile = "desk";
    HardBcRule hardbc_rule = HardBcRule::inverse_distance;
    std::vector<Method> compare_methods{Method::tfi, Method::pinn};
    std::string output_dir = ".";
};

struct ConfigOverrides {
    std::optional<std::string> profile;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
};

/// Parses a config document. Relative point-file and output paths resolve
/// against `base_dir`. Errors throw ConfigError naming the offending field.
RunConfig parse_config(const std::string& json_text, const std::string& base_dir,
                       const ConfigOverrides& overrides = {});

RunConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});

}  // namespace elastimesh

#pragma once

#include "elastimesh/config.hpp"
#include "elastimesh/meshcore.hpp"
#include "elastimesh/training.hpp"

#include <exception>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace elastimesh {

inline constexpr int exit_ok = 0;
inline constexpr int exit_input_error = 2;
inline constexpr int exit_numeric_error = 3;

/// Maps an exception to the process exit code contract.
int exit_code_for(const std::exception& e);

struct MethodRun {
    Method method = Method::tfi;
    StructuredMesh mesh{2, 2, {{0, 0}, {1, 0}, {0, 1}, {1, 1}}};
    QualityReport quality;
    double boundary_deviation = 0.0;
    /// Seconds to produce the mesh, training included for the pinn methods.
    double seconds = 0.0;
};

/// Produces the mesh of one method. Pinn methods train once and cache the result in `trained`.
MethodRun run_method(const RunConfig& rc, Method method, std::optional<TrainResult>& trained);

int cmd_generate(const RunConfig& rc, std::ostream& log);
int cmd_compare(const RunConfig& rc, std::ostream& log);

enum class AblationAxis { governing, activation };

std::optional<AblationAxis> parse_axis(std::string_view name);

struct AblationRow {
    std::string variant;
    bool diverged = false;
    std::string error;
    LossBreakdown final_loss;
    QualityReport quality;
};

/// Variant names of an axis, in table order.
std::vector<std::string> ablation_variants(AblationAxis axis);
std::vector<AblationRow> run_ablation(const RunConfig& rc, AblationAxis axis);
int cmd_ablate(const RunConfig& rc, AblationAxis axis, std::ostream& log);

/// Re-writes a mesh CSV as `vtk` or `csv`; other formats throw InvalidArgument.
int cmd_export(const std::string& mesh_path, const std::string& format, const std::string& out_path,
               std::ostream& log);
/// Quality report of a mesh CSV; JSON goes to `out_path` when given.
int cmd_report(const std::string& mesh_path, const std::optional<std::string>& out_path,
               std::ostream& log);

}  // namespace elastimesh

// elastimesh command-line front end.

#include "elastimesh/commands.hpp"
#include "elastimesh/config.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

using namespace elastimesh;

namespace {

std::optional<std::size_t> threads_from_env() {
    const char* v = std::getenv("ELASTIMESH_THREADS");
    if (!v || !*v) return std::nullopt;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1) throw ConfigError("ELASTIMESH_THREADS", "must be a positive integer");
    return static_cast<std::size_t>(n);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structured quadrilateral mesh generation with a physics-informed network"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> profile;
    std::optional<std::uint64_t> seed;
    std::string axis = "governing";
    std::string mesh_path, format = "vtk", out_path;
    std::optional<std::string> report_out;

    auto add_run_options = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--profile", profile, "desk or paper")
            ->check(CLI::IsMember({"desk", "paper"}));
        sub->add_option("--seed", seed, "training seed");
    };
    auto* gen = app.add_subcommand("generate", "generate one mesh");
    add_run_options(gen);
    auto* cmp = app.add_subcommand("compare", "compare methods on one domain");
    add_run_options(cmp);
    auto* abl = app.add_subcommand("ablate", "train every variant of one axis");
    add_run_options(abl);
    abl->add_option("--axis", axis, "governing or activation")
        ->check(CLI::IsMember({"governing", "activation"}));
    auto* exp = app.add_subcommand("export", "convert a mesh CSV");
    exp->add_option("--mesh", mesh_path, "mesh CSV")->required();
    exp->add_option("--format", format, "vtk or csv");
    exp->add_option("--out", out_path, "output file")->required();
    auto* rep = app.add_subcommand("report", "quality report of a mesh CSV");
    rep->add_option("--mesh", mesh_path, "mesh CSV")->required();
    rep->add_option("--out", report_out, "write the report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input_error;
    }

    try {
        if (exp->parsed()) return cmd_export(mesh_path, format, out_path, std::cout);
        if (rep->parsed()) return cmd_report(mesh_path, report_out, std::cout);

        ConfigOverrides ov;
        ov.profile = profile;
        ov.seed = seed;
        ov.threads = threads_from_env();
        const RunConfig rc = load_config(config_path, ov);
        if (gen->parsed()) return cmd_generate(rc, std::cout);
        if (cmp->parsed()) return cmd_compare(rc, std::cout);
        return cmd_ablate(rc, *parse_axis(axis), std::cout);
    } catch (const std::exception& e) {
        std::cerr << "elastimesh: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

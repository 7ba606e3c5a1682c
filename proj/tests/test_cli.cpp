#include "elastimesh/meshcore.hpp"

#include <catch_amalgamated.hpp>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using Catch::Approx;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(ELASTIMESH_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::current_path() / "cli_scratch" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const json& j) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

json small_train(std::size_t epochs) {
    return {{"epochs", epochs}, {"depth", 1}, {"width", 6}, {"seed", 3}};
}

// compare.csv with the timing column blanked.
std::string without_timing(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        if (cells.size() > 4) cells[4] = "-";
        for (std::size_t k = 0; k < cells.size(); ++k) out += (k ? "," : "") + cells[k];
        out += "\n";
    }
    return out;
}

}  // namespace

TEST_CASE("generate with tfi on the unit square") {
    const auto dir = scratch("tfi");
    const auto cfg = write_config(
        dir, {{"domain", {{"preset", "unit_square"}}}, {"grid", {{"ni", 11}, {"nj", 11}}}, {"method", "tfi"}});
    REQUIRE(run("generate --config " + cfg.string()) == 0);
    const auto rep = read_json(dir / "out" / "report.json");
    REQUIRE(rep["method"] == "tfi");
    REQUIRE(rep["quality"]["avg_min_angle"].get<double>() == Approx(90.0).margin(1e-9));
    REQUIRE(rep["quality"]["avg_max_angle"].get<double>() == Approx(90.0).margin(1e-9));
    REQUIRE(rep["quality"]["inverted_cells"] == 0);
    REQUIRE(fs::exists(dir / "out" / "mesh.vtk"));
    REQUIRE(fs::exists(dir / "out" / "mesh.csv"));
    REQUIRE_FALSE(fs::exists(dir / "out" / "loss.csv"));
}

TEST_CASE("generate with pinn writes the training artifacts") {
    const auto dir = scratch("pinn");
    const auto cfg = write_config(dir, {{"domain", {{"preset", "quarter_annulus"}}},
                                        {"grid", {{"ni", 7}, {"nj", 7}}},
                                        {"method", "pinn+hardbc"},
                                        {"train", small_train(20)}});
    REQUIRE(run("generate --config " + cfg.string()) == 0);
    for (const char* f : {"mesh.vtk", "mesh.csv", "report.json", "loss.csv", "model.txt"})
        REQUIRE(fs::exists(dir / "out" / f));
    const auto rep = read_json(dir / "out" / "report.json");
    REQUIRE(rep["method"] == "pinn+hardbc");
    REQUIRE(rep["boundary_max_deviation"].get<double>() <= 1e-12);
    REQUIRE(rep["training"]["epochs"] == 20);
    REQUIRE(rep["training"]["final_loss"]["epoch"] == 20);
    const auto loss = slurp(dir / "out" / "loss.csv");
    REQUIRE(loss.rfind("epoch,equation_term,boundary_term,total\n", 0) == 0);
    REQUIRE(std::count(loss.begin(), loss.end(), '\n') == 22);
}

TEST_CASE("input errors exit with code 2") {
    const auto dir = scratch("errors");
    REQUIRE(run("generate --config " + (dir / "missing.json").string()) == 2);

    const json missing_points = {
        {"domain",
         {{"curves",
           {{"south", {{"type", "points"}, {"file", "nowhere.csv"}}},
            {"east", {{"type", "segment"}, {"from", {1, 0}}, {"to", {1, 1}}}},
            {"north", {{"type", "segment"}, {"from", {0, 1}}, {"to", {1, 1}}}},
            {"west", {{"type", "segment"}, {"from", {0, 0}}, {"to", {0, 1}}}}}}}},
        {"method", "tfi"}};
    REQUIRE(run("generate --config " + write_config(dir, missing_points).string()) == 2);

    REQUIRE(run("generate --config " +
                write_config(dir, {{"domain", {{"preset", "unit_square"}}}, {"colour", 1}}).string()) == 2);
    REQUIRE(run("generate --config " +
                write_config(dir, {{"domain", {{"preset", "unit_square"}}}, {"train", {{"lr0", -1}}}})
                    .string()) == 2);
    REQUIRE(run("generate --config " + write_config(dir, {{"domain", {{"preset", "moon"}}}}).string()) == 2);
    REQUIRE(run("frobnicate") == 2);
    REQUIRE(run("ablate --config " + write_config(dir, {{"domain", {{"preset", "unit_square"}}}}).string() +
                " --axis colour") == 2);
}

TEST_CASE("export, import and report") {
    const auto dir = scratch("export");
    const auto cfg = write_config(dir, {{"domain", {{"preset", "unit_square"}}},
                                        {"grid", {{"ni", 6}, {"nj", 4}}},
                                        {"method", "tfi"}});
    REQUIRE(run("generate --config " + cfg.string()) == 0);
    const auto mesh = (dir / "out" / "mesh.csv").string();

    REQUIRE(run("export --mesh " + mesh + " --format csv --out " + (dir / "again.csv").string()) == 0);
    REQUIRE(slurp(dir / "again.csv") == slurp(mesh));
    REQUIRE(elastimesh::import_mesh_csv((dir / "again.csv").string()) == elastimesh::import_mesh_csv(mesh));

    REQUIRE(run("export --mesh " + mesh + " --format vtk --out " + (dir / "again.vtk").string()) == 0);
    REQUIRE(slurp(dir / "again.vtk").find("DIMENSIONS 6 4 1") != std::string::npos);

    REQUIRE(run("export --mesh " + mesh + " --format stl --out " + (dir / "x.stl").string()) == 2);
    REQUIRE(run("export --mesh " + (dir / "none.csv").string() + " --format csv --out " +
                (dir / "y.csv").string()) == 2);

    REQUIRE(run("report --mesh " + mesh + " --out " + (dir / "rep.json").string()) == 0);
    const auto rep = read_json(dir / "rep.json");
    REQUIRE(rep["quality"]["avg_min_angle"].get<double>() == Approx(90.0).margin(1e-9));
    REQUIRE(rep["quality"]["avg_max_angle"].get<double>() == Approx(90.0).margin(1e-9));
}

TEST_CASE("generate is deterministic apart from timing") {
    const json j = {{"domain", {{"preset", "wavy_channel"}}},
                    {"grid", {{"ni", 6}, {"nj", 5}}},
                    {"method", "pinn"},
                    {"train", small_train(15)}};
    const auto a = scratch("det_a"), b = scratch("det_b");
    REQUIRE(run("generate --config " + write_config(a, j).string()) == 0);
    REQUIRE(run("generate --config " + write_config(b, j).string()) == 0);
    for (const char* f : {"mesh.csv", "mesh.vtk", "loss.csv", "model.txt"})
        REQUIRE(slurp(a / "out" / f) == slurp(b / "out" / f));
    auto ra = read_json(a / "out" / "report.json"), rb = read_json(b / "out" / "report.json");
    ra.erase("timing");
    rb.erase("timing");
    REQUIRE(ra == rb);

    const auto c = scratch("det_c");
    REQUIRE(run("generate --config " + write_config(c, j).string() + " --seed 4") == 0);
    REQUIRE(slurp(a / "out" / "mesh.csv") != slurp(c / "out" / "mesh.csv"));
}

TEST_CASE("compare writes one row per method") {
    const json j = {{"domain", {{"preset", "quarter_annulus"}}},
                    {"grid", {{"ni", 6}, {"nj", 6}}},
                    {"train", small_train(10)}};
    const auto a = scratch("cmp_a"), b = scratch("cmp_b");
    REQUIRE(run("compare --config " + write_config(a, j).string()) == 0);
    REQUIRE(run("compare --config " + write_config(b, j).string()) == 0);
    const auto csv = slurp(a / "out" / "compare.csv");
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "model,method,avg_min_angle,avg_max_angle,gen_time_s,avg_cell_area,inverted_cells");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    REQUIRE(rows == 2);
    REQUIRE(fs::exists(a / "out" / "compare.txt"));
    REQUIRE(without_timing(csv) == without_timing(slurp(b / "out" / "compare.csv")));
}

TEST_CASE("ablation tables have the expected rows") {
    const json j = {{"domain", {{"preset", "unit_square"}}},
                    {"grid", {{"ni", 5}, {"nj", 5}}},
                    {"train", small_train(5)}};
    const auto dir = scratch("ablate");
    const auto cfg = write_config(dir, j).string();
    REQUIRE(run("ablate --config " + cfg + " --axis governing") == 0);
    REQUIRE(run("ablate --config " + cfg + " --axis activation") == 0);

    auto first_column = [](const std::string& csv) {
        std::vector<std::string> col;
        std::istringstream in(csv);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) col.push_back(line.substr(0, line.find(',')));
        return col;
    };
    const auto gov = slurp(dir / "out" / "ablation_governing.csv");
    REQUIRE(first_column(gov) ==
            std::vector<std::string>{"hyperbolic", "monge_ampere", "laplace", "navier_lame"});
    const auto act = slurp(dir / "out" / "ablation_activation.csv");
    REQUIRE(first_column(act) ==
            std::vector<std::string>{"sigmoid", "relu", "leakyrelu", "tanh", "elu", "selu"});

    REQUIRE(run("ablate --config " + cfg + " --axis governing") == 0);
    REQUIRE(slurp(dir / "out" / "ablation_governing.csv") == gov);
}

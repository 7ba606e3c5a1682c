#include "elastimesh/commands.hpp"

#include "elastimesh/hardbc.hpp"
#include "elastimesh/tfi.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace elastimesh {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const TrainingError*>(&e) || dynamic_cast<const NumericError*>(&e) ||
        dynamic_cast<const DomainError*>(&e))
        return exit_numeric_error;
    return exit_input_error;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(dir, "cannot create directory: " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    out << text;
    if (!out) throw IoError(path, "write failed");
}

ordered_json quality_json(const QualityReport& q) {
    return {{"avg_min_angle", q.avg_min_angle},
            {"avg_max_angle", q.avg_max_angle},
            {"avg_cell_area", q.avg_cell_area},
            {"inverted_cells", q.inverted_cells}};
}

ordered_json loss_json(const LossBreakdown& l) {
    return {{"epoch", l.epoch},
            {"equation_term", l.equation_term},
            {"boundary_term", l.boundary_term},
            {"total", l.total}};
}

std::string tag(Method m) {
    std::string s = method_name(m);
    for (auto& c : s)
        if (c == '+') c = '_';
    return s;
}

std::string fixed(double v, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

}  // namespace

MethodRun run_method(const RunConfig& rc, Method method, std::optional<TrainResult>& trained) {
    MethodRun r;
    r.method = method;
    const auto t0 = std::chrono::steady_clock::now();
    if (method == Method::tfi) {
        r.mesh = tfi_generate(rc.domain, rc.ni, rc.nj);
        r.seconds = seconds_since(t0);
    } else {
        if (!trained) trained = train(rc.domain, rc.train);
        const auto t1 = std::chrono::steady_clock::now();
        r.mesh = generate_mesh(trained->model, CompGrid(rc.ni, rc.nj));
        if (method == Method::pinn_hardbc) r.mesh = apply_hard_bc(r.mesh, rc.domain, rc.hardbc_rule);
        r.seconds = trained->train_seconds + seconds_since(t1);
    }
    r.quality = quality_report(r.mesh, r.seconds);
    r.boundary_deviation = boundary_max_deviation(r.mesh, rc.domain);
    return r;
}

int cmd_generate(const RunConfig& rc, std::ostream& log) {
    std::optional<TrainResult> trained;
    const MethodRun run = run_method(rc, rc.method, trained);
    ensure_dir(rc.output_dir);
    export_vtk(run.mesh, join(rc.output_dir, "mesh.vtk"));
    export_csv(run.mesh, join(rc.output_dir, "mesh.csv"));

    ordered_json report = {{"model", rc.model_label},
                           {"method", method_name(rc.method)},
                           {"ni", rc.ni},
                           {"nj", rc.nj},
                           {"quality", quality_json(run.quality)},
                           {"boundary_max_deviation", run.boundary_deviation}};
    if (trained) {
        write_loss_history_csv(trained->history, join(rc.output_dir, "loss.csv"));
        save_model(trained->model, join(rc.output_dir, "model.txt"));
        report["training"] = {{"profile", rc.profile},
                              {"seed", rc.train.seed},
                              {"epochs", rc.train.epochs},
                              {"initial_loss", loss_json(trained->initial_loss())},
                              {"final_loss", loss_json(trained->final_loss())},
                              {"boundary_weights", trained->weights.weights()}};
    }
    report["timing"] = {{"gen_time_s", run.seconds}};
    write_text(join(rc.output_dir, "report.json"), report.dump(2) + "\n");

    log << method_name(rc.method) << " mesh " << rc.ni << "x" << rc.nj << " on " << rc.model_label
        << "\n";
    log << "  avg min angle  " << fixed(run.quality.avg_min_angle, 4) << "\n";
    log << "  avg max angle  " << fixed(run.quality.avg_max_angle, 4) << "\n";
    log << "  avg cell area  " << fixed(run.quality.avg_cell_area, 6) << "\n";
    log << "  inverted cells " << run.quality.inverted_cells << "\n";
    if (trained) log << "  final loss     " << trained->final_loss().total << "\n";
    log << "  time (s)       " << fixed(run.seconds, 3) << "\n";
    log << "wrote " << rc.output_dir << "\n";
    return exit_ok;
}

int cmd_compare(const RunConfig& rc, std::ostream& log) {
    std::optional<TrainResult> trained;
    std::vector<MethodRun> runs;
    for (Method m : rc.compare_methods) runs.push_back(run_method(rc, m, trained));

    ensure_dir(rc.output_dir);
    std::ostringstream csv;
    csv << "model,method,avg_min_angle,avg_max_angle,gen_time_s,avg_cell_area,inverted_cells\n";
    for (const auto& r : runs) {
        csv << rc.model_label << ',' << method_name(r.method) << ','
            << format_double(r.quality.avg_min_angle) << ','
            << format_double(r.quality.avg_max_angle) << ',' << format_double(r.seconds) << ','
            << format_double(r.quality.avg_cell_area) << ',' << r.quality.inverted_cells << '\n';
        export_csv(r.mesh, join(rc.output_dir, "mesh_" + tag(r.method) + ".csv"));
        export_vtk(r.mesh, join(rc.output_dir, "mesh_" + tag(r.method) + ".vtk"));
    }
    write_text(join(rc.output_dir, "compare.csv"), csv.str());
    if (trained) write_loss_history_csv(trained->history, join(rc.output_dir, "loss.csv"));

    std::ostringstream table;
    char line[256];
    std::snprintf(line, sizeof line, "%-16s %-12s %10s %10s %10s %12s %8s\n", "model", "method",
                  "min_angle", "max_angle", "time_s", "cell_area", "inverted");
    table << line;
    for (const auto& r : runs) {
        std::snprintf(line, sizeof line, "%-16s %-12s %10.4f %10.4f %10.4f %12.6f %8zu\n",
                      rc.model_label.c_str(), method_name(r.method), r.quality.avg_min_angle,
                      r.quality.avg_max_angle, r.seconds, r.quality.avg_cell_area,
                      r.quality.inverted_cells);
        table << line;
    }
    write_text(join(rc.output_dir, "compare.txt"), table.str());
    log << table.str();
    return exit_ok;
}

std::optional<AblationAxis> parse_axis(std::string_view name) {
    if (name == "governing") return AblationAxis::governing;
    if (name == "activation") return AblationAxis::activation;
    return std::nullopt;
}

std::vector<std::string> ablation_variants(AblationAxis axis) {
    if (axis == AblationAxis::governing) return {"hyperbolic", "monge_ampere", "laplace", "navier_lame"};
    return {"sigmoid", "relu", "leakyrelu", "tanh", "elu", "selu"};
}

std::vector<AblationRow> run_ablation(const RunConfig& rc, AblationAxis axis) {
    std::vector<AblationRow> rows;
    for (const auto& v : ablation_variants(axis)) {
        RunConfig variant = rc;
        if (axis == AblationAxis::governing)
            variant.train.governing = *parse_governing(v);
        else
            variant.train.activation = *parse_activation(v);
        AblationRow row;
        row.variant = v;
        try {
            const TrainResult t = train(variant.domain, variant.train);
            row.final_loss = t.final_loss();
            const auto mesh = generate_mesh(t.model, CompGrid(rc.ni, rc.nj));
            row.quality = quality_report(mesh, t.train_seconds);
        } catch (const TrainingError& e) {
            row.diverged = true;
            row.error = e.what();
        } catch (const NumericError& e) {
            row.diverged = true;
            row.error = e.what();
        } catch (const DegenerateCell& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

int cmd_ablate(const RunConfig& rc, AblationAxis axis, std::ostream& log) {
    const auto rows = run_ablation(rc, axis);
    const std::string axis_name = axis == AblationAxis::governing ? "governing" : "activation";
    ensure_dir(rc.output_dir);
    std::ostringstream csv;
    csv << axis_name
        << ",status,final_loss,equation_term,boundary_term,avg_min_angle,avg_max_angle,"
           "inverted_cells\n";
    auto num = [](bool ok, double v) { return ok ? format_double(v) : std::string("nan"); };
    for (const auto& r : rows) {
        const bool ok = !r.diverged;
        const bool q = ok && r.error.empty();
        csv << r.variant << ',' << (r.diverged ? "diverged" : "ok") << ','
            << num(ok, r.final_loss.total) << ',' << num(ok, r.final_loss.equation_term) << ','
            << num(ok, r.final_loss.boundary_term) << ',' << num(q, r.quality.avg_min_angle) << ','
            << num(q, r.quality.avg_max_angle) << ','
            << (q ? std::to_string(r.quality.inverted_cells) : std::string("nan")) << '\n';
    }
    write_text(join(rc.output_dir, "ablation_" + axis_name + ".csv"), csv.str());

    char line[256];
    std::snprintf(line, sizeof line, "%-14s %-9s %14s %12s\n", axis_name.c_str(), "status",
                  "final_loss", "max_angle");
    log << line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-14s %-9s %14.6g %12.4f\n", r.variant.c_str(),
                      r.diverged ? "diverged" : "ok", r.diverged ? NAN : r.final_loss.total,
                      r.error.empty() && !r.diverged ? r.quality.avg_max_angle : NAN);
        log << line;
    }
    return exit_ok;
}

int cmd_export(const std::string& mesh_path, const std::string& format, const std::string& out_path,
               std::ostream& log) {
    if (format != "vtk" && format != "csv")
        throw InvalidArgument("unknown export format `" + format + "` (expected vtk or csv)");
    const StructuredMesh mesh = import_mesh_csv(mesh_path);
    if (format == "vtk")
        export_vtk(mesh, out_path);
    else
        export_csv(mesh, out_path);
    log << "wrote " << out_path << "\n";
    return exit_ok;
}

int cmd_report(const std::string& mesh_path, const std::optional<std::string>& out_path,
               std::ostream& log) {
    const StructuredMesh mesh = import_mesh_csv(mesh_path);
    const QualityReport q = quality_report(mesh, 0.0);
    ordered_json j = {{"mesh", mesh_path}, {"ni", mesh.ni()}, {"nj", mesh.nj()}};
    j["quality"] = quality_json(q);
    if (out_path) write_text(*out_path, j.dump(2) + "\n");
    log << "avg min angle  " << fixed(q.avg_min_angle, 4) << "\n";
    log << "avg max angle  " << fixed(q.avg_max_angle, 4) << "\n";
    log << "avg cell area  " << fixed(q.avg_cell_area, 6) << "\n";
    log << "inverted cells " << q.inverted_cells << "\n";
    return exit_ok;
}

}  // namespace elastimesh

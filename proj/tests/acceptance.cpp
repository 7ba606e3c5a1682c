// Acceptance run: one PASS/FAIL line per criterion.

#include "elastimesh/domains.hpp"
#include "elastimesh/hardbc.hpp"
#include "elastimesh/pde.hpp"
#include "elastimesh/tfi.hpp"
#include "elastimesh/training.hpp"

#include <json.hpp>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace elastimesh;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int failures = 0;

void verdict(int id, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << detail << std::endl;
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

bool close(double got, double want, double rtol, double atol) {
    return std::abs(got - want) <= atol + rtol * std::abs(want);
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(ELASTIMESH_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::current_path() / "acceptance_scratch" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const json& j) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

void residual_identities() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        Jet j;
        j.x = u(rng);
        j.y = u(rng);
        j.x_xi = u(rng);
        j.x_eta = u(rng);
        j.y_xi = u(rng);
        j.y_eta = u(rng);
        const auto [a1, a2] = navier_lame_residual(j, LameConstants{1.0, 0.35});
        const auto [b1, b2] = laplace_residual(j);
        worst = std::max({worst, std::abs(a1), std::abs(a2), std::abs(b1), std::abs(b2)});
    }
    const auto h = hyperbolic_residual(identity_jet(0.5, 0.5), 1.0);
    const double s = seconds_since(t0);
    verdict(1, worst <= 1e-12 && h.first == 0.0 && h.second == 0.0 && s < 1.0,
            "max |r| on 200 affine jets " + fmt(worst) + ", hyperbolic identity (" + fmt(h.first) +
                ", " + fmt(h.second) + "), " + fmt(s) + " s");
}

void autodiff_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u01(0.05, 0.95);
    const std::array<Activation, 3> acts{Activation::tanh, Activation::sigmoid, Activation::elu};
    double worst_jet = 0.0;
    bool jet_ok = true;
    const long double h = 1e-4L;
    for (int k = 0; k < 50; ++k) {
        auto m = init_model(1 + k % 3, 4 + k % 5, acts[k % 3], 1000 + k);
        m.box = {{-1.0, 0.0}, {2.0, 1.5}};
        const std::vector<long double> pl(m.params.begin(), m.params.end());
        auto f = [&](long double xi, long double eta) {
            return forward_generic<long double, long double>(m.shape, std::span<const long double>(pl),
                                                             m.box, xi, eta);
        };
        auto central = [&](double xi, double eta, long double h) {
            std::array<std::array<long double, 6>, 2> d{};
            const auto c = f(xi, eta);
            const auto xp = f(xi + h, eta), xm = f(xi - h, eta), ep = f(xi, eta + h), em = f(xi, eta - h);
            const auto pp = f(xi + h, eta + h), pm = f(xi + h, eta - h), mp = f(xi - h, eta + h),
                       mm = f(xi - h, eta - h);
            for (int r = 0; r < 2; ++r)
                d[r] = {c[r], (xp[r] - xm[r]) / (2 * h), (ep[r] - em[r]) / (2 * h),
                        (xp[r] - 2 * c[r] + xm[r]) / (h * h), (ep[r] - 2 * c[r] + em[r]) / (h * h),
                        (pp[r] - pm[r] - mp[r] + mm[r]) / (4 * h * h)};
            return d;
        };
        const double xi = u01(rng), eta = u01(rng);
        const auto j = evaluate_jet(m, xi, eta).to_array();
        // Central differences at h = 1e-4 with one Richardson step (h/2) to drop the O(h^2) term.
        const auto coarse = central(xi, eta, h), fine = central(xi, eta, h / 2);
        for (int r = 0; r < 2; ++r) {
            // Jet field order: x, y, x_xi, x_eta, y_xi, y_eta, x_xixi, x_etaeta, x_xieta, y_...
            const double got[6] = {j[r], j[2 + 2 * r], j[3 + 2 * r], j[6 + 3 * r], j[7 + 3 * r], j[8 + 3 * r]};
            for (int q = 0; q < 6; ++q) {
                const double want = static_cast<double>((4 * fine[r][q] - coarse[r][q]) / 3);
                jet_ok = jet_ok && close(got[q], want, 1e-6, 1e-12);
                worst_jet = std::max(worst_jet, std::abs(got[q] - want) / std::max(std::abs(want), 1e-12));
            }
        }
    }

    const auto d = domains::quarter_annulus();
    const TrainConfig cfg;
    const auto settings = loss_settings(cfg, d);
    const auto problem = make_problem(d, CompGrid(4, 4), settings);
    auto m = init_model(1, 4, Activation::tanh, 7);
    m.box = output_box(d, 0.1);
    BoundaryWeights w;
    w.logits = {0.4, -0.2, 0.0, 0.9};
    const auto tape = loss_gradient_tape(m, w, problem);
    const auto fused = loss_gradient_fused(m, w, problem);
    const std::size_t np = m.params.size();
    auto loss_at = [&](const std::vector<long double>& th) {
        auto jets = [&](double xi, double eta) {
            return evaluate_jet_generic<long double>(m.shape, std::span<const long double>(th.data(), np),
                                                     m.box, xi, eta);
        };
        const std::array<long double, 4> lg{th[np], th[np + 1], th[np + 2], th[np + 3]};
        return assemble_loss<long double>(jets, problem.points, problem.targets,
                                          std::span<const long double, 4>(lg), settings)
            .total;
    };
    std::vector<long double> th(m.params.begin(), m.params.end());
    for (double l : w.logits) th.push_back(l);
    bool grad_ok = true;
    double worst_grad = 0.0;
    for (std::size_t k = 0; k < th.size(); ++k) {
        auto tp = th, tm = th;
        tp[k] += 1e-6L;
        tm[k] -= 1e-6L;
        const double fd = static_cast<double>((loss_at(tp) - loss_at(tm)) / 2e-6L);
        for (const auto* g : {&tape.grad, &fused.grad}) {
            grad_ok = grad_ok && close((*g)[k], fd, 1e-4, 1e-9);
            worst_grad = std::max(worst_grad, std::abs((*g)[k] - fd) / std::max(std::abs(fd), 1e-9));
        }
    }
    const double s = seconds_since(t0);
    verdict(2, jet_ok && grad_ok && s < 30.0,
            "jet max rel err " + fmt(worst_jet) + " over 50 models, loss gradient max rel err " +
                fmt(worst_grad) + " over " + std::to_string(th.size()) + " entries, " + fmt(s) + " s");
}

void tfi_exactness() {
    const auto t0 = std::chrono::steady_clock::now();
    double angle_err = 0.0;
    for (const auto& cell : included_angles(tfi_generate(domains::unit_square(), 21, 21)))
        for (double a : cell) angle_err = std::max(angle_err, std::abs(a - 90.0));
    const auto d = domains::quarter_annulus();
    const auto mesh = tfi_generate(d, 21, 21);
    double dev = 0.0;
    for (const auto& b : boundary_nodes(d, CompGrid(21, 21))) {
        const Point2 p = mesh(b.slot.i, b.slot.j);
        dev = std::max(dev, distance(p, b.target));
        if (b.slot.side == Side::west) dev = std::max(dev, std::abs(norm(p) - 1.0));
        if (b.slot.side == Side::east) dev = std::max(dev, std::abs(norm(p) - 2.0));
        if (b.slot.side == Side::south) dev = std::max(dev, std::abs(p.y));
        if (b.slot.side == Side::north) dev = std::max(dev, std::abs(p.x));
    }
    const double s = seconds_since(t0);
    verdict(3, angle_err <= 1e-9 && dev <= 1e-12 && s < 1.0,
            "square angle err " + fmt(angle_err) + ", annulus boundary dev " + fmt(dev) + ", " +
                fmt(s) + " s");
}

void desk_training() {
    const auto d = domains::quarter_annulus();
    const TrainConfig cfg = TrainConfig::desk_profile();
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = train(d, cfg);
    const double s = seconds_since(t0);
    bool finite = true;
    for (const auto& h : r.history)
        finite = finite && std::isfinite(h.total) && std::isfinite(h.equation_term) &&
                 std::isfinite(h.boundary_term);
    const double first = r.initial_loss().total, last = r.final_loss().total;
    const bool c4 = finite && last <= 0.01 * first && last <= 5e-2 && s <= 300.0 &&
                    cfg.depth == 2 && cfg.width == 16 && cfg.ni == 21 && cfg.epochs == 2000 &&
                    cfg.lr0 == 1e-3 && cfg.lame.lambda == 1.0 && cfg.lame.mu == 0.35;
    verdict(4, c4,
            "quarter annulus desk run: initial " + fmt(first) + ", final " + fmt(last) + " (ratio " +
                fmt(last / first) + "), finite history " + (finite ? "yes" : "no") + ", " + fmt(s) + " s");

    const auto raw = generate_mesh(r.model, CompGrid(cfg.ni, cfg.nj));
    const auto snapped = apply_hard_bc(raw, d);
    const auto q = quality_report(snapped, 0.0);
    const double dev = boundary_max_deviation(snapped, d);
    const bool band = q.avg_min_angle >= 40.0 && q.avg_min_angle <= 140.0 && q.avg_max_angle >= 40.0 &&
                      q.avg_max_angle <= 140.0;
    verdict(5, q.inverted_cells == 0 && dev <= 1e-12 && band,
            "pinn+hardbc: inverted " + std::to_string(q.inverted_cells) + " (raw mesh " +
                std::to_string(quality_report(raw, 0.0).inverted_cells) + "), boundary dev " + fmt(dev) +
                ", avg min/max angle " + fmt(q.avg_min_angle) + "/" + fmt(q.avg_max_angle));
}

void hardbc_properties() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto d = domains::quarter_annulus();
    const auto exact = tfi_generate(d, 15, 12);
    const bool fixpoint = apply_hard_bc(exact, d).coords() == exact.coords();
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    double idem = 0.0;
    bool bounded = true;
    for (int trial = 0; trial < 10; ++trial) {
        StructuredMesh m = exact;
        for (std::size_t j = 0; j < m.nj(); ++j)
            for (std::size_t i = 0; i < m.ni(); ++i) m(i, j) = m(i, j) + Point2{u(rng), u(rng)};
        const auto once = apply_hard_bc(m, d);
        const auto twice = apply_hard_bc(once, d);
        for (std::size_t k = 0; k < m.size(); ++k)
            idem = std::max(idem, distance(once.coords()[k], twice.coords()[k]));
        double largest = 0.0;
        for (const auto& b : boundary_nodes(d, CompGrid(m.ni(), m.nj())))
            largest = std::max(largest, distance(b.target, m(b.slot.i, b.slot.j)));
        for (std::size_t j = 1; j + 1 < m.nj(); ++j)
            for (std::size_t i = 1; i + 1 < m.ni(); ++i)
                bounded = bounded && distance(once(i, j), m(i, j)) <= largest * (1 + 1e-12);
    }
    const double s = seconds_since(t0);
    verdict(6, fixpoint && idem <= 1e-12 && bounded && s < 1.0,
            std::string("fixpoint ") + (fixpoint ? "yes" : "no") + ", idempotence gap " + fmt(idem) +
                ", bounded " + (bounded ? "yes" : "no") + ", " + fmt(s) + " s");
}

std::vector<std::vector<std::string>> read_rows(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

void ablation_shape() {
    // Reduced epochs keep the ten training runs short; only the table shape is checked.
    const json j = {{"domain", {{"preset", "quarter_annulus"}}},
                    {"grid", {{"ni", 11}, {"nj", 11}}},
                    {"train", {{"epochs", 200}, {"seed", 0}}}};
    const auto a = fresh_dir("ablate_a"), b = fresh_dir("ablate_b");
    const auto ca = write_config(a, j).string(), cb = write_config(b, j).string();
    bool ok = true;
    for (const char* axis : {"governing", "activation"}) {
        ok = ok && run_cli("ablate --config " + ca + " --axis " + axis) == 0;
        ok = ok && run_cli("ablate --config " + cb + " --axis " + axis) == 0;
    }
    const auto gov = read_rows(a / "out" / "ablation_governing.csv");
    const auto act = read_rows(a / "out" / "ablation_activation.csv");
    auto names = [](const auto& rows) {
        std::vector<std::string> n;
        for (const auto& r : rows) n.push_back(r.empty() ? "" : r[0]);
        return n;
    };
    ok = ok && names(gov) == std::vector<std::string>{"hyperbolic", "monge_ampere", "laplace", "navier_lame"};
    ok = ok && names(act) ==
                   std::vector<std::string>{"sigmoid", "relu", "leakyrelu", "tanh", "elu", "selu"};
    const bool same = slurp(a / "out" / "ablation_governing.csv") ==
                          slurp(b / "out" / "ablation_governing.csv") &&
                      slurp(a / "out" / "ablation_activation.csv") ==
                          slurp(b / "out" / "ablation_activation.csv");
    std::string losses;
    for (const auto& r : gov)
        if (r.size() > 2) losses += " " + r[0] + "=" + r[2];
    verdict(7, ok && same,
            std::to_string(gov.size()) + " governing rows, " + std::to_string(act.size()) +
                " activation rows, repeat identical " + (same ? "yes" : "no") + "; final losses" + losses);
}

void determinism() {
    const json gen = {{"domain", {{"preset", "wavy_channel"}}},
                      {"grid", {{"ni", 9}, {"nj", 7}}},
                      {"method", "pinn+hardbc"},
                      {"train", {{"epochs", 100}, {"seed", 5}}}};
    const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
    bool ok = run_cli("generate --config " + write_config(a, gen).string()) == 0 &&
              run_cli("generate --config " + write_config(b, gen).string()) == 0;
    for (const char* f : {"mesh.csv", "mesh.vtk", "loss.csv", "model.txt"})
        ok = ok && slurp(a / "out" / f) == slurp(b / "out" / f);
    auto ra = json::parse(slurp(a / "out" / "report.json"));
    auto rb = json::parse(slurp(b / "out" / "report.json"));
    ra.erase("timing");
    rb.erase("timing");
    ok = ok && ra == rb;

    json cmp = gen;
    cmp.erase("method");
    const auto c = fresh_dir("det_c"), e = fresh_dir("det_e");
    ok = ok && run_cli("compare --config " + write_config(c, cmp).string()) == 0 &&
         run_cli("compare --config " + write_config(e, cmp).string()) == 0;
    auto strip = [](std::vector<std::vector<std::string>> rows) {
        for (auto& r : rows)
            if (r.size() > 4) r[4].clear();
        return rows;
    };
    ok = ok && strip(read_rows(c / "out" / "compare.csv")) == strip(read_rows(e / "out" / "compare.csv"));
    ok = ok && slurp(c / "out" / "loss.csv") == slurp(e / "out" / "loss.csv");
    verdict(8, ok, "generate and compare repeated with the same seed give identical outputs");
}

struct VtkCheck {
    bool ok = false;
    std::string why;
};

VtkCheck validate_vtk(const fs::path& p, std::size_t ni, std::size_t nj) {
    std::ifstream in(p);
    std::string line;
    auto expect = [&](const std::string& prefix) {
        return std::getline(in, line) && line.rfind(prefix, 0) == 0;
    };
    if (!expect("# vtk DataFile Version")) return {false, "header"};
    if (!std::getline(in, line)) return {false, "title"};
    if (!expect("ASCII")) return {false, "ASCII"};
    if (!expect("DATASET STRUCTURED_GRID")) return {false, "dataset"};
    std::string tag, type;
    std::size_t a = 0, b = 0, c = 0, n = 0;
    in >> tag >> a >> b >> c;
    if (tag != "DIMENSIONS" || a != ni || b != nj || c != 1) return {false, "dimensions"};
    in >> tag >> n >> type;
    if (tag != "POINTS" || n != a * b * c) return {false, "point count"};
    double v;
    std::size_t values = 0;
    while (in >> v) ++values;
    if (!in.eof() || values != 3 * n) return {false, "point data"};
    return {true, ""};
}

void round_trips() {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    std::vector<Point2> pts;
    for (int k = 0; k < 13 * 9; ++k) pts.push_back({u(rng) / 7.0, u(rng) * 1e-9});
    const StructuredMesh m(13, 9, pts, Provenance::pinn);
    const auto dir = fresh_dir("formats");
    export_csv(m, (dir / "m.csv").string());
    const auto back = import_mesh_csv((dir / "m.csv").string());
    const bool csv_ok = back.ni() == 13 && back.nj() == 9 && back.coords() == m.coords();
    export_vtk(m, (dir / "m.vtk").string());
    const auto v1 = validate_vtk(dir / "m.vtk", 13, 9);
    export_vtk(tfi_generate(domains::s_duct(), 21, 11), (dir / "s.vtk").string());
    const auto v2 = validate_vtk(dir / "s.vtk", 21, 11);
    verdict(9, csv_ok && v1.ok && v2.ok,
            std::string("csv round trip ") + (csv_ok ? "exact" : "differs") + ", vtk " +
                (v1.ok && v2.ok ? "valid" : "invalid (" + v1.why + v2.why + ")"));
}

}  // namespace

int main() {
    residual_identities();
    autodiff_oracle();
    tfi_exactness();
    desk_training();
    hardbc_properties();
    ablation_shape();
    determinism();
    round_trips();
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}

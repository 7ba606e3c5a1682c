#include "elastimesh/training.hpp"

#include "elastimesh/meshcore.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

namespace elastimesh {

TrainConfig TrainConfig::paper_profile() { return TrainConfig{}; }

TrainConfig TrainConfig::desk_profile() {
    TrainConfig c;
    c.depth = 2;
    c.width = 16;
    c.epochs = 2000;
    c.lr0 = 1e-3;
    c.ni = 21;
    c.nj = 21;
    return c;
}

void validate(const TrainConfig& c) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw InvalidArgument(std::string("training config: ") + what);
    };
    require(c.epochs >= 1, "epochs must be at least 1");
    require(std::isfinite(c.lr0) && c.lr0 > 0.0, "lr0 must be positive");
    require(c.decay > 0.0 && c.decay <= 1.0, "decay must lie in (0, 1]");
    require(c.decay_every >= 1, "decay_every must be at least 1");
    require(c.beta1 >= 0.0 && c.beta1 < 1.0, "beta1 must lie in [0, 1)");
    require(c.beta2 >= 0.0 && c.beta2 < 1.0, "beta2 must lie in [0, 1)");
    require(c.adam_eps > 0.0, "adam_eps must be positive");
    require(c.ni >= 3 && c.nj >= 3, "grid needs at least 3x3 nodes");
    require(c.depth >= 1 && c.width >= 1, "network needs depth >= 1 and width >= 1");
    require(std::isfinite(c.interior_weight) && c.interior_weight >= 0.0,
            "interior_weight must be non-negative");
    require(c.box_margin > 0.0 && std::isfinite(c.box_margin), "box_margin must be positive");
    require(c.history_stride >= 1, "history_stride must be at least 1");
    require(c.threads >= 1, "threads must be at least 1");
    require(std::isfinite(c.reference_area), "reference_area must be finite");
    validate(c.lame);
}

std::array<double, 4> BoundaryWeights::weights() const {
    return softmax4<double>(std::span<const double, 4>(logits));
}

CollocationSet collocation_points(const CompGrid& grid) {
    CollocationSet s;
    for (std::size_t j = 1; j + 1 < grid.nj(); ++j)
        for (std::size_t i = 1; i + 1 < grid.ni(); ++i)
            s.interior.push_back({i, j, grid.xi(i), grid.eta(j)});
    for (const auto& slot : boundary_layout(grid))
        s.boundary.push_back({slot, grid.xi(slot.i), grid.eta(slot.j)});
    return s;
}

std::vector<Point2> boundary_targets(const DomainSpec& domain, const CollocationSet& points) {
    std::vector<Point2> t;
    t.reserve(points.boundary.size());
    for (const auto& p : points.boundary) t.push_back(domain.curve(p.slot.side)(p.slot.t));
    return t;
}

LossSettings loss_settings(const TrainConfig& cfg, const DomainSpec& domain) {
    LossSettings s;
    s.residual.governing = cfg.governing;
    s.residual.lame = cfg.lame;
    s.residual.laplace_form = cfg.laplace_form;
    const Point2 e = bounding_box(domain).extent();
    s.length_scale = std::max(e.x, e.y);
    if (!(s.length_scale > 0.0)) throw DegenerateGeometry("domain has an empty bounding box");
    const double area = cfg.reference_area > 0.0 ? cfg.reference_area : domain_area(domain);
    s.residual.reference_area = area / (s.length_scale * s.length_scale);
    s.interior_weight = cfg.interior_weight;
    return s;
}

LossBreakdown compute_loss(const JetMapping& mapping, const DomainSpec& domain,
                           const CollocationSet& points, const BoundaryWeights& weights,
                           const LossSettings& settings) {
    const auto targets = boundary_targets(domain, points);
    const auto terms = assemble_loss<double>(mapping, points, targets,
                                             std::span<const double, 4>(weights.logits), settings);
    return {terms.equation, terms.boundary, terms.total, 0};
}

TrainingProblem make_problem(const DomainSpec& domain, const CompGrid& grid,
                             const LossSettings& settings) {
    TrainingProblem p;
    p.points = collocation_points(grid);
    p.targets = boundary_targets(domain, p.points);
    p.settings = settings;
    return p;
}

LossGradient loss_gradient_tape(const PinnModel& model, const BoundaryWeights& weights,
                                const TrainingProblem& problem) {
    validate(model);
    ad::Tape tape;
    std::vector<ad::Var> params;
    params.reserve(model.params.size());
    for (double v : model.params) params.push_back(tape.parameter(v));
    std::array<ad::Var, 4> logits;
    for (std::size_t k = 0; k < 4; ++k) logits[k] = tape.parameter(weights.logits[k]);

    auto jet_at = [&](double xi, double eta) {
        return evaluate_jet_generic<ad::Var>(model.shape, std::span<const ad::Var>(params),
                                             model.box, xi, eta);
    };
    const auto terms = assemble_loss<ad::Var>(jet_at, problem.points, problem.targets,
                                              std::span<const ad::Var, 4>(logits),
                                              problem.settings);
    LossGradient out;
    out.grad = ad::backprop(tape, terms.total);
    out.loss = {terms.equation.value(), terms.boundary.value(), terms.total.value(), 0};
    return out;
}

double lr_at_epoch(std::size_t epoch, const TrainConfig& cfg) {
    const auto k = static_cast<double>(epoch / cfg.decay_every);
    return cfg.lr0 * std::pow(cfg.decay, k);
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& s, double lr,
               double beta1, double beta2, double eps) {
    if (grads.size() != params.size()) throw InvalidArgument("adam: gradient size mismatch");
    if (s.m.size() != params.size()) {
        s.m.assign(params.size(), 0.0);
        s.v.assign(params.size(), 0.0);
        s.step = 0;
    }
    ++s.step;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(s.step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(s.step));
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double g = grads[k];
        s.m[k] = beta1 * s.m[k] + (1.0 - beta1) * g;
        s.v[k] = beta2 * s.v[k] + (1.0 - beta2) * g * g;
        const double mh = s.m[k] / c1;
        const double vh = s.v[k] / c2;
        params[k] -= lr * mh / (std::sqrt(vh) + eps);
    }
}

void sgd_step(std::span<double> params, std::span<const double> grads, double lr) {
    if (grads.size() != params.size()) throw InvalidArgument("sgd: gradient size mismatch");
    for (std::size_t k = 0; k < params.size(); ++k) params[k] -= lr * grads[k];
}

BoundingBox output_box(const DomainSpec& domain, double margin) {
    BoundingBox b = bounding_box(domain);
    const Point2 e = b.extent();
    const double pad = margin * std::max(e.x, e.y);
    const double px = e.x > 0.0 ? margin * e.x : pad;
    const double py = e.y > 0.0 ? margin * e.y : pad;
    if (!(px > 0.0) || !(py > 0.0)) throw DegenerateGeometry("domain has an empty bounding box");
    b.lo = b.lo - Point2{px, py};
    b.hi = b.hi + Point2{px, py};
    return b;
}

namespace {

bool all_finite(const LossGradient& g) {
    if (!std::isfinite(g.loss.total)) return false;
    return std::all_of(g.grad.begin(), g.grad.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

TrainResult train(const DomainSpec& domain, const TrainConfig& cfg, const TrainObserver& observer) {
    validate(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const CompGrid grid(cfg.ni, cfg.nj);
    const TrainingProblem problem = make_problem(domain, grid, loss_settings(cfg, domain));

    TrainResult r;
    r.model = init_model(cfg.depth, cfg.width, cfg.activation, cfg.seed);
    r.model.box = output_box(domain, cfg.box_margin);
    const std::size_t np = r.model.params.size();

    std::optional<FusedEngine> fused;
    if (cfg.engine == GradientEngine::fused) fused.emplace(r.model.shape, problem, cfg.threads);
    auto gradient = [&](std::size_t epoch) {
        try {
            LossGradient g = fused ? fused->evaluate(r.model, r.weights)
                                   : loss_gradient_tape(r.model, r.weights, problem);
            if (!all_finite(g)) throw TrainingError(epoch, "loss or gradient is not finite");
            g.loss.epoch = epoch;
            return g;
        } catch (const NumericError& e) {
            throw TrainingError(epoch, e.what());
        } catch (const DomainError& e) {
            throw TrainingError(epoch, e.what());
        }
    };

    std::vector<double> theta(np + 4);
    std::vector<double> grad;
    AdamState adam;
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        LossGradient g = gradient(e);
        if (e % cfg.history_stride == 0) r.history.push_back(g.loss);
        std::copy(r.model.params.begin(), r.model.params.end(), theta.begin());
        std::copy(r.weights.logits.begin(), r.weights.logits.end(), theta.begin() + np);
        const double lr = lr_at_epoch(e, cfg);
        if (cfg.optimizer == Optimizer::adam)
            adam_step(theta, g.grad, adam, lr, cfg.beta1, cfg.beta2, cfg.adam_eps);
        else
            sgd_step(theta, g.grad, lr);
        std::copy(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(np),
                  r.model.params.begin());
        std::copy(theta.begin() + static_cast<std::ptrdiff_t>(np), theta.end(),
                  r.weights.logits.begin());
        if (observer) observer(e + 1, r.model, r.weights);
    }
    r.history.push_back(gradient(cfg.epochs).loss);
    r.train_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

StructuredMesh generate_mesh(const PinnModel& model, const CompGrid& grid) {
    validate(model);
    std::vector<Point2> coords;
    coords.reserve(grid.size());
    for (std::size_t j = 0; j < grid.nj(); ++j)
        for (std::size_t i = 0; i < grid.ni(); ++i) coords.push_back(forward(model, grid.xi(i), grid.eta(j)));
    return StructuredMesh(grid.ni(), grid.nj(), std::move(coords), Provenance::pinn);
}

void write_loss_history_csv(const std::vector<LossBreakdown>& history, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    out << "epoch,equation_term,boundary_term,total\n";
    for (const auto& h : history)
        out << h.epoch << ',' << format_double(h.equation_term) << ','
            << format_double(h.boundary_term) << ',' << format_double(h.total) << '\n';
    if (!out) throw IoError(path, "write failed");
}

const char* optimizer_name(Optimizer o) { return o == Optimizer::adam ? "adam" : "sgd"; }

}  // namespace elastimesh

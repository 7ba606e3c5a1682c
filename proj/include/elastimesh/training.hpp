#pragma once

#include "elastimesh/geometry.hpp"
#include "elastimesh/meshcore.hpp"
#include "elastimesh/network.hpp"
#include "elastimesh/pde.hpp"
#include "elastimesh/tape.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace elastimesh {

enum class Optimizer { adam, sgd };

/// How parameter gradients of the loss are computed during training.
enum class GradientEngine {
    fused,  ///< batched layer-wise jet propagation with a hand-derived adjoint
    tape,   ///< scalar tape over hyper-dual arithmetic; slow, used as reference
};

struct TrainConfig {
    std::size_t epochs = 15000;
    double lr0 = 1e-5;
    double decay = 0.99;
    std::size_t decay_every = 1000;
    Optimizer optimizer = Optimizer::adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    LameConstants lame{};
    Governing governing = Governing::navier_lame;
    LaplaceForm laplace_form = LaplaceForm::winslow;
    /// Target Jacobian for the hyperbolic residual; <= 0 means the domain area.
    double reference_area = 0.0;
    std::size_t ni = 21;
    std::size_t nj = 21;
    double interior_weight = 1.0;
    std::uint64_t seed = 0;
    std::size_t depth = 8;
    std::size_t width = 50;
    Activation activation = Activation::tanh;
    /// Output box = domain bounding box grown by this fraction of its extent per side.
    double box_margin = 0.1;
    std::size_t history_stride = 1;
    GradientEngine engine = GradientEngine::fused;
    std::size_t threads = 1;

    /// 8x50 network, 15000 epochs, lr 1e-5.
    static TrainConfig paper_profile();
    /// 2x16 network, 2000 epochs, lr 1e-3, 21x21 grid.
    static TrainConfig desk_profile();
};

void validate(const TrainConfig& cfg);

/// Learnable per-curve weights, stored as logits; weights are their softmax.
struct BoundaryWeights {
    std::array<double, 4> logits{};

    std::array<double, 4> weights() const;
};

struct LossBreakdown {
    double equation_term = 0.0;
    double boundary_term = 0.0;
    double total = 0.0;
    std::size_t epoch = 0;
};

struct InteriorPoint {
    std::size_t i = 0;
    std::size_t j = 0;
    double xi = 0.0;
    double eta = 0.0;
};

struct BoundaryPoint {
    BoundarySlot slot;
    double xi = 0.0;
    double eta = 0.0;
};

struct CollocationSet {
    std::vector<InteriorPoint> interior;
    std::vector<BoundaryPoint> boundary;
};

/// Interior nodes ((ni-2)(nj-2), row-major) and boundary nodes (boundary_layout order).
CollocationSet collocation_points(const CompGrid& grid);

/// Curve target of every boundary collocation point.
std::vector<Point2> boundary_targets(const DomainSpec& domain, const CollocationSet& points);

/// The loss is evaluated in normalized coordinates: lengths are divided by
/// `length_scale` (the larger bounding-box extent), one factor for both axes
/// so the governing equations keep their solutions.
struct LossSettings {
    ResidualSettings residual{};
    double interior_weight = 1.0;
    double length_scale = 1.0;
};

template <class T>
SecondOrderJet<T> scale_jet(const SecondOrderJet<T>& j, double s) {
    auto a = j.to_array();
    for (auto& v : a) v = v * s;
    return SecondOrderJet<T>::from_array(a);
}

LossSettings loss_settings(const TrainConfig& cfg, const DomainSpec& domain);

template <class T>
struct LossTerms {
    T equation{};
    T boundary{};
    T total{};
};

/// Softmax with the largest logit shifted out.
template <class T>
std::array<T, 4> softmax4(std::span<const T, 4> logits) {
    using std::exp;
    using ad::exp;
    double m = static_cast<double>(ad::primal(logits[0]));
    for (const auto& l : logits) m = std::max(m, static_cast<double>(ad::primal(l)));
    std::array<T, 4> e;
    T sum = T(0.0);
    for (std::size_t k = 0; k < 4; ++k) {
        e[k] = exp(logits[k] - T(m));
        sum = sum + e[k];
    }
    for (auto& v : e) v = v / sum;
    return e;
}

/// Interior residual mean plus weighted boundary mismatch mean.
///
/// `jet_at(xi, eta)` supplies SecondOrderJet<T>; boundary weights are
/// 4 * softmax(logits) so uniform logits give the plain mean.
template <class T, class JetAt>
LossTerms<T> assemble_loss(JetAt&& jet_at, const CollocationSet& pts,
                           std::span<const Point2> targets, std::span<const T, 4> logits,
                           const LossSettings& s) {
    if (targets.size() != pts.boundary.size())
        throw InvalidArgument("loss: one target per boundary point required");
    LossTerms<T> out;
    const double inv = 1.0 / s.length_scale;
    T eq = T(0.0);
    for (const auto& p : pts.interior) {
        const SecondOrderJet<T> j = scale_jet<T>(jet_at(p.xi, p.eta), inv);
        const auto [r1, r2] = governing_residual(j, s.residual);
        eq = eq + s.interior_weight * (r1 * r1 + r2 * r2);
    }
    if (!pts.interior.empty()) eq = eq * (1.0 / static_cast<double>(pts.interior.size()));

    const auto w = softmax4<T>(logits);
    T bd = T(0.0);
    for (std::size_t k = 0; k < pts.boundary.size(); ++k) {
        const auto& p = pts.boundary[k];
        const SecondOrderJet<T> j = jet_at(p.xi, p.eta);
        const T dx = (j.x - targets[k].x) * inv;
        const T dy = (j.y - targets[k].y) * inv;
        bd = bd + 4.0 * w[static_cast<std::size_t>(p.slot.side)] * (dx * dx + dy * dy);
    }
    if (!pts.boundary.empty()) bd = bd * (1.0 / static_cast<double>(pts.boundary.size()));
    out.equation = eq;
    out.boundary = bd;
    out.total = eq + bd;
    return out;
}

using JetMapping = std::function<Jet(double, double)>;

/// Loss of any jet-supplying mapping (trained model or analytic map).
LossBreakdown compute_loss(const JetMapping& mapping, const DomainSpec& domain,
                           const CollocationSet& points, const BoundaryWeights& weights,
                           const LossSettings& settings);

/// Everything fixed during training: points, targets, loss settings.
struct TrainingProblem {
    CollocationSet points;
    std::vector<Point2> targets;
    LossSettings settings;
};

TrainingProblem make_problem(const DomainSpec& domain, const CompGrid& grid,
                             const LossSettings& settings);

/// Loss and its gradient with respect to [model params..., 4 logits].
struct LossGradient {
    LossBreakdown loss;
    std::vector<double> grad;
};

/// Reference route: records the whole loss on one scalar tape and back-propagates.
LossGradient loss_gradient_tape(const PinnModel& model, const BoundaryWeights& weights,
                                const TrainingProblem& problem);

/// Batched route used for training; gradients agree with the tape route to rounding.
class FusedEngine {
public:
    FusedEngine(const NetShape& shape, const TrainingProblem& problem, std::size_t threads = 1);
    ~FusedEngine();
    FusedEngine(FusedEngine&&) noexcept;
    FusedEngine& operator=(FusedEngine&&) noexcept;

    LossGradient evaluate(const PinnModel& model, const BoundaryWeights& weights) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

LossGradient loss_gradient_fused(const PinnModel& model, const BoundaryWeights& weights,
                                 const TrainingProblem& problem);

/// lr0 * decay^floor(epoch / decay_every).
double lr_at_epoch(std::size_t epoch, const TrainConfig& cfg);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::size_t step = 0;
};

/// One bias-corrected Adam update in place.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

void sgd_step(std::span<double> params, std::span<const double> grads, double lr);

struct TrainResult {
    PinnModel model;
    BoundaryWeights weights;
    std::vector<LossBreakdown> history;
    double train_seconds = 0.0;

    /// Loss after the last update.
    const LossBreakdown& final_loss() const { return history.back(); }
    const LossBreakdown& initial_loss() const { return history.front(); }
};

/// Called after each update with the number of completed epochs.
using TrainObserver = std::function<void(std::size_t epochs_done, const PinnModel&,
                                         const BoundaryWeights&)>;

/// Full-batch training. History holds the loss before every `history_stride`-th
/// update plus the loss after the final update (epoch == cfg.epochs).
TrainResult train(const DomainSpec& domain, const TrainConfig& cfg,
                  const TrainObserver& observer = {});

/// Output box for a domain: bounding box grown by `margin` of its extent.
BoundingBox output_box(const DomainSpec& domain, double margin);

/// Evaluates the model at every node of the grid.
StructuredMesh generate_mesh(const PinnModel& model, const CompGrid& grid);

void write_loss_history_csv(const std::vector<LossBreakdown>& history, const std::string& path);

const char* optimizer_name(Optimizer o);

}  // namespace elastimesh

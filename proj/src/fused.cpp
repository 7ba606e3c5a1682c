// Batched forward/adjoint of the gated network on second-order jets.
//
// Each quantity is carried as six matrices (features x points):
//   0 value, 1 d/dxi, 2 d/deta, 3 d2/dxi2, 4 d2/deta2, 5 d2/dxi deta.
// Boundary points only need values and use a single component.
//
// Points are split into fixed-size chunks; chunk results are reduced in
// chunk order, so the output does not depend on the thread count.

#include "elastimesh/training.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <thread>

namespace elastimesh {

namespace {

using Mat = Eigen::MatrixXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMat>;
using RowMap = Eigen::Map<RowMat>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

constexpr std::size_t chunk_size = 64;
constexpr int full = 6;

struct JetBatch {
    std::array<Mat, full> c;
    int n = full;  // components in use
};

// Value and first three derivatives of an activation, elementwise.
struct ActEval {
    Mat f0, f1, f2, f3;
};

ActEval act_all(Activation kind, const Mat& z, bool need_third) {
    ActEval e;
    e.f0.resize(z.rows(), z.cols());
    e.f1.resize(z.rows(), z.cols());
    e.f2.resize(z.rows(), z.cols());
    if (need_third) e.f3.resize(z.rows(), z.cols());
    const Eigen::Index n = z.size();
    const double* zp = z.data();
    for (Eigen::Index k = 0; k < n; ++k) {
        const double x = zp[k];
        double f0, f1, f2, f3 = 0.0;
        if (kind == Activation::tanh) {
            f0 = std::tanh(x);
            f1 = 1.0 - f0 * f0;
            f2 = -2.0 * f0 * f1;
            f3 = -2.0 * (f1 * f1 + f0 * f2);
        } else if (kind == Activation::sigmoid) {
            f0 = activation_derivative(Activation::sigmoid, 0, x);
            f1 = f0 * (1.0 - f0);
            f2 = f1 * (1.0 - 2.0 * f0);
            f3 = f2 * (1.0 - 2.0 * f0) - 2.0 * f1 * f1;
        } else {
            f0 = activation_derivative(kind, 0, x);
            f1 = activation_derivative(kind, 1, x);
            f2 = activation_derivative(kind, 2, x);
            f3 = activation_derivative(kind, 3, x);
        }
        e.f0.data()[k] = f0;
        e.f1.data()[k] = f1;
        e.f2.data()[k] = f2;
        if (need_third) e.f3.data()[k] = f3;
    }
    return e;
}

JetBatch jet_map(const ActEval& f, const JetBatch& z) {
    JetBatch o;
    o.n = z.n;
    o.c[0] = f.f0;
    if (z.n == 1) return o;
    const auto F1 = f.f1.array();
    const auto F2 = f.f2.array();
    const auto Z1 = z.c[1].array();
    const auto Z2 = z.c[2].array();
    o.c[1] = (F1 * Z1).matrix();
    o.c[2] = (F1 * Z2).matrix();
    o.c[3] = (F2 * Z1 * Z1 + F1 * z.c[3].array()).matrix();
    o.c[4] = (F2 * Z2 * Z2 + F1 * z.c[4].array()).matrix();
    o.c[5] = (F2 * Z1 * Z2 + F1 * z.c[5].array()).matrix();
    return o;
}

JetBatch jet_map_adjoint(const ActEval& f, const JetBatch& z, const JetBatch& ob) {
    JetBatch zb;
    zb.n = z.n;
    const auto F1 = f.f1.array();
    if (z.n == 1) {
        zb.c[0] = (ob.c[0].array() * F1).matrix();
        return zb;
    }
    const auto F2 = f.f2.array();
    const auto F3 = f.f3.array();
    const auto Z1 = z.c[1].array();
    const auto Z2 = z.c[2].array();
    const auto O1 = ob.c[1].array();
    const auto O2 = ob.c[2].array();
    const auto O3 = ob.c[3].array();
    const auto O4 = ob.c[4].array();
    const auto O5 = ob.c[5].array();
    zb.c[0] = (ob.c[0].array() * F1 +
               F2 * (O1 * Z1 + O2 * Z2 + O3 * z.c[3].array() + O4 * z.c[4].array() +
                     O5 * z.c[5].array()) +
               F3 * (O3 * Z1 * Z1 + O4 * Z2 * Z2 + O5 * Z1 * Z2))
                  .matrix();
    zb.c[1] = (O1 * F1 + 2.0 * O3 * F2 * Z1 + O5 * F2 * Z2).matrix();
    zb.c[2] = (O2 * F1 + 2.0 * O4 * F2 * Z2 + O5 * F2 * Z1).matrix();
    zb.c[3] = (O3 * F1).matrix();
    zb.c[4] = (O4 * F1).matrix();
    zb.c[5] = (O5 * F1).matrix();
    return zb;
}

JetBatch jet_product(const JetBatch& g, const JetBatch& h) {
    JetBatch p;
    p.n = g.n;
    const auto G0 = g.c[0].array();
    const auto H0 = h.c[0].array();
    p.c[0] = (G0 * H0).matrix();
    if (g.n == 1) return p;
    const auto G1 = g.c[1].array(), G2 = g.c[2].array();
    const auto H1 = h.c[1].array(), H2 = h.c[2].array();
    p.c[1] = (G1 * H0 + G0 * H1).matrix();
    p.c[2] = (G2 * H0 + G0 * H2).matrix();
    p.c[3] = (g.c[3].array() * H0 + 2.0 * G1 * H1 + G0 * h.c[3].array()).matrix();
    p.c[4] = (g.c[4].array() * H0 + 2.0 * G2 * H2 + G0 * h.c[4].array()).matrix();
    p.c[5] = (g.c[5].array() * H0 + G1 * H2 + G2 * H1 + G0 * h.c[5].array()).matrix();
    return p;
}

// Adjoint of p = a*b with respect to a (call twice with roles swapped).
JetBatch jet_product_adjoint(const JetBatch& pb, const JetBatch& b) {
    JetBatch ab;
    ab.n = pb.n;
    const auto B0 = b.c[0].array();
    if (pb.n == 1) {
        ab.c[0] = (pb.c[0].array() * B0).matrix();
        return ab;
    }
    const auto P0 = pb.c[0].array(), P1 = pb.c[1].array(), P2 = pb.c[2].array();
    const auto P3 = pb.c[3].array(), P4 = pb.c[4].array(), P5 = pb.c[5].array();
    const auto B1 = b.c[1].array(), B2 = b.c[2].array();
    ab.c[0] = (P0 * B0 + P1 * B1 + P2 * B2 + P3 * b.c[3].array() + P4 * b.c[4].array() +
               P5 * b.c[5].array())
                  .matrix();
    ab.c[1] = (P1 * B0 + 2.0 * P3 * B1 + P5 * B2).matrix();
    ab.c[2] = (P2 * B0 + 2.0 * P4 * B2 + P5 * B1).matrix();
    ab.c[3] = (P3 * B0).matrix();
    ab.c[4] = (P4 * B0).matrix();
    ab.c[5] = (P5 * B0).matrix();
    return ab;
}

JetBatch affine(const ConstRowMap& w, const ConstVecMap& bias, const JetBatch& u) {
    JetBatch z;
    z.n = u.n;
    for (int c = 0; c < u.n; ++c) z.c[c].noalias() = w * u.c[c];
    z.c[0].colwise() += bias;
    return z;
}

struct HiddenCache {
    JetBatch u, zh, zg, h, g;
    ActEval fa, fs;
};

struct Pass {
    std::vector<HiddenCache> hidden;
    JetBatch u_out, zo;
    ActEval fo;
    JetBatch out;  // unit-box outputs (2 x n)
};

Pass forward_batch(const NetShape& shape, const double* params, const JetBatch& input) {
    Pass pass;
    pass.hidden.resize(shape.depth);
    const bool third = input.n == full;
    JetBatch u = input;
    for (std::size_t l = 0; l < shape.depth; ++l) {
        const auto off = shape.hidden(l);
        const auto rows = static_cast<Eigen::Index>(shape.width);
        const auto cols = static_cast<Eigen::Index>(off.fan_in);
        ConstRowMap w(params + off.w, rows, cols);
        ConstRowMap v(params + off.v, rows, cols);
        ConstVecMap b(params + off.b, rows);
        ConstVecMap c(params + off.c, rows);
        HiddenCache& hc = pass.hidden[l];
        hc.zh = affine(w, b, u);
        hc.zg = affine(v, c, u);
        hc.fa = act_all(shape.activation, hc.zh.c[0], third);
        hc.fs = act_all(Activation::sigmoid, hc.zg.c[0], third);
        hc.h = jet_map(hc.fa, hc.zh);
        hc.g = jet_map(hc.fs, hc.zg);
        JetBatch next = jet_product(hc.g, hc.h);
        hc.u = std::move(u);
        u = std::move(next);
    }
    const auto width = static_cast<Eigen::Index>(shape.width);
    ConstRowMap wo(params + shape.output_weights(), 2, width);
    ConstVecMap bo(params + shape.output_bias(), 2);
    pass.zo = affine(wo, bo, u);
    pass.fo = act_all(Activation::sigmoid, pass.zo.c[0], input.n == full);
    pass.out = jet_map(pass.fo, pass.zo);
    pass.u_out = std::move(u);
    return pass;
}

void accumulate_affine_grad(RowMap gw, VecMap gb, const JetBatch& zb, const JetBatch& u) {
    for (int c = 0; c < zb.n; ++c) gw.noalias() += zb.c[c] * u.c[c].transpose();
    gb += zb.c[0].rowwise().sum();
}

void backward_batch(const NetShape& shape, const double* params, const Pass& pass,
                    const JetBatch& out_adj, double* grad) {
    const auto width = static_cast<Eigen::Index>(shape.width);
    JetBatch zob = jet_map_adjoint(pass.fo, pass.zo, out_adj);
    accumulate_affine_grad(RowMap(grad + shape.output_weights(), 2, width),
                           VecMap(grad + shape.output_bias(), 2), zob, pass.u_out);
    ConstRowMap wo(params + shape.output_weights(), 2, width);
    JetBatch ub;
    ub.n = zob.n;
    for (int c = 0; c < zob.n; ++c) ub.c[c].noalias() = wo.transpose() * zob.c[c];

    for (std::size_t l = shape.depth; l-- > 0;) {
        const auto off = shape.hidden(l);
        const auto cols = static_cast<Eigen::Index>(off.fan_in);
        const HiddenCache& hc = pass.hidden[l];
        const JetBatch gb = jet_product_adjoint(ub, hc.h);
        const JetBatch hb = jet_product_adjoint(ub, hc.g);
        const JetBatch zhb = jet_map_adjoint(hc.fa, hc.zh, hb);
        const JetBatch zgb = jet_map_adjoint(hc.fs, hc.zg, gb);
        accumulate_affine_grad(RowMap(grad + off.w, width, cols), VecMap(grad + off.b, width), zhb,
                               hc.u);
        accumulate_affine_grad(RowMap(grad + off.v, width, cols), VecMap(grad + off.c, width), zgb,
                               hc.u);
        if (l == 0) break;
        ConstRowMap w(params + off.w, width, cols);
        ConstRowMap v(params + off.v, width, cols);
        for (int c = 0; c < ub.n; ++c) {
            ub.c[c].noalias() = w.transpose() * zhb.c[c];
            ub.c[c].noalias() += v.transpose() * zgb.c[c];
        }
    }
}

// Input features and their xi/eta derivatives for a list of points.
JetBatch input_jets(const std::vector<std::pair<double, double>>& pts, int ncomp) {
    using H = ad::HyperDual<double>;
    const auto n = static_cast<Eigen::Index>(pts.size());
    JetBatch b;
    b.n = ncomp;
    for (int c = 0; c < ncomp; ++c) b.c[c] = Mat::Zero(augmented_inputs, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto [xi, eta] = pts[static_cast<std::size_t>(k)];
        const auto fxx = augment(H(xi, 1, 1, 0), H(eta, 0, 0, 0));
        for (std::size_t r = 0; r < augmented_inputs; ++r) {
            const auto row = static_cast<Eigen::Index>(r);
            b.c[0](row, k) = fxx[r].re;
            if (ncomp == 1) continue;
            b.c[1](row, k) = fxx[r].d1;
            b.c[3](row, k) = fxx[r].d12;
        }
        if (ncomp == 1) continue;
        const auto fee = augment(H(xi, 0, 0, 0), H(eta, 1, 1, 0));
        const auto fxe = augment(H(xi, 1, 0, 0), H(eta, 0, 1, 0));
        for (std::size_t r = 0; r < augmented_inputs; ++r) {
            const auto row = static_cast<Eigen::Index>(r);
            b.c[2](row, k) = fee[r].d1;
            b.c[4](row, k) = fee[r].d12;
            b.c[5](row, k) = fxe[r].d12;
        }
    }
    return b;
}

struct Chunk {
    bool interior = true;
    std::size_t first = 0;  // index into the interior or boundary point list
    std::size_t count = 0;
    JetBatch input;
};

struct ChunkResult {
    std::vector<double> grad;
    double eq_sum = 0.0;
    double bd_sum = 0.0;
    std::array<double, 4> d_weight{};  // d(sum of weighted mismatches)/d(weight_c), before 1/N2
    std::string error;
};

// Gradient of r1^2 + r2^2 with respect to the 12 jet entries, via a small tape.
double residual_sq_and_grad(const Jet& jet, const ResidualSettings& rs, ad::Tape& tape,
                            std::array<double, Jet::size>& grad) {
    tape.clear();
    const auto vals = jet.to_array();
    std::array<ad::Var, Jet::size> in;
    for (std::size_t k = 0; k < Jet::size; ++k) in[k] = tape.parameter(vals[k]);
    const auto j = SecondOrderJet<ad::Var>::from_array(in);
    const auto [r1, r2] = governing_residual(j, rs);
    const ad::Var l = r1 * r1 + r2 * r2;
    const auto g = ad::backprop(tape, l);
    for (std::size_t k = 0; k < Jet::size; ++k) grad[k] = g[k];
    return l.value();
}

}  // namespace

struct FusedEngine::Impl {
    NetShape shape;
    TrainingProblem problem;
    std::size_t threads = 1;
    std::vector<Chunk> chunks;

    void run_chunk(const Chunk& ch, const PinnModel& model, const std::array<double, 4>& w,
                   ChunkResult& res) const {
        const double* params = model.params.data();
        res.grad.assign(shape.param_count(), 0.0);
        const Pass pass = forward_batch(shape, params, ch.input);
        // Physical lengths are divided by the loss length scale.
        const double inv = 1.0 / problem.settings.length_scale;
        const double lo[2] = {model.box.lo.x * inv, model.box.lo.y * inv};
        const double span[2] = {(model.box.hi.x - model.box.lo.x) * inv,
                                (model.box.hi.y - model.box.lo.y) * inv};
        const auto n = static_cast<Eigen::Index>(ch.count);
        JetBatch adj;
        adj.n = ch.input.n;
        for (int c = 0; c < adj.n; ++c) adj.c[c] = Mat::Zero(2, n);

        if (ch.interior) {
            ad::Tape tape;
            std::array<double, Jet::size> g{};
            const double scale = problem.settings.interior_weight;
            for (Eigen::Index k = 0; k < n; ++k) {
                auto at = [&](int c, int r) {
                    return (c == 0 ? lo[r] : 0.0) + span[r] * pass.out.c[c](r, k);
                };
                Jet j;
                j.x = at(0, 0);
                j.y = at(0, 1);
                j.x_xi = at(1, 0);
                j.x_eta = at(2, 0);
                j.y_xi = at(1, 1);
                j.y_eta = at(2, 1);
                j.x_xixi = at(3, 0);
                j.x_etaeta = at(4, 0);
                j.x_xieta = at(5, 0);
                j.y_xixi = at(3, 1);
                j.y_etaeta = at(4, 1);
                j.y_xieta = at(5, 1);
                res.eq_sum += scale * residual_sq_and_grad(j, problem.settings.residual, tape, g);
                // Jet field order -> (component, output row).
                static constexpr int comp[Jet::size] = {0, 0, 1, 2, 1, 2, 3, 4, 5, 3, 4, 5};
                static constexpr int row[Jet::size] = {0, 1, 0, 0, 1, 1, 0, 0, 0, 1, 1, 1};
                for (std::size_t f = 0; f < Jet::size; ++f)
                    adj.c[comp[f]](row[f], k) += scale * g[f] * span[row[f]];
            }
        } else {
            for (Eigen::Index k = 0; k < n; ++k) {
                const std::size_t idx = ch.first + static_cast<std::size_t>(k);
                const auto side = static_cast<std::size_t>(problem.points.boundary[idx].slot.side);
                const Point2 target = inv * problem.targets[idx];
                const double dx = lo[0] + span[0] * pass.out.c[0](0, k) - target.x;
                const double dy = lo[1] + span[1] * pass.out.c[0](1, k) - target.y;
                const double e = dx * dx + dy * dy;
                const double wk = 4.0 * w[side];
                res.bd_sum += wk * e;
                res.d_weight[side] += 4.0 * e;
                adj.c[0](0, k) = wk * 2.0 * dx * span[0];
                adj.c[0](1, k) = wk * 2.0 * dy * span[1];
            }
        }
        backward_batch(shape, params, pass, adj, res.grad.data());
    }
};

FusedEngine::FusedEngine(const NetShape& shape, const TrainingProblem& problem,
                         std::size_t threads)
    : impl_(std::make_unique<Impl>()) {
    impl_->shape = shape;
    impl_->problem = problem;
    impl_->threads = std::max<std::size_t>(1, threads);
    auto build = [&](bool interior, std::size_t total) {
        for (std::size_t first = 0; first < total; first += chunk_size) {
            Chunk ch;
            ch.interior = interior;
            ch.first = first;
            ch.count = std::min(chunk_size, total - first);
            std::vector<std::pair<double, double>> pts;
            for (std::size_t k = first; k < first + ch.count; ++k) {
                if (interior)
                    pts.emplace_back(problem.points.interior[k].xi, problem.points.interior[k].eta);
                else
                    pts.emplace_back(problem.points.boundary[k].xi, problem.points.boundary[k].eta);
            }
            ch.input = input_jets(pts, interior ? full : 1);
            impl_->chunks.push_back(std::move(ch));
        }
    };
    build(true, problem.points.interior.size());
    build(false, problem.points.boundary.size());
}

FusedEngine::~FusedEngine() = default;
FusedEngine::FusedEngine(FusedEngine&&) noexcept = default;
FusedEngine& FusedEngine::operator=(FusedEngine&&) noexcept = default;

LossGradient FusedEngine::evaluate(const PinnModel& model, const BoundaryWeights& bw) const {
    const Impl& im = *impl_;
    if (model.params.size() != im.shape.param_count())
        throw InvalidArgument("fused engine: model shape mismatch");
    const auto w = bw.weights();
    std::vector<ChunkResult> results(im.chunks.size());

    auto work = [&](std::size_t k) {
        try {
            im.run_chunk(im.chunks[k], model, w, results[k]);
        } catch (const std::exception& e) {
            results[k].error = e.what();
        }
    };
    const std::size_t nthreads = std::min(im.threads, im.chunks.size());
    if (nthreads <= 1) {
        for (std::size_t k = 0; k < im.chunks.size(); ++k) work(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (std::size_t k; (k = next.fetch_add(1)) < im.chunks.size();) work(k);
            });
        for (auto& th : pool) th.join();
    }

    const std::size_t np = im.shape.param_count();
    LossGradient out;
    out.grad.assign(np + 4, 0.0);
    double eq = 0.0, bd = 0.0;
    std::array<double, 4> dw{};
    const std::size_t n1 = im.problem.points.interior.size();
    const std::size_t n2 = im.problem.points.boundary.size();
    for (std::size_t k = 0; k < results.size(); ++k) {
        const auto& r = results[k];
        if (!r.error.empty()) throw NumericError(r.error);
        const double scale = im.chunks[k].interior ? (n1 ? 1.0 / static_cast<double>(n1) : 0.0)
                                                   : (n2 ? 1.0 / static_cast<double>(n2) : 0.0);
        for (std::size_t p = 0; p < np; ++p) out.grad[p] += scale * r.grad[p];
        eq += r.eq_sum;
        bd += r.bd_sum;
        for (std::size_t c = 0; c < 4; ++c) dw[c] += r.d_weight[c];
    }
    if (n1) eq /= static_cast<double>(n1);
    if (n2) {
        bd /= static_cast<double>(n2);
        for (auto& v : dw) v /= static_cast<double>(n2);
    }
    // Softmax Jacobian: d w_c / d l_i = w_c (delta_ci - w_i).
    double mean = 0.0;
    for (std::size_t c = 0; c < 4; ++c) mean += dw[c] * w[c];
    for (std::size_t i = 0; i < 4; ++i) out.grad[np + i] = w[i] * (dw[i] - mean);

    out.loss.equation_term = eq;
    out.loss.boundary_term = bd;
    out.loss.total = eq + bd;
    return out;
}

LossGradient loss_gradient_fused(const PinnModel& model, const BoundaryWeights& weights,
                                 const TrainingProblem& problem) {
    return FusedEngine(model.shape, problem).evaluate(model, weights);
}

}  // namespace elastimesh

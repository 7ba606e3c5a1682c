#include "elastimesh/domains.hpp"
#include "elastimesh/hardbc.hpp"
#include "elastimesh/training.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <random>

using namespace elastimesh;
using Catch::Approx;

namespace {

TrainConfig small_config(std::size_t epochs) {
    TrainConfig c = TrainConfig::desk_profile();
    c.epochs = epochs;
    c.ni = 7;
    c.nj = 6;
    c.depth = 2;
    c.width = 6;
    return c;
}

PinnModel random_model(std::size_t depth, std::size_t width, Activation a, std::uint64_t seed,
                       const DomainSpec& d) {
    auto m = init_model(depth, width, a, seed);
    std::mt19937_64 rng(seed + 100);
    std::normal_distribution<double> n(0.0, 0.3);
    for (auto& p : m.params) p += n(rng);
    m.box = output_box(d, 0.1);
    return m;
}

}  // namespace

TEST_CASE("collocation counts and coverage") {
    const auto s3 = collocation_points(CompGrid(3, 3));
    REQUIRE(s3.interior.size() == 1);
    REQUIRE(s3.boundary.size() == 8);
    const auto s21 = collocation_points(CompGrid(21, 21));
    REQUIRE(s21.interior.size() == 361);
    REQUIRE(s21.boundary.size() == 80);

    const CompGrid g(6, 5);
    const auto s = collocation_points(g);
    std::vector<int> hits(g.size(), 0);
    for (const auto& p : s.interior) {
        ++hits[g.ni() * p.j + p.i];
        REQUIRE(p.xi == g.xi(p.i));
        REQUIRE(p.eta == g.eta(p.j));
    }
    for (const auto& p : s.boundary) ++hits[g.ni() * p.slot.j + p.slot.i];
    for (int h : hits) REQUIRE(h == 1);
}

TEST_CASE("identity mapping on the unit square has zero loss") {
    const auto d = domains::unit_square();
    const auto pts = collocation_points(CompGrid(9, 9));
    const TrainConfig cfg;
    const auto l = compute_loss([](double xi, double eta) { return identity_jet(xi, eta); }, d, pts,
                                {}, loss_settings(cfg, d));
    REQUIRE(l.equation_term == 0.0);
    REQUIRE(l.boundary_term == Approx(0.0).margin(1e-30));
    REQUIRE(l.total == l.equation_term + l.boundary_term);
}

TEST_CASE("constant mapping boundary term matches direct enumeration") {
    const auto d = domains::unit_square();
    const auto pts = collocation_points(CompGrid(3, 3));
    auto center = [](double, double) {
        Jet j;
        j.x = 0.5;
        j.y = 0.5;
        return j;
    };
    const auto l = compute_loss(center, d, pts, {}, loss_settings(TrainConfig{}, d));
    // Boundary nodes of the 3x3 unit lattice: 4 corners and 4 edge midpoints.
    const double nodes[8][2] = {{0, 0}, {0.5, 0}, {1, 0}, {1, 0.5}, {1, 1}, {0.5, 1}, {0, 1}, {0, 0.5}};
    double sum = 0.0;
    for (const auto& p : nodes) sum += (p[0] - 0.5) * (p[0] - 0.5) + (p[1] - 0.5) * (p[1] - 0.5);
    REQUIRE(l.boundary_term == Approx(sum / 8).epsilon(1e-15));
    REQUIRE(l.boundary_term == Approx(0.375).epsilon(1e-15));
    REQUIRE(l.equation_term == 0.0);
}

TEST_CASE("boundary weights form a distribution") {
    BoundaryWeights w;
    w.logits = {0.3, -1.2, 5.0, 0.0};
    double s = 0.0;
    for (double v : w.weights()) {
        REQUIRE(v > 0.0);
        s += v;
    }
    REQUIRE(s == Approx(1.0).margin(1e-12));
    w.logits = {800.0, -800.0, 0.0, 1.0};
    for (double v : w.weights()) REQUIRE(std::isfinite(v));
}

TEST_CASE("doubling equal logits leaves the loss unchanged") {
    const auto d = domains::quarter_annulus();
    const auto pts = collocation_points(CompGrid(5, 5));
    const auto m = random_model(1, 4, Activation::tanh, 3, d);
    auto jets = [&](double xi, double eta) { return evaluate_jet(m, xi, eta); };
    BoundaryWeights a, b;
    a.logits = {0.7, 0.7, 0.7, 0.7};
    b.logits = {1.4, 1.4, 1.4, 1.4};
    const auto s = loss_settings(TrainConfig{}, d);
    REQUIRE(compute_loss(jets, d, pts, a, s).total == compute_loss(jets, d, pts, b, s).total);
}

TEST_CASE("learning rate schedule") {
    const auto p = TrainConfig::paper_profile();
    REQUIRE(lr_at_epoch(0, p) == 1e-5);
    REQUIRE(lr_at_epoch(2500, p) == Approx(9.801e-6).epsilon(1e-12));
    REQUIRE(lr_at_epoch(999, p) == 1e-5);
    REQUIRE(lr_at_epoch(1000, p) == Approx(0.99e-5).epsilon(1e-12));
}

TEST_CASE("profiles and validation") {
    const auto p = TrainConfig::paper_profile();
    REQUIRE(p.depth == 8);
    REQUIRE(p.width == 50);
    REQUIRE(p.epochs == 15000);
    REQUIRE(p.lame.lambda == 1.0);
    REQUIRE(p.lame.mu == 0.35);
    const auto d = TrainConfig::desk_profile();
    REQUIRE(d.depth == 2);
    REQUIRE(d.width == 16);
    REQUIRE(d.epochs == 2000);
    REQUIRE(d.lr0 == 1e-3);
    REQUIRE(d.ni == 21);
    REQUIRE(d.nj == 21);
    auto bad = d;
    bad.epochs = 0;
    REQUIRE_THROWS_AS(validate(bad), InvalidArgument);
    bad = d;
    bad.lr0 = 0.0;
    REQUIRE_THROWS_AS(validate(bad), InvalidArgument);
    bad = d;
    bad.decay = 1.01;
    REQUIRE_THROWS_AS(validate(bad), InvalidArgument);
    bad = d;
    bad.decay = 0.0;
    REQUIRE_THROWS_AS(validate(bad), InvalidArgument);
}

TEST_CASE("Adam single step") {
    std::vector<double> w{0.0};
    AdamState st;
    adam_step(w, std::vector<double>{1.0}, st, 0.1);
    REQUIRE(w[0] == Approx(-0.1).epsilon(1e-7));
    REQUIRE(st.step == 1);

    std::vector<double> z{0.25, -3.0};
    AdamState s2;
    adam_step(z, std::vector<double>{0.0, 0.0}, s2, 0.1);
    REQUIRE(z == std::vector<double>{0.25, -3.0});

    std::vector<double> q{1.0};
    AdamState s3;
    adam_step(q, std::vector<double>{2.0}, s3, 0.01);
    const double m1 = s3.m[0], v1 = s3.v[0];
    const double before = q[0];
    adam_step(q, std::vector<double>{0.0}, s3, 0.01);
    REQUIRE(s3.m[0] == Approx(0.9 * m1).epsilon(1e-15));
    REQUIRE(s3.v[0] == Approx(0.999 * v1).epsilon(1e-15));
    REQUIRE(q[0] < before);  // momentum keeps moving
}

TEST_CASE("Adam trajectories are reproducible") {
    auto run = [] {
        std::vector<double> w{0.3, -0.2, 1.0};
        AdamState st;
        for (int k = 0; k < 50; ++k) {
            std::vector<double> g{std::sin(w[0] + k), w[1] * w[2], std::cos(w[2])};
            adam_step(w, g, st, 1e-2);
        }
        return w;
    };
    REQUIRE(run() == run());
}

TEST_CASE("fused engine agrees with the tape") {
    const auto d = domains::quarter_annulus();
    for (Governing gov : {Governing::navier_lame, Governing::laplace, Governing::hyperbolic,
                          Governing::monge_ampere}) {
        for (Activation act : {Activation::tanh, Activation::elu, Activation::sigmoid}) {
            INFO(governing_name(gov) << " / " << activation_name(act));
            TrainConfig cfg;
            cfg.governing = gov;
            cfg.activation = act;
            const auto problem = make_problem(d, CompGrid(6, 5), loss_settings(cfg, d));
            const auto m = random_model(2, 5, act, 11, d);
            BoundaryWeights w;
            w.logits = {0.2, -0.4, 0.9, 0.0};
            const auto ref = loss_gradient_tape(m, w, problem);
            const auto got = FusedEngine(m.shape, problem, 2).evaluate(m, w);
            REQUIRE(got.loss.total == Approx(ref.loss.total).epsilon(1e-11));
            REQUIRE(got.loss.equation_term == Approx(ref.loss.equation_term).epsilon(1e-11));
            REQUIRE(got.loss.boundary_term == Approx(ref.loss.boundary_term).epsilon(1e-11));
            REQUIRE(got.grad.size() == m.params.size() + 4);
            REQUIRE(ref.grad.size() == m.params.size() + 4);
            double scale = 0.0;
            for (double v : ref.grad) scale = std::max(scale, std::abs(v));
            for (std::size_t k = 0; k < ref.grad.size(); ++k)
                REQUIRE(got.grad[k] == Approx(ref.grad[k]).epsilon(1e-9).margin(1e-12 * scale));
        }
    }
}

TEST_CASE("total loss gradient matches central differences") {
    const auto d = domains::quarter_annulus();
    const TrainConfig cfg;
    const auto settings = loss_settings(cfg, d);
    const auto problem = make_problem(d, CompGrid(4, 4), settings);
    const auto m = random_model(1, 4, Activation::tanh, 5, d);
    BoundaryWeights w;
    w.logits = {0.5, -0.3, 0.1, -0.8};
    const auto ref = loss_gradient_tape(m, w, problem);

    auto loss_at = [&](const std::vector<long double>& theta) {
        const std::size_t np = m.params.size();
        const std::span<const long double> ps(theta.data(), np);
        auto jets = [&](double xi, double eta) {
            return evaluate_jet_generic<long double>(m.shape, ps, m.box, xi, eta);
        };
        const std::array<long double, 4> logits{theta[np], theta[np + 1], theta[np + 2], theta[np + 3]};
        return assemble_loss<long double>(jets, problem.points, problem.targets,
                                          std::span<const long double, 4>(logits), settings)
            .total;
    };
    std::vector<long double> theta(m.params.begin(), m.params.end());
    for (double l : w.logits) theta.push_back(l);
    REQUIRE(ref.loss.total == Approx(static_cast<double>(loss_at(theta))).epsilon(1e-12));

    const long double h = 1e-6L;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        auto tp = theta, tm = theta;
        tp[k] += h;
        tm[k] -= h;
        const double fd = static_cast<double>((loss_at(tp) - loss_at(tm)) / (2 * h));
        INFO("parameter " << k);
        REQUIRE(ref.grad[k] == Approx(fd).epsilon(1e-4).margin(1e-9));
    }
}

TEST_CASE("equation term scales with the square of the Lame constants") {
    const auto d = domains::wavy_channel();
    const auto pts = collocation_points(CompGrid(7, 7));
    TrainConfig base;
    TrainConfig scaled;
    scaled.lame = {base.lame.lambda * 3.0, base.lame.mu * 3.0};
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto m = random_model(2, 5, Activation::tanh, seed, d);
        auto jets = [&](double xi, double eta) { return evaluate_jet(m, xi, eta); };
        const double a = compute_loss(jets, d, pts, {}, loss_settings(base, d)).equation_term;
        const double b = compute_loss(jets, d, pts, {}, loss_settings(scaled, d)).equation_term;
        REQUIRE(b / a == Approx(9.0).epsilon(1e-10));
    }
}

TEST_CASE("desk run on the unit square converges") {
    TrainConfig cfg = TrainConfig::desk_profile();
    cfg.ni = 11;
    cfg.nj = 11;
    const auto d = domains::unit_square();
    std::vector<double> deviations;
    bool weights_ok = true;
    const TrainObserver watch = [&](std::size_t done, const PinnModel& m, const BoundaryWeights& w) {
        double s = 0.0;
        for (double v : w.weights()) {
            weights_ok = weights_ok && v > 0.0;
            s += v;
        }
        weights_ok = weights_ok && std::abs(s - 1.0) <= 1e-12;
        if (done == 200 || done == 800 || done == cfg.epochs)
            deviations.push_back(boundary_max_deviation(generate_mesh(m, CompGrid(11, 11)), d));
    };
    const auto r = train(d, cfg, watch);
    const double first = r.initial_loss().total, last = r.final_loss().total;
    INFO("initial " << first << " final " << last);
    REQUIRE(r.final_loss().epoch == cfg.epochs);
    REQUIRE(last <= 1e-2);
    REQUIRE(last <= 0.01 * first);
    REQUIRE(weights_ok);
    REQUIRE(deviations.size() == 3);
    REQUIRE(deviations[1] < deviations[0]);
    REQUIRE(deviations[2] < deviations[1]);
    const auto mesh = generate_mesh(r.model, CompGrid(11, 11));
    REQUIRE(quality_report(mesh, 0).inverted_cells == 0);
}

TEST_CASE("training is reproducible and thread-count independent") {
    const auto d = domains::quarter_annulus();
    auto cfg = small_config(30);
    const auto a = train(d, cfg);
    const auto b = train(d, cfg);
    cfg.threads = 3;
    const auto c = train(d, cfg);
    REQUIRE(a.history.size() == 31);
    for (std::size_t k = 0; k < a.history.size(); ++k) {
        REQUIRE(a.history[k].total == b.history[k].total);
        REQUIRE(a.history[k].total == c.history[k].total);
        REQUIRE(a.history[k].epoch == k);
    }
    REQUIRE(a.model == b.model);
    REQUIRE(a.model == c.model);
}

TEST_CASE("history stride keeps every n-th epoch and the final loss") {
    auto cfg = small_config(10);
    cfg.history_stride = 4;
    const auto r = train(domains::unit_square(), cfg);
    REQUIRE(r.history.size() == 4);
    REQUIRE(r.history[0].epoch == 0);
    REQUIRE(r.history[1].epoch == 4);
    REQUIRE(r.history[2].epoch == 8);
    REQUIRE(r.history[3].epoch == 10);
}

TEST_CASE("tape engine trains identically up to rounding") {
    auto cfg = small_config(5);
    cfg.ni = 5;
    cfg.nj = 4;
    const auto d = domains::wavy_channel();
    const auto f = train(d, cfg);
    cfg.engine = GradientEngine::tape;
    const auto t = train(d, cfg);
    for (std::size_t k = 0; k < f.history.size(); ++k)
        REQUIRE(f.history[k].total == Approx(t.history[k].total).epsilon(1e-9));
}

TEST_CASE("meshes can be generated at any resolution") {
    const auto d = domains::quarter_annulus();
    const auto r = train(d, small_config(20));
    const auto m = generate_mesh(r.model, CompGrid(41, 41));
    REQUIRE(m.ni() == 41);
    REQUIRE(m.provenance() == Provenance::pinn);
    for (const auto& p : m.coords()) {
        REQUIRE(p.x >= r.model.box.lo.x);
        REQUIRE(p.x <= r.model.box.hi.x);
    }
    const auto z = zero_model(1, 3, Activation::tanh);
    const auto centered = generate_mesh(z, CompGrid(4, 3));
    for (const auto& p : centered.coords()) REQUIRE(p == Point2{0.5, 0.5});
}

TEST_CASE("output box grows the bounding box") {
    const auto b = output_box(domains::unit_square(), 0.1);
    REQUIRE(b.lo.x == Approx(-0.1).margin(1e-12));
    REQUIRE(b.hi.y == Approx(1.1).margin(1e-12));
}

TEST_CASE("loss history CSV") {
    std::vector<LossBreakdown> h{{1.0, 2.0, 3.0, 0}, {0.5, 0.25, 0.75, 1}};
    write_loss_history_csv(h, "training_loss.csv");
    std::ifstream in("training_loss.csv");
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "epoch,equation_term,boundary_term,total");
    std::getline(in, line);
    REQUIRE(line == "0,1,2,3");
    std::getline(in, line);
    REQUIRE(line == "1,0.5,0.25,0.75");
}

// Boundary-curve regression from an ordered point cloud.
//
// Each coordinate is regressed on the normalized chord-length parameter t.
// A least-squares cubic in t is removed first; the residual is fitted with a
// Gaussian RBF expansion f(t) = sum_i beta_i k(t, t_i). Without the trend the
// sparse samples near steep ends leave the interpolant sagging between nodes.
//
//   epsilon == 0 : kernel ridge, (K + reg I) beta = r, solved by LDLT.
//   epsilon  > 0 : epsilon-insensitive SVR dual
//                    min 1/2 b'Kb - r'b + eps |b|_1,  |b_i| <= C = 1/reg
//                  by cyclic coordinate descent, stopped on the duality gap.

#include "elastimesh/geometry.hpp"

#include "elastimesh/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace elastimesh {

namespace {

constexpr double snap_ramp = 0.05;

double rbf(double s, double t, double width) {
    const double d = (s - t) / width;
    return std::exp(-0.5 * d * d);
}

// C-infinity step: 0 for s <= 0, 1 for s >= 1.
double smooth_step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / s);
    const double b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
}

Eigen::MatrixXd kernel_matrix(const std::vector<double>& t, double width) {
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) k(i, j) = rbf(t[i], t[j], width);
    return k;
}

std::vector<double> solve_ridge(const Eigen::MatrixXd& k, const std::vector<double>& r,
                                double reg) {
    const auto n = k.rows();
    Eigen::MatrixXd a = k;
    a.diagonal().array() += reg;
    const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(r.data(), n);
    const Eigen::VectorXd beta = a.ldlt().solve(rhs);
    return {beta.data(), beta.data() + n};
}

std::vector<double> solve_svr_dual(const Eigen::MatrixXd& k, const std::vector<double>& r,
                                   const FitOptions& opt) {
    const std::size_t n = r.size();
    const double box = 1.0 / opt.regularization;
    const double eps = opt.epsilon;
    std::vector<double> beta(n, 0.0);
    std::vector<double> f(n, 0.0);  // K beta

    auto gap = [&] {
        double quad = 0.0, lin = 0.0, l1 = 0.0, hinge = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            quad += beta[i] * f[i];
            lin += r[i] * beta[i];
            l1 += std::abs(beta[i]);
            hinge += std::max(0.0, std::abs(r[i] - f[i]) - eps);
        }
        const double primal = 0.5 * quad + box * hinge;
        const double dual = -(0.5 * quad - lin + eps * l1);
        return std::pair{primal - dual, primal};
    };

    for (std::size_t sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        for (std::size_t i = 0; i < n; ++i) {
            const double kii = k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
            const double g = f[i] - r[i];
            const double z = beta[i] - g / kii;
            double b = std::copysign(std::max(std::abs(z) - eps / kii, 0.0), z);
            b = std::clamp(b, -box, box);
            const double delta = b - beta[i];
            if (delta == 0.0) continue;
            beta[i] = b;
            for (std::size_t j = 0; j < n; ++j)
                f[j] += delta * k(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
        }
        const auto [g, primal] = gap();
        if (g <= opt.gap_tolerance * std::max(1.0, std::abs(primal))) break;
    }
    return beta;
}

std::array<Point2, 4> cubic_trend(std::span<const Point2> pts, const std::vector<double>& t) {
    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd v(n, 4);
    Eigen::MatrixXd rhs(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double s = t[static_cast<std::size_t>(i)];
        v(i, 0) = 1.0;
        v(i, 1) = s;
        v(i, 2) = s * s;
        v(i, 3) = s * s * s;
        rhs(i, 0) = pts[static_cast<std::size_t>(i)].x;
        rhs(i, 1) = pts[static_cast<std::size_t>(i)].y;
    }
    const Eigen::MatrixXd c = v.colPivHouseholderQr().solve(rhs);
    std::array<Point2, 4> out;
    for (int k = 0; k < 4; ++k) out[k] = {c(k, 0), c(k, 1)};
    return out;
}

}  // namespace

Point2 KernelFit::raw(double t) const {
    Point2 p = trend[0] + t * (trend[1] + t * (trend[2] + t * trend[3]));
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double k = rbf(t, centers[i], kernel_width);
        p.x += coeff_x[i] * k;
        p.y += coeff_y[i] * k;
    }
    return p;
}

Point2 KernelFit::operator()(double t) const {
    if (t <= 0.0) return first;
    if (t >= 1.0) return last;
    Point2 p = raw(t);
    const double w0 = 1.0 - smooth_step(t / snap_ramp);
    const double w1 = 1.0 - smooth_step((1.0 - t) / snap_ramp);
    p.x += w0 * snap_start.x + w1 * snap_end.x;
    p.y += w0 * snap_start.y + w1 * snap_end.y;
    return p;
}

BoundaryCurve fit_boundary_curve(std::span<const Point2> points, const FitOptions& opt) {
    if (points.size() < 4)
        throw InvalidArgument("fit_boundary_curve: need at least 4 points, got " +
                              std::to_string(points.size()));
    if (!(opt.kernel_width > 0.0)) throw InvalidArgument("kernel_width must be positive");
    if (!(opt.regularization > 0.0)) throw InvalidArgument("regularization must be positive");
    if (!(opt.epsilon >= 0.0)) throw InvalidArgument("epsilon must be non-negative");

    const bool coincident = std::all_of(points.begin(), points.end(),
                                        [&](const Point2& p) { return p == points.front(); });
    if (coincident) throw DegenerateGeometry("fit_boundary_curve: all points coincide");

    KernelFit fit;
    fit.kernel_width = opt.kernel_width;
    fit.centers = chord_parameters(points);
    fit.first = points.front();
    fit.last = points.back();

    fit.trend = cubic_trend(points, fit.centers);

    std::vector<double> rx(points.size()), ry(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double t = fit.centers[i];
        const Point2 base = fit.trend[0] + t * (fit.trend[1] + t * (fit.trend[2] + t * fit.trend[3]));
        rx[i] = points[i].x - base.x;
        ry[i] = points[i].y - base.y;
    }

    const Eigen::MatrixXd k = kernel_matrix(fit.centers, opt.kernel_width);
    if (opt.epsilon == 0.0) {
        fit.coeff_x = solve_ridge(k, rx, opt.regularization);
        fit.coeff_y = solve_ridge(k, ry, opt.regularization);
    } else {
        fit.coeff_x = solve_svr_dual(k, rx, opt);
        fit.coeff_y = solve_svr_dual(k, ry, opt);
    }

    fit.snap_start = fit.first - fit.raw(0.0);
    fit.snap_end = fit.last - fit.raw(1.0);
    return BoundaryCurve::fitted(std::move(fit), {points.begin(), points.end()});
}

BoundaryCurve fit_boundary_curve(std::span<const Point2> points, double kernel_width,
                                 double regularization, double epsilon) {
    FitOptions opt;
    opt.kernel_width = kernel_width;
    opt.regularization = regularization;
    opt.epsilon = epsilon;
    return fit_boundary_curve(points, opt);
}

}  // namespace elastimesh

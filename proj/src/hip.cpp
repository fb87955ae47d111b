#include "xpa/hip.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace xpa::hip {

HipParams HipParams::from_vector(const Eigen::Ref<const Vector>& v)
{
    if (v.size() != 6)
        throw DomainError("HipParams::from_vector: expected 6 entries");
    return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

void HipParams::validate() const
{
    const auto v = as_vector();
    if (!v.allFinite())
        throw DomainError("HIP parameters must be finite");
    if (gamma < 0 || eta < 0 || alpha < 0 || C < 0 || c < 0)
        throw DomainError("HIP parameters gamma, eta, alpha, C, c must be nonnegative");
    if (!(theta > 0))
        throw DomainError("HIP parameter theta must be positive");
}

namespace {

struct Kernel
{
    Vector k;       // (tau + c)^-(1+theta), index tau (entry 0 unused)
    Vector dk_c;    // d k / d c
    Vector dk_theta;
};

Kernel make_kernel(double c, double theta, Eigen::Index T, bool derivatives)
{
    Kernel K;
    K.k = Vector::Zero(T);
    if (derivatives) {
        K.dk_c = Vector::Zero(T);
        K.dk_theta = Vector::Zero(T);
    }
    for (Eigen::Index tau = 1; tau < T; ++tau) {
        const double base = static_cast<double>(tau) + c;
        const double v = std::pow(base, -(1.0 + theta));
        K.k[tau] = v;
        if (derivatives) {
            K.dk_c[tau] = -(1.0 + theta) * v / base;
            K.dk_theta[tau] = -std::log(base) * v;
        }
    }
    return K;
}

double promotion_at(const Eigen::Ref<const Vector>& s, Eigen::Index t)
{
    return t < s.size() ? s[t] : 0.0;
}

} // namespace

Vector simulate(const HipParams& p, const Eigen::Ref<const Vector>& promotion, Eigen::Index T)
{
    p.validate();
    if (T < 1)
        throw DomainError("simulate: horizon must be >= 1");
    const auto K = make_kernel(p.c, p.theta, T, false);
    Vector x(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        double v = (t == 0 ? p.gamma : p.eta) + p.alpha * promotion_at(promotion, t);
        double mem = 0;
        for (Eigen::Index tau = 1; tau <= t; ++tau)
            mem += x[t - tau] * K.k[tau];
        x[t] = v + p.C * mem;
    }
    return x;
}

Vector simulate(const HipParams& p, const Eigen::Ref<const Vector>& promotion, Eigen::Index T, Matrix& J)
{
    p.validate();
    if (T < 1)
        throw DomainError("simulate: horizon must be >= 1");
    const auto K = make_kernel(p.c, p.theta, T, true);
    Vector x(T);
    J.setZero(T, 6);
    for (Eigen::Index t = 0; t < T; ++t) {
        const double s = promotion_at(promotion, t);
        double mem = 0, mem_c = 0, mem_theta = 0;
        Eigen::Matrix<double, 1, 6> dmem = Eigen::Matrix<double, 1, 6>::Zero();
        for (Eigen::Index tau = 1; tau <= t; ++tau) {
            const double xp = x[t - tau];
            mem += xp * K.k[tau];
            mem_c += xp * K.dk_c[tau];
            mem_theta += xp * K.dk_theta[tau];
            dmem += K.k[tau] * J.row(t - tau);
        }
        x[t] = (t == 0 ? p.gamma : p.eta) + p.alpha * s + p.C * mem;
        J.row(t) = p.C * dmem;
        J(t, 0) += (t == 0) ? 1.0 : 0.0;
        J(t, 1) += (t > 0) ? 1.0 : 0.0;
        J(t, 2) += s;
        J(t, 3) += mem;
        J(t, 4) += p.C * mem_c;
        J(t, 5) += p.C * mem_theta;
    }
    return x;
}

double kernel_mass(double c, double theta)
{
    if (!(theta > 0) || !std::isfinite(theta))
        throw DomainError("kernel_mass: theta must be positive (series diverges)");
    if (c < 0)
        throw DomainError("kernel_mass: c must be nonnegative");
    const double s = 1.0 + theta;
    // direct terms tau = 1..N, then Euler-Maclaurin for the tail from a = N + 1
    constexpr int N = 64;
    double head = 0;
    for (int tau = N; tau >= 1; --tau)
        head += std::pow(tau + c, -s);
    const double a = N + 1 + c;
    const double fa = std::pow(a, -s);
    const double integral = std::pow(a, -theta) / theta;
    const double d1 = -s * fa / a;
    const double d3 = -s * (s + 1) * (s + 2) * fa / (a * a * a);
    const double d5 = -s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * fa / std::pow(a, 5);
    const double tail = integral + fa / 2 - d1 / 12 + d3 / 720 - d5 / 30240;
    return head + tail;
}

ViralPotential viral_potential(const HipParams& p)
{
    p.validate();
    const double n = p.C * kernel_mass(p.c, p.theta);
    if (n >= 1)
        return {std::numeric_limits<double>::infinity(), true};
    return {p.alpha / (1 - n), false};
}

FitBounds default_bounds(const Eigen::Ref<const Vector>& views)
{
    const double top = 10 * std::max(views.maxCoeff(), 1.0);
    return {{0, 0, 0, 0, 0, 1e-3}, {top, top, 1e4, 10, 300, 30}};
}

namespace {

double draw_log_uniform(std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

// Given the kernel part of p, choose (gamma, eta, alpha) >= 0 minimizing the
// squared error. x is linear in those three for a fixed kernel.
void fit_linear_terms(HipParams& p, const Vector& views, const Vector& promotion, Eigen::Index T,
                      const FitBounds& bounds)
{
    Matrix B(T, 3);
    const std::array<HipParams, 3> units{HipParams{1, 0, 0, p.C, p.c, p.theta},
                                         HipParams{0, 1, 0, p.C, p.c, p.theta},
                                         HipParams{0, 0, 1, p.C, p.c, p.theta}};
    for (int j = 0; j < 3; ++j)
        B.col(j) = simulate(units[j], promotion, T);

    double best = std::numeric_limits<double>::infinity();
    Eigen::Vector3d best_w = Eigen::Vector3d::Zero();
    for (int mask = 0; mask < 8; ++mask) {
        std::vector<int> cols;
        for (int j = 0; j < 3; ++j)
            if (mask & (1 << j))
                cols.push_back(j);
        Eigen::Vector3d w = Eigen::Vector3d::Zero();
        if (!cols.empty()) {
            Matrix Bs(T, static_cast<Eigen::Index>(cols.size()));
            for (std::size_t k = 0; k < cols.size(); ++k)
                Bs.col(static_cast<Eigen::Index>(k)) = B.col(cols[k]);
            const Vector sol = Bs.colPivHouseholderQr().solve(views);
            if ((sol.array() < 0).any() || !sol.allFinite())
                continue;
            for (std::size_t k = 0; k < cols.size(); ++k)
                w[cols[k]] = sol[static_cast<Eigen::Index>(k)];
        }
        const double err = (B * w - views).squaredNorm();
        if (err < best) {
            best = err;
            best_w = w;
        }
    }
    p.gamma = std::min(best_w[0], bounds.hi.gamma);
    p.eta = std::min(best_w[1], bounds.hi.eta);
    p.alpha = std::min(best_w[2], bounds.hi.alpha);
}

} // namespace

FitResult fit(const Eigen::Ref<const Vector>& views_in, const Eigen::Ref<const Vector>& promotion_in,
              const FitOptions& opts)
{
    if (opts.fit_days < 1 || opts.fit_days > views_in.size())
        throw DomainError("hip::fit: fit_days must lie in [1, series length]");
    if (opts.restarts < 1)
        throw DomainError("hip::fit: need at least one restart");
    const Eigen::Index T = opts.fit_days;
    const Vector views = views_in.head(T);
    Vector promotion = Vector::Zero(T);
    const auto ns = std::min(T, promotion_in.size());
    promotion.head(ns) = promotion_in.head(ns);
    if ((views.array() < 0).any() || (promotion.array() < 0).any())
        throw DomainError("hip::fit: series must be nonnegative");
    const double norm = views.squaredNorm();
    if (!(norm > 0))
        throw DomainError("hip::fit: total views must be positive");

    const auto bounds = default_bounds(views);
    const double mean_views = views.mean();
    const double mean_promo = promotion.mean();
    Vector scale(6);
    scale << std::max(views.maxCoeff(), 1e-12), std::max(mean_views, 1e-12),
        mean_promo > 0 ? std::max(mean_views / mean_promo, 1e-12) : 1.0, 1.0, 1.0, 1.0;
    const Vector lo = bounds.lo.as_vector().cwiseQuotient(scale);
    const Vector hi = bounds.hi.as_vector().cwiseQuotient(scale);

    Matrix J;
    const optim::Objective objective = [&](const Vector& u, Vector& grad) {
        const auto p = HipParams::from_vector(u.cwiseProduct(scale));
        const Vector r = simulate(p, promotion, T, J) - views;
        grad = (2.0 / norm) * (J.transpose() * r).cwiseProduct(scale);
        return r.squaredNorm() / norm;
    };

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // best over converged restarts, with the overall incumbent as fallback
    FitResult best, incumbent;
    best.residual = incumbent.residual = std::numeric_limits<double>::infinity();
    int converged = 0;
    for (int r = 0; r < opts.restarts; ++r) {
        HipParams start;
        start.theta = draw_log_uniform(rng, 0.1, 3.0);
        start.c = draw_log_uniform(rng, 0.1, 30.0);
        const double branching = 0.9 * unit(rng);
        start.C = std::min(branching / kernel_mass(start.c, start.theta), bounds.hi.C);
        fit_linear_terms(start, views, promotion, T, bounds);

        const auto res = optim::minimize_box(objective, start.as_vector().cwiseQuotient(scale), lo, hi,
                                             opts.optimizer);
        const double sse = res.value * norm;
        const auto params = HipParams::from_vector(res.x.cwiseProduct(scale));
        if (sse < incumbent.residual) {
            incumbent.params = params;
            incumbent.residual = sse;
        }
        if (res.converged) {
            ++converged;
            if (sse < best.residual) {
                best.params = params;
                best.residual = sse;
            }
        }
    }
    auto finish = [&](FitResult& fr) {
        fr.restarts = opts.restarts;
        fr.converged_restarts = converged;
        fr.rel_rmse = std::sqrt(fr.residual / static_cast<double>(T)) / mean_views;
        fr.supercritical = branching_factor(fr.params) >= 1;
    };
    if (converged == 0) {
        finish(incumbent);
        throw FitError("hip::fit: optimizer did not converge in any restart", incumbent);
    }
    finish(best);
    return best;
}

} // namespace xpa::hip

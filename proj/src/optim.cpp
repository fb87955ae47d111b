#include "xpa/optim.hpp"

#include <cmath>
#include <deque>

namespace xpa::optim {

Vector project(const Vector& x, const Vector& lo, const Vector& hi)
{
    return x.cwiseMax(lo).cwiseMin(hi);
}

namespace {

// Components that are pinned at a bound with the gradient pushing outward.
Eigen::Array<bool, Eigen::Dynamic, 1> active_set(const Vector& x, const Vector& g, const Vector& lo,
                                                  const Vector& hi)
{
    return ((x.array() <= lo.array()) && (g.array() > 0)) || ((x.array() >= hi.array()) && (g.array() < 0));
}

struct Pair
{
    Vector s, y;
    double rho;
};

} // namespace

double projected_gradient_norm(const Vector& x, const Vector& g, const Vector& lo, const Vector& hi)
{
    const auto active = active_set(x, g, lo, hi);
    return active.select(Vector::Zero(g.size()), g).cwiseAbs().maxCoeff();
}

BoxLbfgsResult minimize_box(const Objective& f, Vector x0, const Vector& lo, const Vector& hi,
                            const BoxLbfgsOptions& opts)
{
    const auto n = x0.size();
    if (lo.size() != n || hi.size() != n || (lo.array() > hi.array()).any())
        throw DomainError("minimize_box: inconsistent bounds");

    BoxLbfgsResult res;
    Vector x = project(x0, lo, hi);
    Vector g(n);
    double fx = f(x, g);
    ++res.evaluations;
    if (!std::isfinite(fx))
        throw DomainError("minimize_box: objective is not finite at the starting point");

    std::deque<Pair> memory;
    Vector g_new(n);

    for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
        if (fx <= opts.fzero) {
            res.converged = true;
            res.reason = "exact fit";
            break;
        }
        const auto active = active_set(x, g, lo, hi);
        const Vector pg = active.select(Vector::Zero(n), g);
        if (pg.cwiseAbs().maxCoeff() < opts.pgtol) {
            res.converged = true;
            res.reason = "projected gradient below tolerance";
            break;
        }

        // two-loop recursion on the free subspace
        Vector q = pg;
        std::vector<double> alpha(memory.size());
        for (std::size_t i = memory.size(); i-- > 0;) {
            alpha[i] = memory[i].rho * memory[i].s.dot(q);
            q -= alpha[i] * memory[i].y;
            q = active.select(Vector::Zero(n), q);
        }
        if (!memory.empty()) {
            const auto& last = memory.back();
            q *= last.s.dot(last.y) / last.y.squaredNorm();
        } else {
            q /= std::max(1.0, pg.cwiseAbs().maxCoeff());
        }
        for (std::size_t i = 0; i < memory.size(); ++i) {
            const double beta = memory[i].rho * memory[i].y.dot(q);
            q += (alpha[i] - beta) * memory[i].s;
            q = active.select(Vector::Zero(n), q);
        }
        Vector d = -q;
        if (!(pg.dot(d) < 0)) {
            memory.clear();
            d = -pg / std::max(1.0, pg.cwiseAbs().maxCoeff());
        }

        double step = 1.0;
        Vector x_new;
        double f_new = 0;
        bool accepted = false;
        for (int k = 0; k < opts.max_backtracks; ++k) {
            x_new = project(x + step * d, lo, hi);
            f_new = f(x_new, g_new);
            ++res.evaluations;
            if (std::isfinite(f_new) && f_new <= fx + 1e-4 * g.dot(x_new - x)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (!memory.empty()) {
                memory.clear();
                continue;
            }
            res.converged = true;
            res.reason = "no further decrease along the projected gradient";
            break;
        }

        const Vector s = x_new - x;
        const Vector y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * y.squaredNorm() && sy > 0) {
            memory.push_back({s, y, 1.0 / sy});
            if (static_cast<int>(memory.size()) > opts.memory)
                memory.pop_front();
        }
        const double decrease = fx - f_new;
        x = x_new;
        g = g_new;
        const double prev = fx;
        fx = f_new;
        if (decrease <= opts.ftol * std::max({std::abs(prev), std::abs(fx), opts.fzero})) {
            res.converged = true;
            res.reason = "relative decrease below tolerance";
            ++res.iterations;
            break;
        }
    }
    if (!res.converged)
        res.reason = "iteration limit reached";
    res.x = x;
    res.value = fx;
    return res;
}

} // namespace xpa::optim
